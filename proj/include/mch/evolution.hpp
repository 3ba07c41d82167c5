#pragma once

// Pseudo-spectral time evolution of the mCH equation in momentum form,
//   m_t = -((u^2 - u_x^2) m)_x,  u = (1 - d_xx)^{-1} m,
// on a large periodic domain (2/3-rule dealiasing, adaptive-dt RK4), plus the
// orbital-distance diagnostics against the solitary-wave manifold.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "mch/fourier.hpp"
#include "mch/wave.hpp"

namespace mch {

struct MomentumField {
  double domain_length = 0;
  double k = 0;  // background
  ArrayXd m;

  Index size() const { return m.size(); }
  double dx() const { return domain_length / static_cast<double>(m.size()); }
};

struct EvolveConfig {
  double t_end = 10.0;
  double dt_cap = 0.01;
  double cfl = 0.5;
  double sample_interval = 0.1;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> F1, F2, F3;
  std::vector<double> d, r_star;  // orbital distance and optimal shift
  std::vector<double> min_m;
  std::vector<double> crest;  // crest location (sub-grid refined)
  MomentumField terminal;
  long steps = 0;
};

enum class PerturbationKind { None, Gaussian, TranslationMode, BandlimitedNoise };
PerturbationKind perturbation_kind_from_string(const std::string& s);

class EvolutionContext {
 public:
  /// Periodic grid of N points (power of two) over domain_length, background k.
  EvolutionContext(double domain_length, Index n, double k);

  const SpectralOps& ops() const { return ops_; }
  double background() const { return k_; }

  /// Wraps the solitary profile onto the periodic grid, crest at L_dom/2.
  MomentumField wrap_profile(const WaveParameters& p) const;

  ArrayXd helmholtz_inverse(const ArrayXd& m) const;
  /// Dealiased right-hand side -((u^2-u_x^2) m)_x; max |u^2-u_x^2| out for CFL.
  ArrayXd rhs(const ArrayXd& m, double* max_speed = nullptr) const;
  ArrayXd step(const ArrayXd& m, double dt) const;

  /// Reference profile for orbital-distance diagnostics.
  void set_reference(const ArrayXd& mu_wrapped);
  bool has_reference() const { return ref_set_; }
  /// min over translations r of ||m - mu(.-r)||_{H^1} (Parseval form, sub-grid
  /// refinement of the minimizer); returns {distance, r*}.
  std::pair<double, double> orbital_distance(const ArrayXd& m) const;

  MomentumField make_perturbation(const MomentumField& base, PerturbationKind kind, double eps,
                                  std::uint64_t seed = 1, double width = 1.0) const;

  Trajectory evolve(const MomentumField& m0, const EvolveConfig& cfg) const;

  /// Relative mismatch of int((m-k)^2 + m_x^2) against
  /// int((u-k)^2 + 3u_x^2 + 3u_xx^2 + u_xxx^2), both evaluated spectrally.
  double h1_h3_equivalence_check(const ArrayXd& m) const;

  /// Crest location with sub-grid parabolic refinement.
  double crest_position(const ArrayXd& m) const;

  /// F1, F2, F3 over one period (Simpson; spectral m_x).
  Eigen::Vector3d conserved_integrals_periodic(const ArrayXd& m) const;

 private:
  SpectralOps ops_;
  double k_;
  bool ref_set_ = false;
  ArrayXd ref_mu_;
  ArrayXcd ref_weight_hat_;  // (1 + kappa^2) conj(mu_hat)
  double ref_h1_sq_ = 0;
};

void write_trajectory_csv(const Trajectory& tr, const std::string& path);
void write_state_csv(const MomentumField& m, const std::string& path);

}  // namespace mch
