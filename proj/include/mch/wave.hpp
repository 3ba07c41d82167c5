#pragma once

// Solitary-wave profile construction for the modified Camassa-Holm equation
// m_t + ((u^2 - u_x^2) m)_x = 0, m = u - u_xx, on background m -> k > 0.
// Traveling profiles u = phi(xi), xi = x - c t, satisfy
//     (phi - phi_xixi)(phi_xi^2 - phi^2 + c) = a,        a = k (c - k^2),
// with the first integral
//     (phi^2 - phi_xi^2)^2 - 2c (phi^2 - phi_xi^2) + 4 a phi = E = k^2 (2c - 3k^2),
// and the momentum profile mu = phi - phi_xixi = k sqrt((c-k^2)/(c+3k^2-4k phi)).

#include <Eigen/Dense>

#include <string>

namespace mch {

using Eigen::ArrayXd;
using Eigen::Index;

/// Wave speed, background level, and every derived constant of the family.
/// Smooth solitary waves exist iff c > 0 and sqrt(c)/3 < k < sqrt(3c)/3.
struct WaveParameters {
  double c = 0;            // wave speed
  double k = 0;            // background level of m
  double a = 0;            // profile ODE constant, k(c - k^2)
  double E = 0;            // level-set constant, k^2(2c - 3k^2)
  double phi_crest = 0;    // max of phi: sqrt(2(c-k^2)) - k
  double beta = 0;         // crest rescale factor (c - k^2)/(4k)
  double h = 0;            // rescaled constant 8k^2/(c - k^2), in (1,4)
  double phi0_rescaled = 0;  // rescaled crest (phi_crest - k)/beta, in (0,1)
  double omega1 = 0;       // Lagrange multiplier (c - 9k^2)/(4k^4(c - k^2))
  double omega2 = 0;       // Lagrange multiplier -(c + 3k^2)/(2k^2(c - k^2))
  double mu_max = 0;       // sup of mu: k sqrt(c-k^2)/(2 sqrt2 k - sqrt(c-k^2))
  double ess_edge = 0;     // essential-spectrum edge (c - 3k^2)/(k^5(c - k^2))
  double kappa = 0;        // tail decay rate sqrt((c - 3k^2)/(c - k^2))

  double window_left() const;   // sqrt(c)/3
  double window_right() const;  // sqrt(3c)/3
};

/// Validates (c, k) against the admissibility window (both bounds strict) and
/// fills in every derived constant. Throws validation_error naming the
/// violated bound otherwise.
WaveParameters validate_parameters(double c, double k);

/// psi^2 on the homoclinic level curve ("+" branch):
/// psi^2 = phi^2 - c + sqrt((c-k^2)(c+3k^2-4k phi)).
/// Throws numerical_error if the radicand is negative.
double level_curve_psi2(double phi, const WaveParameters& p);

/// Grid request for construct_profile. Unset fields get defaults:
/// dx = 0.01 min(1, 1/kappa); half_length = max(30, 30/kappa). If tail_tol is
/// set (and half_length is not), the half length is chosen from the decay rate
/// and the achieved tail error is checked against it.
struct GridSpec {
  double dx = 0.0;
  double half_length = 0.0;
  double tail_tol = 0.0;
};

struct WaveProfile {
  WaveParameters params;
  double dx = 0;
  ArrayXd xi;      // uniform symmetric grid [-L, L], odd point count
  ArrayXd phi;     // even
  ArrayXd phi_xi;  // odd
  ArrayXd mu;      // even, from mu = k sqrt((c-k^2)/(c+3k^2-4k phi))
  ArrayXd mu_xi;   // odd, from mu_xi = 2 a^-1 phi_xi mu^3
  double tail_error = 0;  // |phi(L) - k|

  Index size() const { return xi.size(); }
  Index center() const { return (xi.size() - 1) / 2; }
  double half_length() const { return xi[xi.size() - 1]; }
  /// phi_xixi = phi - mu (exact on the orbit).
  ArrayXd phi_xixi() const { return phi - mu; }
  /// mu_xixi = 2 a^-1 phi_xixi mu^3 + 12 a^-2 phi_xi^2 mu^5 (analytic chain).
  ArrayXd mu_xixi() const;
};

/// Integrates the profile ODE from the crest (phi_crest, 0) with fixed-step
/// RK4 in the shifted variables (phi - k, phi_xi), projecting each step onto
/// the conserved level curve, then extends evenly to [-L, L].
WaveProfile construct_profile(const WaveParameters& p, GridSpec grid = {});

/// Samples (phi - k, phi_xi) at xi = j*spacing, j = 0..count-1, integrating
/// with `substeps` RK4 sub-steps per sample. Backbone of both
/// construct_profile and the periodic wrap used by the evolution module.
void sample_half_profile(const WaveParameters& p, double spacing, Index count, int substeps,
                         ArrayXd& delta_out, ArrayXd& psi_out);

struct ProfileResiduals {
  double ode = 0;      // sup |(phi - phi_xixi)(phi_xi^2 - phi^2 + c) - a|, FD phi_xixi
  double level_set = 0;  // sup |(phi^2-phi_xi^2)^2 - 2c(phi^2-phi_xi^2) + 4a phi - E|
  double mu_consistency = 0;  // sup |mu - (phi - phi_xixi)|, FD phi_xixi
};

ProfileResiduals profile_residuals(const WaveProfile& w);

/// Constructs profiles at (c,k) and (lambda^2 c, lambda k) on the same grid and
/// returns sup |phi_scaled(xi) - lambda phi(xi)| (zero up to discretization by
/// the scaling symmetry of the profile equation).
double scaling_covariance_check(const WaveParameters& p, double lambda, GridSpec grid = {});

/// Least-squares fit of the tail decay exponent over the decade
/// |phi - k| in [floor, 10*floor]; compare against params.kappa.
double fit_tail_decay_rate(const WaveProfile& w, double floor = 1e-9);

/// CSV export: header xi,phi,phi_xi,mu,mu_xi; 17 significant digits.
void write_profile_csv(const WaveProfile& w, const std::string& path);

}  // namespace mch
