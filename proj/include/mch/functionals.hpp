#pragma once

// Conserved functionals of the mCH flow in the momentum variable,
//   F1 = int (m - k),  F2 = int (1/m - 1/k),
//   F3 = int (m_x^2/m^5 + 1/(4m^3) - 1/(4k^3)),
// the action Lambda = F3 + omega1 F1 + omega2 F2 whose critical points are the
// solitary profiles, and the Vakhitov-Kolokolov quantity Q with its closed form.

#include <Eigen/Dense>

#include <string>

#include "mch/wave.hpp"

namespace mch {

struct ConservedTriple {
  double F1 = 0, F2 = 0, F3 = 0;
};

/// Quadrature of the three conserved integrals on a uniform decaying grid.
/// m_x is supplied by the caller (analytic, spectral, or finite-difference).
ConservedTriple conserved_integrals(const ArrayXd& m, const ArrayXd& m_x, double k, double dx,
                                    bool periodic = false);
/// Convenience overload: m_x by centered differences.
ConservedTriple conserved_integrals(const ArrayXd& m, double k, double dx);
/// On a wave profile the stored analytic mu_xi is used.
ConservedTriple conserved_integrals(const WaveProfile& w);
/// Richardson-extrapolated quadrature (oracle flag): eliminates the leading
/// Simpson error by combining the grid with its 2 dx coarsening.
ConservedTriple conserved_integrals_richardson(const WaveProfile& w);

enum class Functional { F1, F2, F3, CalF, CalG, Lambda };

/// Pointwise variational derivative of the chosen functional at the field m on
/// a uniform grid (m_x, m_xx by 2nd-order centered stencils, one-sided at the
/// ends). omega1/omega2 enter only for Lambda.
ArrayXd variational_derivative(Functional which, const ArrayXd& m, double dx,
                               const WaveParameters& p);

/// sup |dLambda/dm (mu)| over the profile grid, derivatives by the module's
/// finite-difference stencils (O(dx^2), dominated by the crest curvature).
double euler_lagrange_residual(const WaveProfile& w);

/// Same residual with the profile's analytic derivative chain
/// (mu_xi = 2 a^-1 phi_xi mu^3 and its exact xi-derivative); verifies the
/// variational characterization itself, independent of stencil error.
double euler_lagrange_residual_analytic(const WaveProfile& w);

/// Q by Simpson quadrature over the xi grid (integrand mu/k + k/mu - 2,
/// singularity-free form of the level-curve integral).
double vk_q_quadrature(const WaveProfile& w);

/// Closed forms: Q = 8 ln((sqrt(c-k^2)+sqrt(c-3k^2))/(sqrt(2) k)) - 8 kappa
/// and dQ/dk = -8c/(k(c-k^2)) * kappa.
double vk_q_closed_form(double c, double k);
double vk_dq_dk_closed_form(double c, double k);

struct FunctionalReport {
  double F1 = 0, F2 = 0, F3 = 0;
  double Lambda = 0;
  double calF = 0, calG = 0;
  double Q_quad = 0, Q_closed = 0, dQdk_closed = 0;
  double el_residual_sup = 0;
};

FunctionalReport functional_report(const WaveProfile& w);

/// JSON object with the report fields.
std::string functional_report_json(const WaveParameters& p, const FunctionalReport& r);
/// CSV row `c,k,Q_quad,Q_closed,dQdk,el_residual` (17 significant digits).
std::string functional_report_csv_row(const WaveParameters& p, const FunctionalReport& r);

}  // namespace mch
