#pragma once

// Eigensolver for symmetric tridiagonal matrices: Sturm-sequence bisection for
// selected eigenvalues, inverse iteration for eigenvectors. Suited to the
// discretized Sturm-Liouville operators here (lowest few eigenvalues of
// N ~ 10^4 matrices).

#include <Eigen/Dense>

#include <vector>

namespace mch {

struct SymTridiag {
  Eigen::VectorXd diag;  // n
  Eigen::VectorXd off;   // n-1

  Eigen::Index size() const { return diag.size(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  /// Gershgorin bounds [lo, hi] on the spectrum.
  std::pair<double, double> gershgorin() const;
  /// Infinity norm (max absolute row sum).
  double norm_inf() const;
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;   // normalized, ||v||_2 = 1
  double residual = 0.0;    // ||A v - lambda v||_2
};

/// Number of eigenvalues strictly below x (Sturm sequence count).
int eigenvalue_count_below(const SymTridiag& T, double x);

/// The n smallest eigenvalues with orthonormal eigenvectors.
/// Contract: residual ||Av - lambda v|| < tol_rel * ||A||_inf for each pair.
std::vector<EigenPair> lowest_eigenpairs(const SymTridiag& T, int n, double tol_rel = 1e-10);

/// Eigenvalues only (bisection), no vectors.
std::vector<double> lowest_eigenvalues(const SymTridiag& T, int n);

}  // namespace mch
