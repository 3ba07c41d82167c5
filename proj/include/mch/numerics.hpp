#pragma once

// Grid-function kernels shared by all modules: quadrature, finite-difference
// stencils on uniform grids, and tridiagonal solves. Free functions over Eigen
// arrays, templated on scalar.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "mch/errors.hpp"

namespace mch {

using Eigen::ArrayXd;
using Eigen::Index;
using Eigen::VectorXd;

/// Composite Simpson rule on a uniform grid (n-1 intervals). Falls back to a
/// 3/8 closure on the last three intervals when the interval count is odd.
template <typename Derived>
typename Derived::Scalar simpson(const Eigen::ArrayBase<Derived>& f, double dx) {
  using S = typename Derived::Scalar;
  const Index n = f.size();
  if (n < 2) return S(0);
  if (n == 2) return S(0.5) * dx * (f[0] + f[1]);
  Index m = n;                       // nodes covered by plain Simpson
  S tail = S(0);
  if ((n - 1) % 2 != 0) {            // odd interval count: 3/8 rule on the last 3
    if (n < 4) return S(0.5) * dx * (f[0] + f[1]);  // n == 3 cannot happen here
    m = n - 3;
    tail = S(3.0 / 8.0) * dx * (f[n - 4] + S(3) * f[n - 3] + S(3) * f[n - 2] + f[n - 1]);
    if (m == 1) return tail;
  }
  S odd = S(0), even = S(0);
  for (Index i = 1; i + 1 < m; i += 2) odd += f[i];
  for (Index i = 2; i + 1 < m; i += 2) even += f[i];
  return dx / S(3) * (f[0] + f[m - 1] + S(4) * odd + S(2) * even) + tail;
}

/// Simpson rule over one period of a periodic grid (f has N samples, period N*dx).
template <typename Derived>
typename Derived::Scalar simpson_periodic(const Eigen::ArrayBase<Derived>& f, double dx) {
  using S = typename Derived::Scalar;
  const Index n = f.size();
  S odd = S(0), even = S(0);
  for (Index i = 1; i < n; i += 2) odd += f[i];
  for (Index i = 2; i < n; i += 2) even += f[i];
  return dx / S(3) * (S(2) * f[0] + S(4) * odd + S(2) * even);
}

/// Centered first derivative, 2nd-order one-sided closures at the ends.
ArrayXd derivative1(const ArrayXd& f, double dx);
/// Centered second derivative, 2nd-order one-sided closures at the ends.
ArrayXd derivative2(const ArrayXd& f, double dx);
/// 4th-order interior stencils (one-sided 4th-order closures at the ends).
ArrayXd derivative1_4th(const ArrayXd& f, double dx);
ArrayXd derivative2_4th(const ArrayXd& f, double dx);

/// Cumulative integral from the left end, 4th-order (Adams-Moulton style
/// three-interval corrector on interior nodes).
ArrayXd cumulative_integral(const ArrayXd& f, double dx);

/// Solve a tridiagonal system with partial pivoting. lower/upper have size n-1.
VectorXd tridiagonal_solve(VectorXd lower, VectorXd diag, VectorXd upper, VectorXd rhs);

/// Solve (d^2/dx^2 - 1) y = g on a uniform grid with y = 0 at both ends.
ArrayXd helmholtz_dirichlet_solve(const ArrayXd& g, double dx);

}  // namespace mch
