#include "mch/numerics.hpp"

namespace mch {

ArrayXd derivative1(const ArrayXd& f, double dx) {
  const Index n = f.size();
  ArrayXd g(n);
  if (n < 3) throw validation_error("derivative1: need at least 3 samples");
  g.segment(1, n - 2) = (f.segment(2, n - 2) - f.segment(0, n - 2)) / (2.0 * dx);
  g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  g[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return g;
}

ArrayXd derivative2(const ArrayXd& f, double dx) {
  const Index n = f.size();
  ArrayXd g(n);
  if (n < 4) throw validation_error("derivative2: need at least 4 samples");
  const double h2 = dx * dx;
  g.segment(1, n - 2) =
      (f.segment(2, n - 2) - 2.0 * f.segment(1, n - 2) + f.segment(0, n - 2)) / h2;
  g[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  g[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return g;
}

ArrayXd derivative1_4th(const ArrayXd& f, double dx) {
  const Index n = f.size();
  if (n < 6) return derivative1(f, dx);
  ArrayXd g(n);
  g.segment(2, n - 4) = (f.segment(0, n - 4) - 8.0 * f.segment(1, n - 4) +
                         8.0 * f.segment(3, n - 4) - f.segment(4, n - 4)) /
                        (12.0 * dx);
  g[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dx);
  g[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * dx);
  g[n - 2] =
      -(-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]) /
      (12.0 * dx);
  g[n - 1] =
      -(-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]) /
      (12.0 * dx);
  return g;
}

ArrayXd derivative2_4th(const ArrayXd& f, double dx) {
  const Index n = f.size();
  if (n < 7) return derivative2(f, dx);
  ArrayXd g(n);
  const double h2 = 12.0 * dx * dx;
  g.segment(2, n - 4) = (-f.segment(0, n - 4) + 16.0 * f.segment(1, n - 4) -
                         30.0 * f.segment(2, n - 4) + 16.0 * f.segment(3, n - 4) -
                         f.segment(4, n - 4)) /
                        h2;
  g[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) / h2;
  g[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) / h2;
  g[n - 2] =
      (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] +
       f[n - 6]) /
      h2;
  g[n - 1] =
      (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] +
       61.0 * f[n - 5] - 10.0 * f[n - 6]) /
      h2;
  return g;
}

ArrayXd cumulative_integral(const ArrayXd& f, double dx) {
  const Index n = f.size();
  ArrayXd z = ArrayXd::Zero(n);
  if (n < 4) {
    for (Index j = 1; j < n; ++j) z[j] = z[j - 1] + 0.5 * dx * (f[j - 1] + f[j]);
    return z;
  }
  z[1] = dx / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (Index j = 2; j < n; ++j) {
    if (j == n - 1) {
      z[j] = z[j - 1] + dx / 24.0 * (9.0 * f[j] + 19.0 * f[j - 1] - 5.0 * f[j - 2] + f[j - 3]);
    } else {
      z[j] = z[j - 1] + dx / 24.0 * (-f[j - 2] + 13.0 * f[j - 1] + 13.0 * f[j] - f[j + 1]);
    }
  }
  return z;
}

VectorXd tridiagonal_solve(VectorXd lower, VectorXd diag, VectorXd upper, VectorXd rhs) {
  const Index n = diag.size();
  if (lower.size() != n - 1 || upper.size() != n - 1 || rhs.size() != n)
    throw validation_error("tridiagonal_solve: inconsistent sizes");
  // LU with partial pivoting between adjacent rows; fill-in is one extra band.
  VectorXd d = std::move(diag), l = std::move(lower), u = std::move(upper), b = std::move(rhs);
  VectorXd u2 = VectorXd::Zero(n);  // second superdiagonal created by pivoting
  for (Index i = 0; i < n - 1; ++i) {
    if (std::abs(l[i]) > std::abs(d[i])) {
      std::swap(d[i], l[i]);
      const double tu = u[i];
      u[i] = d[i + 1];
      d[i + 1] = tu;
      if (i + 2 < n) {
        u2[i] = u[i + 1];
        u[i + 1] = 0.0;
      }
      std::swap(b[i], b[i + 1]);
    }
    if (d[i] == 0.0) throw numerical_error("tridiagonal_solve: singular pivot");
    const double m = l[i] / d[i];
    d[i + 1] -= m * u[i];
    if (i + 2 < n) u[i + 1] -= m * u2[i];
    b[i + 1] -= m * b[i];
  }
  if (d[n - 1] == 0.0) throw numerical_error("tridiagonal_solve: singular pivot");
  VectorXd x(n);
  x[n - 1] = b[n - 1] / d[n - 1];
  if (n >= 2) x[n - 2] = (b[n - 2] - u[n - 2] * x[n - 1]) / d[n - 2];
  for (Index i = n - 3; i >= 0; --i)
    x[i] = (b[i] - u[i] * x[i + 1] - u2[i] * x[i + 2]) / d[i];
  return x;
}

ArrayXd helmholtz_dirichlet_solve(const ArrayXd& g, double dx) {
  const Index n = g.size();
  if (n < 3) throw validation_error("helmholtz_dirichlet_solve: grid too small");
  const Index m = n - 2;
  const double h2 = dx * dx;
  VectorXd lower = VectorXd::Constant(m - 1, 1.0 / h2);
  VectorXd upper = VectorXd::Constant(m - 1, 1.0 / h2);
  VectorXd diag = VectorXd::Constant(m, -2.0 / h2 - 1.0);
  VectorXd y = tridiagonal_solve(lower, diag, upper, g.segment(1, m).matrix());
  ArrayXd out = ArrayXd::Zero(n);
  out.segment(1, m) = y.array();
  return out;
}

}  // namespace mch
