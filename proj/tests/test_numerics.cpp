#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "mch/numerics.hpp"
#include "mch/tridiag_eigen.hpp"

using namespace mch;

TEST_CASE("simpson integrates polynomials and smooth decaying integrands") {
  const int n = 401;
  const double dx = 0.01;
  ArrayXd x(n), f(n);
  for (int i = 0; i < n; ++i) {
    x[i] = -2.0 + i * dx;
    f[i] = x[i] * x[i] * x[i] - 2.0 * x[i] + 1.0;
  }
  // int_{-2}^{2} (x^3 - 2x + 1) dx = 4; Simpson is exact on cubics
  CHECK(simpson(f, dx) == doctest::Approx(4.0).epsilon(1e-14));

  // int_{-2}^{2} exp(-x^2) dx = sqrt(pi) erf(2)
  ArrayXd g = (-x.square()).exp();
  CHECK(simpson(g, dx) == doctest::Approx(1.7641627815248441).epsilon(1e-8));
}

TEST_CASE("derivative stencils converge at their stated orders") {
  auto run = [](double dx) {
    const int n = static_cast<int>(std::round(2.0 / dx)) + 1;
    ArrayXd x(n);
    for (int i = 0; i < n; ++i) x[i] = -1.0 + i * dx;
    const ArrayXd f = (2.0 * x).sin();
    const ArrayXd d1e = 2.0 * (2.0 * x).cos();
    const ArrayXd d2e = -4.0 * (2.0 * x).sin();
    const double e1 = (derivative1(f, dx) - d1e).abs().maxCoeff();
    const double e2 = (derivative2(f, dx) - d2e).abs().maxCoeff();
    const double e14 = (derivative1_4th(f, dx) - d1e).abs().maxCoeff();
    const double e24 = (derivative2_4th(f, dx) - d2e).abs().maxCoeff();
    return std::array<double, 4>{e1, e2, e14, e24};
  };
  const auto c = run(0.01), f = run(0.005);
  CHECK(c[0] / f[0] == doctest::Approx(4.0).epsilon(0.15));
  CHECK(c[1] / f[1] == doctest::Approx(4.0).epsilon(0.15));
  CHECK(c[2] / f[2] == doctest::Approx(16.0).epsilon(0.25));
  CHECK(c[3] / f[3] == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("cumulative integral is 4th order") {
  auto err = [](double dx) {
    const int n = static_cast<int>(std::round(3.0 / dx)) + 1;
    ArrayXd x(n);
    for (int i = 0; i < n; ++i) x[i] = i * dx;
    const ArrayXd f = x.cos();
    const ArrayXd F = cumulative_integral(f, dx);
    return (F - x.sin()).abs().maxCoeff();
  };
  const double e1 = err(0.01), e2 = err(0.005);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 < 1e-8);
}

TEST_CASE("tridiagonal solve with pivoting handles indefinite systems") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int n = 50;
  VectorXd lower(n - 1), diag(n), upper(n - 1), xref(n);
  for (int i = 0; i < n; ++i) {
    diag[i] = unif(rng);  // not diagonally dominant
    xref[i] = unif(rng);
  }
  for (int i = 0; i < n - 1; ++i) {
    lower[i] = unif(rng);
    upper[i] = unif(rng);
  }
  VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    rhs[i] = diag[i] * xref[i];
    if (i > 0) rhs[i] += lower[i - 1] * xref[i - 1];
    if (i + 1 < n) rhs[i] += upper[i] * xref[i + 1];
  }
  const VectorXd x = tridiagonal_solve(lower, diag, upper, rhs);
  CHECK((x - xref).norm() < 1e-10 * xref.norm());
}

TEST_CASE("helmholtz dirichlet solve matches a decaying analytic solution") {
  // y = exp(-x^2): y'' - y = (4x^2 - 3) exp(-x^2)
  const double dx = 0.01;
  const int n = static_cast<int>(std::round(32.0 / dx)) + 1;
  ArrayXd x(n);
  for (int i = 0; i < n; ++i) x[i] = -16.0 + i * dx;
  const ArrayXd g = (4.0 * x.square() - 3.0) * (-x.square()).exp();
  const ArrayXd y = helmholtz_dirichlet_solve(g, dx);
  CHECK((y - (-x.square()).exp()).abs().maxCoeff() < 5e-5);
}

TEST_CASE("sturm bisection reproduces the Dirichlet Laplacian spectrum") {
  // -d^2/dx^2 on [-pi/2, pi/2], eigenvalues n^2
  const double L = std::numbers::pi / 2.0;
  const int half = 2000;
  const double dx = L / half;
  const int m = 2 * half - 1;
  SymTridiag T;
  T.diag = VectorXd::Constant(m, 2.0 / (dx * dx));
  T.off = VectorXd::Constant(m - 1, -1.0 / (dx * dx));
  const auto pairs = lowest_eigenpairs(T, 4);
  for (int j = 0; j < 4; ++j) {
    const double exact = static_cast<double>((j + 1) * (j + 1));
    CHECK(std::abs(pairs[j].value - exact) < 5.0 * dx * dx * exact * exact);
    CHECK(pairs[j].residual < 1e-10 * T.norm_inf());
  }
  CHECK(eigenvalue_count_below(T, 10.0) == 3);  // 1, 4, 9 < 10
}

TEST_CASE("sturm bisection agrees with Eigen's dense tridiagonal solver") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  const int n = 200;
  SymTridiag T;
  T.diag.resize(n);
  T.off.resize(n - 1);
  for (int i = 0; i < n; ++i) T.diag[i] = unif(rng);
  for (int i = 0; i < n - 1; ++i) T.off[i] = unif(rng);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    A(i, i) = T.diag[i];
    if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = T.off[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const auto mine = lowest_eigenpairs(T, 6);
  for (int j = 0; j < 6; ++j) {
    CHECK(mine[j].value == doctest::Approx(es.eigenvalues()[j]).epsilon(1e-11));
    // eigenvector agreement up to sign
    const VectorXd ref = es.eigenvectors().col(j);
    const double overlap = std::abs(mine[j].vector.dot(ref));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-8));
  }
}
