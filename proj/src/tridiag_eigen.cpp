#include "mch/tridiag_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mch/errors.hpp"
#include "mch/numerics.hpp"

namespace mch {

using Eigen::Index;
using Eigen::VectorXd;

VectorXd SymTridiag::apply(const VectorXd& v) const {
  const Index n = size();
  VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    double s = diag[i] * v[i];
    if (i > 0) s += off[i - 1] * v[i - 1];
    if (i + 1 < n) s += off[i] * v[i + 1];
    out[i] = s;
  }
  return out;
}

std::pair<double, double> SymTridiag::gershgorin() const {
  const Index n = size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Index i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return {lo, hi};
}

double SymTridiag::norm_inf() const {
  const Index n = size();
  double m = 0.0;
  for (Index i = 0; i < n; ++i) {
    double r = std::abs(diag[i]);
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    m = std::max(m, r);
  }
  return m;
}

int eigenvalue_count_below(const SymTridiag& T, double x) {
  // Count negative pivots of the LDL^T factorization of T - x I.
  const Index n = T.size();
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double d = T.diag[0] - x;
  if (d < 0) ++count;
  for (Index i = 1; i < n; ++i) {
    if (std::abs(d) < tiny) d = (d < 0 ? -tiny : tiny);
    d = (T.diag[i] - x) - T.off[i - 1] * T.off[i - 1] / d;
    if (d < 0) ++count;
  }
  return count;
}

namespace {

double bisect_kth(const SymTridiag& T, int k, double lo, double hi) {
  // Smallest x with count(x) >= k+1, i.e. the (k+1)-th eigenvalue.
  const double scale = std::max(std::abs(lo), std::abs(hi)) + 1.0;
  while (hi - lo > 8.0 * std::numeric_limits<double>::epsilon() * scale) {
    const double mid = 0.5 * (lo + hi);
    if (eigenvalue_count_below(T, mid) >= k + 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

VectorXd inverse_iteration(const SymTridiag& T, double lambda,
                           const std::vector<VectorXd>& prior, double tol_abs,
                           double* residual_out) {
  const Index n = T.size();
  std::mt19937_64 rng(20240517);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = unif(rng);
  for (const auto& p : prior) v -= p.dot(v) * p;
  v.normalize();

  const VectorXd lower = T.off, upper = T.off;
  VectorXd diag_shift = T.diag.array() - lambda;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 12; ++it) {
    VectorXd w;
    try {
      w = tridiagonal_solve(lower, diag_shift, upper, v);
    } catch (const numerical_error&) {
      // exact singular shift: nudge and retry
      diag_shift.array() += 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(lambda));
      continue;
    }
    for (const auto& p : prior) w -= p.dot(w) * p;
    const double nw = w.norm();
    if (!(nw > 0.0) || !std::isfinite(nw)) continue;
    v = w / nw;
    res = (T.apply(v) - lambda * v).norm();
    if (res < tol_abs) break;
  }
  if (residual_out) *residual_out = res;
  return v;
}

}  // namespace

std::vector<double> lowest_eigenvalues(const SymTridiag& T, int n) {
  auto [lo, hi] = T.gershgorin();
  const int nmax = static_cast<int>(T.size());
  n = std::min(n, nmax);
  std::vector<double> vals(n);
  for (int k = 0; k < n; ++k) vals[k] = bisect_kth(T, k, lo, hi);
  return vals;
}

std::vector<EigenPair> lowest_eigenpairs(const SymTridiag& T, int n, double tol_rel) {
  const std::vector<double> vals = lowest_eigenvalues(T, n);
  const double tol_abs = tol_rel * T.norm_inf();
  std::vector<EigenPair> pairs;
  std::vector<VectorXd> prior;
  for (int k = 0; k < static_cast<int>(vals.size()); ++k) {
    EigenPair ep;
    ep.value = vals[k];
    // Orthogonalize only against near-degenerate neighbors.
    std::vector<VectorXd> nearby;
    for (int j = 0; j < k; ++j)
      if (std::abs(vals[j] - vals[k]) < 1e-6 * (1.0 + std::abs(vals[k])))
        nearby.push_back(prior[j]);
    ep.vector = inverse_iteration(T, ep.value, nearby, tol_abs, &ep.residual);
    if (!(ep.residual < tol_abs))
      throw numerical_error("lowest_eigenpairs: inverse iteration residual " +
                            std::to_string(ep.residual) + " exceeds tolerance " +
                            std::to_string(tol_abs));
    prior.push_back(ep.vector);
    pairs.push_back(std::move(ep));
  }
  return pairs;
}

}  // namespace mch
