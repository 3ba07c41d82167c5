#include "mch/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mch/errors.hpp"
#include "mch/functionals.hpp"
#include "mch/numerics.hpp"

namespace mch {

using Eigen::VectorXd;

VectorXd DiscreteOperator::apply(const ArrayXd& v) const {
  if (v.size() != n) throw validation_error("DiscreteOperator::apply: size mismatch");
  VectorXd out(n - 2);
  const double h2 = dx * dx;
  for (Index i = 1; i + 1 < n; ++i) {
    const double flux =
        -(p_half[i] * (v[i + 1] - v[i]) - p_half[i - 1] * (v[i] - v[i - 1])) / h2;
    out[i - 1] = flux + potential[i] * v[i];
  }
  return out;
}

DiscreteOperator assemble_hessian(const WaveProfile& w) {
  const WaveParameters& p = w.params;
  if (!(w.mu.minCoeff() > 0.0))
    throw validation_error("assemble_hessian: mu must be strictly positive");
  DiscreteOperator op;
  op.xi0 = w.xi[0];
  op.dx = w.dx;
  op.n = w.size();
  op.ess_edge = p.ess_edge;
  op.resolution_warning = w.dx * std::sqrt(p.ess_edge) > 0.5;

  const ArrayXd pcoef = w.mu.pow(-5);
  op.p_half = 0.5 * (pcoef.head(op.n - 1) + pcoef.tail(op.n - 1));
  // mu_xixi from the analytic chain (phi_xixi = phi - mu on the orbit).
  const ArrayXd muxx = w.mu_xixi();
  op.potential = 5.0 * muxx / w.mu.pow(6) - 15.0 * w.mu_xi.square() / w.mu.pow(7) +
                 1.5 / w.mu.pow(5) + p.omega2 / w.mu.pow(3);

  const Index m = op.n - 2;
  op.interior.diag.resize(m);
  op.interior.off.resize(m - 1);
  const double h2 = w.dx * w.dx;
  for (Index i = 0; i < m; ++i) {
    op.interior.diag[i] = (op.p_half[i] + op.p_half[i + 1]) / h2 + op.potential[i + 1];
    if (i + 1 < m) op.interior.off[i] = -op.p_half[i + 1] / h2;
  }
  return op;
}

SpectralReport spectral_report(const WaveProfile& w) {
  const DiscreteOperator op = assemble_hessian(w);
  SpectralReport r;
  r.ess_edge = op.ess_edge;
  r.tol_zero = 10.0 * w.dx * w.dx * op.ess_edge;
  r.n_below_edge = eigenvalue_count_below(op.interior, op.ess_edge);
  const int n_neg = eigenvalue_count_below(op.interior, -r.tol_zero);
  const int n_le_zero = eigenvalue_count_below(op.interior, r.tol_zero);
  r.n_negative = n_neg;
  r.n_zero = n_le_zero - n_neg;

  const int n_request = std::min(std::max(3, r.n_below_edge + 1), 8);
  const auto pairs = lowest_eigenpairs(op.interior, n_request);
  for (const auto& ep : pairs) r.eigenvalues.push_back(ep.value);

  // kernel candidate: first eigenvalue in [-tol_zero, tol_zero]
  r.kernel_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  r.kernel_correlation = 0.0;
  const VectorXd mu_xi_int = w.mu_xi.segment(1, op.n - 2).matrix();
  for (const auto& ep : pairs) {
    if (std::abs(ep.value) <= r.tol_zero) {
      r.kernel_eigenvalue = ep.value;
      r.kernel_correlation =
          std::abs(ep.vector.dot(mu_xi_int)) / (ep.vector.norm() * mu_xi_int.norm());
      break;
    }
  }
  r.gap_above_zero = std::numeric_limits<double>::quiet_NaN();
  for (const auto& ep : pairs)
    if (ep.value > r.tol_zero) {
      r.gap_above_zero = ep.value;
      break;
    }

  if (r.n_negative != 1)
    r.findings.push_back("expected exactly one eigenvalue below -tol_zero, found " +
                         std::to_string(r.n_negative));
  if (r.n_zero != 1)
    r.findings.push_back("expected exactly one eigenvalue in [-tol_zero, tol_zero], found " +
                         std::to_string(r.n_zero));
  if (r.n_zero == 1 && !(r.kernel_correlation > 0.999))
    r.findings.push_back("kernel eigenvector correlation with mu_xi is " +
                         std::to_string(r.kernel_correlation));
  r.ok = r.findings.empty();
  return r;
}

LiouvilleReport liouville_check(const WaveProfile& w, int n) {
  const WaveParameters& p = w.params;
  const Index c0 = w.center();
  const Index half = w.size() - 1 - c0;

  // z on [0, L]: dz/dxi = (mu/a)^{5/2}; strictly increasing.
  ArrayXd sigma(half + 1);
  for (Index j = 0; j <= half; ++j) {
    const double r = w.mu[c0 + j] / p.a;
    sigma[j] = r * r * std::sqrt(r);
  }
  const ArrayXd z = cumulative_integral(sigma, w.dx);
  const double zmax = z[half];
  const Index mz = half;
  const double dz = zmax / static_cast<double>(mz);

  // invert the monotone map z(xi) with local cubic Lagrange in z, then
  // evaluate phi, phi_xi at xi* the same way; mu and the transformed potential
  // follow from closed forms.
  auto lagrange4 = [](const double xs[4], const double ys[4], double x) {
    double out = 0.0;
    for (int i = 0; i < 4; ++i) {
      double term = ys[i];
      for (int j = 0; j < 4; ++j)
        if (j != i) term *= (x - xs[j]) / (xs[i] - xs[j]);
      out += term;
    }
    return out;
  };
  ArrayXd W(mz + 1);
  Index lo = 0;
  for (Index i = 0; i <= mz; ++i) {
    const double zi = std::min(static_cast<double>(i) * dz, zmax);
    while (lo + 1 < half && z[lo + 1] < zi) ++lo;
    const Index base = std::clamp<Index>(lo - 1, 0, half - 3);
    double zs[4], xs[4], fs[4], gs[4];
    for (int t = 0; t < 4; ++t) {
      zs[t] = z[base + t];
      xs[t] = w.xi[c0 + base + t];
      fs[t] = w.phi[c0 + base + t];
      gs[t] = w.phi_xi[c0 + base + t];
    }
    const double xstar = lagrange4(zs, xs, zi);
    const double phi = lagrange4(xs, fs, xstar);
    const double psi = lagrange4(xs, gs, xstar);
    const double rad = (p.c - p.k * p.k) - 4.0 * p.k * (phi - p.k);
    const double mu = p.k * std::sqrt((p.c - p.k * p.k) / rad);
    const double phixx = phi - mu;
    const double q = 7.5 / p.a * phixx / (mu * mu * mu) +
                     8.75 / (p.a * p.a) * psi * psi / mu;
    W[i] = 1.5 / std::pow(mu, 5) + p.omega2 / (mu * mu * mu) + q;
  }

  LiouvilleReport rep;
  rep.dz = dz;
  rep.q_at_ends = std::abs(W[mz] - (1.5 / std::pow(p.k, 5) + p.omega2 / std::pow(p.k, 3)));

  // mirror evenly onto [-zmax, zmax] and assemble the constant-coefficient
  // kinetic part a^-5 d^2/dz^2 with Dirichlet ends.
  const Index nfull = 2 * mz + 1;
  const Index mint = nfull - 2;
  SymTridiag A;
  A.diag.resize(mint);
  A.off = VectorXd::Constant(mint - 1, -std::pow(p.a, -5) / (dz * dz));
  for (Index i = 0; i < mint; ++i) {
    const Index j = i + 1;  // full-grid index
    const Index dist = std::abs(static_cast<long>(j) - static_cast<long>(mz));
    A.diag[i] = 2.0 * std::pow(p.a, -5) / (dz * dz) + W[dist];
  }

  const DiscreteOperator op = assemble_hessian(w);
  const std::vector<double> eL = lowest_eigenvalues(op.interior, n);
  const std::vector<double> eA = lowest_eigenvalues(A, n);
  rep.evals_L = eL;
  rep.evals_A = eA;
  for (int i = 0; i < n; ++i) {
    const double diff = std::abs(eL[i] - eA[i]);
    rep.max_abs_discrepancy = std::max(rep.max_abs_discrepancy, diff);
    rep.max_rel_discrepancy =
        std::max(rep.max_rel_discrepancy, diff / std::max({std::abs(eL[i]), std::abs(eA[i]), 1e-3}));
  }
  return rep;
}

VkReport vk_inner_product(const WaveProfile& w, double dk) {
  const WaveParameters& p = w.params;
  const DiscreteOperator op = assemble_hessian(w);
  const Index c0 = w.center();
  const Index M = w.size() - 1 - c0;  // half count

  const ArrayXd b_full = 1.0 / (p.k * p.k) - 1.0 / w.mu.square();
  // parity assertion: the right-hand side must be even for the folded solve
  double asym = 0.0;
  for (Index j = 1; j <= M; ++j)
    asym = std::max(asym, std::abs(b_full[c0 + j] - b_full[c0 - j]));
  if (asym > 1e-12 * std::max(1.0, b_full.abs().maxCoeff()))
    throw numerical_error("vk_inner_product: right-hand side is not even to tolerance");

  // Folded even-subspace system for the full Hessian H = 2L, symmetrized by
  // scaling the center unknown with 1/sqrt(2).
  const double h2 = w.dx * w.dx;
  const Index m = M;  // unknowns at xi = 0 .. L-dx
  SymTridiag T;
  T.diag.resize(m);
  T.off.resize(m - 1);
  for (Index j = 0; j < m; ++j) {
    const Index i = c0 + j;
    if (j == 0) {
      T.diag[0] = 2.0 * (2.0 * op.p_half[i] / h2 + op.potential[i]);
      T.off[0] = 2.0 * (-std::sqrt(2.0) * op.p_half[i] / h2);
    } else {
      T.diag[j] = 2.0 * ((op.p_half[i - 1] + op.p_half[i]) / h2 + op.potential[i]);
      if (j + 1 < m) T.off[j] = 2.0 * (-op.p_half[i] / h2);
    }
  }
  VectorXd rhs(m);
  for (Index j = 0; j < m; ++j) rhs[j] = b_full[c0 + j];
  rhs[0] /= std::sqrt(2.0);
  VectorXd sol = tridiagonal_solve(T.off, T.diag, T.off, rhs);
  sol[0] *= std::sqrt(2.0);

  VkReport r;
  r.dk = dk;
  double acc = 0.0;
  for (Index j = 1; j < m; ++j) acc += sol[j] * b_full[c0 + j];
  r.vk_value = w.dx * (sol[0] * b_full[c0] + 2.0 * acc);

  // condition estimate: ||T||_inf over the distance from 0 to the nearest
  // eigenvalue of the folded operator
  {
    auto [lo, hi] = T.gershgorin();
    const int below = eigenvalue_count_below(T, 0.0);
    const auto evs = lowest_eigenvalues(T, below + 1);
    double dist = std::numeric_limits<double>::infinity();
    if (below >= 1) dist = std::min(dist, std::abs(evs[below - 1]));
    if (below < static_cast<int>(evs.size())) dist = std::min(dist, std::abs(evs[below]));
    (void)lo;
    (void)hi;
    r.condition_estimate = T.norm_inf() / std::max(dist, 1e-300);
    r.condition_warning = r.condition_estimate > 1e10;
  }

  // cross-check route: (c-k^2)^2/(4c) * d/dk [ k calF(mu_k) ] by centered dk
  // on the same grid.
  const GridSpec grid{w.dx, w.half_length(), 0.0};
  auto kcalF = [&](double kk) {
    const WaveProfile wp = construct_profile(validate_parameters(p.c, kk), grid);
    const ConservedTriple f = conserved_integrals(wp);
    return kk * (f.F2 + f.F1 / (kk * kk));
  };
  const double gp = kcalF(p.k + dk), gm = kcalF(p.k - dk);
  r.vk_crosscheck = (p.c - p.k * p.k) * (p.c - p.k * p.k) / (4.0 * p.c) * (gp - gm) / (2.0 * dk);
  r.rel_difference = std::abs(r.vk_value - r.vk_crosscheck) /
                     std::max(std::abs(r.vk_crosscheck), 1e-300);
  return r;
}

namespace {

struct ChainTail {
  ArrayXd out;
  double zero_mean_defect = 0;
};

// stages 5..10 of the J chain, starting from s4
ChainTail chain_tail(const ArrayXd& m, const ArrayXd& s4, double dx) {
  const ArrayXd s5 = derivative1_4th(s4, dx);
  const ArrayXd s6 = helmholtz_dirichlet_solve(s5, dx);
  const ArrayXd s7 = m * s6;
  const ArrayXd S8 = cumulative_integral(s7, dx);
  const double defect = S8[S8.size() - 1];
  const ArrayXd s8 = S8 - defect;  // decay at +inf
  const ArrayXd s9 = m * s8;
  ChainTail t;
  t.out = derivative1_4th(s9, dx);
  t.zero_mean_defect = defect;
  return t;
}

double zero_mean_tolerance(const ArrayXd& integrand, double dx) {
  return 1e-5 * std::max(1.0, dx * integrand.abs().sum());
}

}  // namespace

CasimirApply casimir_apply(const ArrayXd& m, const ArrayXd& f, double /*k*/, double dx) {
  if (!(m.minCoeff() > 0.0))
    throw validation_error("casimir_apply: field must be strictly positive");
  const Index n = m.size();
  const ArrayXd s1 = derivative1_4th(f, dx);
  const ArrayXd s2 = m * s1;
  const ArrayXd S3 = cumulative_integral(s2, dx);
  const double defect3 = S3[n - 1];
  if (std::abs(defect3) > zero_mean_tolerance(s2, dx))
    throw numerical_error(
        "casimir_apply: zero-mean precondition failed at the first antiderivative stage "
        "(defect = " +
        std::to_string(defect3) + ")");
  const ArrayXd s3 = S3 - defect3;

  const ChainTail base = chain_tail(m, m * s3, dx);
  if (std::abs(base.zero_mean_defect) > zero_mean_tolerance(m * s3, dx))
    throw numerical_error(
        "casimir_apply: zero-mean precondition failed at the second antiderivative stage "
        "(defect = " +
        std::to_string(base.zero_mean_defect) + ")");

  // The two antiderivative constants are free branch parameters of the
  // nonlocal operator; their propagated directions are the tail chain applied
  // to a unit constant and d_x(m). Select the branch of minimum L2 norm.
  const ChainTail w3 = chain_tail(m, m * ArrayXd::Ones(n), dx);
  const ArrayXd w8 = derivative1_4th(m, dx);

  Eigen::MatrixXd A(n, 2);
  A.col(0) = w3.out.matrix();
  A.col(1) = w8.matrix();
  const Eigen::Vector2d coef =
      A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(-base.out.matrix());

  CasimirApply res;
  res.field = base.out + coef[0] * w3.out + coef[1] * w8;
  res.raw_sup = base.out.abs().maxCoeff();
  res.sup = res.field.abs().maxCoeff();
  return res;
}

CasimirReport casimir_residual(const ArrayXd& m, double k, double dx) {
  const ArrayXd f2 = -1.0 / m.square();
  const ArrayXd mx = derivative1_4th(m, dx);
  const ArrayXd mxx = derivative2_4th(m, dx);
  const ArrayXd f3 = -2.0 * mxx / m.pow(5) + 5.0 * mx.square() / m.pow(6) - 0.75 / m.pow(4);
  const CasimirApply a2 = casimir_apply(m, f2, k, dx);
  const CasimirApply a3 = casimir_apply(m, f3, k, dx);
  CasimirReport r;
  r.r2 = a2.sup;
  r.r3 = a3.sup;
  r.raw2 = a2.raw_sup;
  r.raw3 = a3.raw_sup;
  return r;
}

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string spectral_report_json(const WaveParameters& p, const SpectralReport& r) {
  std::ostringstream os;
  os << "{\n  \"c\": " << num(p.c) << ",\n  \"k\": " << num(p.k) << ",\n  \"eigenvalues\": [";
  for (size_t i = 0; i < r.eigenvalues.size(); ++i)
    os << (i ? ", " : "") << num(r.eigenvalues[i]);
  os << "],\n  \"ess_edge\": " << num(r.ess_edge) << ",\n  \"tol_zero\": " << num(r.tol_zero)
     << ",\n  \"n_below_edge\": " << r.n_below_edge << ",\n  \"n_negative\": " << r.n_negative
     << ",\n  \"n_zero\": " << r.n_zero
     << ",\n  \"kernel_eigenvalue\": " << num(r.kernel_eigenvalue)
     << ",\n  \"kernel_correlation\": " << num(r.kernel_correlation)
     << ",\n  \"gap_above_zero\": " << num(r.gap_above_zero) << ",\n  \"ok\": "
     << (r.ok ? "true" : "false") << ",\n  \"findings\": [";
  for (size_t i = 0; i < r.findings.size(); ++i)
    os << (i ? ", " : "") << '"' << r.findings[i] << '"';
  os << "]\n}\n";
  return os.str();
}

std::string eigenvalues_csv(const SpectralReport& r) {
  std::ostringstream os;
  os << "index,eigenvalue,below_edge\n";
  for (size_t i = 0; i < r.eigenvalues.size(); ++i)
    os << i << ',' << num(r.eigenvalues[i]) << ','
       << (r.eigenvalues[i] < r.ess_edge ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace mch
