#include "mch/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "mch/errors.hpp"
#include "mch/functionals.hpp"
#include "mch/numerics.hpp"

namespace mch {

PerturbationKind perturbation_kind_from_string(const std::string& s) {
  if (s == "none") return PerturbationKind::None;
  if (s == "gaussian") return PerturbationKind::Gaussian;
  if (s == "translation_mode") return PerturbationKind::TranslationMode;
  if (s == "bandlimited_noise") return PerturbationKind::BandlimitedNoise;
  throw validation_error("unknown perturbation kind: " + s);
}

EvolutionContext::EvolutionContext(double domain_length, Index n, double k)
    : ops_(domain_length, n), k_(k) {
  if (!(k > 0.0)) throw validation_error("EvolutionContext: background k must be positive");
}

MomentumField EvolutionContext::wrap_profile(const WaveParameters& p) const {
  const Index n = ops_.size();
  const double dxg = ops_.dx();
  const int substeps = std::max(1, static_cast<int>(std::ceil(dxg / 0.002)));
  ArrayXd delta, psi;
  sample_half_profile(p, dxg, n / 2 + 1, substeps, delta, psi);
  MomentumField f;
  f.domain_length = ops_.domain_length();
  f.k = p.k;
  f.m.resize(n);
  const double ck2 = p.c - p.k * p.k;
  const Index c0 = n / 2;  // crest index
  for (Index j = 0; j <= n / 2; ++j) {
    const double mu = p.k * std::sqrt(ck2 / (ck2 - 4.0 * p.k * delta[j]));
    f.m[(c0 + j) % n] = mu;
    f.m[c0 - j] = mu;
  }
  return f;
}

ArrayXd EvolutionContext::helmholtz_inverse(const ArrayXd& m) const {
  return ops_.helmholtz_inverse(m);
}

ArrayXd EvolutionContext::rhs(const ArrayXd& m, double* max_speed) const {
  ArrayXcd mh = ops_.forward(m);
  ops_.dealias(mh);
  const ArrayXd kap = ops_.wavenumbers();
  const ArrayXcd uh = mh / (1.0 + kap * kap).cast<std::complex<double>>();
  const ArrayXd mf = ops_.inverse(mh);
  const ArrayXd u = ops_.inverse(uh);
  ArrayXcd uxh(uh.size());
  const std::complex<double> I(0.0, 1.0);
  for (Index j = 0; j < uh.size(); ++j) uxh[j] = I * kap[j] * uh[j];
  uxh[uh.size() / 2] = 0.0;
  const ArrayXd ux = ops_.inverse(uxh);
  const ArrayXd speed = u.square() - ux.square();
  if (max_speed) *max_speed = speed.abs().maxCoeff();
  const ArrayXd g = speed * mf;
  ArrayXcd gh = ops_.forward(g);
  ops_.dealias(gh);
  for (Index j = 0; j < gh.size(); ++j) gh[j] *= -I * kap[j];
  gh[gh.size() / 2] = 0.0;
  ArrayXd out = ops_.inverse(gh);
  if (!out.allFinite())
    throw numerical_error("rhs: non-finite value encountered (blow-up)");
  return out;
}

ArrayXd EvolutionContext::step(const ArrayXd& m, double dt) const {
  const ArrayXd k1 = rhs(m);
  const ArrayXd k2 = rhs(m + 0.5 * dt * k1);
  const ArrayXd k3 = rhs(m + 0.5 * dt * k2);
  const ArrayXd k4 = rhs(m + dt * k3);
  return m + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void EvolutionContext::set_reference(const ArrayXd& mu_wrapped) {
  ref_mu_ = mu_wrapped;
  const ArrayXcd mh = ops_.forward(mu_wrapped - k_);
  const ArrayXd kap = ops_.wavenumbers();
  ref_weight_hat_ = (1.0 + kap * kap).cast<std::complex<double>>() * mh.conjugate();
  ref_h1_sq_ = ops_.h1_norm_sq(mu_wrapped - k_);
  ref_set_ = true;
}

std::pair<double, double> EvolutionContext::orbital_distance(const ArrayXd& m) const {
  if (!ref_set_) throw validation_error("orbital_distance: reference profile not set");
  const Index n = ops_.size();
  const double dxg = ops_.dx();
  const ArrayXcd mh = ops_.forward(m - k_);
  const ArrayXcd X = ref_weight_hat_ * mh;
  // C[s] = <m-k, (mu-k)(. - s dx)>_{H^1} for all grid shifts, via one inverse FFT
  const ArrayXd C = dxg * ops_.inverse(X);
  const double nm2 = dxg / static_cast<double>(n) * mh.abs2().matrix().dot(
                         (1.0 + ops_.wavenumbers() * ops_.wavenumbers()).matrix());
  ArrayXd d2 = nm2 + ref_h1_sq_ - 2.0 * C;
  Index s = 0;
  d2.minCoeff(&s);

  const ArrayXd kap = ops_.wavenumbers();
  auto d2_at = [&](double r) {
    std::complex<double> acc(0.0, 0.0);
    const std::complex<double> I(0.0, 1.0);
    for (Index j = 0; j < n; ++j) acc += X[j] * std::exp(I * kap[j] * r);
    const double cr = dxg / static_cast<double>(n) * acc.real();
    return nm2 + ref_h1_sq_ - 2.0 * cr;
  };
  double r = static_cast<double>(s) * dxg;
  double h = dxg;
  for (int pass = 0; pass < 5; ++pass) {
    const double dm = d2_at(r - h), d0 = d2_at(r), dp = d2_at(r + h);
    const double den = dm - 2.0 * d0 + dp;
    if (den > 0.0) r += 0.5 * h * (dm - dp) / den;
    h *= 0.25;
  }
  const double d2r = d2_at(r);
  // report the shift inside [0, L)
  double rr = std::fmod(r, ops_.domain_length());
  if (rr < 0) rr += ops_.domain_length();
  return {std::sqrt(std::max(d2r, 0.0)), rr};
}

MomentumField EvolutionContext::make_perturbation(const MomentumField& base,
                                                  PerturbationKind kind, double eps,
                                                  std::uint64_t seed, double width) const {
  MomentumField out = base;
  if (kind == PerturbationKind::None || eps == 0.0) return out;
  const Index n = ops_.size();
  const double L = ops_.domain_length();
  ArrayXd dm(n);
  switch (kind) {
    case PerturbationKind::Gaussian: {
      const double x0 = 0.5 * L;  // at the crest of the wrapped profile
      for (Index i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * ops_.dx();
        dm[i] = std::exp(-(x - x0) * (x - x0) / (2.0 * width * width));
      }
      break;
    }
    case PerturbationKind::TranslationMode:
      dm = ops_.derivative(base.m, 1);
      break;
    case PerturbationKind::BandlimitedNoise: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unif(-1.0, 1.0);
      const double kband = 2.0;
      dm.setZero();
      const ArrayXd kap = ops_.wavenumbers();
      // real random field from low modes: sum a_j cos(kappa_j x) + b_j sin(kappa_j x)
      for (Index j = 1; j <= n / 2; ++j) {
        if (std::abs(kap[j]) > kband) break;
        const double aj = unif(rng), bj = unif(rng);
        for (Index i = 0; i < n; ++i) {
          const double x = static_cast<double>(i) * ops_.dx();
          dm[i] += aj * std::cos(kap[j] * x) + bj * std::sin(kap[j] * x);
        }
      }
      break;
    }
    default:
      throw validation_error("make_perturbation: unsupported kind");
  }
  const double nh1 = std::sqrt(ops_.h1_norm_sq(dm));
  if (!(nh1 > 0.0)) throw numerical_error("make_perturbation: zero perturbation direction");
  out.m = base.m + dm * (eps / nh1);
  if (!(out.m.minCoeff() > 0.0))
    throw validation_error("make_perturbation: requested amplitude violates positivity of m");
  return out;
}

Eigen::Vector3d EvolutionContext::conserved_integrals_periodic(const ArrayXd& m) const {
  const ArrayXd mx = ops_.derivative(m, 1);
  const ConservedTriple f = conserved_integrals(m, mx, k_, ops_.dx(), /*periodic=*/true);
  return {f.F1, f.F2, f.F3};
}

Trajectory EvolutionContext::evolve(const MomentumField& m0, const EvolveConfig& cfg) const {
  if (m0.size() != ops_.size())
    throw validation_error("evolve: field size does not match the context grid");
  Trajectory tr;
  ArrayXd m = m0.m;
  double t = 0.0;
  double next_sample = 0.0;
  const double teps = 1e-12;
  while (true) {
    const double minm = m.minCoeff();
    if (!(minm > 0.0))
      throw numerical_error("evolve: positivity of m lost at t = " + std::to_string(t) +
                            " (X_k violation; the continuum flow preserves the sign, so this "
                            "indicates numerical error)");
    if (t >= next_sample - teps) {
      const Eigen::Vector3d f = conserved_integrals_periodic(m);
      tr.t.push_back(t);
      tr.F1.push_back(f[0]);
      tr.F2.push_back(f[1]);
      tr.F3.push_back(f[2]);
      if (ref_set_) {
        const auto [dd, rr] = orbital_distance(m);
        tr.d.push_back(dd);
        tr.r_star.push_back(rr);
      } else {
        tr.d.push_back(0.0);
        tr.r_star.push_back(0.0);
      }
      tr.min_m.push_back(minm);
      tr.crest.push_back(crest_position(m));
      next_sample += cfg.sample_interval;
    }
    if (t >= cfg.t_end - teps) break;
    double max_speed = 0.0;
    const ArrayXd k1 = rhs(m, &max_speed);
    double dt = std::min(cfg.dt_cap, cfg.cfl * ops_.dx() / std::max(max_speed, 1e-12));
    dt = std::min(dt, std::min(cfg.t_end, next_sample) - t);
    if (dt <= 0.0) dt = teps;
    const ArrayXd k2 = rhs(m + 0.5 * dt * k1);
    const ArrayXd k3 = rhs(m + 0.5 * dt * k2);
    const ArrayXd k4 = rhs(m + dt * k3);
    m += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!m.allFinite()) throw numerical_error("evolve: blow-up at t = " + std::to_string(t));
    t += dt;
    ++tr.steps;
  }
  tr.terminal.domain_length = ops_.domain_length();
  tr.terminal.k = k_;
  tr.terminal.m = m;
  return tr;
}

double EvolutionContext::h1_h3_equivalence_check(const ArrayXd& m) const {
  const ArrayXd dm = m - k_;
  const double lhs = ops_.h1_norm_sq(dm);
  const ArrayXd u = ops_.helmholtz_inverse(dm);  // u - k
  const ArrayXd ux = ops_.derivative(u, 1);
  const ArrayXd uxx = ops_.derivative(u, 2);
  const ArrayXd uxxx = ops_.derivative(u, 3);
  // rectangle rule: the Parseval-consistent quadrature on a periodic grid
  const double rhs_val =
      ops_.dx() * (u.square() + 3.0 * ux.square() + 3.0 * uxx.square() + uxxx.square()).sum();
  return std::abs(lhs - rhs_val) / std::max(lhs, 1e-300);
}

double EvolutionContext::crest_position(const ArrayXd& m) const {
  const Index n = ops_.size();
  Index s = 0;
  m.maxCoeff(&s);
  const double dm = m[(s - 1 + n) % n], d0 = m[s], dp = m[(s + 1) % n];
  const double den = dm - 2.0 * d0 + dp;
  const double delta = (den != 0.0) ? 0.5 * (dm - dp) / den : 0.0;
  return (static_cast<double>(s) + delta) * ops_.dx();
}

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw numerical_error("write_trajectory_csv: cannot open " + path);
  os << "t,F1,F2,F3,d,r_star,min_m\n";
  for (size_t i = 0; i < tr.t.size(); ++i)
    os << num(tr.t[i]) << ',' << num(tr.F1[i]) << ',' << num(tr.F2[i]) << ',' << num(tr.F3[i])
       << ',' << num(tr.d[i]) << ',' << num(tr.r_star[i]) << ',' << num(tr.min_m[i]) << '\n';
}

void write_state_csv(const MomentumField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw numerical_error("write_state_csv: cannot open " + path);
  os << "x,m\n";
  for (Index i = 0; i < f.size(); ++i)
    os << num(static_cast<double>(i) * f.dx()) << ',' << num(f.m[i]) << '\n';
}

}  // namespace mch
