#include "mch/functionals.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "mch/errors.hpp"
#include "mch/numerics.hpp"

namespace mch {

namespace {

void require_positive(const ArrayXd& m, const char* who) {
  if (!(m.minCoeff() > 0.0))
    throw validation_error(std::string(who) + ": field must be strictly positive (outside X_k)");
}

}  // namespace

ConservedTriple conserved_integrals(const ArrayXd& m, const ArrayXd& m_x, double k, double dx,
                                    bool periodic) {
  require_positive(m, "conserved_integrals");
  ConservedTriple f;
  // Background subtraction happens inside each integrand.
  const ArrayXd g1 = m - k;
  const ArrayXd g2 = 1.0 / m - 1.0 / k;
  const ArrayXd g3 =
      m_x.square() / m.pow(5) + 0.25 / m.pow(3) - 0.25 / (k * k * k);
  if (periodic) {
    f.F1 = simpson_periodic(g1, dx);
    f.F2 = simpson_periodic(g2, dx);
    f.F3 = simpson_periodic(g3, dx);
  } else {
    f.F1 = simpson(g1, dx);
    f.F2 = simpson(g2, dx);
    f.F3 = simpson(g3, dx);
  }
  return f;
}

ConservedTriple conserved_integrals(const ArrayXd& m, double k, double dx) {
  return conserved_integrals(m, derivative1(m, dx), k, dx, false);
}

ConservedTriple conserved_integrals(const WaveProfile& w) {
  return conserved_integrals(w.mu, w.mu_xi, w.params.k, w.dx, false);
}

ConservedTriple conserved_integrals_richardson(const WaveProfile& w) {
  const ConservedTriple fine = conserved_integrals(w);
  const Index n = w.size();
  const Index nc = (n + 1) / 2;  // every other node; odd count keeps both ends
  ArrayXd mu_c(nc), mux_c(nc);
  for (Index i = 0; i < nc; ++i) {
    mu_c[i] = w.mu[2 * i];
    mux_c[i] = w.mu_xi[2 * i];
  }
  const ConservedTriple coarse =
      conserved_integrals(mu_c, mux_c, w.params.k, 2.0 * w.dx, false);
  ConservedTriple out;
  out.F1 = (16.0 * fine.F1 - coarse.F1) / 15.0;
  out.F2 = (16.0 * fine.F2 - coarse.F2) / 15.0;
  out.F3 = (16.0 * fine.F3 - coarse.F3) / 15.0;
  return out;
}

ArrayXd variational_derivative(Functional which, const ArrayXd& m, double dx,
                               const WaveParameters& p) {
  require_positive(m, "variational_derivative");
  const double k = p.k;
  switch (which) {
    case Functional::F1:
      return ArrayXd::Ones(m.size());
    case Functional::F2:
      return -1.0 / m.square();
    case Functional::CalF:
      return 1.0 / (k * k) - 1.0 / m.square();
    default:
      break;
  }
  const ArrayXd mx = derivative1(m, dx);
  const ArrayXd mxx = derivative2(m, dx);
  const ArrayXd dF3 = -2.0 * mxx / m.pow(5) + 5.0 * mx.square() / m.pow(6) - 0.75 / m.pow(4);
  switch (which) {
    case Functional::F3:
      return dF3;
    case Functional::CalG:
      return 0.75 / (k * k * k * k) + dF3;
    case Functional::Lambda:
      return dF3 + p.omega1 - p.omega2 / m.square();
    default:
      throw validation_error("variational_derivative: unknown functional");
  }
}

double euler_lagrange_residual(const WaveProfile& w) {
  return variational_derivative(Functional::Lambda, w.mu, w.dx, w.params).abs().maxCoeff();
}

double euler_lagrange_residual_analytic(const WaveProfile& w) {
  const WaveParameters& p = w.params;
  const ArrayXd mxx = w.mu_xixi();
  const ArrayXd res = -2.0 * mxx / w.mu.pow(5) + 5.0 * w.mu_xi.square() / w.mu.pow(6) -
                      0.75 / w.mu.pow(4) + p.omega1 - p.omega2 / w.mu.square();
  return res.abs().maxCoeff();
}

double vk_q_quadrature(const WaveProfile& w) {
  const double k = w.params.k;
  if (!(w.mu.minCoeff() > 0.0))
    throw numerical_error("vk_q_quadrature: corrupted profile (mu not positive)");
  const ArrayXd integrand = w.mu / k + k / w.mu - 2.0;
  return simpson(integrand, w.dx);
}

double vk_q_closed_form(double c, double k) {
  const double ck2 = c - k * k, c3k2 = c - 3.0 * k * k;
  return 8.0 * std::log((std::sqrt(ck2) + std::sqrt(c3k2)) / (std::sqrt(2.0) * k)) -
         8.0 * std::sqrt(c3k2 / ck2);
}

double vk_dq_dk_closed_form(double c, double k) {
  const double ck2 = c - k * k, c3k2 = c - 3.0 * k * k;
  return -8.0 * c / (k * ck2) * std::sqrt(c3k2 / ck2);
}

FunctionalReport functional_report(const WaveProfile& w) {
  const WaveParameters& p = w.params;
  FunctionalReport r;
  const ConservedTriple f = conserved_integrals(w);
  r.F1 = f.F1;
  r.F2 = f.F2;
  r.F3 = f.F3;
  r.Lambda = f.F3 + p.omega1 * f.F1 + p.omega2 * f.F2;
  r.calF = f.F2 + f.F1 / (p.k * p.k);
  r.calG = f.F3 + 0.75 / std::pow(p.k, 4) * f.F1;
  r.Q_quad = vk_q_quadrature(w);
  r.Q_closed = vk_q_closed_form(p.c, p.k);
  r.dQdk_closed = vk_dq_dk_closed_form(p.c, p.k);
  r.el_residual_sup = euler_lagrange_residual(w);
  return r;
}

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string functional_report_json(const WaveParameters& p, const FunctionalReport& r) {
  std::ostringstream os;
  os << "{\n"
     << "  \"c\": " << num(p.c) << ",\n  \"k\": " << num(p.k) << ",\n"
     << "  \"F1\": " << num(r.F1) << ",\n  \"F2\": " << num(r.F2) << ",\n"
     << "  \"F3\": " << num(r.F3) << ",\n  \"Lambda\": " << num(r.Lambda) << ",\n"
     << "  \"calF\": " << num(r.calF) << ",\n  \"calG\": " << num(r.calG) << ",\n"
     << "  \"Q_quad\": " << num(r.Q_quad) << ",\n  \"Q_closed\": " << num(r.Q_closed) << ",\n"
     << "  \"dQdk_closed\": " << num(r.dQdk_closed) << ",\n"
     << "  \"el_residual_sup\": " << num(r.el_residual_sup) << "\n}\n";
  return os.str();
}

std::string functional_report_csv_row(const WaveParameters& p, const FunctionalReport& r) {
  std::ostringstream os;
  os << num(p.c) << ',' << num(p.k) << ',' << num(r.Q_quad) << ',' << num(r.Q_closed) << ','
     << num(r.dQdk_closed) << ',' << num(r.el_residual_sup);
  return os.str();
}

}  // namespace mch
