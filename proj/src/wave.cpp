#include "mch/wave.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mch/errors.hpp"
#include "mch/numerics.hpp"

namespace mch {

double WaveParameters::window_left() const { return std::sqrt(c) / 3.0; }
double WaveParameters::window_right() const { return std::sqrt(3.0 * c) / 3.0; }

WaveParameters validate_parameters(double c, double k) {
  if (!(c > 0.0))
    throw validation_error("wave speed c must be positive (got c = " + std::to_string(c) + ")");
  const double left = std::sqrt(c) / 3.0;
  const double right = std::sqrt(3.0 * c) / 3.0;
  // Admissibility window of the smooth solitary family: 9k^2 > c and 3k^2 < c,
  // both strict.
  if (!(9.0 * k * k > c)) {
    std::ostringstream os;
    os << "background k = " << k << " violates the lower bound k > sqrt(c)/3 = " << left
       << " (window (" << left << ", " << right << ") is open)";
    throw validation_error(os.str());
  }
  if (!(3.0 * k * k < c)) {
    std::ostringstream os;
    os << "background k = " << k << " violates the upper bound k < sqrt(3c)/3 = " << right
       << " (window (" << left << ", " << right << ") is open)";
    throw validation_error(os.str());
  }
  WaveParameters p;
  p.c = c;
  p.k = k;
  const double ck2 = c - k * k;
  p.a = k * ck2;
  p.E = k * k * (2.0 * c - 3.0 * k * k);
  p.phi_crest = std::sqrt(2.0 * ck2) - k;
  p.beta = ck2 / (4.0 * k);
  p.h = 8.0 * k * k / ck2;
  p.phi0_rescaled = 4.0 * k * (std::sqrt(2.0 * ck2) - 2.0 * k) / ck2;
  p.omega1 = (c - 9.0 * k * k) / (4.0 * k * k * k * k * ck2);
  p.omega2 = -(c + 3.0 * k * k) / (2.0 * k * k * ck2);
  p.mu_max = k * std::sqrt(ck2) / (2.0 * std::sqrt(2.0) * k - std::sqrt(ck2));
  p.ess_edge = (c - 3.0 * k * k) / (std::pow(k, 5) * ck2);
  p.kappa = std::sqrt((c - 3.0 * k * k) / ck2);
  return p;
}

double level_curve_psi2(double phi, const WaveParameters& p) {
  const double radicand = (p.c - p.k * p.k) * (p.c + 3.0 * p.k * p.k - 4.0 * p.k * phi);
  if (radicand < 0.0)
    throw numerical_error("level_curve_psi2: negative radicand at phi = " + std::to_string(phi));
  return phi * phi - p.c + std::sqrt(radicand);
}

namespace {

struct ShiftedState {
  double d;    // phi - k
  double psi;  // phi_xi
};

// Vector field of the profile ODE in shifted coordinates. The numerator of
// psi' cancels analytically at the saddle (d, psi) = (0, 0), so it evaluates
// with relative accuracy down to the underflow threshold.
inline ShiftedState field(const ShiftedState& y, double k, double ck2, double c3k2,
                          double denom_floor) {
  const double s = ck2 + y.psi * y.psi - 2.0 * k * y.d - y.d * y.d;
  if (s < denom_floor)
    throw numerical_error("construct_profile: c + phi_xi^2 - phi^2 = " + std::to_string(s) +
                          " fell below the positive floor (invalid parameters or step size)");
  const double num =
      y.d * c3k2 - 3.0 * k * y.d * y.d - y.d * y.d * y.d + (k + y.d) * y.psi * y.psi;
  return {y.psi, num / s};
}

// Newton projection onto the conserved level curve
// H = 2(c-k^2)(psi^2 - d^2) + (2kd + d^2 - psi^2)^2 = 0 (cancellation-free form
// of the first integral), suppressing the transversal saddle instability.
inline ShiftedState project(ShiftedState y, double k, double ck2) {
  for (int it = 0; it < 2; ++it) {
    const double w = 2.0 * k * y.d + y.d * y.d - y.psi * y.psi;
    const double H = 2.0 * ck2 * (y.psi * y.psi - y.d * y.d) + w * w;
    const double Hd = -4.0 * ck2 * y.d + 2.0 * w * (2.0 * k + 2.0 * y.d);
    const double Hp = 4.0 * ck2 * y.psi - 4.0 * w * y.psi;
    const double g2 = Hd * Hd + Hp * Hp;
    if (H == 0.0 || g2 < 1e-300) break;
    const double step = H / g2;
    y.d -= step * Hd;
    y.psi -= step * Hp;
  }
  return y;
}

}  // namespace

void sample_half_profile(const WaveParameters& p, double spacing, Index count, int substeps,
                         ArrayXd& delta_out, ArrayXd& psi_out) {
  const double c = p.c, k = p.k;
  const double ck2 = c - k * k;
  const double c3k2 = c - 3.0 * k * k;
  const double c_phicrest2 = c - p.phi_crest * p.phi_crest;  // min of the denominator on the orbit
  const double denom_floor = 0.1 * c_phicrest2;
  const double h = spacing / static_cast<double>(substeps);

  delta_out.resize(count);
  psi_out.resize(count);
  ShiftedState y{p.phi_crest - k, 0.0};
  delta_out[0] = y.d;
  psi_out[0] = y.psi;
  for (Index j = 1; j < count; ++j) {
    if (std::abs(y.d) < 1e-300 && std::abs(y.psi) < 1e-300) {
      y = {0.0, 0.0};  // saddle reached to underflow; it is an exact fixed point
      delta_out[j] = 0.0;
      psi_out[j] = 0.0;
      continue;
    }
    for (int s = 0; s < substeps; ++s) {
      const ShiftedState k1 = field(y, k, ck2, c3k2, denom_floor);
      const ShiftedState y2{y.d + 0.5 * h * k1.d, y.psi + 0.5 * h * k1.psi};
      const ShiftedState k2 = field(y2, k, ck2, c3k2, denom_floor);
      const ShiftedState y3{y.d + 0.5 * h * k2.d, y.psi + 0.5 * h * k2.psi};
      const ShiftedState k3 = field(y3, k, ck2, c3k2, denom_floor);
      const ShiftedState y4{y.d + h * k3.d, y.psi + h * k3.psi};
      const ShiftedState k4 = field(y4, k, ck2, c3k2, denom_floor);
      y.d += h / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
      y.psi += h / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
      y = project(y, k, ck2);
    }
    delta_out[j] = y.d;
    psi_out[j] = y.psi;
  }
}

WaveProfile construct_profile(const WaveParameters& p, GridSpec grid) {
  double dx = grid.dx;
  if (!(dx > 0.0)) dx = 0.01 * std::min(1.0, 1.0 / p.kappa);
  double L = grid.half_length;
  const double L_default = std::max(30.0, 30.0 / p.kappa);
  bool check_tail = false;
  if (!(L > 0.0)) {
    if (grid.tail_tol > 0.0) {
      const double amp = p.phi_crest - p.k;
      L = std::max(L_default, std::log(std::max(amp, 1.0) / grid.tail_tol) / p.kappa + 5.0);
      check_tail = true;
    } else {
      L = L_default;
    }
  }
  const Index half = static_cast<Index>(std::ceil(L / dx - 1e-12));
  if (half < 8) throw validation_error("construct_profile: grid too coarse for requested L");

  ArrayXd delta, psi;
  sample_half_profile(p, dx, half + 1, 1, delta, psi);

  WaveProfile w;
  w.params = p;
  w.dx = dx;
  const Index n = 2 * half + 1;
  w.xi.resize(n);
  w.phi.resize(n);
  w.phi_xi.resize(n);
  for (Index j = 0; j <= half; ++j) {
    w.xi[half + j] = dx * static_cast<double>(j);
    w.xi[half - j] = -dx * static_cast<double>(j);
    w.phi[half + j] = p.k + delta[j];
    w.phi[half - j] = p.k + delta[j];  // exact mirror
    w.phi_xi[half + j] = psi[j];
    w.phi_xi[half - j] = -psi[j];
  }
  const double ck2 = p.c - p.k * p.k;
  // mu from the closed-form relation; the shifted form of the radicand
  // c + 3k^2 - 4k phi = (c - k^2) - 4k (phi - k) avoids tail cancellation.
  w.mu.resize(n);
  w.mu_xi.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double rad = ck2 - 4.0 * p.k * (w.phi[i] - p.k);
    if (!(rad > 0.0))
      throw numerical_error("construct_profile: mu radicand non-positive at xi = " +
                            std::to_string(w.xi[i]));
    w.mu[i] = p.k * std::sqrt(ck2 / rad);
    w.mu_xi[i] = 2.0 / p.a * w.phi_xi[i] * w.mu[i] * w.mu[i] * w.mu[i];
  }
  w.tail_error = std::abs(w.phi[n - 1] - p.k);
  if (check_tail && w.tail_error > grid.tail_tol)
    throw numerical_error("construct_profile: tail error " + std::to_string(w.tail_error) +
                          " above requested tolerance at maximum half-length");
  return w;
}

ArrayXd WaveProfile::mu_xixi() const {
  const double a = params.a;
  return 2.0 / a * (phi - mu) * mu.pow(3) + 12.0 / (a * a) * phi_xi.square() * mu.pow(5);
}

ProfileResiduals profile_residuals(const WaveProfile& w) {
  const WaveParameters& p = w.params;
  const ArrayXd phixx = derivative2(w.phi, w.dx);
  ProfileResiduals r;
  r.ode = ((w.phi - phixx) * (w.phi_xi.square() - w.phi.square() + p.c) - p.a).abs().maxCoeff();
  const ArrayXd q = w.phi.square() - w.phi_xi.square();
  r.level_set = (q.square() - 2.0 * p.c * q + 4.0 * p.a * w.phi - p.E).abs().maxCoeff();
  r.mu_consistency = (w.mu - (w.phi - phixx)).abs().maxCoeff();
  return r;
}

double scaling_covariance_check(const WaveParameters& p, double lambda, GridSpec grid) {
  if (!(lambda > 0.0)) throw validation_error("scaling_covariance_check: lambda must be positive");
  const WaveParameters ps = validate_parameters(lambda * lambda * p.c, lambda * p.k);
  if (!(grid.dx > 0.0)) grid.dx = 0.01 * std::min(1.0, 1.0 / p.kappa);
  if (!(grid.half_length > 0.0)) grid.half_length = std::max(30.0, 30.0 / p.kappa);
  const WaveProfile base = construct_profile(p, grid);
  const WaveProfile scaled = construct_profile(ps, grid);
  return (scaled.phi - lambda * base.phi).abs().maxCoeff();
}

double fit_tail_decay_rate(const WaveProfile& w, double floor) {
  const Index n = w.size();
  const Index c0 = w.center();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  Index m = 0;
  for (Index i = c0; i < n; ++i) {
    const double t = std::abs(w.phi[i] - w.params.k);
    if (t >= floor && t <= 10.0 * floor) {
      const double x = w.xi[i], y = std::log(t);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
  }
  if (m < 4) throw numerical_error("fit_tail_decay_rate: tail decade not resolved on this grid");
  const double mm = static_cast<double>(m);
  return -(mm * sxy - sx * sy) / (mm * sxx - sx * sx);
}

void write_profile_csv(const WaveProfile& w, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw numerical_error("write_profile_csv: cannot open " + path);
  os << "xi,phi,phi_xi,mu,mu_xi\n";
  char buf[196];
  for (Index i = 0; i < w.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", w.xi[i], w.phi[i],
                  w.phi_xi[i], w.mu[i], w.mu_xi[i]);
    os << buf;
  }
}

}  // namespace mch
