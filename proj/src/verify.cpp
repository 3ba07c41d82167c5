#include "mch/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mch/errors.hpp"
#include "mch/evolution.hpp"
#include "mch/functionals.hpp"
#include "mch/spectral.hpp"
#include "mch/wave.hpp"

namespace mch {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

CheckResult run_check(const std::string& name, double runtime_budget,
                      const std::function<std::pair<bool, std::string>()>& body) {
  CheckResult r;
  r.name = name;
  const auto t0 = Clock::now();
  try {
    auto [pass, detail] = body();
    r.runtime_sec = seconds_since(t0);
    r.pass = pass && (runtime_budget <= 0 || r.runtime_sec < runtime_budget);
    r.detail = detail;
    if (pass && runtime_budget > 0 && r.runtime_sec >= runtime_budget)
      r.detail += "; runtime " + fmt(r.runtime_sec) + "s exceeds budget " + fmt(runtime_budget) + "s";
  } catch (const std::exception& e) {
    r.runtime_sec = seconds_since(t0);
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  return r;
}

}  // namespace

std::vector<CheckResult> verify_all(double c, double k, const VerifyOptions& opts,
                                    const std::function<void(const CheckResult&)>& on_result,
                                    std::vector<std::string>* warnings) {
  const WaveParameters p = validate_parameters(c, k);
  if (warnings) {
    const double margin = 0.02 * std::sqrt(c);
    if (k - p.window_left() < margin || p.window_right() - k < margin)
      warnings->push_back("k is within 0.02 sqrt(c) of an admissibility endpoint; "
                          "profiles are steep and solves may be ill-conditioned");
    if (p.mu_max > 2.5 * p.phi_crest)
      warnings->push_back("momentum crest is " + fmt(p.mu_max / p.phi_crest) +
                          " times the velocity crest; finite-difference conditioning degrades "
                          "toward the left window endpoint");
  }
  std::vector<CheckResult> out;
  auto emit = [&](CheckResult r) {
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  };

  const double dx0 = 0.01 * std::min(1.0, 1.0 / p.kappa);
  const double L0 = std::max(40.0, std::max(30.0, 30.0 / p.kappa));

  // 1. crest value
  emit(run_check("1 crest value", 1.0, [&]() -> std::pair<bool, std::string> {
    const WaveProfile w = construct_profile(p, {dx0, L0, 0.0});
    const double err = std::abs(w.phi.maxCoeff() - p.phi_crest);
    return {err < 1e-6, "|max phi - " + fmt(p.phi_crest) + "| = " + fmt(err) +
                            " (tol 1e-6); tail_error = " + fmt(w.tail_error)};
  }));

  // 2. variational characterization: the critical-point property is checked with the
  // profile's analytic derivative chain; the finite-difference residual
  // certifies 2nd-order convergence (its O(dx^2) constant is set by the crest
  // curvature and is printed for reference).
  emit(run_check("2 Euler-Lagrange residual", 1.0, [&]() -> std::pair<bool, std::string> {
    const WaveProfile w1 = construct_profile(p, {dx0, L0, 0.0});
    const WaveProfile w2 = construct_profile(p, {dx0 / 2.0, L0, 0.0});
    const double ra = euler_lagrange_residual_analytic(w1);
    const double r1 = euler_lagrange_residual(w1);
    const double r2 = euler_lagrange_residual(w2);
    const double ratio = r1 / r2;
    const bool mag_ok = ra < 1e-6;
    const bool ratio_ok = ratio > 3.0 && ratio < 5.0;
    return {mag_ok && ratio_ok,
            "sup|dLambda/dm| = " + fmt(ra) + " (tol 1e-6, " + (mag_ok ? "ok" : "FAIL") +
                "); FD-stencil residual " + fmt(r1) + " -> " + fmt(r2) +
                " under halving, ratio = " + fmt(ratio) + " (" + (ratio_ok ? "ok" : "FAIL") + ")"};
  }));

  // 3. spectral structure
  emit(run_check("3 spectral structure", 30.0, [&]() -> std::pair<bool, std::string> {
    const WaveProfile w1 = construct_profile(p, {dx0, L0, 0.0});
    const SpectralReport r1 = spectral_report(w1);
    const WaveProfile w2 = construct_profile(p, {dx0 / 2.0, L0, 0.0});
    const SpectralReport r2 = spectral_report(w2);
    const double ratio = r1.kernel_eigenvalue / r2.kernel_eigenvalue;
    const bool counts_ok = r1.n_negative == 1 && r1.n_zero == 1;
    const bool corr_ok = r1.kernel_correlation > 0.999;
    const bool ratio_ok = ratio > 2.5 && ratio < 6.5;
    return {counts_ok && corr_ok && ratio_ok,
            "neg/zero counts = " + std::to_string(r1.n_negative) + "/" +
                std::to_string(r1.n_zero) + ", lambda1 = " + fmt(r1.eigenvalues[0]) +
                ", kernel corr = " + fmt(r1.kernel_correlation) +
                ", lambda2 refinement ratio = " + fmt(ratio)};
  }));

  // 4. VK criterion
  emit(run_check("4 Vakhitov-Kolokolov criterion", 120.0, [&]() -> std::pair<bool, std::string> {
    const WaveProfile w = construct_profile(p, {dx0, L0, 0.0});
    const double qq = vk_q_quadrature(w);
    const double qc = vk_q_closed_form(c, k);
    const double dq = vk_dq_dk_closed_form(c, k);
    const double q_err = std::abs(qq - qc);
    const double hk = 1e-6;
    const double dq_fd = (vk_q_closed_form(c, k + hk) - vk_q_closed_form(c, k - hk)) / (2.0 * hk);
    const double dq_rel = std::abs(dq_fd - dq) / std::abs(dq);
    // the two-route agreement is an O(dx^2) statement; steep profiles away
    // from the reference point may need a finer grid
    double dx_vk = 0.005 * std::min(1.0, 1.0 / p.kappa);
    VkReport vk;
    for (int attempt = 0; attempt < 3; ++attempt, dx_vk *= 0.5) {
      vk = vk_inner_product(construct_profile(p, {dx_vk, L0, 0.0}));
      if (vk.rel_difference < 0.01) break;
    }
    bool sweep_ok = true;
    const double s = std::sqrt(c);
    for (int i = 0; i < 21; ++i) {
      const double ks = 0.36 * s + (0.56 - 0.36) * s * static_cast<double>(i) / 20.0;
      const WaveParameters ps = validate_parameters(c, ks);
      const WaveProfile ws = construct_profile(ps, GridSpec{});
      const VkReport v = vk_inner_product(ws);
      if (!(vk_dq_dk_closed_form(c, ks) < 0.0) || !(v.vk_value < 0.0)) sweep_ok = false;
    }
    const bool ok = q_err < 1e-6 && dq_rel < 1e-6 && vk.rel_difference < 0.01 && sweep_ok;
    return {ok, "|Q_quad - Q_closed| = " + fmt(q_err) + " (Q_closed = " + fmt(qc) +
                    "), dQdk rel FD err = " + fmt(dq_rel) + " (dQdk = " + fmt(dq) +
                    "), vk two-route rel diff = " + fmt(vk.rel_difference) + " (vk = " +
                    fmt(vk.vk_value) + "), 21-point sweep signs " +
                    (sweep_ok ? "ok" : "FAIL")};
  }));

  // 5. Casimir property
  emit(run_check("5 Casimir residuals", 120.0, [&]() -> std::pair<bool, std::string> {
    double dxc = 0.005 * std::min(1.0, 1.0 / p.kappa);
    CasimirReport r1{}, r2{};
    for (int attempt = 0; attempt < 3; ++attempt, dxc *= 0.5) {
      const WaveProfile w1 = construct_profile(p, {dxc, 0.0, 0.0});
      r1 = casimir_residual(w1.mu, k, w1.dx);
      const WaveProfile w2 = construct_profile(p, {dxc / 2.0, 0.0, 0.0});
      r2 = casimir_residual(w2.mu, k, w2.dx);
      if (r1.r2 < 1e-5 && r1.r3 < 1e-5) break;
    }
    const double factor = r1.r3 / std::max(r2.r3, 1e-300);
    // near the flat end of the family the residuals sit at the roundoff floor
    // and the convergence factor is meaningless
    const bool factor_ok = r1.r3 < 1e-10 || factor > 3.5;
    const bool ok = r1.r2 < 1e-5 && r1.r3 < 1e-5 && factor_ok;
    return {ok, "r2 = " + fmt(r1.r2) + ", r3 = " + fmt(r1.r3) +
                    " (tol 1e-5); refinement factor (r3) = " + fmt(factor) +
                    " (>= 3.5 required, i.e. at least O(dx^2))"};
  }));

  // evolution setup shared by 6-8: the default grid, refined until the wrapped
  // profile's spectrum has decayed below 1e-10 (relative) at the dealiasing
  // cutoff, so steep members of the family stay resolved
  const double L_dom = 4.0 * std::max(30.0, 30.0 / p.kappa);
  Index Ngrid = 4096;
  for (; Ngrid < 32768; Ngrid *= 2) {
    EvolutionContext probe(L_dom, Ngrid, k);
    const MomentumField m0 = probe.wrap_profile(p);
    const ArrayXcd mh = probe.ops().forward(m0.m - k);
    const Index cut = Ngrid / 3;
    double tail = 0.0;
    for (Index j = cut - 2; j <= cut; ++j) tail = std::max(tail, std::abs(mh[j]));
    if (tail < 1e-10 * mh.abs().maxCoeff()) break;
  }

  if (opts.include_evolution) {
    emit(run_check("6 conservation under evolution", 120.0, [&]() -> std::pair<bool, std::string> {
      EvolutionContext ctx(L_dom, Ngrid, k);
      const MomentumField m0 = ctx.wrap_profile(p);
      ctx.set_reference(m0.m);
      EvolveConfig cfg;
      cfg.t_end = 10.0;
      const Trajectory tr = ctx.evolve(m0, cfg);
      double worst = 0.0;
      for (size_t i = 0; i < tr.t.size(); ++i) {
        worst = std::max(worst, std::abs(tr.F1[i] - tr.F1[0]) / std::max(std::abs(tr.F1[0]), 1.0));
        worst = std::max(worst, std::abs(tr.F2[i] - tr.F2[0]) / std::max(std::abs(tr.F2[0]), 1.0));
        worst = std::max(worst, std::abs(tr.F3[i] - tr.F3[0]) / std::max(std::abs(tr.F3[0]), 1.0));
      }
      return {worst < 1e-6, "max relative drift of F1,F2,F3 = " + fmt(worst) + " (tol 1e-6) over t in [0,10]"};
    }));

    emit(run_check("8 traveling-wave speed", 120.0, [&]() -> std::pair<bool, std::string> {
      EvolutionContext ctx(L_dom, Ngrid, k);
      const MomentumField m0 = ctx.wrap_profile(p);
      EvolveConfig cfg;
      cfg.t_end = 10.0;
      const Trajectory tr = ctx.evolve(m0, cfg);
      // unwrap the crest series and compare terminal displacement with c*t
      double disp = 0.0;
      double err = 0.0;
      for (size_t i = 1; i < tr.crest.size(); ++i) {
        double step = tr.crest[i] - tr.crest[i - 1];
        step = std::remainder(step, L_dom);
        disp += step;
        err = std::abs(disp - c * tr.t[i]);
      }
      const double dxg = L_dom / static_cast<double>(Ngrid);
      return {err < 2.0 * dxg,
              "terminal crest position error = " + fmt(err) + " (tol 2 dx = " + fmt(2.0 * dxg) + ")"};
    }));
  }

  if (opts.include_orbital) {
    emit(run_check("7 orbital stability experiment", 600.0, [&]() -> std::pair<bool, std::string> {
      EvolutionContext ctx(L_dom, Ngrid, k);
      const MomentumField m0 = ctx.wrap_profile(p);
      ctx.set_reference(m0.m);
      EvolveConfig cfg;
      cfg.t_end = 20.0;
      const double epses[3] = {1e-4, 3e-4, 1e-3};
      double ratios[3];
      bool each_ok = true;
      std::ostringstream det;
      for (int i = 0; i < 3; ++i) {
        const MomentumField mp =
            ctx.make_perturbation(m0, PerturbationKind::Gaussian, epses[i]);
        const Trajectory tr = ctx.evolve(mp, cfg);
        const double supd = *std::max_element(tr.d.begin(), tr.d.end());
        ratios[i] = supd / epses[i];
        each_ok = each_ok && (supd <= 10.0 * epses[i]);
        det << (i ? ", " : "") << "eps=" << fmt(epses[i]) << ": sup d/eps=" << fmt(ratios[i]);
      }
      const double rmax = *std::max_element(ratios, ratios + 3);
      const double rmin = *std::min_element(ratios, ratios + 3);
      const bool linear_ok = rmax / rmin <= 2.0;
      return {each_ok && linear_ok,
              det.str() + " (bound 10); linearity max/min = " + fmt(rmax / rmin) + " (<= 2)"};
    }));
  }

  // 9. scaling covariance
  emit(run_check("9 scaling covariance", 30.0, [&]() -> std::pair<bool, std::string> {
    const double sup =
        scaling_covariance_check(p, 2.0, {0.005 * std::min(1.0, 1.0 / p.kappa), L0, 0.0});
    return {sup < 1e-6, "sup|phi(lambda^2 c, lambda k) - lambda phi| = " + fmt(sup) +
                            " (lambda = 2, tol 1e-6)"};
  }));

  // 10. family-derivative identity through the Hessian. The residual has an
  // O(dx^2) truncation part and a roundoff part that the flux stencil
  // amplifies as 1/dx^2, so refinement stops at the best value. Under the
  // scaling symmetry both sides of the identity scale as 1/c^2, so the
  // tolerance (pinned at c = 1) is compared against c^2 * sup.
  emit(run_check("10 Hessian family identity", 120.0, [&]() -> std::pair<bool, std::string> {
    const double dk = 1e-4;
    const double pref = 4.0 * c / ((c - k * k) * (c - k * k));
    double dxf = 0.001 * std::min(1.0, 1.0 / p.kappa);
    double best = std::numeric_limits<double>::infinity();
    double best_dx = dxf;
    for (int attempt = 0; attempt < 4; ++attempt, dxf *= 0.5) {
      const GridSpec grid{dxf, L0, 0.0};
      const WaveProfile w = construct_profile(p, grid);
      const WaveProfile wp = construct_profile(validate_parameters(c, k + dk), grid);
      const WaveProfile wm = construct_profile(validate_parameters(c, k - dk), grid);
      const ArrayXd mu_k = (wp.mu - wm.mu) / (2.0 * dk);
      const ArrayXd v = k * mu_k - w.mu;
      const DiscreteOperator op = assemble_hessian(w);
      const Eigen::VectorXd Hv = 2.0 * op.apply(v);  // full Hessian = 2 L
      const Index n = w.size();
      double sup = 0.0;
      for (Index i = 1; i + 1 < n; ++i) {
        const double rhs = pref * (1.0 / (k * k) - 1.0 / (w.mu[i] * w.mu[i]));
        sup = std::max(sup, std::abs(Hv[i - 1] - rhs));
      }
      if (sup < best) {
        best = sup;
        best_dx = dxf;
      } else if (sup > 2.0 * best) {
        break;  // roundoff-dominated regime reached
      }
      if (c * c * best < 1e-3) break;
    }
    return {c * c * best < 1e-3,
            "sup|2L(k mu_k - mu) - (4c/(c-k^2)^2) dF/dm| = " + fmt(best) + " at dx = " +
                fmt(best_dx) + ", dk = 1e-4 (c^2-scaled tol 1e-3: " + fmt(c * c * best) + ")"};
  }));

  return out;
}

std::string verify_report_json(double c, double k, const std::vector<CheckResult>& results,
                               const std::vector<std::string>& warnings) {
  std::ostringstream os;
  os << "{\n  \"c\": " << c << ",\n  \"k\": " << k << ",\n  \"checks\": [\n";
  for (size_t i = 0; i < results.size(); ++i) {
    os << "    {\"name\": \"" << results[i].name << "\", \"pass\": "
       << (results[i].pass ? "true" : "false") << ", \"runtime_sec\": " << results[i].runtime_sec
       << ", \"detail\": \"" << results[i].detail << "\"}" << (i + 1 < results.size() ? "," : "")
       << "\n";
  }
  os << "  ],\n  \"warnings\": [";
  for (size_t i = 0; i < warnings.size(); ++i) os << (i ? ", " : "") << '"' << warnings[i] << '"';
  os << "],\n  \"all_pass\": ";
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  os << (all ? "true" : "false") << "\n}\n";
  return os.str();
}

}  // namespace mch
