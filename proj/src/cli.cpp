#include "mch/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "mch/errors.hpp"
#include "mch/evolution.hpp"
#include "mch/functionals.hpp"
#include "mch/spectral.hpp"
#include "mch/verify.hpp"
#include "mch/wave.hpp"

namespace mch::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kCommands = {"wave",   "functionals", "spectrum", "vk",
                                            "evolve", "sweep",       "verify-all"};

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw validation_error("config file not found: " + path);
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw validation_error("malformed config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw validation_error("config file must hold a JSON object");
  for (auto& [key, val] : j.items()) {
    if (key == "command") cfg.command = val.get<std::string>();
    else if (key == "c") cfg.c = val.get<double>();
    else if (key == "k") cfg.k = val.get<double>();
    else if (key == "dx") cfg.dx = val.get<double>();
    else if (key == "L") cfg.L = val.get<double>();
    else if (key == "tail_tol") cfg.tail_tol = val.get<double>();
    else if (key == "k_min") cfg.k_min = val.get<double>();
    else if (key == "k_max") cfg.k_max = val.get<double>();
    else if (key == "k_count") cfg.k_count = val.get<int>();
    else if (key == "N") cfg.N = val.get<long>();
    else if (key == "L_dom") cfg.L_dom = val.get<double>();
    else if (key == "dt_cap") cfg.dt_cap = val.get<double>();
    else if (key == "cfl") cfg.cfl = val.get<double>();
    else if (key == "t_end") cfg.t_end = val.get<double>();
    else if (key == "sample_interval") cfg.sample_interval = val.get<double>();
    else if (key == "perturbation") cfg.perturbation = val.get<std::string>();
    else if (key == "eps") cfg.eps = val.get<double>();
    else if (key == "width") cfg.width = val.get<double>();
    else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
    else if (key == "out") cfg.out_dir = val.get<std::string>();
    else if (key == "force") cfg.force = val.get<bool>();
    else throw validation_error("unknown config key: " + key);
  }
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json config_json(const RunConfig& c) {
  return json{{"command", c.command},
              {"c", c.c},
              {"k", c.k},
              {"dx", c.dx},
              {"L", c.L},
              {"tail_tol", c.tail_tol},
              {"k_min", c.k_min},
              {"k_max", c.k_max},
              {"k_count", c.k_count},
              {"N", c.N},
              {"L_dom", c.L_dom},
              {"dt_cap", c.dt_cap},
              {"cfl", c.cfl},
              {"t_end", c.t_end},
              {"sample_interval", c.sample_interval},
              {"perturbation", c.perturbation},
              {"eps", c.eps},
              {"width", c.width},
              {"seed", c.seed},
              {"out", c.out_dir},
              {"force", c.force}};
}

// Creates the output directory, refuses to overwrite existing files unless
// --force, records every produced file for manifest.csv.
class OutputDir {
 public:
  OutputDir(const RunConfig& cfg) : dir_(cfg.out_dir), force_(cfg.force) {
    fs::create_directories(dir_);
    write("resolved_config.json", config_json(cfg).dump(2) + "\n");
  }
  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
  void write(const std::string& name, const std::string& content) {
    const std::string p = path(name);
    if (!force_ && fs::exists(p) && name != "resolved_config.json" && name != "manifest.csv")
      throw validation_error("refusing to overwrite " + p + " (pass --force to allow)");
    std::ofstream os(p);
    if (!os) throw numerical_error("cannot open output file " + p);
    os << content;
    files_.push_back(name);
  }
  void note_file(const std::string& name) { files_.push_back(name); }
  void guard(const std::string& name) const {
    if (!force_ && fs::exists(path(name)))
      throw validation_error("refusing to overwrite " + path(name) + " (pass --force to allow)");
  }
  void finish() {
    std::string manifest = "file\n";
    for (const auto& f : files_) manifest += f + "\n";
    std::ofstream os(path("manifest.csv"));
    os << manifest;
  }

 private:
  std::string dir_;
  bool force_;
  std::vector<std::string> files_;
};

GridSpec grid_from(const RunConfig& cfg) { return GridSpec{cfg.dx, cfg.L, cfg.tail_tol}; }

json params_json(const WaveParameters& p) {
  return json{{"c", p.c},
              {"k", p.k},
              {"a", p.a},
              {"E", p.E},
              {"phi_crest", p.phi_crest},
              {"beta", p.beta},
              {"h", p.h},
              {"phi0_rescaled", p.phi0_rescaled},
              {"omega1", p.omega1},
              {"omega2", p.omega2},
              {"mu_max", p.mu_max},
              {"ess_edge", p.ess_edge},
              {"kappa", p.kappa}};
}

int cmd_wave(const RunConfig& cfg, OutputDir& out) {
  const WaveParameters p = validate_parameters(cfg.c, cfg.k);
  const WaveProfile w = construct_profile(p, grid_from(cfg));
  out.guard("profile.csv");
  write_profile_csv(w, out.path("profile.csv"));
  out.note_file("profile.csv");
  const ProfileResiduals res = profile_residuals(w);
  json j = params_json(p);
  j["dx"] = w.dx;
  j["half_length"] = w.half_length();
  j["tail_error"] = w.tail_error;
  j["residual_ode"] = res.ode;
  j["residual_level_set"] = res.level_set;
  j["residual_mu"] = res.mu_consistency;
  out.write("wave_report.json", j.dump(2) + "\n");
  std::cout << "wave: crest " << num(w.phi.maxCoeff()) << ", tail error " << num(w.tail_error)
            << "\n";
  return 0;
}

int cmd_functionals(const RunConfig& cfg, OutputDir& out) {
  const WaveParameters p = validate_parameters(cfg.c, cfg.k);
  const WaveProfile w = construct_profile(p, grid_from(cfg));
  const FunctionalReport r = functional_report(w);
  out.write("functional_report.json", functional_report_json(p, r));
  std::cout << "functionals: Q_quad " << num(r.Q_quad) << ", Q_closed " << num(r.Q_closed)
            << ", EL residual " << num(r.el_residual_sup) << "\n";
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, OutputDir& out) {
  const WaveParameters p = validate_parameters(cfg.c, cfg.k);
  const WaveProfile w = construct_profile(p, grid_from(cfg));
  const SpectralReport r = spectral_report(w);
  out.write("spectral_report.json", spectral_report_json(p, r));
  out.write("eigenvalues.csv", eigenvalues_csv(r));
  std::cout << "spectrum: lambda1 " << num(r.eigenvalues.empty() ? 0.0 : r.eigenvalues[0])
            << ", negative/zero counts " << r.n_negative << "/" << r.n_zero << ", kernel corr "
            << num(r.kernel_correlation) << (r.ok ? "" : "  [FINDINGS]") << "\n";
  for (const auto& f : r.findings) std::cout << "  finding: " << f << "\n";
  return 0;
}

int cmd_vk(const RunConfig& cfg, OutputDir& out) {
  const WaveParameters p = validate_parameters(cfg.c, cfg.k);
  GridSpec g = grid_from(cfg);
  if (!(g.dx > 0.0)) g.dx = 0.005 * std::min(1.0, 1.0 / p.kappa);
  const WaveProfile w = construct_profile(p, g);
  const VkReport r = vk_inner_product(w);
  json j{{"c", p.c},
         {"k", p.k},
         {"vk_value", r.vk_value},
         {"vk_crosscheck", r.vk_crosscheck},
         {"rel_difference", r.rel_difference},
         {"condition_estimate", r.condition_estimate},
         {"condition_warning", r.condition_warning},
         {"Q_quad", vk_q_quadrature(w)},
         {"Q_closed", vk_q_closed_form(p.c, p.k)},
         {"dQdk_closed", vk_dq_dk_closed_form(p.c, p.k)}};
  out.write("vk_report.json", j.dump(2) + "\n");
  std::cout << "vk: value " << num(r.vk_value) << ", crosscheck " << num(r.vk_crosscheck)
            << ", rel diff " << num(r.rel_difference)
            << (r.condition_warning ? "  [condition warning]" : "") << "\n";
  return 0;
}

int cmd_evolve(const RunConfig& cfg, OutputDir& out) {
  const WaveParameters p = validate_parameters(cfg.c, cfg.k);
  const double L_dom = cfg.L_dom > 0.0 ? cfg.L_dom : 4.0 * std::max(30.0, 30.0 / p.kappa);
  EvolutionContext ctx(L_dom, static_cast<Index>(cfg.N), cfg.k);
  const MomentumField base = ctx.wrap_profile(p);
  {
    // warn when the wave's spectrum is not resolved at the dealiasing cutoff
    const auto mh = ctx.ops().forward(base.m - cfg.k);
    const Index cut = static_cast<Index>(cfg.N) / 3;
    double tail = 0.0;
    for (Index j = cut - 2; j <= cut; ++j) tail = std::max(tail, std::abs(mh[j]));
    if (tail > 1e-8 * mh.abs().maxCoeff())
      std::cerr << "warning: profile spectrum at the dealiasing cutoff is "
                << tail / mh.abs().maxCoeff()
                << " of its peak; increase --N to resolve this wave\n";
  }
  ctx.set_reference(base.m);
  const MomentumField m0 = ctx.make_perturbation(
      base, perturbation_kind_from_string(cfg.perturbation), cfg.eps, cfg.seed, cfg.width);
  EvolveConfig ec;
  ec.t_end = cfg.t_end;
  ec.dt_cap = cfg.dt_cap;
  ec.cfl = cfg.cfl;
  ec.sample_interval = cfg.sample_interval;
  const Trajectory tr = ctx.evolve(m0, ec);
  out.guard("trajectory.csv");
  write_trajectory_csv(tr, out.path("trajectory.csv"));
  out.note_file("trajectory.csv");
  out.guard("terminal_state.csv");
  write_state_csv(tr.terminal, out.path("terminal_state.csv"));
  out.note_file("terminal_state.csv");
  double supd = 0.0, drift = 0.0;
  for (size_t i = 0; i < tr.t.size(); ++i) {
    supd = std::max(supd, tr.d[i]);
    drift = std::max({drift, std::abs(tr.F1[i] - tr.F1[0]) / std::max(std::abs(tr.F1[0]), 1.0),
                      std::abs(tr.F2[i] - tr.F2[0]) / std::max(std::abs(tr.F2[0]), 1.0),
                      std::abs(tr.F3[i] - tr.F3[0]) / std::max(std::abs(tr.F3[0]), 1.0)});
  }
  std::cout << "evolve: " << tr.steps << " steps to t = " << num(cfg.t_end) << ", sup d(t) "
            << num(supd) << ", max rel drift " << num(drift) << ", min m "
            << num(*std::min_element(tr.min_m.begin(), tr.min_m.end())) << "\n";
  return 0;
}

struct SweepRow {
  double k = 0;
  bool ok = false;
  std::string error;
  double Q_quad = 0, Q_closed = 0, dQdk = 0, vk_value = 0, lambda1 = 0, lambda2 = 0,
         el_residual = 0;
};

SweepRow sweep_row(double c, double k) {
  SweepRow row;
  row.k = k;
  try {
    const WaveParameters p = validate_parameters(c, k);
    const WaveProfile w = construct_profile(p, GridSpec{});
    const FunctionalReport f = functional_report(w);
    const SpectralReport s = spectral_report(w);
    const VkReport v = vk_inner_product(w);
    row.Q_quad = f.Q_quad;
    row.Q_closed = f.Q_closed;
    row.dQdk = f.dQdk_closed;
    row.vk_value = v.vk_value;
    row.lambda1 = s.eigenvalues.size() > 0 ? s.eigenvalues[0] : 0.0;
    row.lambda2 = s.eigenvalues.size() > 1 ? s.eigenvalues[1] : 0.0;
    row.el_residual = f.el_residual_sup;
    row.ok = s.n_negative == 1;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

int cmd_sweep(const RunConfig& cfg, OutputDir& out) {
  if (!(cfg.c > 0.0)) throw validation_error("sweep: c must be positive");
  const double left = std::sqrt(cfg.c) / 3.0, right = std::sqrt(3.0 * cfg.c) / 3.0;
  const double margin = 0.02 * std::sqrt(cfg.c);
  double k_min = cfg.k_min > 0.0 ? cfg.k_min : left + margin;
  double k_max = cfg.k_max > 0.0 ? cfg.k_max : right - margin;
  if (!(k_min < k_max) || cfg.k_count < 1)
    throw validation_error("sweep: empty or invalid k range");
  if (!(k_min > left) || !(k_max < right))
    throw validation_error("sweep: range must lie strictly inside the admissible window (" +
                           std::to_string(left) + ", " + std::to_string(right) + ")");
  std::vector<double> ks(cfg.k_count);
  for (int i = 0; i < cfg.k_count; ++i)
    ks[i] = cfg.k_count == 1
                ? k_min
                : k_min + (k_max - k_min) * static_cast<double>(i) / (cfg.k_count - 1);

  std::vector<std::future<SweepRow>> futs;
  for (double k : ks)
    futs.push_back(std::async(std::launch::async, sweep_row, cfg.c, k));
  std::vector<SweepRow> rows;
  for (auto& f : futs) rows.push_back(f.get());

  std::string csv = "c,k,Q_quad,Q_closed,dQdk,vk_value,lambda1,lambda2,el_residual\n";
  bool all_dq_neg = true, all_vk_neg = true, all_counts = true, any_fail = false;
  for (const auto& r : rows) {
    csv += num(cfg.c) + "," + num(r.k) + "," + num(r.Q_quad) + "," + num(r.Q_closed) + "," +
           num(r.dQdk) + "," + num(r.vk_value) + "," + num(r.lambda1) + "," + num(r.lambda2) +
           "," + num(r.el_residual) + "\n";
    if (!r.error.empty()) any_fail = true;
    all_dq_neg = all_dq_neg && r.dQdk < 0.0;
    all_vk_neg = all_vk_neg && r.vk_value < 0.0;
    all_counts = all_counts && r.ok;
  }
  out.write("sweep.csv", csv);
  json summary{{"rows", rows.size()},
               {"all_dQdk_negative", all_dq_neg},
               {"all_vk_negative", all_vk_neg},
               {"all_negative_counts_one", all_counts},
               {"verdict", all_dq_neg && all_vk_neg && all_counts && !any_fail}};
  json errs = json::array();
  for (const auto& r : rows)
    if (!r.error.empty()) errs.push_back(json{{"k", r.k}, {"error", r.error}});
  summary["failures"] = errs;
  out.write("sweep_summary.json", summary.dump(2) + "\n");
  std::cout << "sweep: " << rows.size() << " rows; dQdk<0: " << (all_dq_neg ? "all" : "NOT all")
            << "; vk<0: " << (all_vk_neg ? "all" : "NOT all")
            << "; negative-count==1: " << (all_counts ? "all" : "NOT all") << "\n";
  return any_fail ? 3 : 0;
}

int cmd_verify_all(const RunConfig& cfg, OutputDir& out) {
  std::vector<std::string> warnings;
  const auto results = verify_all(
      cfg.c, cfg.k, VerifyOptions{},
      [](const CheckResult& r) {
        std::printf("%s  criterion %-34s [%6.2fs]  %s\n", r.pass ? "PASS" : "FAIL",
                    r.name.c_str(), r.runtime_sec, r.detail.c_str());
        std::fflush(stdout);
      },
      &warnings);
  for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
  out.write("verify_report.json", verify_report_json(cfg.c, cfg.k, results, warnings));
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  std::cout << (all ? "verify-all: ALL PASS" : "verify-all: FAILURES PRESENT") << "\n";
  return all ? 0 : 4;
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig cfg;
  const char* env_root = std::getenv("MCHWAVE_OUT_ROOT");
  cfg.out_dir = env_root ? std::string(env_root) : std::string("out");

  // pre-scan for --config so the file forms the defaults under the flags
  for (size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") apply_config_file(args[i + 1], cfg);

  CLI::App app{"mchwave: smooth solitary waves of the modified Camassa-Holm equation"};
  app.allow_extras(false);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--c", cfg.c, "wave speed c > 0");
  app.add_option("--k", cfg.k, "background level k, in (sqrt(c)/3, sqrt(3c)/3)");
  app.add_option("--dx", cfg.dx, "profile grid spacing (default 0.01 min(1, 1/kappa))");
  app.add_option("--L", cfg.L, "profile half-length (default max(30, 30/kappa))");
  app.add_option("--tail-tol", cfg.tail_tol, "choose L from a tail tolerance instead");
  app.add_option("--k-min", cfg.k_min, "sweep lower k");
  app.add_option("--k-max", cfg.k_max, "sweep upper k");
  app.add_option("--k-count", cfg.k_count, "sweep point count");
  app.add_option("--N", cfg.N, "evolution grid points (power of two)");
  app.add_option("--L-dom", cfg.L_dom, "periodic domain length (default 4x profile half-length)");
  app.add_option("--dt-cap", cfg.dt_cap, "time step cap");
  app.add_option("--cfl", cfg.cfl, "CFL fraction of dx/max|u^2-u_x^2|");
  app.add_option("--t-end", cfg.t_end, "evolution horizon");
  app.add_option("--sample-interval", cfg.sample_interval, "diagnostic sampling interval");
  app.add_option("--perturbation", cfg.perturbation,
                 "none | gaussian | translation_mode | bandlimited_noise");
  app.add_option("--eps", cfg.eps, "perturbation H1 amplitude");
  app.add_option("--width", cfg.width, "gaussian perturbation width");
  app.add_option("--seed", cfg.seed, "RNG seed for noise perturbations");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_flag("--force", cfg.force, "allow overwriting existing output files");
  for (const auto& name : kCommands)
    app.add_subcommand(name)->callback([&cfg, name]() { cfg.command = name; });
  app.require_subcommand(cfg.command.empty() ? 1 : 0, 1);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    throw validation_error(std::string("usage: ") + e.what());
  }
  if (cfg.command.empty()) throw validation_error("usage: no command given");

  // validate physics parameters up front (sweep validates its own range)
  if (cfg.command != "sweep") (void)validate_parameters(cfg.c, cfg.k);
  if (cfg.N < 4 || (cfg.N & (cfg.N - 1)) != 0)
    throw validation_error("N must be a power of two >= 4");
  return cfg;
}

int run_command(const RunConfig& cfg) {
  OutputDir out(cfg);
  int rc = 0;
  if (cfg.command == "wave") rc = cmd_wave(cfg, out);
  else if (cfg.command == "functionals") rc = cmd_functionals(cfg, out);
  else if (cfg.command == "spectrum") rc = cmd_spectrum(cfg, out);
  else if (cfg.command == "vk") rc = cmd_vk(cfg, out);
  else if (cfg.command == "evolve") rc = cmd_evolve(cfg, out);
  else if (cfg.command == "sweep") rc = cmd_sweep(cfg, out);
  else if (cfg.command == "verify-all") rc = cmd_verify_all(cfg, out);
  else throw validation_error("unknown command: " + cfg.command);
  out.finish();
  return rc;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    const RunConfig cfg = parse_config(args);
    return run_command(cfg);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace mch::cli
