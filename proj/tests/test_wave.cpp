#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mch/errors.hpp"
#include "mch/wave.hpp"

using namespace mch;

// Reference values at (c,k) = (1, 0.4), frozen from 40-digit evaluation of the
// closed forms.
namespace {
constexpr double kPhiCrest = 0.89614813968157205;
constexpr double kOmega1 = -5.1153273809523810;
constexpr double kOmega2 = -5.5059523809523810;
constexpr double kMuMax = 1.7062895561320524;
constexpr double kEssEdge = 60.453869047619048;
constexpr double kKappa = 0.78679579246944315;
}  // namespace

TEST_CASE("validate_parameters fills every derived constant at (1, 0.4)") {
  const WaveParameters p = validate_parameters(1.0, 0.4);
  CHECK(p.a == doctest::Approx(0.336).epsilon(1e-15));
  CHECK(p.E == doctest::Approx(0.2432).epsilon(1e-15));
  CHECK(p.phi_crest == doctest::Approx(kPhiCrest).epsilon(1e-14));
  CHECK(p.beta == doctest::Approx(0.525).epsilon(1e-15));
  CHECK(p.h == doctest::Approx(1.5238095238095238).epsilon(1e-14));
  CHECK(p.phi0_rescaled == doctest::Approx(0.94504407558394675).epsilon(1e-13));
  CHECK(p.omega1 == doctest::Approx(kOmega1).epsilon(1e-14));
  CHECK(p.omega2 == doctest::Approx(kOmega2).epsilon(1e-14));
  CHECK(p.mu_max == doctest::Approx(kMuMax).epsilon(1e-12));
  CHECK(p.ess_edge == doctest::Approx(kEssEdge).epsilon(1e-13));
  CHECK(p.kappa == doctest::Approx(kKappa).epsilon(1e-14));
  // type invariants
  CHECK(p.a > 0.0);
  CHECK(p.E > 0.0);
  CHECK(p.h > 1.0);
  CHECK(p.h < 4.0);
  CHECK(p.phi0_rescaled > 0.0);
  CHECK(p.phi0_rescaled < 1.0);
  CHECK(p.k < p.phi_crest);
  CHECK(p.phi_crest * p.phi_crest < p.c);
  CHECK(p.ess_edge > 0.0);
  CHECK(p.beta > std::sqrt(3.0) / 6.0);
  CHECK(p.beta < 2.0 / 3.0);
}

TEST_CASE("admissibility window is sharp and bounds are named") {
  CHECK_THROWS_AS(validate_parameters(-1.0, 0.4), validation_error);
  CHECK_THROWS_AS(validate_parameters(0.0, 0.4), validation_error);
  CHECK_THROWS_AS(validate_parameters(1.0, 1.0 / 3.0), validation_error);  // left endpoint excluded
  CHECK_THROWS_AS(validate_parameters(1.0, 0.6), validation_error);        // beyond sqrt(3)/3
  CHECK_THROWS_AS(validate_parameters(1.0, std::sqrt(3.0) / 3.0 + 1e-12), validation_error);
  CHECK_NOTHROW(validate_parameters(1.0, 1.0 / 3.0 + 1e-9));
  CHECK_NOTHROW(validate_parameters(1.0, std::sqrt(3.0) / 3.0 - 1e-9));
  try {
    validate_parameters(1.0, 0.6);
  } catch (const validation_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("sqrt(3c)/3") != std::string::npos);
  }
}

TEST_CASE("level curve psi^2 values") {
  const WaveParameters p = validate_parameters(1.0, 0.4);
  CHECK(level_curve_psi2(p.k, p) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(level_curve_psi2(p.phi_crest, p)) < 1e-14);
  CHECK(level_curve_psi2(0.6, p) == doctest::Approx(0.020908465674332242).epsilon(1e-12));
  // radicand goes negative past phi = (c + 3k^2)/(4k)
  CHECK_THROWS_AS(level_curve_psi2(1.0, p), numerical_error);
}

TEST_CASE("constructed profile satisfies the documented bounds and residuals") {
  const WaveParameters p = validate_parameters(1.0, 0.4);
  const WaveProfile w = construct_profile(p, {0.01, 40.0, 0.0});

  CHECK(std::abs(w.phi.maxCoeff() - 0.896148140) < 1e-7);  // published crest value
  CHECK(w.tail_error < 1e-9);
  CHECK(std::abs(w.mu.maxCoeff() - kMuMax) < 1e-6);

  // level-set residual in the factored form (exact first integral)
  const double ck2 = p.c - p.k * p.k;
  const ArrayXd lhs = (w.phi.square() - w.phi_xi.square() - p.c).square();
  const ArrayXd rhs = ck2 * (p.c + 3.0 * p.k * p.k - 4.0 * p.k * w.phi);
  CHECK((lhs - rhs).abs().maxCoeff() < 1e-8);

  // evenness is exact by construction
  const Index n = w.size(), c0 = w.center();
  for (Index j = 1; j <= c0; j += 97) {
    CHECK(w.phi[c0 + j] == w.phi[c0 - j]);
    CHECK(w.mu[c0 + j] == w.mu[c0 - j]);
    CHECK(w.phi_xi[c0 + j] == -w.phi_xi[c0 - j]);
    CHECK(w.mu_xi[c0 + j] == -w.mu_xi[c0 - j]);
  }

  // bound chain: k < phi <= crest (equality only at xi = 0), k < mu <= mu_max
  CHECK(w.phi.minCoeff() > p.k);
  CHECK(w.phi.maxCoeff() <= p.phi_crest);
  CHECK(w.mu.minCoeff() > p.k);
  CHECK(w.mu.maxCoeff() <= p.mu_max * (1.0 + 1e-14));
  for (Index i = c0 + 1; i < n; ++i) CHECK(w.phi[i] < w.phi[i - 1]);
  CHECK((w.phi_xi.square() - w.phi.square() + p.c).minCoeff() > 0.0);

  // mu matches the closed-form relation pointwise (construction) and the ODE
  // relation mu = a/(c + phi_xi^2 - phi^2) up to integration error
  const ArrayXd mu_ode = p.a / (p.c + w.phi_xi.square() - w.phi.square());
  CHECK((w.mu - mu_ode).abs().maxCoeff() < 1e-9);
}

TEST_CASE("profile residual report: zero at the equilibrium, O(dx^2) on profiles") {
  const WaveParameters p = validate_parameters(1.0, 0.4);

  // exact constant field phi = k satisfies both relations with a, E exactly
  WaveProfile flat;
  flat.params = p;
  flat.dx = 0.01;
  const Index n = 401;
  flat.xi.setLinSpaced(n, -2.0, 2.0);
  flat.phi = ArrayXd::Constant(n, p.k);
  flat.phi_xi = ArrayXd::Zero(n);
  flat.mu = ArrayXd::Constant(n, p.k);
  flat.mu_xi = ArrayXd::Zero(n);
  // residual floor: one-sided closures amplify roundoff by 1/dx^2
  const ProfileResiduals r0 = profile_residuals(flat);
  CHECK(r0.ode < 1e-11);
  CHECK(r0.level_set < 1e-13);
  CHECK(r0.mu_consistency < 1e-11);

  const WaveProfile w1 = construct_profile(p, {0.01, 40.0, 0.0});
  const WaveProfile w2 = construct_profile(p, {0.005, 40.0, 0.0});
  const ProfileResiduals r1 = profile_residuals(w1);
  const ProfileResiduals r2 = profile_residuals(w2);
  CHECK(r1.ode / r2.ode == doctest::Approx(4.0).epsilon(0.25));
  CHECK(r1.mu_consistency / r2.mu_consistency == doctest::Approx(4.0).epsilon(0.25));
  CHECK(r1.level_set < 1e-8);
  CHECK(r2.level_set < 1e-8);

  // a corrupted profile is detected
  WaveProfile bad = w1;
  bad.phi *= 1.01;
  CHECK(profile_residuals(bad).ode > 1e-3);
}

TEST_CASE("tail decays at rate kappa") {
  const WaveParameters p = validate_parameters(1.0, 0.4);
  const WaveProfile w = construct_profile(p, {0.01, 40.0, 0.0});
  const double fitted = fit_tail_decay_rate(w);
  CHECK(std::abs(fitted - p.kappa) / p.kappa < 0.02);
}

TEST_CASE("scaling covariance") {
  const WaveParameters p = validate_parameters(1.0, 0.4);
  CHECK(scaling_covariance_check(p, 1.0) == 0.0);  // identity scaling, bit-exact
  CHECK(scaling_covariance_check(p, 2.0, {0.005, 0.0, 0.0}) < 1e-6);
  // crest scales exactly in closed form
  const WaveParameters ps = validate_parameters(4.0, 0.8);
  CHECK(ps.phi_crest == doctest::Approx(2.0 * p.phi_crest).epsilon(1e-15));
  // the window itself scales, so every positive lambda stays admissible;
  // only a non-positive lambda is rejected
  CHECK_THROWS_AS(scaling_covariance_check(p, -2.0, {}), validation_error);
}

TEST_CASE("tail tolerance grid selection and failure path") {
  const WaveParameters p = validate_parameters(1.0, 0.4);
  const WaveProfile w = construct_profile(p, {0.01, 0.0, 1e-10});
  CHECK(w.tail_error <= 1e-10);
  // unreachable tolerance in double precision
  CHECK_THROWS_AS(construct_profile(p, GridSpec{0.01, 0.0, 1e-300}), numerical_error);
}

TEST_CASE("denominator floor rejects absurd step sizes") {
  const WaveParameters p = validate_parameters(1.0, 0.4);
  CHECK_THROWS_AS(construct_profile(p, GridSpec{3.0, 40.0, 0.0}), std::exception);
}

TEST_CASE("profile CSV export format") {
  namespace fs = std::filesystem;
  const WaveParameters p = validate_parameters(1.0, 0.4);
  const WaveProfile w = construct_profile(p, {0.1, 5.0, 0.0});
  const auto path = fs::temp_directory_path() / "mch_profile_test.csv";
  write_profile_csv(w, path.string());
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header == "xi,phi,phi_xi,mu,mu_xi");
  Index rows = 0;
  std::string line;
  double xi0 = 0, phi0 = 0;
  while (std::getline(is, line)) {
    if (rows == static_cast<Index>(w.center()))
      CHECK(std::sscanf(line.c_str(), "%lf,%lf", &xi0, &phi0) == 2);
    ++rows;
  }
  CHECK(rows == w.size());
  CHECK(xi0 == 0.0);
  CHECK(phi0 == doctest::Approx(p.phi_crest).epsilon(1e-15));
  fs::remove(path);
}
