#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "rotmap/error.hpp"
#include "rotmap/experiments.hpp"

using namespace rotmap;

namespace {

SweepConfig small_sweep(const std::string& name, const Regularizer& reg, int n = 64) {
  SweepConfig cfg;
  cfg.instance.name = name;
  cfg.instance.n_per_axis = n;
  cfg.reg = reg;
  cfg.eps_values = {0.2, 0.15, 0.1, 0.07};
  return cfg;
}

}  // namespace

TEST_CASE("fit_rate recovers exact power laws") {
  std::vector<std::pair<double, double>> pts;
  for (double e : {0.1, 0.05, 0.025, 0.0125}) pts.emplace_back(e, 3.0 * std::pow(e, 0.75));
  const auto fit = fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(0.75));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.points.size() == 4);
}

TEST_CASE("fit_rate reacts to a perturbed point like closed-form OLS") {
  // Multiplying the value at the last of x = log ε by 1.1 shifts the slope by
  // log(1.1) (x_k - x̄) / Sxx.
  const std::vector<double> eps = {0.1, 0.05, 0.025, 0.0125};
  std::vector<std::pair<double, double>> pts;
  for (double e : eps) pts.emplace_back(e, e);
  pts.back().second *= 1.1;
  double mx = 0.0;
  for (double e : eps) mx += std::log(e) / 4.0;
  double sxx = 0.0;
  for (double e : eps) sxx += (std::log(e) - mx) * (std::log(e) - mx);
  const double expected = 1.0 + std::log(1.1) * (std::log(eps.back()) - mx) / sxx;
  const auto fit = fit_rate(pts);
  CHECK(fit.slope == doctest::Approx(expected).epsilon(1e-12));
  CHECK(fit.r_squared < 1.0);
}

TEST_CASE("property: r_squared equals 1 - SSres/SStot on random data") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < 6; ++k) pts.emplace_back(std::pow(0.5, k), u(gen));
    const auto fit = fit_rate(pts);
    double my = 0.0;
    for (const auto& [x, y] : fit.points) my += y / 6.0;
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& [x, y] : fit.points) {
      ss_res += std::pow(y - fit.intercept - fit.slope * x, 2);
      ss_tot += std::pow(y - my, 2);
    }
    CHECK(fit.r_squared == doctest::Approx(std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0)));
    CHECK(fit.r_squared >= 0.0);
    CHECK(fit.r_squared <= 1.0);
  }
}

TEST_CASE("fit_rate rejects bad input and names the offending points") {
  CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.05, 0.5}}), InputError);
  try {
    fit_rate({{0.1, 1.0}, {0.05, -2.0}, {0.02, 0.3}});
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("-2") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_rate({{0.1, 1.0}, {0.1, 2.0}, {0.1, 3.0}}), InputError);
}

TEST_CASE("tau and the mesh rule") {
  CHECK(tau(1, Regularizer::polynomial(2.0), 0.01) == doctest::Approx(std::pow(0.01, 2.0 / 3.0)));
  CHECK(tau(2, Regularizer::entropic(), 0.04) == doctest::Approx(0.04));
  CHECK(mesh_rule_n(1, Regularizer::polynomial(2.0), 0.0125) == 149);
  CHECK(mesh_rule_n(1, Regularizer::polynomial(1.5), 0.0125) == 267);
  CHECK(mesh_rule_n(1, Regularizer::entropic(), 0.0125) == 640);
}

TEST_CASE("geometric_eps") {
  const auto e = geometric_eps(0.1, 0.0125, 4);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == 0.1);
  CHECK(e[3] == 0.0125);
  CHECK(e[1] == doctest::Approx(0.05));
  CHECK_THROWS_AS(geometric_eps(0.1, 0.0, 4), InputError);
}

TEST_CASE("sweep validation") {
  auto cfg = small_sweep("selfmap", Regularizer::polynomial(2.0));
  CHECK_NOTHROW(validate(cfg));
  cfg.eps_values = {0.2, 0.1, 0.05};
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg.eps_values = {0.2, 0.1, 0.1, 0.05};
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg.eps_values = {2.0, 0.1, 0.07, 0.05};
  CHECK_THROWS_AS(validate(cfg), InputError);
  cfg.eps_values = {0.2, 0.1, 0.07, 0.0};
  CHECK_THROWS_AS(validate(cfg), InputError);
}

TEST_CASE("instance registry") {
  for (const auto& name : instance_names()) {
    InstanceSpec spec;
    spec.name = name;
    spec.n_per_axis = 8;
    const auto inst = make_instance(spec);
    CHECK(inst.lambda.is_probability());
    CHECK(inst.mu.is_probability());
    CHECK(inst.exact.has_value() == (name != "holder2d"));
    if (inst.exact) CHECK(inst.exact->map.size() == inst.lambda.size());
  }
  InstanceSpec bad;
  bad.name = "nope";
  CHECK_THROWS_AS(make_instance(bad), InputError);
  InstanceSpec a;
  a.name = "holder1d";
  a.seed = 3;
  CHECK(make_instance(a).lambda.weights() == make_instance(a).lambda.weights());
}

TEST_CASE("support radius scan shrinks with eps") {
  const auto res = scan_support_radius(small_sweep("translation1d", Regularizer::polynomial(2.0)));
  REQUIRE(res.fit.has_value());
  CHECK(res.fit->slope > 0.3);
  const auto r = res.table.column("support_radius");
  CHECK(r.front() > r.back());
  CHECK(res.table.column("residual").back() <= 1e-8);
  CHECK_THROWS_AS(scan_support_radius(small_sweep("translation1d", Regularizer::entropic())), InputError);
}

TEST_CASE("scans are deterministic") {
  const auto cfg = small_sweep("holder1d", Regularizer::polynomial(1.5));
  const auto a = scan_support_radius(cfg);
  const auto b = scan_support_radius(cfg);
  REQUIRE(a.table.rows.size() == b.table.rows.size());
  for (std::size_t k = 0; k < a.table.rows.size(); ++k) {
    // wall time is not recorded in the table, so rows must match exactly
    CHECK(a.table.rows[k] == b.table.rows[k]);
  }
}

TEST_CASE("energy gap scan is positive and decreasing") {
  for (const auto& reg : {Regularizer::polynomial(2.0), Regularizer::entropic()}) {
    const auto res = scan_energy_gap(small_sweep("translation1d", reg));
    const auto gap = res.table.column("gap");
    for (double g : gap) CHECK(g > 0.0);
    CHECK(gap.front() > gap.back());
    if (reg.is_entropic()) CHECK(res.check("gap_ratio_at_most_1"));
  }
}

TEST_CASE("bias and map convergence scans on the translation") {
  const auto cfg = small_sweep("translation1d", Regularizer::polynomial(2.0));
  const auto inst = make_instance(cfg.instance);
  const auto bias = scan_bias(cfg, *inst.exact);
  REQUIRE(bias.fit.has_value());
  CHECK(bias.fit->slope > 0.3);
  const auto map = scan_map_convergence(cfg, *inst.exact);
  CHECK(map.check("map_error_final_within_2h"));
  CHECK(map.check("lipschitz_within_factor_2"));
  InstanceSpec other = cfg.instance;
  other.n_per_axis = 10;
  CHECK_THROWS_AS(scan_bias(cfg, *make_instance(other).exact), InputError);
}

TEST_CASE("entropic tails decay") {
  SweepConfig cfg = small_sweep("selfmap", Regularizer::entropic(), 64);
  cfg.window = InteriorWindow{testing::vec1(0.5), 1.0 / 16.0};
  cfg.eps_values = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128};
  const auto res = scan_entropic_tails(cfg);
  CHECK(res.check("tail_nonnegative"));
  CHECK(res.check("ratios_shrinking"));
  const auto tail = res.table.column("tail");
  CHECK(tail.front() > 10.0 * tail.back());
}

TEST_CASE("monotonicity audit") {
  const auto l = testing::unit_interval(30);
  const auto m = pushforward_affine(l, 2.0 * Eigen::MatrixXd::Identity(1, 1), testing::vec1(0.0), 1.0);
  for (const auto& reg : {Regularizer::entropic(), Regularizer::polynomial(1.5), Regularizer::polynomial(2.0)}) {
    const auto s = solve(l, m, reg, 0.1);
    const auto ok = audit_monotonicity(s.plan, s.potentials, l, m, 2000, 7);
    CHECK(ok.violations == 0);
    CHECK(ok.quadruples == 2000);
    CHECK(audit_monotonicity(s.plan, s.potentials, l, m, 2000, 7, 1e-8, 3).worst_margin == ok.worst_margin);
    Plan bad = s.plan;
    bad.swap_rows(0, 29);
    CHECK(audit_monotonicity(bad, s.potentials, l, m, 2000, 7).violations > 0);
  }
}

TEST_CASE("monotonicity audit on a single atom has zero margin") {
  Eigen::MatrixXd x(1, 1);
  x << 0.0;
  const DiscreteMeasure one(x, Eigen::VectorXd::Ones(1));
  const auto s = solve(one, one, Regularizer::polynomial(2.0), 0.5);
  const auto a = audit_monotonicity(s.plan, s.potentials, one, one, 10, 1);
  CHECK(a.violations == 0);
  CHECK(a.worst_margin == doctest::Approx(0.0));
}

TEST_CASE("rescaling audit") {
  const auto l = testing::unit_interval(40);
  const auto m = pushforward_affine(l, Eigen::MatrixXd::Identity(1, 1), testing::vec1(0.5), 1.0);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(1, 1);
  for (const auto& reg : {Regularizer::entropic(), Regularizer::polynomial(1.5), Regularizer::polynomial(2.0)}) {
    const auto id = audit_rescaling(l, m, reg, 0.1, I, testing::vec1(0.0), 1.0, 1.0);
    CHECK(id.plan_distance < 1e-8);
    CHECK(id.objective_difference < 1e-8);
    CHECK(id.eps_transformed == doctest::Approx(0.1));
    const auto g = audit_rescaling(l, m, reg, 0.1, I, testing::vec1(0.3), 4.0, 1.0);
    CHECK(g.eps_transformed == doctest::Approx(0.2));
    CHECK(g.plan_distance < 1e-6);
    CHECK(g.objective_difference < 1e-6);
    const auto k = audit_rescaling(l, m, reg, 0.1, 2.0 * I, testing::vec1(0.3), 1.0, 3.0);
    CHECK(k.plan_distance < 1e-6);
    CHECK(k.objective_difference < 1e-6);
  }
  CHECK_THROWS_AS(audit_rescaling(l, m, Regularizer::entropic(), 0.1, -I, testing::vec1(0.0), 1.0, 1.0),
                  InputError);
  Eigen::MatrixXd skew(2, 2);
  skew << 1, 1, 0, 1;
  const auto l2 = uniform_on_box(2, Point::Zero(2), Point::Ones(2), 3);
  CHECK_THROWS_AS(audit_rescaling(l2, l2, Regularizer::entropic(), 0.1, skew, Point::Zero(2), 1.0, 1.0),
                  InputError);
}
