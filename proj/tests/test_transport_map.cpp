#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "rotmap/error.hpp"
#include "rotmap/transport_map.hpp"

using namespace rotmap;

TEST_CASE("entropic T_eps equals the barycentric projection of the plan") {
  std::mt19937_64 gen(11);
  const auto l = testing::random_cloud(gen, 15, 2, 0.0, 1.0);
  const auto m = testing::random_cloud(gen, 12, 2, 0.5, 1.5);
  const auto s = solve(l, m, Regularizer::entropic(), 0.2);
  for (std::size_t i = 0; i < l.size(); ++i) {
    const auto sample = t_eps(s.potentials, s.plan, l, m, i);
    const Point bp = barycentric_projection(s.plan, m, i);
    CHECK((sample.T - bp).norm() < 1e-10);
    CHECK(sample.weight_mass == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("p = 2 T_eps is the plain mean over the support slice") {
  const auto l = testing::unit_interval(40);
  const auto m = pushforward_affine(l, Eigen::MatrixXd::Identity(1, 1), testing::vec1(0.4), 1.0);
  const auto s = solve(l, m, Regularizer::polynomial(2.0), 0.1);
  for (std::size_t i : {0u, 7u, 20u, 39u}) {
    Point mean = Point::Zero(1);
    double count = 0.0;
    double r = 0.0;
    s.plan.for_each_positive(i, [&](std::size_t j, double) {
      mean += m.point(j);
      count += 1.0;
      r = std::max(r, std::abs(m.point(j)[0] - l.point(i)[0]));
    });
    const auto sample = t_eps(s.potentials, s.plan, l, m, i);
    CHECK(std::abs(sample.T[0] - mean[0] / count) < 1e-12);
    CHECK(sample.support_radius == doctest::Approx(r));
    // 1/h'' = 1/2 on the support
    CHECK(sample.weight_mass == doctest::Approx(0.5 * count / 40.0));
  }
}

TEST_CASE("p = 1.5 T_eps weights are 1/h'' of the plan density") {
  std::mt19937_64 gen(12);
  const auto l = testing::random_cloud(gen, 10, 1, 0.0, 1.0);
  const auto m = testing::random_cloud(gen, 10, 1, 0.0, 1.0);
  const auto reg = Regularizer::polynomial(1.5);
  const auto s = solve(l, m, reg, 0.3);
  for (std::size_t i = 0; i < l.size(); ++i) {
    double mass = 0.0, acc = 0.0;
    s.plan.for_each_positive(i, [&](std::size_t j, double z) {
      const double w = m.weight(j) / reg.h_second(z);
      mass += w;
      acc += w * m.point(j)[0];
    });
    CHECK(t_eps(s.potentials, s.plan, l, m, i).T[0] == doctest::Approx(acc / mass).epsilon(1e-9));
  }
}

TEST_CASE("interior finite differences of f agree with 2(x - T_eps)") {
  const int n = 101;
  const auto l = testing::unit_interval(n);
  const auto m = pushforward_affine(l, 2.0 * Eigen::MatrixXd::Identity(1, 1), testing::vec1(0.0), 1.0);
  const double h = l.grid_spacing();
  for (const auto& reg : {Regularizer::entropic(), Regularizer::polynomial(1.5), Regularizer::polynomial(2.0)}) {
    const auto s = solve(l, m, reg, 0.1);
    for (std::size_t i : {30u, 50u, 70u}) {
      const auto g = grad_f_check(s.potentials, s.plan, l, m, i, h);
      CHECK(g.discrepancy < 0.05);
    }
    CHECK_THROWS_AS(grad_f_check(s.potentials, s.plan, l, m, 0, h), InputError);
  }
}

TEST_CASE("lipschitz_stat on a synthetic linear map") {
  std::vector<MapSample> samples;
  for (int i = 0; i < 20; ++i) {
    MapSample s;
    s.index = static_cast<std::size_t>(i);
    s.x = testing::vec1(i * 0.05);
    s.T = testing::vec1(3.0 * i * 0.05);
    samples.push_back(s);
  }
  InteriorWindow w{testing::vec1(0.5), 0.3};
  const auto st = lipschitz_stat(samples, w, 0.2);
  CHECK(st.lip_constant == doctest::Approx(3.0));
  CHECK(st.pair_count > 0);
  const auto spaced = lipschitz_stat(samples, w, 0.2, 0.1);
  CHECK(spaced.pair_count < st.pair_count);
  CHECK_THROWS_AS(lipschitz_stat(samples, InteriorWindow{testing::vec1(5.0), 0.1}, 0.2), InputError);
  CHECK_THROWS_AS(lipschitz_stat(samples, w, 0.01), InputError);
}

TEST_CASE("vanishing weighted mass is a domain error") {
  const auto l = testing::unit_interval(5);
  DualPotentials pot;
  pot.f = Eigen::VectorXd::Constant(5, -100.0);
  pot.g = Eigen::VectorXd::Zero(5);
  pot.eps = 0.1;
  pot.reg = Regularizer::polynomial(2.0);
  const Plan plan = assemble_plan(pot, l, l);
  CHECK(plan.nnz() == 0);
  CHECK_THROWS_AS(t_eps(pot, plan, l, l, 0), DomainError);
  CHECK_THROWS_AS(barycentric_projection(plan, l, 0), DomainError);
}

TEST_CASE("map_samples is independent of the thread count") {
  const auto l = testing::unit_interval(60);
  const auto s = solve(l, l, Regularizer::polynomial(1.5), 0.1);
  const auto a = map_samples(s.potentials, s.plan, l, l, 1);
  const auto b = map_samples(s.potentials, s.plan, l, l, 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].T == b[i].T);
    CHECK(a[i].support_radius == b[i].support_radius);
  }
}
