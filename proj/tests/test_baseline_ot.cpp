#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "rotmap/baseline_ot.hpp"
#include "rotmap/error.hpp"

using namespace rotmap;

namespace {

// Minimum over all permutations; the oracle for tiny assignment problems.
double brute_force_assignment(const DiscreteMeasure& l, const DiscreteMeasure& m) {
  std::vector<std::size_t> perm(l.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) c += (l.point(i) - m.point(perm[i])).squaredNorm();
    best = std::min(best, c / static_cast<double>(perm.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void check_certificate(const ExactSolution& e, const DiscreteMeasure& l, const DiscreteMeasure& m) {
  const Eigen::MatrixXd C = cost_matrix(l, m);
  double slack = 0.0;
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index j = 0; j < C.cols(); ++j)
      slack = std::max(slack, e.potential_f[i] + e.potential_g[j] - C(i, j));
  CHECK(slack <= 1e-9);
  const double dual = e.potential_f.dot(l.weights()) + e.potential_g.dot(m.weights());
  CHECK(dual == doctest::Approx(e.cost).epsilon(1e-9));
  double mass = 0.0, cost = 0.0;
  for (const auto& c : e.coupling) {
    CHECK(c.mass > 0.0);
    mass += c.mass;
    cost += c.mass * C(static_cast<Eigen::Index>(c.i), static_cast<Eigen::Index>(c.j));
    // complementary slackness on the support
    CHECK(std::abs(e.potential_f[static_cast<Eigen::Index>(c.i)] + e.potential_g[static_cast<Eigen::Index>(c.j)] -
                   C(static_cast<Eigen::Index>(c.i), static_cast<Eigen::Index>(c.j))) < 1e-9);
  }
  CHECK(mass == doctest::Approx(l.total_mass()));
  CHECK(cost == doctest::Approx(e.cost).epsilon(1e-12));
}

}  // namespace

TEST_CASE("identical marginals cost nothing") {
  const auto l = testing::unit_interval(16);
  CHECK(exact_1d(l, l).cost == doctest::Approx(0.0));
  CHECK(exact_assignment(l, l).cost == doctest::Approx(0.0));
}

TEST_CASE("translation costs |b|^2 and maps by x + b") {
  const auto l = uniform_on_box(2, Point::Zero(2), Point::Ones(2), 5);
  Point b(2);
  b << 1.0, 0.5;
  const auto m = pushforward_affine(l, Eigen::MatrixXd::Identity(2, 2), b, 1.0);
  const auto t = exact_translation(l, m, b);
  CHECK(t.cost == doctest::Approx(1.25));
  CHECK(t.potential_f[0] == 0.0);
  for (std::size_t i = 0; i < l.size(); ++i) CHECK((t.map[i] - l.point(i) - b).norm() < 1e-14);
  check_certificate(t, l, m);
  CHECK(exact_assignment(l, m).cost == doctest::Approx(1.25));
  CHECK_THROWS_AS(exact_translation(l, m, Point::Zero(2)), InputError);

  const auto l1 = testing::unit_interval(30);
  const auto m1 = pushforward_affine(l1, Eigen::MatrixXd::Identity(1, 1), testing::vec1(1.0), 1.0);
  const auto e = exact_1d(l1, m1);
  CHECK(e.cost == doctest::Approx(1.0));
  CHECK(e.potential_f[0] == doctest::Approx(0.0));
  check_certificate(e, l1, m1);
  // f = -2<b, x> up to the gauge, the continuum Kantorovich potential
  for (std::size_t i = 0; i < l1.size(); ++i)
    CHECK(e.potential_f[static_cast<Eigen::Index>(i)] ==
          doctest::Approx(-2.0 * (l1.point(i)[0] - l1.point(0)[0])).epsilon(1e-12));
}

TEST_CASE("dilation: T(x) = 2x and cost = E|x|^2") {
  const int n = 50;
  const auto l = testing::unit_interval(n);
  const auto m = pushforward_affine(l, 2.0 * Eigen::MatrixXd::Identity(1, 1), testing::vec1(0.0), 1.0);
  const auto e = exact_1d(l, m);
  double second_moment = 0.0;
  for (std::size_t i = 0; i < l.size(); ++i) second_moment += l.weight(i) * l.point(i).squaredNorm();
  CHECK(e.cost == doctest::Approx(second_moment));
  for (std::size_t i = 0; i < l.size(); ++i) CHECK(e.map[i][0] == doctest::Approx(2.0 * l.point(i)[0]));
}

TEST_CASE("property: 1D monotone coupling agrees with the assignment solver") {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 10; ++t) {
    const auto l = testing::random_cloud(gen, 30, 1, 0.0, 1.0, 1.0, true);
    const auto m = testing::random_cloud(gen, 30, 1, -0.5, 2.0, 1.0, true);
    const auto a = exact_1d(l, m);
    const auto b = exact_assignment(l, m);
    CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-12));
    check_certificate(a, l, m);
    check_certificate(b, l, m);
    CHECK(b.potential_f[0] == 0.0);
  }
}

TEST_CASE("property: assignment matches brute force in 2D") {
  std::mt19937_64 gen(22);
  for (int t = 0; t < 8; ++t) {
    const auto l = testing::random_cloud(gen, 6, 2, 0.0, 1.0, 1.0, true);
    const auto m = testing::random_cloud(gen, 6, 2, 0.0, 1.0, 1.0, true);
    CHECK(exact_assignment(l, m).cost == doctest::Approx(brute_force_assignment(l, m)).epsilon(1e-12));
  }
}

TEST_CASE("1D coupling with unequal weights and counts") {
  std::mt19937_64 gen(23);
  const auto l = testing::random_cloud(gen, 13, 1, 0.0, 1.0);
  const auto m = testing::random_cloud(gen, 7, 1, 0.0, 3.0);
  const auto e = exact_1d(l, m);
  check_certificate(e, l, m);
  const Plan plan = e.to_plan(l, m);
  CHECK((plan.row_marginal(m).array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK((plan.col_marginal(l).array() - 1.0).abs().maxCoeff() < 1e-12);
  const auto [lhs, rhs] = stability_gap(plan, l, m, e, 1.0);
  // T is the conditional mean of y, so the transport excess is exactly the
  // conditional variance that lhs measures.
  CHECK(rhs == doctest::Approx(2.0 * lhs).epsilon(1e-9));
}

TEST_CASE("stability gap of the independent coupling under a translation") {
  // π = λ⊗μ, T(x) = x + b: lhs = 2 Var, transport = 2 Var + |b|², Σ|x - T|² = |b|²
  const auto l = testing::unit_interval(20);
  const auto m = pushforward_affine(l, Eigen::MatrixXd::Identity(1, 1), testing::vec1(0.7), 1.0);
  const auto e = exact_1d(l, m);
  const Plan indep = Plan::from_dense(Eigen::MatrixXd::Ones(20, 20));
  const auto [lhs, rhs] = stability_gap(indep, l, m, e, 1.0);
  CHECK(rhs == doctest::Approx(2.0 * lhs));
  CHECK(lhs <= rhs);
}

TEST_CASE("input errors") {
  const auto l = testing::unit_interval(4);
  std::mt19937_64 gen(24);
  const auto weighted = testing::random_cloud(gen, 4, 1, 0.0, 1.0);
  const auto three = testing::unit_interval(3);
  CHECK_THROWS_AS(exact_assignment(l, weighted), InputError);
  CHECK_THROWS_AS(exact_assignment(l, three), InputError);
  const auto planar = uniform_on_box(2, Point::Zero(2), Point::Ones(2), 2);
  CHECK_THROWS_AS(exact_1d(planar, planar), InputError);
  const auto heavy = testing::random_cloud(gen, 4, 1, 0.0, 1.0, 2.0);
  CHECK_THROWS_AS(exact_1d(l, heavy), InputError);
}
