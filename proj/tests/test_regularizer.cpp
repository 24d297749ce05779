#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "rotmap/error.hpp"
#include "rotmap/regularizer.hpp"

using rotmap::Regularizer;

namespace {

std::vector<Regularizer> family() {
  return {Regularizer::entropic(), Regularizer::polynomial(1.25), Regularizer::polynomial(1.5),
          Regularizer::polynomial(1.75), Regularizer::polynomial(2.0)};
}

// sup_{z >= 0} s z - h(z) by golden-section search on a bracket that
// contains the maximiser.
double brute_conjugate(const Regularizer& r, double s) {
  double lo = 0.0;
  double hi = 1.0;
  while (s * hi - r.h(hi) > s * (hi / 2) - r.h(hi / 2)) hi *= 2.0;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - phi * (hi - lo);
    const double b = lo + phi * (hi - lo);
    if (s * a - r.h(a) > s * b - r.h(b)) hi = b; else lo = a;
  }
  const double z = 0.5 * (lo + hi);
  return std::max(s * z - r.h(z), -r.h(0.0));
}

}  // namespace

TEST_CASE("h vanishes at 1 and h(0) matches the family definition") {
  for (const auto& r : family()) CHECK(r.h(1.0) == doctest::Approx(0.0));
  CHECK(Regularizer::entropic().h(0.0) == 0.0);
  CHECK(Regularizer::polynomial(1.5).h(0.0) == doctest::Approx(-2.0));
  CHECK(Regularizer::polynomial(2.0).h(3.0) == doctest::Approx(8.0));
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(Regularizer::polynomial(1.0), rotmap::InputError);
  CHECK_THROWS_AS(Regularizer::polynomial(0.5), rotmap::InputError);
  CHECK_THROWS_AS(Regularizer::polynomial(2.5), rotmap::InputError);
  CHECK(Regularizer::from_p(1.0).is_entropic());
  CHECK(Regularizer::from_p(1.5).p() == 1.5);
  CHECK(Regularizer::polynomial(1.5).dual_exponent() == doctest::Approx(3.0));
  CHECK_THROWS_AS(Regularizer::entropic().dual_exponent(), rotmap::DomainError);
  CHECK_THROWS_AS(Regularizer::entropic().h(-1.0), rotmap::DomainError);
  CHECK_THROWS_AS(Regularizer::entropic().h_prime(0.0), rotmap::DomainError);
  CHECK(Regularizer::entropic().name() == "entropic");
  CHECK(Regularizer::polynomial(1.5).name() == "poly(p=1.5)");
}

TEST_CASE("h' agrees with central differences of h") {
  for (const auto& r : family()) {
    for (double z : {0.3, 1.0, 2.7}) {
      const double step = 1e-6;
      const double fd = (r.h(z + step) - r.h(z - step)) / (2 * step);
      CHECK(r.h_prime(z) == doctest::Approx(fd).epsilon(1e-7));
      const double fd2 = (r.h_prime(z + step) - r.h_prime(z - step)) / (2 * step);
      CHECK(r.h_second(z) == doctest::Approx(fd2).epsilon(1e-6));
    }
  }
}

TEST_CASE("h_prime_inv inverts h' on its image") {
  for (const auto& r : family()) {
    for (double z : {1e-3, 0.2, 1.0, 5.0}) CHECK(r.h_prime_inv(r.h_prime(z)) == doctest::Approx(z).epsilon(1e-12));
  }
  // polynomial members clamp to zero off the image of h'
  CHECK(Regularizer::polynomial(1.5).h_prime_inv(-2.0) == 0.0);
  CHECK(Regularizer::polynomial(2.0).h_prime_inv(0.0) == 0.0);
  // p = 2 closed form (h')^{-1}(xi) = xi/2
  CHECK(Regularizer::polynomial(2.0).h_prime_inv(3.0) == doctest::Approx(1.5));
}

TEST_CASE("h_star matches a brute-force Legendre transform") {
  for (const auto& r : family()) {
    for (double s : {-1.5, -0.1, 0.2, 1.0, 2.5}) {
      CHECK(r.h_star(s) == doctest::Approx(brute_conjugate(r, s)).epsilon(1e-8));
    }
  }
  // hand-derived closed forms
  CHECK(Regularizer::entropic().h_star(2.0) == doctest::Approx(std::exp(1.0)));
  CHECK(Regularizer::polynomial(2.0).h_star(2.0) == doctest::Approx(2.0));  // s^2/4 + 1
  CHECK(Regularizer::polynomial(2.0).h_star(-1.0) == doctest::Approx(1.0));
}

TEST_CASE("derivatives of h_star are h_prime_inv and conjugate_weight") {
  for (const auto& r : family()) {
    for (double s : {0.3, 1.0, 2.0}) {
      const double step = 1e-5;
      const double d1 = (r.h_star(s + step) - r.h_star(s - step)) / (2 * step);
      CHECK(r.h_prime_inv(s) == doctest::Approx(d1).epsilon(1e-7));
      const double d2 = (r.h_prime_inv(s + step) - r.h_prime_inv(s - step)) / (2 * step);
      CHECK(r.conjugate_weight(s) == doctest::Approx(d2).epsilon(1e-6));
      CHECK(r.conjugate_weight(s) == doctest::Approx(1.0 / r.h_second(r.h_prime_inv(s))).epsilon(1e-12));
    }
  }
  CHECK(Regularizer::polynomial(1.5).conjugate_weight(-1.0) == 0.0);
}

TEST_CASE("property: Fenchel-Young inequality with equality at the maximiser") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> zs(0.0, 4.0);
  std::uniform_real_distribution<double> ss(-3.0, 3.0);
  for (const auto& r : family()) {
    for (int t = 0; t < 200; ++t) {
      const double z = zs(gen);
      const double s = ss(gen);
      CHECK(r.h(z) + r.h_star(s) >= s * z - 1e-12);
      const double zs_opt = r.h_prime_inv(s);
      if (zs_opt > 0.0) CHECK(r.h(zs_opt) + r.h_star(s) == doctest::Approx(s * zs_opt).epsilon(1e-10));
    }
  }
}

TEST_CASE("property: h_prime_inv is nondecreasing, strictly where positive") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> xs(-5.0, 5.0);
  for (const auto& r : family()) {
    for (int t = 0; t < 500; ++t) {
      double a = xs(gen);
      double b = xs(gen);
      if (a > b) std::swap(a, b);
      CHECK(r.h_prime_inv(a) <= r.h_prime_inv(b));
      if (r.h_prime_inv(b) > 0.0 && b - a > 1e-9) CHECK(r.h_prime_inv(a) < r.h_prime_inv(b));
    }
  }
}

TEST_CASE("property: polynomial members approach the entropic one as p decreases to 1") {
  // h_p - (z - 1)/(p - 1) -> z log z; the affine part does not change plans of fixed mass.
  const Regularizer ent = Regularizer::entropic();
  for (double z : {0.5, 1.0, 2.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double p : {1.5, 1.25, 1.1, 1.01}) {
      const double gap = std::abs(Regularizer::polynomial(p).h(z) - (z - 1.0) / (p - 1.0) - ent.h(z));
      CHECK(gap <= prev);
      prev = gap;
    }
    CHECK(prev < 0.02);
  }
}

TEST_CASE("extreme arguments stay finite or hit the correct limit") {
  const auto r = Regularizer::polynomial(1.1);
  CHECK(r.h_prime_inv(1e-300) >= 0.0);
  CHECK(std::isfinite(r.h_star(1e-300)));
  CHECK(Regularizer::entropic().h_prime_inv(-800.0) == 0.0);
}
