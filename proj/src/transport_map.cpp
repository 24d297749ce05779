#include "rotmap/transport_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "rotmap/error.hpp"
#include "rotmap/parallel.hpp"

namespace rotmap {

namespace {

std::optional<std::size_t> find_atom(const DiscreteMeasure& m, const Point& target, double tol) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    if ((m.points().row(static_cast<Eigen::Index>(i)).transpose() - target).cwiseAbs().maxCoeff() <= tol) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace

double support_radius(const Plan& plan, const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                      const Regularizer& reg, std::size_t x_index) {
  const Point x = lambda.point(x_index);
  if (!reg.is_entropic()) {
    double r = 0.0;
    plan.for_each_positive(x_index, [&](std::size_t j, double) { r = std::max(r, (mu.point(j) - x).norm()); });
    return r;
  }
  std::vector<std::pair<double, std::size_t>> mass;
  double total = 0.0;
  plan.for_each_positive(x_index, [&](std::size_t j, double z) {
    mass.emplace_back(z * mu.weight(j), j);
    total += z * mu.weight(j);
  });
  std::sort(mass.begin(), mass.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const double target = (1.0 - 1e-6) * total;
  double acc = 0.0;
  double r = 0.0;
  for (const auto& [w, j] : mass) {
    r = std::max(r, (mu.point(j) - x).norm());
    acc += w;
    if (acc >= target) break;
  }
  return r;
}

MapSample t_eps(const DualPotentials& pot, const Plan& plan, const DiscreteMeasure& lambda,
                const DiscreteMeasure& mu, std::size_t x_index) {
  if (x_index >= lambda.size()) throw InputError("x_index out of range");
  const double eps2 = pot.eps * pot.eps;
  const Point x = lambda.point(x_index);
  const auto i = static_cast<Eigen::Index>(x_index);

  double mass = 0.0;
  Point acc = Point::Zero(mu.dim());
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const Point y = mu.point(j);
    const double psi = pot.f[i] + pot.g[static_cast<Eigen::Index>(j)] - (x - y).squaredNorm();
    const double w = pot.reg.conjugate_weight(psi / eps2) * mu.weight(j);
    mass += w;
    acc += w * y;
  }
  if (!(mass > 0.0)) {
    std::ostringstream msg;
    msg << "zero weighted mass at x_index " << x_index << " (unconverged or degenerate potentials)";
    throw DomainError(msg.str());
  }
  MapSample s;
  s.index = x_index;
  s.x = x;
  s.T = acc / mass;
  s.weight_mass = mass;
  s.support_radius = support_radius(plan, lambda, mu, pot.reg, x_index);
  return s;
}

std::vector<MapSample> map_samples(const DualPotentials& pot, const Plan& plan, const DiscreteMeasure& lambda,
                                   const DiscreteMeasure& mu, int threads) {
  std::vector<MapSample> out(lambda.size());
  detail::parallel_for(lambda.size(), threads, [&](std::size_t i) { out[i] = t_eps(pot, plan, lambda, mu, i); });
  return out;
}

Point barycentric_projection(const Plan& plan, const DiscreteMeasure& mu, std::size_t x_index) {
  double mass = 0.0;
  Point acc = Point::Zero(mu.dim());
  plan.for_each_positive(x_index, [&](std::size_t j, double z) {
    mass += z * mu.weight(j);
    acc += z * mu.weight(j) * mu.point(j);
  });
  if (!(mass > 0.0)) throw DomainError("empty plan row");
  return acc / mass;
}

GradientCheck grad_f_check(const DualPotentials& pot, const Plan& plan, const DiscreteMeasure& lambda,
                           const DiscreteMeasure& mu, std::size_t x_index, double step) {
  if (!(step > 0.0)) throw InputError("step must be > 0");
  const Point x = lambda.point(x_index);
  const int d = lambda.dim();
  const double tol = 1e-9 * (1.0 + x.cwiseAbs().maxCoeff() + step);
  GradientCheck out;
  out.fd_gradient.resize(d);
  for (int k = 0; k < d; ++k) {
    Point fwd = x;
    Point bwd = x;
    fwd[k] += step;
    bwd[k] -= step;
    const auto jf = find_atom(lambda, fwd, tol);
    const auto jb = find_atom(lambda, bwd, tol);
    if (!jf || !jb) throw InputError("finite-difference stencil leaves supp lambda (boundary atom)");
    out.fd_gradient[k] =
        (pot.f[static_cast<Eigen::Index>(*jf)] - pot.f[static_cast<Eigen::Index>(*jb)]) / (2.0 * step);
  }
  const MapSample s = t_eps(pot, plan, lambda, mu, x_index);
  out.map_gradient = 2.0 * (x - s.T);
  out.discrepancy = (out.fd_gradient - out.map_gradient).cwiseAbs().maxCoeff();
  return out;
}

LipschitzStat lipschitz_stat(const std::vector<MapSample>& samples, const InteriorWindow& window,
                             double max_pair_distance, double min_pair_distance) {
  std::vector<const MapSample*> inside;
  for (const auto& s : samples) {
    if (window.contains(s.x)) inside.push_back(&s);
  }
  if (inside.size() < 2) throw InputError("fewer than two samples inside the window");
  LipschitzStat stat{window, 0.0, 0};
  for (std::size_t a = 0; a < inside.size(); ++a) {
    for (std::size_t b = a + 1; b < inside.size(); ++b) {
      const double dx = (inside[a]->x - inside[b]->x).norm();
      if (dx <= 0.0 || dx > max_pair_distance || dx < min_pair_distance) continue;
      stat.lip_constant = std::max(stat.lip_constant, (inside[a]->T - inside[b]->T).norm() / dx);
      ++stat.pair_count;
    }
  }
  if (stat.pair_count == 0) throw InputError("no sample pair within max_pair_distance inside the window");
  return stat;
}

}  // namespace rotmap
