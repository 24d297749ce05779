#include "rotmap/baseline_ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

#include "rotmap/error.hpp"

namespace rotmap {

namespace {

void check_masses(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
  if (lambda.dim() != mu.dim()) throw InputError("marginals live in different dimensions");
  const double ma = lambda.total_mass();
  const double mb = mu.total_mass();
  if (std::abs(ma - mb) > 1e-12 * std::max(ma, mb)) throw InputError("marginal masses differ");
}

// T as coupling barycentre, f by c-concave reconstruction from f' = 2(x - T)
// is done by the callers; this fills map and cost from the coupling.
void finish_from_coupling(ExactSolution& sol, const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
  sol.map.assign(lambda.size(), Point::Zero(lambda.dim()));
  sol.cost = 0.0;
  for (const auto& e : sol.coupling) {
    sol.map[e.i] += e.mass * mu.point(e.j);
    sol.cost += e.mass * (lambda.point(e.i) - mu.point(e.j)).squaredNorm();
  }
  for (std::size_t i = 0; i < lambda.size(); ++i) sol.map[i] /= lambda.weight(i);
}

void c_transform_g(ExactSolution& sol, const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
  const Eigen::MatrixXd C = cost_matrix(lambda, mu);
  sol.potential_g.resize(C.cols());
  for (Eigen::Index j = 0; j < C.cols(); ++j) sol.potential_g[j] = (C.col(j) - sol.potential_f).minCoeff();
}

}  // namespace

Plan ExactSolution::to_plan(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) const {
  std::vector<std::vector<std::pair<int, double>>> rows(lambda.size());
  for (const auto& e : coupling) {
    rows[e.i].emplace_back(static_cast<int>(e.j), e.mass / (lambda.weight(e.i) * mu.weight(e.j)));
  }
  Plan plan(lambda.size(), mu.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    Plan::Row row;
    row.dense = false;
    for (const auto& [j, z] : rows[i]) {
      if (!row.index.empty() && row.index.back() == j) {
        row.value.back() += z;
        continue;
      }
      row.index.push_back(j);
      row.value.push_back(z);
    }
    plan.set_row(i, std::move(row));
  }
  return plan;
}

ExactSolution exact_1d(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
  if (lambda.dim() != 1 || mu.dim() != 1) throw InputError("exact_1d requires d = 1");
  check_masses(lambda, mu);

  auto sorted = [](const DiscreteMeasure& m) {
    std::vector<std::size_t> order(m.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return m.points()(static_cast<Eigen::Index>(a), 0) <
                                                         m.points()(static_cast<Eigen::Index>(b), 0); });
    return order;
  };
  const auto xs = sorted(lambda);
  const auto ys = sorted(mu);

  ExactSolution sol;
  const std::size_t n = lambda.size();
  auto cost = [&](std::size_t k, std::size_t l) {
    const double d = lambda.points()(static_cast<Eigen::Index>(xs[k]), 0) - mu.points()(static_cast<Eigen::Index>(ys[l]), 0);
    return d * d;
  };
  // North-west corner rule on the sorted atoms. The potentials satisfy
  // f + g = c on every coupled cell.
  std::vector<double> fs(n, 0.0);
  std::vector<double> gs(mu.size(), 0.0);
  const double scale = lambda.total_mass();
  std::size_t p = 0;
  std::size_t q = 0;
  double ra = lambda.weight(xs[0]);
  double rb = mu.weight(ys[0]);
  gs[0] = cost(0, 0);
  while (p < xs.size() && q < ys.size()) {
    const double t = std::min(ra, rb);
    if (t > 0.0) sol.coupling.push_back({xs[p], ys[q], t});
    ra -= t;
    rb -= t;
    const bool row_done = ra <= 1e-15 * scale;
    const bool col_done = rb <= 1e-15 * scale;
    if (row_done && ++p < xs.size()) {
      ra = lambda.weight(xs[p]);
      fs[p] = cost(p, q) - gs[q];
      if (col_done && q + 1 < ys.size()) {
        // Degenerate step: f[p] may take any value keeping the two zero-mass
        // corner cells feasible. The midpoint matches the continuum potential.
        const double lo = cost(p, q + 1) - cost(p - 1, q + 1) + fs[p - 1];
        fs[p] = 0.5 * (fs[p] + lo);
      }
    }
    if (col_done && ++q < ys.size() && p < xs.size()) {
      rb = mu.weight(ys[q]);
      gs[q] = cost(p, q) - fs[p];
    }
    if (!row_done && !col_done) break;  // unreachable with t = min(ra, rb)
  }
  finish_from_coupling(sol, lambda, mu);

  sol.potential_f.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) sol.potential_f[static_cast<Eigen::Index>(xs[k])] = fs[k];
  c_transform_g(sol, lambda, mu);
  return sol;
}

ExactSolution exact_assignment(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
  check_masses(lambda, mu);
  const std::size_t n = lambda.size();
  if (mu.size() != n) throw InputError("exact_assignment requires equal atom counts; use exact_1d");
  if (n > kMaxAssignmentSize) {
    std::ostringstream msg;
    msg << "exact_assignment supports n <= " << kMaxAssignmentSize << "; use exact_1d or an analytic case";
    throw InputError(msg.str());
  }
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(lambda.weight(i) - w) > 1e-12 * w || std::abs(mu.weight(i) - w) > 1e-12 * w) {
      throw InputError("exact_assignment requires uniform weights 1/n; use exact_1d or an analytic case");
    }
  }

  const Eigen::MatrixXd C = cost_matrix(lambda, mu);
  const double c_max = std::max(C.maxCoeff(), 1e-300);
  const double scale = std::min(1e12, 1e15 / c_max);
  using i64 = std::int64_t;
  auto cost = [&](std::size_t i, std::size_t j) {
    return static_cast<i64>(std::llround(C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * scale));
  };

  // Shortest augmenting path Hungarian method, 1-based with sentinel column 0.
  const i64 inf = std::numeric_limits<i64>::max() / 4;
  std::vector<i64> u(n + 1, 0);
  std::vector<i64> v(n + 1, 0);
  std::vector<std::size_t> match(n + 1, 0);  // match[col] = row
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<i64> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t i0 = match[col0];
      i64 delta = inf;
      std::size_t col1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const i64 cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  ExactSolution sol;
  for (std::size_t j = 1; j <= n; ++j) sol.coupling.push_back({match[j] - 1, j - 1, w});
  std::sort(sol.coupling.begin(), sol.coupling.end(), [](const auto& a, const auto& b) { return a.i < b.i; });
  finish_from_coupling(sol, lambda, mu);
  sol.potential_f.resize(static_cast<Eigen::Index>(n));
  sol.potential_g.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) sol.potential_f[static_cast<Eigen::Index>(i)] = static_cast<double>(u[i + 1]) / scale;
  for (std::size_t j = 0; j < n; ++j) sol.potential_g[static_cast<Eigen::Index>(j)] = static_cast<double>(v[j + 1]) / scale;
  const double shift = sol.potential_f[0];
  sol.potential_f.array() -= shift;
  sol.potential_g.array() += shift;
  return sol;
}

ExactSolution exact_translation(const DiscreteMeasure& lambda, const DiscreteMeasure& mu, const Point& shift) {
  check_masses(lambda, mu);
  if (shift.size() != lambda.dim()) throw InputError("shift dimension mismatch");
  if (lambda.size() != mu.size()) throw InputError("mu is not a translate of lambda");
  const double tol = 1e-9 * (1.0 + shift.cwiseAbs().maxCoeff());
  ExactSolution sol;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const bool same_atom = (lambda.point(i) + shift - mu.point(i)).cwiseAbs().maxCoeff() <= tol;
    if (!same_atom || std::abs(lambda.weight(i) - mu.weight(i)) > 1e-12 * lambda.weight(i)) {
      throw InputError("mu is not an index-aligned translate of lambda");
    }
    sol.coupling.push_back({i, i, lambda.weight(i)});
  }
  finish_from_coupling(sol, lambda, mu);
  // f(x) = -2 <shift, x> has gradient 2 (x - T(x)).
  sol.potential_f = -2.0 * (lambda.points() * shift);
  sol.potential_f.array() -= sol.potential_f[0];
  c_transform_g(sol, lambda, mu);
  return sol;
}

std::pair<double, double> stability_gap(const Plan& plan, const DiscreteMeasure& lambda,
                                        const DiscreteMeasure& mu, const ExactSolution& exact,
                                        double lipschitz_L) {
  if (exact.map.size() != lambda.size()) throw InputError("exact solution does not match lambda");
  double lhs = 0.0;
  double transport = 0.0;
  double exact_cost = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    const Point x = lambda.point(i);
    const Point& tx = exact.map[i];
    double row_lhs = 0.0;
    double row_cost = 0.0;
    plan.for_each_positive(i, [&](std::size_t j, double z) {
      const Point y = mu.point(j);
      row_lhs += (tx - y).squaredNorm() * z * mu.weight(j);
      row_cost += (x - y).squaredNorm() * z * mu.weight(j);
    });
    lhs += row_lhs * lambda.weight(i);
    transport += row_cost * lambda.weight(i);
    exact_cost += (x - tx).squaredNorm() * lambda.weight(i);
  }
  return {lhs, 2.0 * lipschitz_L * (transport - exact_cost)};
}

}  // namespace rotmap
