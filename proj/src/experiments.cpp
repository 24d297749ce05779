#include "rotmap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "rotmap/error.hpp"
#include "rotmap/parallel.hpp"
#include "rotmap/transport_map.hpp"

namespace rotmap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRoundoffFloor = 1e-12;

Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) p[k++] = x;
  return p;
}

Point unit_lo(int d) { return Point::Zero(d); }
Point unit_hi(int d) { return Point::Ones(d); }

double reg_p(const Regularizer& reg) { return reg.is_entropic() ? 1.0 : reg.p(); }

std::vector<std::size_t> window_atoms(const DiscreteMeasure& m, const InteriorWindow& w) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (w.contains(m.points().row(static_cast<Eigen::Index>(i)).transpose())) out.push_back(i);
  }
  if (out.empty()) throw InputError("interior window contains no atoms");
  return out;
}

struct SweepContext {
  Instance inst;
  InteriorWindow window;
  std::vector<std::size_t> inside;
};

SweepContext prepare(const SweepConfig& cfg) {
  validate(cfg);
  SweepContext ctx{make_instance(cfg.instance), {}, {}};
  ctx.window = cfg.window ? *cfg.window : default_window(ctx.inst.lambda);
  ctx.inside = window_atoms(ctx.inst.lambda, ctx.window);
  return ctx;
}

Solution solve_at(const SweepContext& ctx, const SweepConfig& cfg, double eps) {
  return solve(ctx.inst.lambda, ctx.inst.mu, cfg.reg, eps, cfg.solver);
}

// max over the row support of |y - centre|.
double row_spread(const Plan& plan, const DiscreteMeasure& mu, std::size_t i, const Point& centre) {
  double r = 0.0;
  plan.for_each_positive(i, [&](std::size_t j, double) { r = std::max(r, (mu.point(j) - centre).norm()); });
  return r;
}

void check_exact_matches(const ExactSolution& exact, const Instance& inst) {
  if (exact.map.size() != inst.lambda.size() || exact.potential_f.size() != static_cast<Eigen::Index>(inst.lambda.size())) {
    throw InputError("exact solution does not match the sweep instance");
  }
}

std::vector<double> solve_columns(const Solution& s) {
  return {static_cast<double>(s.report.iterations), s.report.residual, s.report.primal, s.report.dual};
}

const std::vector<std::string> kSolveColumns = {"iterations", "residual", "primal", "dual"};

// Fits the column `value` (against `abscissa`), dropping nonpositive points.
std::optional<RateFit> fit_column(ScanResult& res, const std::vector<double>& eps, const std::vector<double>& abscissa,
                                  const std::vector<double>& value) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < value.size(); ++k) {
    const bool already = std::any_of(res.dropped.begin(), res.dropped.end(),
                                     [&](const DroppedPoint& d) { return d.eps == eps[k]; });
    if (already) continue;
    if (!(value[k] > 0.0) || !std::isfinite(value[k])) {
      res.dropped.push_back({eps[k], "nonpositive value"});
      continue;
    }
    pts.emplace_back(abscissa[k], value[k]);
  }
  if (pts.size() < 3) {
    res.checks.emplace_back("enough_fit_points", false);
    return std::nullopt;
  }
  return fit_rate(pts);
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& instance_names() {
  static const std::vector<std::string> names = {"translation1d", "dilation1d", "translation2d",
                                                 "holder1d",      "holder2d",   "selfmap"};
  return names;
}

Instance make_instance(const InstanceSpec& spec) {
  const int n = spec.n_per_axis;
  const double two_pi = 2.0 * std::numbers::pi;
  if (spec.name == "translation1d") {
    auto lambda = uniform_on_box(1, unit_lo(1), unit_hi(1), n);
    auto mu = pushforward_affine(lambda, Eigen::MatrixXd::Identity(1, 1), vec({1.0}), 1.0);
    auto exact = exact_1d(lambda, mu);
    return {spec, std::move(lambda), std::move(mu), std::move(exact)};
  }
  if (spec.name == "dilation1d") {
    auto lambda = uniform_on_box(1, unit_lo(1), unit_hi(1), n);
    auto mu = pushforward_affine(lambda, 2.0 * Eigen::MatrixXd::Identity(1, 1), vec({0.0}), 1.0);
    auto exact = exact_1d(lambda, mu);
    return {spec, std::move(lambda), std::move(mu), std::move(exact)};
  }
  if (spec.name == "translation2d") {
    const Point shift = vec({1.0, 0.5});
    auto lambda = uniform_on_box(2, unit_lo(2), unit_hi(2), n);
    auto mu = pushforward_affine(lambda, Eigen::MatrixXd::Identity(2, 2), shift, 1.0);
    auto exact = exact_translation(lambda, mu, shift);
    return {spec, std::move(lambda), std::move(mu), std::move(exact)};
  }
  if (spec.name == "holder1d") {
    auto lambda = holder_perturbed(1, unit_lo(1), unit_hi(1), n, spec.amplitude, vec({two_pi}), spec.seed);
    auto mu = uniform_on_box(1, unit_lo(1), unit_hi(1), n);
    auto exact = exact_1d(lambda, mu);
    return {spec, std::move(lambda), std::move(mu), std::move(exact)};
  }
  if (spec.name == "holder2d") {
    auto lambda = holder_perturbed(2, unit_lo(2), unit_hi(2), n, spec.amplitude, vec({two_pi, two_pi}), spec.seed);
    auto mu = uniform_on_box(2, unit_lo(2), unit_hi(2), n);
    return {spec, std::move(lambda), std::move(mu), std::nullopt};
  }
  if (spec.name == "selfmap") {
    auto lambda = uniform_on_box(1, unit_lo(1), unit_hi(1), n);
    auto mu = lambda;
    auto exact = exact_1d(lambda, mu);
    return {spec, std::move(lambda), std::move(mu), std::move(exact)};
  }
  std::ostringstream msg;
  msg << "unknown instance '" << spec.name << "'; known:";
  for (const auto& name : instance_names()) msg << ' ' << name;
  throw InputError(msg.str());
}

// ---------------------------------------------------------------------------

void validate(const SweepConfig& cfg) {
  const auto& e = cfg.eps_values;
  if (e.size() < 4) throw InputError("a sweep needs at least 4 eps values");
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (!(e[k] > 0.0 && e[k] <= 1.0)) throw InputError("eps values must lie in (0, 1]");
    if (k > 0 && !(e[k] < e[k - 1])) throw InputError("eps values must be strictly decreasing");
  }
  if (cfg.window && !(cfg.window->radius > 0.0)) throw InputError("window radius must be > 0");
}

std::vector<double> geometric_eps(double eps_from, double eps_to, int points) {
  if (points < 2) throw InputError("a geometric sweep needs at least 2 points");
  if (!(eps_from > 0.0 && eps_to > 0.0)) throw InputError("eps bounds must be > 0");
  std::vector<double> out(static_cast<std::size_t>(points));
  const double ratio = std::log(eps_to / eps_from) / (points - 1);
  for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = eps_from * std::exp(ratio * k);
  out.front() = eps_from;
  out.back() = eps_to;
  return out;
}

double tau(int d, const Regularizer& reg, double eps) {
  return std::pow(eps, 2.0 / (d * (reg_p(reg) - 1.0) + 2.0));
}

int mesh_rule_n(int d, const Regularizer& reg, double eps_min) {
  return static_cast<int>(std::ceil(8.0 / tau(d, reg, eps_min) - 1e-9));
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  std::ostringstream bad;
  for (const auto& [e, v] : points) {
    if (!(e > 0.0) || !(v > 0.0) || !std::isfinite(e) || !std::isfinite(v)) bad << " (" << e << ", " << v << ")";
  }
  if (!bad.str().empty()) throw InputError("fit_rate needs positive finite points; offending:" + bad.str());
  if (points.size() < 3) throw InputError("fit_rate needs at least 3 points");

  RateFit fit;
  const auto n = static_cast<double>(points.size());
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [e, v] : points) {
    fit.points.emplace_back(std::log(e), std::log(v));
    mx += fit.points.back().first;
    my += fit.points.back().second;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw InputError("fit_rate needs at least two distinct abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

std::vector<double> ScanTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InputError("no column '" + name + "'");
  const auto k = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

bool ScanResult::check(const std::string& name) const {
  for (const auto& [k, v] : checks) {
    if (k == name) return v;
  }
  throw InputError("no check '" + name + "'");
}

double ScanResult::prediction(const std::string& name) const {
  for (const auto& [k, v] : predictions) {
    if (k == name) return v;
  }
  throw InputError("no prediction '" + name + "'");
}

// ---------------------------------------------------------------------------

ScanResult scan_support_radius(const SweepConfig& cfg) {
  if (cfg.reg.is_entropic()) {
    throw InputError("entropic plans have full support; use scan_entropic_tails instead");
  }
  const SweepContext ctx = prepare(cfg);
  const int d = ctx.inst.lambda.dim();
  const double R = ctx.window.radius;

  ScanResult res;
  res.name = "support_radius";
  res.table.columns = {"eps", "tau", "support_radius", "energy_gap", "energy_term", "energy_dominated"};
  res.table.columns.insert(res.table.columns.end(), kSolveColumns.begin(), kSolveColumns.end());
  res.predictions = {{"slope", 2.0 / (d * (reg_p(cfg.reg) - 1.0) + 2.0)}};

  std::vector<double> radius;
  for (double eps : cfg.eps_values) {
    const Solution s = solve_at(ctx, cfg, eps);
    double r = 0.0;
    for (std::size_t i : ctx.inside) {
      const MapSample m = t_eps(s.potentials, s.plan, ctx.inst.lambda, ctx.inst.mu, i);
      r = std::max(r, row_spread(s.plan, ctx.inst.mu, i, m.T));
    }
    // Energy term of the local bound, E = gap / R^{d+2}, as a length.
    double gap = kNaN;
    double energy = kNaN;
    double dominated = kNaN;
    if (ctx.inst.exact) {
      gap = s.report.primal - ctx.inst.exact->cost;
      const double E = std::max(gap, 0.0) / std::pow(R, d + 2);
      energy = R * std::max(std::sqrt(E), std::pow(E, 1.0 / (d + 2)));
      dominated = energy > tau(d, cfg.reg, eps) ? 1.0 : 0.0;
    }
    std::vector<double> row = {eps, tau(d, cfg.reg, eps), r, gap, energy, dominated};
    const auto sc = solve_columns(s);
    row.insert(row.end(), sc.begin(), sc.end());
    res.table.rows.push_back(std::move(row));
    radius.push_back(r);
  }
  res.fit = fit_column(res, cfg.eps_values, cfg.eps_values, radius);
  return res;
}

ScanResult scan_energy_gap(const SweepConfig& cfg) {
  const SweepContext ctx = prepare(cfg);
  if (!ctx.inst.exact) throw InputError("instance '" + cfg.instance.name + "' has no exact baseline");
  const int d = ctx.inst.lambda.dim();
  const double p = reg_p(cfg.reg);
  const bool entropic = cfg.reg.is_entropic();

  ScanResult res;
  res.name = "energy_gap";
  res.table.columns = {"eps", "abscissa", "exact_cost", "gap", "gap_ratio", "gap_tol"};
  res.table.columns.insert(res.table.columns.end(), kSolveColumns.begin(), kSolveColumns.end());
  const double rate = 4.0 / (d * (p - 1.0) + 2.0);
  res.predictions = {{"slope", entropic ? 1.0 : rate},
                     {"exponent_rate", rate},
                     {"exponent_lemma_printed", 4.0 / (p * (d - 1.0) + 2.0)}};

  std::vector<double> abscissa;
  std::vector<double> gaps;
  double max_ratio = 0.0;
  for (double eps : cfg.eps_values) {
    const Solution s = solve_at(ctx, cfg, eps);
    const double gap = s.report.primal - ctx.inst.exact->cost;
    const double x = entropic ? eps * eps * std::log(1.0 / (eps * eps)) : eps;
    const double ratio = gap / (entropic ? x : std::pow(eps, rate));
    const double tol = gap_tolerance(s.report.primal);
    if (gap < 10.0 * tol) res.dropped.push_back({eps, "gap below 10 gap_tol"});
    max_ratio = std::max(max_ratio, ratio);
    std::vector<double> row = {eps, x, ctx.inst.exact->cost, gap, ratio, tol};
    const auto sc = solve_columns(s);
    row.insert(row.end(), sc.begin(), sc.end());
    res.table.rows.push_back(std::move(row));
    abscissa.push_back(x);
    gaps.push_back(gap);
  }
  res.predictions.emplace_back("max_gap_ratio", max_ratio);
  if (entropic) res.checks.emplace_back("gap_ratio_at_most_1", max_ratio <= 1.0);
  res.fit = fit_column(res, cfg.eps_values, abscissa, gaps);
  return res;
}

ScanResult scan_bias(const SweepConfig& cfg, const ExactSolution& exact) {
  if (cfg.reg.is_entropic()) throw InputError("bias radius needs a polynomial regulariser");
  const SweepContext ctx = prepare(cfg);
  check_exact_matches(exact, ctx.inst);
  const int d = ctx.inst.lambda.dim();
  const double p = reg_p(cfg.reg);

  ScanResult res;
  res.name = "bias";
  res.table.columns = {"eps", "bias_radius", "support_radius"};
  res.table.columns.insert(res.table.columns.end(), kSolveColumns.begin(), kSolveColumns.end());
  res.predictions = {{"global_exponent", 4.0 / ((d * (p - 1.0) + 2.0) * (d + 2.0))},
                     {"local_exponent", 2.0 / (d * (p - 1.0) + 2.0)}};

  std::vector<double> bias;
  for (double eps : cfg.eps_values) {
    const Solution s = solve_at(ctx, cfg, eps);
    double b = 0.0;
    double r = 0.0;
    for (std::size_t i : ctx.inside) {
      b = std::max(b, row_spread(s.plan, ctx.inst.mu, i, exact.map[i]));
      const MapSample m = t_eps(s.potentials, s.plan, ctx.inst.lambda, ctx.inst.mu, i);
      r = std::max(r, row_spread(s.plan, ctx.inst.mu, i, m.T));
    }
    std::vector<double> row = {eps, b, r};
    const auto sc = solve_columns(s);
    row.insert(row.end(), sc.begin(), sc.end());
    res.table.rows.push_back(std::move(row));
    bias.push_back(b);
  }
  res.fit = fit_column(res, cfg.eps_values, cfg.eps_values, bias);
  return res;
}

ScanResult scan_entropic_tails(const SweepConfig& cfg, double Lambda) {
  if (!cfg.reg.is_entropic()) throw InputError("tail scan needs the entropic regulariser");
  if (!(Lambda > 0.0)) throw InputError("Lambda must be > 0");
  const SweepContext ctx = prepare(cfg);
  const double R = ctx.window.radius;
  const auto& lambda = ctx.inst.lambda;
  const auto& mu = ctx.inst.mu;

  ScanResult res;
  res.name = "entropic_tails";
  res.table.columns = {"eps", "eps_over_R", "tail", "ratio_to_previous"};
  res.table.columns.insert(res.table.columns.end(), kSolveColumns.begin(), kSolveColumns.end());
  res.predictions = {{"R", R}, {"Lambda", Lambda}};

  double prev_tail = kNaN;
  double prev_ratio = kNaN;
  bool shrinking = true;
  bool nonnegative = true;
  for (double eps : cfg.eps_values) {
    const Solution s = solve_at(ctx, cfg, eps);
    double tail = 0.0;
    for (std::size_t i : ctx.inside) {
      const Point x = lambda.point(i);
      double t = 0.0;
      s.plan.for_each_positive(i, [&](std::size_t j, double z) {
        const double dist2 = (mu.point(j) - x).squaredNorm();
        if (dist2 >= Lambda * Lambda * R * R) t += dist2 * z * mu.weight(j);
      });
      tail = std::max(tail, t / (R * R));
    }
    nonnegative = nonnegative && tail >= 0.0;
    double ratio = kNaN;
    if (!std::isnan(prev_tail)) {
      // A vanished tail counts as complete decay.
      ratio = prev_tail > 0.0 ? tail / prev_tail : 0.0;
      if (!std::isnan(prev_ratio) && ratio > prev_ratio) shrinking = false;
      prev_ratio = ratio;
    }
    prev_tail = tail;
    std::vector<double> row = {eps, eps / R, tail, ratio};
    const auto sc = solve_columns(s);
    row.insert(row.end(), sc.begin(), sc.end());
    res.table.rows.push_back(std::move(row));
  }
  res.checks = {{"tail_nonnegative", nonnegative}, {"ratios_shrinking", shrinking}};
  return res;
}

ScanResult scan_map_convergence(const SweepConfig& cfg, const ExactSolution& exact) {
  const SweepContext ctx = prepare(cfg);
  check_exact_matches(exact, ctx.inst);
  const auto& lambda = ctx.inst.lambda;
  const int d = lambda.dim();
  const double h = lambda.grid_spacing();

  // Lipschitz pairs span a fixed number of lattice cells so that the
  // one-cell jumps of a polynomial support do not dominate the ratio.
  const double tau_min = tau(d, cfg.reg, cfg.eps_values.back());
  double min_pair = 0.0;
  double max_pair = tau_min / 2.0;
  if (h > 0.0) {
    const double stride = std::max(1.0, std::floor(tau_min / (2.0 * h)));
    min_pair = stride * h * (1.0 - 1e-9);
    max_pair = stride * h * (1.0 + 1e-9);
  }

  ScanResult res;
  res.name = "map_convergence";
  res.table.columns = {"eps", "map_error", "potential_error", "lip_constant", "grid_spacing"};
  res.table.columns.insert(res.table.columns.end(), kSolveColumns.begin(), kSolveColumns.end());
  res.predictions = {{"lipschitz_pair_distance", 0.5 * (min_pair + max_pair)}};

  std::vector<double> map_err;
  std::vector<double> pot_err;
  std::vector<double> lips;
  for (double eps : cfg.eps_values) {
    const Solution s = solve_at(ctx, cfg, eps);
    std::vector<MapSample> samples(ctx.inside.size());
    detail::parallel_for(ctx.inside.size(), cfg.solver.threads, [&](std::size_t k) {
      samples[k] = t_eps(s.potentials, s.plan, lambda, ctx.inst.mu, ctx.inside[k]);
    });
    double me = 0.0;
    double shift = 0.0;
    for (const auto& m : samples) {
      me = std::max(me, (m.T - exact.map[m.index]).norm());
      shift += s.potentials.f[static_cast<Eigen::Index>(m.index)] - exact.potential_f[static_cast<Eigen::Index>(m.index)];
    }
    shift /= static_cast<double>(samples.size());
    double pe = 0.0;
    for (const auto& m : samples) {
      const auto i = static_cast<Eigen::Index>(m.index);
      pe = std::max(pe, std::abs(s.potentials.f[i] - exact.potential_f[i] - shift));
    }
    double lip = kNaN;
    try {
      lip = lipschitz_stat(samples, ctx.window, max_pair, min_pair).lip_constant;
    } catch (const InputError&) {
      // window too small for the pair distance; leave NaN
    }
    std::vector<double> row = {eps, me, pe, lip, h};
    const auto sc = solve_columns(s);
    row.insert(row.end(), sc.begin(), sc.end());
    res.table.rows.push_back(std::move(row));
    map_err.push_back(me);
    pot_err.push_back(pe);
    lips.push_back(lip);
  }

  // Once an error reaches round-off it has converged; further "decrease"
  // would only compare noise.
  auto settled = [](double v) { return v <= kRoundoffFloor; };
  bool map_dec = true;
  bool pot_dec = true;
  for (std::size_t k = 1; k < map_err.size(); ++k) {
    map_dec = map_dec && (map_err[k] < map_err[k - 1] || (settled(map_err[k]) && settled(map_err[k - 1])));
    pot_dec = pot_dec && (pot_err[k] <= pot_err[k - 1] || (settled(pot_err[k]) && settled(pot_err[k - 1])));
  }
  const auto [lip_lo, lip_hi] = std::minmax_element(lips.begin(), lips.end());
  const bool lip_ok = std::none_of(lips.begin(), lips.end(), [](double v) { return std::isnan(v); });
  res.checks = {{"map_error_strictly_decreasing", map_dec},
                {"map_error_final_within_2h", h > 0.0 && map_err.back() <= 2.0 * h},
                {"potential_error_decreasing", pot_dec},
                {"lipschitz_within_factor_2", lip_ok && *lip_hi <= 2.0 * *lip_lo}};
  res.fit = fit_column(res, cfg.eps_values, cfg.eps_values, map_err);
  return res;
}

// ---------------------------------------------------------------------------

MonotonicityAudit audit_monotonicity(const Plan& plan, const DualPotentials& pot, const DiscreteMeasure& lambda,
                                     const DiscreteMeasure& mu, std::size_t n_quadruples, std::uint64_t seed,
                                     double tol, int threads) {
  if (plan.rows() != lambda.size() || plan.cols() != mu.size()) throw InputError("plan does not match marginals");
  std::vector<std::pair<std::size_t, std::size_t>> support;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    plan.for_each_positive(i, [&](std::size_t j, double) { support.emplace_back(i, j); });
  }
  MonotonicityAudit out;
  out.worst_margin = std::numeric_limits<double>::infinity();
  if (support.empty() || n_quadruples == 0) return out;

  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> draws(n_quadruples);
  for (auto& q : draws) q = {pick(gen), pick(gen)};

  const double eps2 = pot.eps * pot.eps;
  const Regularizer& reg = pot.reg;
  auto cost = [&](std::size_t i, std::size_t j) { return (lambda.point(i) - mu.point(j)).squaredNorm(); };
  auto hp = [&](std::size_t i, std::size_t j) {
    const double z = plan.at(i, j);
    if (reg.is_entropic() && !(z > 0.0)) {
      return (pot.f[static_cast<Eigen::Index>(i)] + pot.g[static_cast<Eigen::Index>(j)] - cost(i, j)) / eps2;
    }
    return reg.h_prime(z);
  };
  const double slack = 10.0 * tol / eps2;

  std::vector<double> margin(n_quadruples);
  detail::parallel_for(n_quadruples, threads, [&](std::size_t q) {
    const auto [x, y] = support[draws[q].first];
    const auto [xp, yp] = support[draws[q].second];
    const double delta = cost(x, yp) + cost(xp, y) - cost(x, y) - cost(xp, yp);
    const double lhs = hp(x, y) + hp(xp, yp);
    const double rhs = delta / eps2 + hp(xp, y) + hp(x, yp);
    margin[q] = rhs - lhs;
  });
  for (double m : margin) {
    if (m + slack < 0.0) ++out.violations;
    out.worst_margin = std::min(out.worst_margin, m);
  }
  out.quadruples = n_quadruples;
  return out;
}

RescalingAudit audit_rescaling(const DiscreteMeasure& lambda, const DiscreteMeasure& mu, const Regularizer& reg,
                               double eps, const Eigen::MatrixXd& A, const Point& b, double gamma, double kappa,
                               const SolverOptions& options) {
  const int d = lambda.dim();
  if (A.rows() != d || A.cols() != d) throw InputError("A must be d x d");
  if (!((A - A.transpose()).norm() <= 1e-12 * std::max(1.0, A.norm()))) throw InputError("A must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw InputError("A must be positive definite");
  if (!(gamma > 0.0) || !(kappa > 0.0)) throw InputError("gamma and kappa must be > 0");
  if (b.size() != d) throw InputError("b must have dimension d");

  const Eigen::MatrixXd A_inv = A.inverse();
  const DiscreteMeasure lambda_s = pushforward_affine(lambda, A_inv, Point::Zero(d), kappa);
  const DiscreteMeasure mu_s = pushforward_affine(mu, gamma * A, -gamma * (A * b), kappa);
  const double p = reg_p(reg);
  const double eps_s = eps * std::sqrt(gamma) * std::pow(kappa, 0.5 * (p - 1.0));

  const Solution orig = solve(lambda, mu, reg, eps, options);
  const Solution scaled = solve(lambda_s, mu_s, reg, eps_s, options);

  RescalingAudit out;
  out.eps_transformed = eps_s;
  const Eigen::MatrixXd Z = orig.plan.to_dense();
  const Eigen::MatrixXd Zs = scaled.plan.to_dense();
  out.plan_distance = (Zs - Z / kappa).cwiseAbs().maxCoeff();

  // x-only and y-only parts of the transformed cost.
  double nl_x = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const Point x = lambda.point(i);
    nl_x += lambda.weight(i) * ((A_inv * x).squaredNorm() - gamma * x.squaredNorm() + 2.0 * gamma * x.dot(b));
  }
  double nl_y = 0.0;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const Point y = mu.point(j);
    nl_y += mu.weight(j) * (gamma * gamma * (A * (y - b)).squaredNorm() - gamma * y.squaredNorm());
  }
  const double mass = lambda.total_mass();
  const double reg_const = reg.is_entropic()
                               ? -kappa * gamma * eps * eps * std::log(kappa) * mass
                               : eps_s * eps_s * kappa * kappa * (std::pow(kappa, -p) - 1.0) / (p - 1.0) * mass * mass;
  out.objective_difference =
      std::abs(scaled.report.primal - kappa * (nl_x + nl_y) - reg_const - kappa * gamma * orig.report.primal);
  return out;
}

}  // namespace rotmap
