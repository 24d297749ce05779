#include "rotmap/dual_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "rotmap/error.hpp"
#include "rotmap/parallel.hpp"

namespace rotmap {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kSparseThreshold = 0.25;

double log_sum_exp(const double* v, std::size_t n) {
  const double m = *std::max_element(v, v + n);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += std::exp(v[k] - m);
  return m + std::log(s);
}

class DualProblem {
 public:
  DualProblem(const DiscreteMeasure& lambda, const DiscreteMeasure& mu, const Regularizer& reg,
              double eps, int threads)
      : a_(lambda.weights()),
        b_(mu.weights()),
        C_(cost_matrix(lambda, mu)),
        Ct_(C_.transpose()),
        reg_(reg),
        eps2_(eps * eps),
        threads_(threads) {}

  Eigen::Index nx() const { return C_.rows(); }
  Eigen::Index ny() const { return C_.cols(); }

  // Σ_j (h')^{-1}((u_i + v_j - cost_ij)/ε²) w_j for every i.
  Eigen::VectorXd marginal(const RowMat& cost, const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& w) const {
    Eigen::VectorXd out(cost.rows());
    detail::parallel_for(static_cast<std::size_t>(cost.rows()), threads_, [&](std::size_t si) {
      const auto i = static_cast<Eigen::Index>(si);
      double s = 0.0;
      for (Eigen::Index j = 0; j < cost.cols(); ++j) {
        s += reg_.h_prime_inv((u[i] + v[j] - cost(i, j)) / eps2_) * w[j];
      }
      out[i] = s;
    });
    return out;
  }

  std::pair<double, double> residual(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    const double rr = (marginal(C_, f, g, b_).array() - 1.0).abs().maxCoeff();
    const double cr = (marginal(Ct_, g, f, a_).array() - 1.0).abs().maxCoeff();
    return {rr, cr};
  }

  double dual_value(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
    Eigen::VectorXd row_terms(nx());
    detail::parallel_for(static_cast<std::size_t>(nx()), threads_, [&](std::size_t si) {
      const auto i = static_cast<Eigen::Index>(si);
      double s = 0.0;
      for (Eigen::Index j = 0; j < ny(); ++j) {
        s += reg_.h_star((f[i] + g[j] - C_(i, j)) / eps2_) * b_[j];
      }
      row_terms[i] = s * a_[i];
    });
    double total = 0.0;
    for (Eigen::Index i = 0; i < nx(); ++i) total += row_terms[i];
    return f.dot(a_) + g.dot(b_) - eps2_ * total;
  }

  // Exact maximisation of the dual over the potential `u` with `v` fixed.
  void block_update(const RowMat& cost, const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                    double inner_tol, Eigen::VectorXd& u) const {
    if (reg_.is_entropic()) {
      const Eigen::VectorXd log_w = w.array().log();
      detail::parallel_for(static_cast<std::size_t>(cost.rows()), threads_, [&](std::size_t si) {
        const auto i = static_cast<Eigen::Index>(si);
        std::vector<double> expo(static_cast<std::size_t>(cost.cols()));
        for (Eigen::Index j = 0; j < cost.cols(); ++j) {
          expo[static_cast<std::size_t>(j)] = (v[j] - cost(i, j)) / eps2_ + log_w[j];
        }
        u[i] = eps2_ - eps2_ * log_sum_exp(expo.data(), expo.size());
      });
      return;
    }
    const double w_min = w.minCoeff();
    const double top = eps2_ * reg_.h_prime(1.0 / w_min);
    detail::parallel_for(static_cast<std::size_t>(cost.rows()), threads_, [&](std::size_t si) {
      const auto i = static_cast<Eigen::Index>(si);
      u[i] = root_find_row(cost, i, v, w, top, inner_tol, u[i]);
    });
  }

  // Solves Φ(x) = Σ_j (h')^{-1}((x + v_j - cost_ij)/ε²) w_j - 1 = 0. Φ is
  // continuous, nondecreasing, and strictly increasing where positive, so a
  // Newton iteration kept inside a shrinking sign bracket always converges.
  double root_find_row(const RowMat& cost, Eigen::Index i, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& w, double top, double inner_tol, double start) const {
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      const double t = cost(i, j) - v[j];
      t_min = std::min(t_min, t);
      t_max = std::max(t_max, t);
    }
    auto phi = [&](double x, double& slope) {
      double s = 0.0;
      double ds = 0.0;
      for (Eigen::Index j = 0; j < cost.cols(); ++j) {
        const double xi = (x + v[j] - cost(i, j)) / eps2_;
        if (xi <= 0.0) continue;
        s += reg_.h_prime_inv(xi) * w[j];
        ds += reg_.conjugate_weight(xi) * w[j];
      }
      slope = ds / eps2_;
      return s - 1.0;
    };

    double lo = t_min;
    double hi = t_max + top;
    double slope = 0.0;
    for (int grow = 0; grow < 64 && phi(hi, slope) < 0.0; ++grow) hi += 2.0 * (hi - lo);

    double x = (start > lo && start < hi) ? start : 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
      const double val = phi(x, slope);
      if (std::abs(val) <= inner_tol) return x;
      if (val < 0.0) {
        lo = x;
      } else {
        hi = x;
      }
      if (hi - lo <= 1e-14 * (1.0 + std::abs(x))) return x;
      double next = slope > 0.0 ? x - val / slope : std::numeric_limits<double>::quiet_NaN();
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      x = next;
    }
    return x;
  }

  // One damped Newton step on the concave dual; returns false if no step
  // could be accepted.
  bool newton_step(Eigen::VectorXd& f, Eigen::VectorXd& g, double dual_now,
                   double residual_now) const {
    const Eigen::Index n = nx();
    const Eigen::Index m = ny();
    Eigen::MatrixXd K(n, m);
    Eigen::VectorXd row_z(n);
    Eigen::VectorXd col_z = Eigen::VectorXd::Zero(m);
    detail::parallel_for(static_cast<std::size_t>(n), threads_, [&](std::size_t si) {
      const auto i = static_cast<Eigen::Index>(si);
      double rz = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        const double xi = (f[i] + g[j] - C_(i, j)) / eps2_;
        K(i, j) = reg_.conjugate_weight(xi) * a_[i] * b_[j] / eps2_;
        rz += reg_.h_prime_inv(xi) * b_[j];
      }
      row_z[i] = rz;
    });
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        col_z[j] += reg_.h_prime_inv((f[i] + g[j] - C_(i, j)) / eps2_) * a_[i];
      }
    }
    // Dual gradient: a∘(1 - row) and b∘(1 - col).
    Eigen::VectorXd grad(n + m);
    grad.head(n) = a_.cwiseProduct(Eigen::VectorXd::Ones(n) - row_z);
    grad.tail(m) = b_.cwiseProduct(Eigen::VectorXd::Ones(m) - col_z);

    // Negative Hessian with f[0] pinned (gauge).
    const Eigen::Index N = n + m - 1;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(N, N);
    for (Eigen::Index i = 1; i < n; ++i) H(i - 1, i - 1) = K.row(i).sum();
    for (Eigen::Index j = 0; j < m; ++j) H(n - 1 + j, n - 1 + j) = K.col(j).sum();
    H.block(0, n - 1, n - 1, m) = K.bottomRows(n - 1);
    H.block(n - 1, 0, m, n - 1) = K.bottomRows(n - 1).transpose();
    const double delta = 1e-10 * std::max(H.diagonal().maxCoeff(), 1e-300);
    H.diagonal().array() += delta;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd rhs = grad.tail(N);
    const Eigen::VectorXd dir = ldlt.solve(rhs);
    if (!dir.allFinite()) return false;
    const double slope = rhs.dot(dir);
    if (!(slope > 0.0)) return false;

    Eigen::VectorXd df = Eigen::VectorXd::Zero(n);
    df.tail(n - 1) = dir.head(n - 1);
    const Eigen::VectorXd dg = dir.tail(m);

    double t = 1.0;
    for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
      const Eigen::VectorXd f_try = f + t * df;
      const Eigen::VectorXd g_try = g + t * dg;
      const double d_try = dual_value(f_try, g_try);
      bool accept = d_try >= dual_now + 1e-4 * t * slope;
      if (!accept && t == 1.0) {
        // Close to the optimum the dual increase drowns in rounding; accept
        // the full step when it clearly reduces the marginal violation.
        const auto [rr, cr] = residual(f_try, g_try);
        accept = std::max(rr, cr) < 0.5 * residual_now &&
                 d_try >= dual_now - 1e-13 * (1.0 + std::abs(dual_now));
      }
      if (accept) {
        f = f_try;
        g = g_try;
        return true;
      }
    }
    return false;
  }

  const Eigen::VectorXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  const RowMat& C() const { return C_; }
  const RowMat& Ct() const { return Ct_; }

 private:
  const Eigen::VectorXd& a_;
  const Eigen::VectorXd& b_;
  RowMat C_;
  RowMat Ct_;
  Regularizer reg_;
  double eps2_;
  int threads_;
};

void fix_gauge(Eigen::VectorXd& f, Eigen::VectorXd& g) {
  const double shift = f[0];
  f.array() -= shift;
  g.array() += shift;
}

void check_inputs(const DiscreteMeasure& lambda, const DiscreteMeasure& mu, double eps) {
  if (lambda.dim() != mu.dim()) throw InputError("marginals live in different dimensions");
  const double ma = lambda.total_mass();
  const double mb = mu.total_mass();
  if (std::abs(ma - mb) > 1e-12 * std::max(ma, mb)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "marginal masses differ: " << ma << " vs " << mb;
    throw InputError(msg.str());
  }
  if (!(eps > 0.0 && eps <= 1.0)) throw InputError("eps must lie in (0, 1]");
}

}  // namespace

Eigen::MatrixXd cost_matrix(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
  const auto& X = lambda.points();
  const auto& Y = mu.points();
  Eigen::MatrixXd C(X.rows(), Y.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.rows(); ++j) C(i, j) = (X.row(i) - Y.row(j)).squaredNorm();
  }
  return C;
}

// ---------------------------------------------------------------------------
// Plan

Plan Plan::from_dense(const Eigen::MatrixXd& Z, double sparse_threshold) {
  Plan plan(static_cast<std::size_t>(Z.rows()), static_cast<std::size_t>(Z.cols()));
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    Row row;
    Eigen::Index positive = 0;
    for (Eigen::Index j = 0; j < Z.cols(); ++j) positive += Z(i, j) > 0.0 ? 1 : 0;
    if (static_cast<double>(positive) < sparse_threshold * static_cast<double>(Z.cols())) {
      row.dense = false;
      for (Eigen::Index j = 0; j < Z.cols(); ++j) {
        if (Z(i, j) > 0.0) {
          row.index.push_back(static_cast<int>(j));
          row.value.push_back(Z(i, j));
        }
      }
    } else {
      row.value.resize(static_cast<std::size_t>(Z.cols()));
      for (Eigen::Index j = 0; j < Z.cols(); ++j) row.value[static_cast<std::size_t>(j)] = Z(i, j);
    }
    plan.rows_[static_cast<std::size_t>(i)] = std::move(row);
  }
  return plan;
}

void Plan::set_row(std::size_t i, Row row) {
  if (row.dense && row.value.size() != n_y_) throw InputError("dense plan row has wrong length");
  if (!row.dense) {
    if (row.index.size() != row.value.size()) throw InputError("sparse plan row index/value mismatch");
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      if (row.index[k] < 0 || static_cast<std::size_t>(row.index[k]) >= n_y_ ||
          (k > 0 && row.index[k] <= row.index[k - 1])) {
        throw InputError("sparse plan row indices must be increasing and in range");
      }
    }
  }
  rows_.at(i) = std::move(row);
}

double Plan::at(std::size_t i, std::size_t j) const {
  const Row& r = rows_.at(i);
  if (r.dense) return r.value.at(j);
  const auto it = std::lower_bound(r.index.begin(), r.index.end(), static_cast<int>(j));
  if (it == r.index.end() || *it != static_cast<int>(j)) return 0.0;
  return r.value[static_cast<std::size_t>(it - r.index.begin())];
}

std::size_t Plan::nnz() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < rows_.size(); ++i) for_each_positive(i, [&](std::size_t, double) { ++total; });
  return total;
}

Eigen::MatrixXd Plan::to_dense() const {
  Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_.size()),
                                            static_cast<Eigen::Index>(n_y_));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for_each_positive(i, [&](std::size_t j, double z) {
      Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z;
    });
  }
  return Z;
}

Eigen::VectorXd Plan::row_marginal(const DiscreteMeasure& mu) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for_each_positive(i, [&](std::size_t j, double z) { out[static_cast<Eigen::Index>(i)] += z * mu.weight(j); });
  }
  return out;
}

Eigen::VectorXd Plan::col_marginal(const DiscreteMeasure& lambda) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_y_));
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for_each_positive(i, [&](std::size_t j, double z) { out[static_cast<Eigen::Index>(j)] += z * lambda.weight(i); });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Objectives

Plan assemble_plan(const DualPotentials& pot, const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
  const double eps2 = pot.eps * pot.eps;
  const Eigen::MatrixXd C = cost_matrix(lambda, mu);
  Eigen::MatrixXd Z(C.rows(), C.cols());
  for (Eigen::Index i = 0; i < C.rows(); ++i) {
    for (Eigen::Index j = 0; j < C.cols(); ++j) {
      Z(i, j) = pot.reg.h_prime_inv((pot.f[i] + pot.g[j] - C(i, j)) / eps2);
    }
  }
  return Plan::from_dense(Z, pot.reg.is_entropic() ? 0.0 : kSparseThreshold);
}

double primal_objective(const Plan& plan, const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                        const Regularizer& reg, double eps) {
  const double eps2 = eps * eps;
  const double h0 = reg.h(0.0);
  const double mass_mu = mu.total_mass();
  double total = 0.0;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    const Point x = lambda.point(i);
    double row = 0.0;
    double covered = 0.0;
    plan.for_each_positive(i, [&](std::size_t j, double z) {
      const double c = (x - mu.point(j)).squaredNorm();
      row += (c * z + eps2 * reg.h(z)) * mu.weight(j);
      covered += mu.weight(j);
    });
    // Entries with Z = 0 contribute ε² h(0) each.
    row += eps2 * h0 * (mass_mu - covered);
    total += row * lambda.weight(i);
  }
  return total;
}

double dual_objective(const DualPotentials& pot, const DiscreteMeasure& lambda, const DiscreteMeasure& mu) {
  if (pot.f.size() != static_cast<Eigen::Index>(lambda.size()) ||
      pot.g.size() != static_cast<Eigen::Index>(mu.size())) {
    throw InputError("potential lengths do not match the marginals");
  }
  DualProblem problem(lambda, mu, pot.reg, pot.eps, 1);
  return problem.dual_value(pot.f, pot.g);
}

std::pair<double, double> schrodinger_residual(const DualPotentials& pot, const DiscreteMeasure& lambda,
                                               const DiscreteMeasure& mu) {
  if (pot.f.size() != static_cast<Eigen::Index>(lambda.size()) ||
      pot.g.size() != static_cast<Eigen::Index>(mu.size())) {
    throw InputError("potential lengths do not match the marginals");
  }
  DualProblem problem(lambda, mu, pot.reg, pot.eps, 1);
  return problem.residual(pot.f, pot.g);
}

// ---------------------------------------------------------------------------
// Solver

Solution solve(const DiscreteMeasure& lambda, const DiscreteMeasure& mu, const Regularizer& reg,
               double eps, const SolverOptions& options) {
  check_inputs(lambda, mu, eps);
  if (!(options.tol > 0.0)) throw InputError("tol must be > 0");
  if (options.max_iter < 1) throw InputError("max_iter must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  const DualProblem problem(lambda, mu, reg, eps, options.threads);
  const double eps2 = eps * eps;
  const Eigen::Index n = problem.nx();
  const Eigen::Index m = problem.ny();

  Eigen::VectorXd f;
  Eigen::VectorXd g;
  if (options.warm_start && options.warm_start->f.size() == n && options.warm_start->g.size() == m) {
    f = options.warm_start->f;
    g = options.warm_start->g;
  } else if (reg.is_entropic()) {
    // Soft-min of the cost along rows and columns.
    const Eigen::VectorXd zero_m = Eigen::VectorXd::Zero(m);
    const Eigen::VectorXd zero_n = Eigen::VectorXd::Zero(n);
    f = zero_n;
    g = zero_m;
    problem.block_update(problem.C(), zero_m, problem.b(), 0.0, f);
    problem.block_update(problem.Ct(), zero_n, problem.a(), 0.0, g);
    f.array() -= eps2;
    g.array() -= eps2;
  } else {
    f = Eigen::VectorXd::Zero(n);
    g = Eigen::VectorXd::Zero(m);
  }

  const double inner_tol = 0.5 * options.tol;
  SolveReport report;
  auto [rr, cr] = problem.residual(f, g);
  double residual = std::max(rr, cr);
  Eigen::VectorXd best_f = f;
  Eigen::VectorXd best_g = g;
  double best_residual = residual;
  double dual_prev = options.check_dual_ascent ? problem.dual_value(f, g) : 0.0;

  int streak = 0;
  while (residual > options.tol && report.iterations < options.max_iter) {
    bool stepped = false;
    if (options.newton && streak >= options.warmup_sweeps) {
      stepped = problem.newton_step(f, g, problem.dual_value(f, g), residual);
      if (stepped) {
        ++report.newton_steps;
      } else {
        streak = 0;
      }
    }
    if (!stepped) {
      problem.block_update(problem.C(), g, problem.b(), inner_tol, f);
      problem.block_update(problem.Ct(), f, problem.a(), inner_tol, g);
      ++report.ascent_sweeps;
      ++streak;
      if (options.check_dual_ascent) {
        const double dual_now = problem.dual_value(f, g);
        if (dual_now < dual_prev - 1e-12 * (1.0 + std::abs(dual_prev))) {
          throw std::logic_error("block ascent decreased the dual objective");
        }
        dual_prev = dual_now;
      }
    } else if (options.check_dual_ascent) {
      dual_prev = problem.dual_value(f, g);
    }
    ++report.iterations;
    std::tie(rr, cr) = problem.residual(f, g);
    residual = std::max(rr, cr);
    if (residual < best_residual) {
      best_residual = residual;
      best_f = f;
      best_g = g;
    }
  }

  if (residual > options.tol) {
    fix_gauge(best_f, best_g);
    std::ostringstream msg;
    msg.precision(17);
    msg << "solver did not converge: residual " << best_residual << " > tol " << options.tol << " after "
        << report.iterations << " iterations";
    throw NonConvergenceError(msg.str(), DualPotentials{best_f, best_g, eps, reg}, best_residual,
                              report.iterations);
  }

  fix_gauge(f, g);
  Solution sol{DualPotentials{f, g, eps, reg}, Plan{}, report};
  sol.plan = assemble_plan(sol.potentials, lambda, mu);
  sol.report.residual = residual;
  sol.report.primal = primal_objective(sol.plan, lambda, mu, reg, eps);
  sol.report.dual = problem.dual_value(f, g);
  sol.report.gap = sol.report.primal - sol.report.dual;
  sol.report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace rotmap
