#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rotmap/measures.hpp"
#include "rotmap/regularizer.hpp"

namespace rotmap {

/// Dual variables on supp λ (f) and supp μ (g). The solver fixes the gauge
/// f[0] = 0.
struct DualPotentials {
  Eigen::VectorXd f;
  Eigen::VectorXd g;
  double eps = 1.0;
  Regularizer reg = Regularizer::entropic();
};

/// Coupling density Z = dπ/d(λ⊗μ), stored per λ-atom either densely or as
/// sorted (y-index, value) pairs. The reference measures are not stored;
/// every consumer receives (λ, μ) alongside the plan.
class Plan {
 public:
  struct Row {
    bool dense = true;
    std::vector<int> index;    // sparse rows only, strictly increasing
    std::vector<double> value;  // length n_y when dense
  };

  Plan() = default;
  Plan(std::size_t n_x, std::size_t n_y) : n_y_(n_y), rows_(n_x) {}

  /// Rows with a positive fraction below sparse_threshold are stored sparse.
  /// Pass 0 to force dense storage.
  static Plan from_dense(const Eigen::MatrixXd& Z, double sparse_threshold = 0.0);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return n_y_; }
  const Row& row(std::size_t i) const { return rows_[i]; }
  void set_row(std::size_t i, Row row);
  double at(std::size_t i, std::size_t j) const;
  bool row_is_sparse(std::size_t i) const { return !rows_[i].dense; }
  /// Number of strictly positive entries.
  std::size_t nnz() const;

  /// Calls fn(j, Z) for every stored entry of row i with Z > 0.
  template <class Fn>
  void for_each_positive(std::size_t i, Fn&& fn) const {
    const Row& r = rows_[i];
    if (r.dense) {
      for (std::size_t j = 0; j < r.value.size(); ++j) {
        if (r.value[j] > 0.0) fn(j, r.value[j]);
      }
    } else {
      for (std::size_t k = 0; k < r.index.size(); ++k) {
        if (r.value[k] > 0.0) fn(static_cast<std::size_t>(r.index[k]), r.value[k]);
      }
    }
  }

  Eigen::MatrixXd to_dense() const;
  /// Exchanges two rows; used to build corrupted plans for negative controls.
  void swap_rows(std::size_t i, std::size_t k) { std::swap(rows_[i], rows_[k]); }

  /// Σ_y Z(x,y) μ_w(y) for every x.
  Eigen::VectorXd row_marginal(const DiscreteMeasure& mu) const;
  /// Σ_x Z(x,y) λ_w(x) for every y.
  Eigen::VectorXd col_marginal(const DiscreteMeasure& lambda) const;

 private:
  std::size_t n_y_ = 0;
  std::vector<Row> rows_;
};

struct SolveReport {
  int iterations = 0;
  int ascent_sweeps = 0;
  int newton_steps = 0;
  double residual = 0.0;  // L∞ marginal violation
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;  // primal - dual
  double wall_ms = 0.0;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 20000;
  int threads = 1;
  /// Damped Newton on the joint dual once the ascent has warmed up. Each
  /// accepted step increases the dual objective; the block ascent remains
  /// the fallback whenever a step is rejected.
  bool newton = true;
  /// Ascent sweeps before the first Newton attempt and after a rejection.
  int warmup_sweeps = 10;
  /// Throws std::logic_error if a block-ascent sweep ever decreases the dual.
  bool check_dual_ascent = false;
  std::optional<DualPotentials> warm_start;
};

struct Solution {
  DualPotentials potentials;
  Plan plan;
  SolveReport report;
};

/// Thrown when max_iter is exhausted with residual > tol. Carries the
/// iterate with the smallest residual seen.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, DualPotentials best, double residual, int iterations)
      : std::runtime_error(what), best_(std::move(best)), residual_(residual), iterations_(iterations) {}
  const DualPotentials& best() const { return best_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  DualPotentials best_;
  double residual_;
  int iterations_;
};

/// Squared Euclidean cost |x_i - y_j|^2.
Eigen::MatrixXd cost_matrix(const DiscreteMeasure& lambda, const DiscreteMeasure& mu);

/// Solves the regularised dual by alternating exact block maximisation:
/// entropic blocks in closed form (log-sum-exp), polynomial blocks by a
/// safeguarded per-atom root find of x -> Σ_y (h')^{-1}((f+g-c)/ε²) μ_w - 1.
/// The plan is assembled from the potentials via Z = (h')^{-1}((f+g-c)/ε²).
///
/// Requires equal total masses and 0 < ε <= 1. Throws InputError on bad
/// input and NonConvergenceError when the marginal residual does not reach
/// tol within max_iter iterations.
Solution solve(const DiscreteMeasure& lambda, const DiscreteMeasure& mu, const Regularizer& reg,
               double eps, const SolverOptions& options = {});

/// Plan density induced by a set of potentials. Polynomial rows whose
/// support covers less than 25% of μ are stored sparse.
Plan assemble_plan(const DualPotentials& pot, const DiscreteMeasure& lambda, const DiscreteMeasure& mu);

/// Σ |x-y|² Z λ_w μ_w + ε² Σ h(Z) λ_w μ_w.
double primal_objective(const Plan& plan, const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                        const Regularizer& reg, double eps);

/// Σ f λ_w + Σ g μ_w - ε² Σ h*((f+g-c)/ε²) λ_w μ_w.
double dual_objective(const DualPotentials& pot, const DiscreteMeasure& lambda, const DiscreteMeasure& mu);

/// L∞ norms of (row marginal - 1) and (column marginal - 1) of the plan
/// induced by pot.
std::pair<double, double> schrodinger_residual(const DualPotentials& pot, const DiscreteMeasure& lambda,
                                               const DiscreteMeasure& mu);

/// Acceptable |primal - dual| at a converged solution.
inline double gap_tolerance(double primal) { return 1e-6 * (1.0 + std::abs(primal)); }

}  // namespace rotmap
