#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rotmap/dual_solver.hpp"
#include "rotmap/measures.hpp"

namespace rotmap {

/// One cell of an unregularised coupling.
struct CouplingEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

/// Unregularised quadratic OT between two discrete marginals.
struct ExactSolution {
  double cost = 0.0;
  /// T(x_i) for every λ-atom: the barycentre of the mass x_i sends out.
  std::vector<Point> map;
  /// Kantorovich potentials with f_i + g_j <= |x_i - y_j|^2. Each constructor
  /// below documents its gauge.
  Eigen::VectorXd potential_f;
  Eigen::VectorXd potential_g;
  std::vector<CouplingEntry> coupling;

  /// Density of the coupling against λ⊗μ, rows stored sparse.
  Plan to_plan(const DiscreteMeasure& lambda, const DiscreteMeasure& mu) const;
};

/// Monotone (quantile) coupling for d = 1. Handles arbitrary weights.
/// f solves f + g = c on the coupling, with f = 0 on
/// the leftmost atom; g is its c-transform.
ExactSolution exact_1d(const DiscreteMeasure& lambda, const DiscreteMeasure& mu);

/// Largest instance exact_assignment accepts.
inline constexpr std::size_t kMaxAssignmentSize = 2048;

/// Optimal assignment for equal atom counts with uniform weights 1/n, any d.
/// Costs are scaled to integers before the shortest-augmenting-path
/// Hungarian method, so ties cannot cycle. Gauge f[0] = 0.
ExactSolution exact_assignment(const DiscreteMeasure& lambda, const DiscreteMeasure& mu);

/// Closed-form solution when mu is lambda translated by shift, atom by atom
/// (as built by pushforward_affine). Gauge f[0] = 0. Throws InputError otherwise.
ExactSolution exact_translation(const DiscreteMeasure& lambda, const DiscreteMeasure& mu, const Point& shift);

/// (lhs, rhs) of Σ|T(x) - y|² dπ <= 2L (Σ|x - y|² dπ - Σ|x - T(x)|² dλ)
/// for the plan π = Z λ⊗μ and the exact map T.
std::pair<double, double> stability_gap(const Plan& plan, const DiscreteMeasure& lambda,
                                        const DiscreteMeasure& mu, const ExactSolution& exact,
                                        double lipschitz_L);

}  // namespace rotmap
