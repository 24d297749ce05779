#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "rotmap/dual_solver.hpp"
#include "rotmap/measures.hpp"

namespace rotmap {

/// Value of the transport-like map at one λ-atom.
struct MapSample {
  std::size_t index = 0;
  Point x;
  Point T;
  /// Σ_y w(x,y) μ_w(y), the normaliser of the weighted mean.
  double weight_mass = 0.0;
  /// max |y - x| over the (effective) support of the row.
  double support_radius = 0.0;
};

struct LipschitzStat {
  InteriorWindow window;
  double lip_constant = 0.0;
  std::size_t pair_count = 0;
};

struct GradientCheck {
  Eigen::VectorXd fd_gradient;   // central differences of f on the lattice
  Eigen::VectorXd map_gradient;  // 2 (x - T_ε(x))
  double discrepancy = 0.0;      // L∞ distance between the two
};

/// T_ε(x_i): mean of y under the weights w = (h*)''((f+g-c)/ε²) μ_w.
/// Entropic weights equal the plan density; for p = 2 they are the support
/// indicator. Throws DomainError when the weighted mass vanishes.
MapSample t_eps(const DualPotentials& pot, const Plan& plan, const DiscreteMeasure& lambda,
                const DiscreteMeasure& mu, std::size_t x_index);

/// t_eps for every λ-atom.
std::vector<MapSample> map_samples(const DualPotentials& pot, const Plan& plan, const DiscreteMeasure& lambda,
                                   const DiscreteMeasure& mu, int threads = 1);

/// Plan-only barycentric projection Σ_y y Z μ_w / Σ_y Z μ_w.
Point barycentric_projection(const Plan& plan, const DiscreteMeasure& mu, std::size_t x_index);

/// Effective support radius of row x_index. Polynomial: max |y - x| over
/// Z > 0. Entropic: max |y - x| over the smallest set of y carrying
/// 1 - 1e-6 of the row mass.
double support_radius(const Plan& plan, const DiscreteMeasure& lambda, const DiscreteMeasure& mu,
                      const Regularizer& reg, std::size_t x_index);

/// Compares central differences of f at x_index (step along each lattice
/// axis) with 2 (x - T_ε(x)). Throws InputError if a neighbour at ±step is
/// missing from supp λ (boundary atoms).
GradientCheck grad_f_check(const DualPotentials& pot, const Plan& plan, const DiscreteMeasure& lambda,
                           const DiscreteMeasure& mu, std::size_t x_index, double step);

/// Largest |T(x) - T(x')| / |x - x'| over pairs of samples inside the window
/// with min_pair_distance <= |x - x'| <= max_pair_distance. A positive
/// minimum averages out the lattice quantisation of polynomial supports.
/// Throws InputError if fewer than two samples fall in the window or no pair
/// qualifies.
LipschitzStat lipschitz_stat(const std::vector<MapSample>& samples, const InteriorWindow& window,
                             double max_pair_distance, double min_pair_distance = 0.0);

}  // namespace rotmap
