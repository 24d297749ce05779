#pragma once

#include <cstdint>
#include <cstddef>
#include <utility>

#include <Eigen/Core>

namespace rotmap {

using Point = Eigen::VectorXd;

/// Bounds of the continuum density a discrete measure stands in for.
/// Carried as metadata only.
struct DensityBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Weighted point cloud in R^d. Immutable after construction.
///
/// Invariants (checked by the constructor): weights are strictly positive,
/// points are pairwise distinct and, when grid_spacing > 0, every coordinate
/// sits on a lattice of that spacing. Probability normalisation is not an
/// invariant of the type since affine push-forwards may rescale the mass;
/// use is_probability() where it matters.
class DiscreteMeasure {
 public:
  /// points: n x d, one atom per row.
  DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights, double grid_spacing = 0.0,
                  DensityBounds density_bounds = {});

  int dim() const { return static_cast<int>(points_.cols()); }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }

  const Eigen::MatrixXd& points() const { return points_; }
  Point point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
  const Eigen::VectorXd& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }

  /// 0 for unstructured clouds.
  double grid_spacing() const { return grid_spacing_; }
  DensityBounds density_bounds() const { return density_bounds_; }

  double total_mass() const { return weights_.sum(); }
  bool is_probability(double tol = 1e-12) const;
  /// Weighted mean of the atoms (normalised by total mass).
  Point centroid() const;
  /// Componentwise (min, max) of the atoms.
  std::pair<Point, Point> bounding_box() const;

 private:
  Eigen::MatrixXd points_;
  Eigen::VectorXd weights_;
  double grid_spacing_;
  DensityBounds density_bounds_;
};

/// Closed ball playing the role of a compactly contained interior region.
struct InteriorWindow {
  Point center;
  double radius = 0.0;

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Cell-centred lattice on the box [lo, hi] with n_per_axis cells per axis
/// and equal weights. Atom index runs with the last axis fastest.
DiscreteMeasure uniform_on_box(int d, const Point& lo, const Point& hi, int n_per_axis);

/// Same lattice as uniform_on_box with weights proportional to
/// 1 + amplitude * cos(<wavevector, x> + phase), renormalised to mass 1.
/// The phase is drawn deterministically from seed. amplitude must lie in
/// [0, 0.5) so that the density stays bounded away from zero.
DiscreteMeasure holder_perturbed(int d, const Point& lo, const Point& hi, int n_per_axis,
                                 double amplitude, const Point& wavevector, std::uint64_t seed);

/// Image of m under x -> A x + b with every weight multiplied by mass_scale.
/// Throws InputError for singular A.
DiscreteMeasure pushforward_affine(const DiscreteMeasure& m, const Eigen::MatrixXd& A,
                                   const Point& b, double mass_scale);

/// Centroid of the atoms and one third of the inradius of their bounding box.
/// All shipped measures live on boxes, where the bounding box is the hull.
InteriorWindow default_window(const DiscreteMeasure& m);

}  // namespace rotmap
