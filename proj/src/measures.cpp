#include "rotmap/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/LU>

#include "rotmap/error.hpp"

namespace rotmap {

namespace {

// Lattice coordinates of a cell-centred grid, last axis fastest.
Eigen::MatrixXd box_lattice(int d, const Point& lo, const Point& hi, int n_per_axis) {
  if (d < 1) throw InputError("dimension must be >= 1");
  if (lo.size() != d || hi.size() != d) throw InputError("box corners must have dimension d");
  if (n_per_axis < 2) throw InputError("n_per_axis must be >= 2");
  for (int k = 0; k < d; ++k) {
    if (!(lo[k] < hi[k])) throw InputError("degenerate box: lo must be < hi componentwise");
  }
  Eigen::Index n = 1;
  for (int k = 0; k < d; ++k) n *= n_per_axis;
  Eigen::MatrixXd pts(n, d);
  for (Eigen::Index idx = 0; idx < n; ++idx) {
    Eigen::Index rem = idx;
    for (int k = d - 1; k >= 0; --k) {
      const auto cell = static_cast<double>(rem % n_per_axis);
      rem /= n_per_axis;
      pts(idx, k) = lo[k] + (cell + 0.5) * (hi[k] - lo[k]) / n_per_axis;
    }
  }
  return pts;
}

// Common spacing if every axis has the same one, 0 otherwise.
double box_spacing(const Point& lo, const Point& hi, int n_per_axis) {
  const double h0 = (hi[0] - lo[0]) / n_per_axis;
  for (Eigen::Index k = 1; k < lo.size(); ++k) {
    const double hk = (hi[k] - lo[k]) / n_per_axis;
    if (std::abs(hk - h0) > 1e-12 * h0) return 0.0;
  }
  return h0;
}

double box_volume(const Point& lo, const Point& hi) { return (hi - lo).prod(); }

}  // namespace

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights,
                                 double grid_spacing, DensityBounds density_bounds)
    : points_(std::move(points)),
      weights_(std::move(weights)),
      grid_spacing_(grid_spacing),
      density_bounds_(density_bounds) {
  if (points_.rows() == 0 || points_.cols() == 0) throw InputError("measure must have at least one atom");
  if (points_.rows() != weights_.size()) throw InputError("points and weights differ in length");
  if (!points_.allFinite()) throw InputError("non-finite atom coordinate");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      std::ostringstream msg;
      msg << "weight " << i << " is not strictly positive";
      throw InputError(msg.str());
    }
  }
  if (grid_spacing_ < 0.0) throw InputError("grid_spacing must be >= 0");

  const Eigen::Index n = points_.rows();
  const Eigen::Index d = points_.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < d; ++k) {
      if (points_(a, k) != points_(b, k)) return points_(a, k) < points_(b, k);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!row_less(order[i - 1], order[i])) throw InputError("atoms must be pairwise distinct");
  }

  if (grid_spacing_ > 0.0) {
    const Eigen::RowVectorXd origin = points_.colwise().minCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) {
        const double steps = (points_(i, k) - origin[k]) / grid_spacing_;
        if (std::abs(steps - std::round(steps)) > 1e-6) {
          throw InputError("atoms do not lie on a lattice with the declared grid_spacing");
        }
      }
    }
  }
}

bool DiscreteMeasure::is_probability(double tol) const { return std::abs(total_mass() - 1.0) <= tol; }

Point DiscreteMeasure::centroid() const { return (points_.transpose() * weights_) / total_mass(); }

std::pair<Point, Point> DiscreteMeasure::bounding_box() const {
  return {points_.colwise().minCoeff().transpose(), points_.colwise().maxCoeff().transpose()};
}

bool InteriorWindow::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return (x - center).norm() <= radius;
}

DiscreteMeasure uniform_on_box(int d, const Point& lo, const Point& hi, int n_per_axis) {
  Eigen::MatrixXd pts = box_lattice(d, lo, hi, n_per_axis);
  const Eigen::Index n = pts.rows();
  const double density = 1.0 / box_volume(lo, hi);
  return DiscreteMeasure(std::move(pts), Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)),
                         box_spacing(lo, hi, n_per_axis), {density, density});
}

DiscreteMeasure holder_perturbed(int d, const Point& lo, const Point& hi, int n_per_axis,
                                 double amplitude, const Point& wavevector, std::uint64_t seed) {
  if (!(amplitude >= 0.0 && amplitude < 0.5)) throw InputError("amplitude must lie in [0, 0.5)");
  Eigen::MatrixXd pts = box_lattice(d, lo, hi, n_per_axis);
  if (wavevector.size() != d) throw InputError("wavevector must have dimension d");
  const Eigen::Index n = pts.rows();
  if (amplitude == 0.0) return uniform_on_box(d, lo, hi, n_per_axis);

  std::mt19937_64 gen(seed);
  const double unit = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  const double phase = 2.0 * std::numbers::pi * unit;

  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = 1.0 + amplitude * std::cos(pts.row(i).dot(wavevector) + phase);
  }
  const double mean = w.mean();
  w /= w.sum();
  const double vol = box_volume(lo, hi);
  const DensityBounds bounds{(1.0 - amplitude) / (mean * vol), (1.0 + amplitude) / (mean * vol)};
  return DiscreteMeasure(std::move(pts), std::move(w), box_spacing(lo, hi, n_per_axis), bounds);
}

DiscreteMeasure pushforward_affine(const DiscreteMeasure& m, const Eigen::MatrixXd& A,
                                   const Point& b, double mass_scale) {
  const int d = m.dim();
  if (A.rows() != d || A.cols() != d) throw InputError("A must be d x d");
  if (b.size() != d) throw InputError("b must have dimension d");
  if (!(mass_scale > 0.0)) throw InputError("mass_scale must be > 0");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw InputError("A is singular");

  Eigen::MatrixXd pts = (m.points() * A.transpose()).rowwise() + b.transpose();

  // A conformal map (A^T A = s^2 I) keeps a lattice a lattice.
  double spacing = 0.0;
  if (m.grid_spacing() > 0.0) {
    const Eigen::MatrixXd gram = A.transpose() * A;
    const double s2 = gram(0, 0);
    if ((gram - s2 * Eigen::MatrixXd::Identity(d, d)).norm() <= 1e-12 * s2) {
      spacing = m.grid_spacing() * std::sqrt(s2);
    }
  }
  const double jac = std::abs(lu.determinant());
  const DensityBounds bounds{m.density_bounds().lower * mass_scale / jac,
                             m.density_bounds().upper * mass_scale / jac};
  // Rounding may push a rescaled lattice off its nominal spacing by a few ulps;
  // the constructor tolerance absorbs that.
  return DiscreteMeasure(std::move(pts), m.weights() * mass_scale, spacing, bounds);
}

InteriorWindow default_window(const DiscreteMeasure& m) {
  const Point c = m.centroid();
  const auto [lo, hi] = m.bounding_box();
  double inradius = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    inradius = std::min({inradius, c[k] - lo[k], hi[k] - c[k]});
  }
  if (!(inradius > 0.0)) throw InputError("support has empty interior; no default window");
  return {c, inradius / 3.0};
}

}  // namespace rotmap
