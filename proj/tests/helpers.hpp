#pragma once

#include <random>

#include <Eigen/Core>

#include "rotmap/measures.hpp"

namespace testing {

inline rotmap::Point vec1(double x) {
  rotmap::Point p(1);
  p << x;
  return p;
}

inline rotmap::DiscreteMeasure unit_interval(int n) {
  return rotmap::uniform_on_box(1, vec1(0.0), vec1(1.0), n);
}

// Random cloud in [lo, hi]^d with random positive weights summing to mass.
inline rotmap::DiscreteMeasure random_cloud(std::mt19937_64& gen, int n, int d, double lo, double hi,
                                            double mass = 1.0, bool uniform_weights = false) {
  std::uniform_real_distribution<double> coord(lo, hi);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  Eigen::MatrixXd pts(n, d);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) pts(i, k) = coord(gen);
    w[i] = uniform_weights ? 1.0 : weight(gen);
  }
  w *= mass / w.sum();
  if (uniform_weights) w.setConstant(mass / n);
  return rotmap::DiscreteMeasure(pts, w);
}

}  // namespace testing
