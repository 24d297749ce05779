#include "rotmap/regularizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "rotmap/error.hpp"

namespace rotmap {

Regularizer Regularizer::entropic() { return {RegularizerKind::Entropic, 1.0}; }

Regularizer Regularizer::polynomial(double p) {
  if (!(p > 1.0 && p <= 2.0)) {
    std::ostringstream msg;
    msg << "polynomial regularizer requires 1 < p <= 2, got p=" << p;
    throw InputError(msg.str());
  }
  return {RegularizerKind::Polynomial, p};
}

Regularizer Regularizer::from_p(double p) {
  if (p == 1.0) return entropic();
  return polynomial(p);
}

double Regularizer::dual_exponent() const {
  if (is_entropic()) throw DomainError("entropic regularizer has no finite dual exponent");
  return p_ / (p_ - 1.0);
}

double Regularizer::h(double z) const {
  if (z < 0.0 || std::isnan(z)) throw DomainError("h(z) requires z >= 0");
  if (is_entropic()) return z == 0.0 ? 0.0 : z * std::log(z);
  if (p_ == 2.0) return z * z - 1.0;
  return (std::pow(z, p_) - 1.0) / (p_ - 1.0);
}

double Regularizer::h_prime(double z) const {
  if (is_entropic()) {
    if (!(z > 0.0)) throw DomainError("entropic h'(z) requires z > 0");
    return std::log(z) + 1.0;
  }
  if (z < 0.0 || std::isnan(z)) throw DomainError("h'(z) requires z >= 0");
  if (z == 0.0) return 0.0;
  if (p_ == 2.0) return 2.0 * z;
  return std::exp(std::log(p_ / (p_ - 1.0)) + (p_ - 1.0) * std::log(z));
}

double Regularizer::h_second(double z) const {
  if (z < 0.0 || std::isnan(z)) throw DomainError("h''(z) requires z >= 0");
  if (is_entropic()) return z == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / z;
  if (p_ == 2.0) return 2.0;
  if (z == 0.0) return std::numeric_limits<double>::infinity();
  return p_ * std::pow(z, p_ - 2.0);
}

double Regularizer::h_prime_inv(double xi) const {
  if (is_entropic()) return std::exp(xi - 1.0);
  if (!(xi > 0.0)) return 0.0;
  if (p_ == 2.0) return 0.5 * xi;
  // exp underflows to 0 for tiny xi and overflows to inf for huge xi, both of
  // which are the correct limits.
  return std::exp(std::log((p_ - 1.0) * xi / p_) / (p_ - 1.0));
}

double Regularizer::h_star(double s) const {
  if (is_entropic()) return std::exp(s - 1.0);
  const double floor = 1.0 / (p_ - 1.0);  // -h(0)
  if (!(s > 0.0)) return floor;
  if (p_ == 2.0) return 0.25 * s * s + 1.0;
  const double log_z = std::log((p_ - 1.0) * s / p_) / (p_ - 1.0);
  return std::exp(p_ * log_z) + floor;
}

double Regularizer::conjugate_weight(double s) const {
  if (is_entropic()) return std::exp(s - 1.0);
  if (!(s > 0.0)) return 0.0;
  if (p_ == 2.0) return 0.5;
  const double log_z = std::log((p_ - 1.0) * s / p_) / (p_ - 1.0);
  return std::exp((2.0 - p_) * log_z) / p_;
}

std::string Regularizer::name() const {
  if (is_entropic()) return "entropic";
  std::ostringstream out;
  out << "poly(p=" << p_ << ")";
  return out.str();
}

}  // namespace rotmap
