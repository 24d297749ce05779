#pragma once

#include <string>

namespace rotmap {

enum class RegularizerKind { Entropic, Polynomial };

/// Convex penalty of the h_p family applied to the plan density Z = dπ/d(λ⊗μ).
///
///   Entropic:          h(z) = z log z
///   Polynomial p∈(1,2]: h(z) = (z^p - 1) / (p - 1)
///
/// Every member satisfies h(1) = 0 and is strictly convex on (0, ∞). The
/// polynomial branch additionally has h'(0) = 0, which is what makes its
/// optimal plans sparse.
///
/// All member functions are pure and re-entrant.
class Regularizer {
 public:
  static Regularizer entropic();
  /// Throws InputError unless 1 < p <= 2.
  static Regularizer polynomial(double p);
  /// p == 1 selects the entropic member; p in (1, 2] the polynomial one.
  static Regularizer from_p(double p);

  RegularizerKind kind() const { return kind_; }
  bool is_entropic() const { return kind_ == RegularizerKind::Entropic; }
  /// 1 for the entropic member.
  double p() const { return p_; }
  /// Hölder conjugate p/(p-1). Throws DomainError for the entropic member.
  double dual_exponent() const;

  /// h(z), z >= 0. 0 log 0 evaluates to 0.
  double h(double z) const;
  /// h'(z). Entropic requires z > 0; polynomial is extended by h'(0) = 0.
  double h_prime(double z) const;
  /// h''(z) for z > 0 (returns +inf at z = 0 when p < 2 or entropic).
  double h_second(double z) const;
  /// (h')^{-1}(xi) = (h*)'(xi), clamped to 0 off the image for the
  /// polynomial branch. This is the plan density as a function of the
  /// scaled dual slack.
  double h_prime_inv(double xi) const;
  /// Convex conjugate h*(s) = sup_{z >= 0} s z - h(z).
  double h_star(double s) const;
  /// 1 / h''(z) at z = h_prime_inv(s); equals (h*)''(s). This is the weight
  /// of the transport-like map and the diagonal of the dual Hessian.
  double conjugate_weight(double s) const;

  /// "entropic" or "poly(p=1.5)".
  std::string name() const;

  friend bool operator==(const Regularizer&, const Regularizer&) = default;

 private:
  Regularizer(RegularizerKind kind, double p) : kind_(kind), p_(p) {}

  RegularizerKind kind_;
  double p_;
};

}  // namespace rotmap
