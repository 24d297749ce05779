#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rotmap/baseline_ot.hpp"
#include "rotmap/dual_solver.hpp"
#include "rotmap/measures.hpp"
#include "rotmap/regularizer.hpp"

namespace rotmap {

// ---------------------------------------------------------------------------
// Instance registry
// ---------------------------------------------------------------------------

/// Named test family plus its parameters.
struct InstanceSpec {
  std::string name = "translation1d";
  int n_per_axis = 64;
  /// Density modulation of the holder families.
  double amplitude = 0.3;
  /// Phase seed of the holder families.
  std::uint64_t seed = 0;

  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

/// A concrete pair of marginals with, when one is known, the unregularised
/// solution to compare against.
struct Instance {
  InstanceSpec spec;
  DiscreteMeasure lambda;
  DiscreteMeasure mu;
  std::optional<ExactSolution> exact;
};

/// translation1d, dilation1d, translation2d, holder1d, holder2d, selfmap.
const std::vector<std::string>& instance_names();

/// Builds a registry instance. Throws InputError for unknown names.
///
///   translation1d  U[0,1]   -> U[1,2]
///   dilation1d     U[0,1]   -> U[0,2]
///   translation2d  U[0,1]^2 -> U[0,1]^2 + (1, 0.5)
///   holder1d       (1 + a cos(2πx + φ)) dx on [0,1] -> U[0,1]
///   holder2d       (1 + a cos(2π(x1 + x2) + φ)) dx on [0,1]^2 -> U[0,1]^2
///   selfmap        U[0,1] -> U[0,1]
///
/// exact is filled for every d = 1 instance and for translation2d.
Instance make_instance(const InstanceSpec& spec);

// ---------------------------------------------------------------------------
// Sweeps and rate fitting
// ---------------------------------------------------------------------------

struct SweepConfig {
  InstanceSpec instance;
  Regularizer reg = Regularizer::polynomial(2.0);
  /// Strictly decreasing, at least four values, all in (0, 1].
  std::vector<double> eps_values;
  /// Defaults to default_window(lambda).
  std::optional<InteriorWindow> window;
  SolverOptions solver;
};

/// Throws InputError when the invariants of SweepConfig fail.
void validate(const SweepConfig& cfg);

/// points values from eps_from down to eps_to, equally spaced in log ε.
std::vector<double> geometric_eps(double eps_from, double eps_to, int points);

/// τ(ε) = ε^{2/(d(p-1)+2)}; p = 1 for the entropic member.
double tau(int d, const Regularizer& reg, double eps);

/// Smallest n_per_axis on the unit box with grid spacing <= τ(eps_min)/8.
int mesh_rule_n(int d, const Regularizer& reg, double eps_min);

/// Ordinary least squares of log(value) on log(eps).
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// (log ε, log value) pairs the fit was computed from.
  std::vector<std::pair<double, double>> points;
};

/// Requires at least three points and strictly positive eps and values.
/// Throws InputError listing every offending point otherwise.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// Row-per-ε output of a scan.
struct ScanTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Values of one column. Throws InputError for unknown names.
  std::vector<double> column(const std::string& name) const;
};

struct DroppedPoint {
  double eps = 0.0;
  std::string reason;
};

struct ScanResult {
  std::string name;
  ScanTable table;
  /// Absent for scans that do not fit a rate.
  std::optional<RateFit> fit;
  std::vector<DroppedPoint> dropped;
  /// Predicted exponents and other reference values, by name.
  std::vector<std::pair<std::string, double>> predictions;
  /// Pass/fail properties the scan asserts, by name.
  std::vector<std::pair<std::string, bool>> checks;

  bool check(const std::string& name) const;
  double prediction(const std::string& name) const;
};

/// Interior support radius sup_x max{|y - T_ε(x)| : Z(x,y) > 0}. Polynomial
/// only; entropic plans have full support, use scan_entropic_tails. Points
/// where the energy term of the local support bound exceeds τ(ε) are
/// flagged in the table but kept in the fit.
ScanResult scan_support_radius(const SweepConfig& cfg);

/// primal(ε) - exact cost. Polynomial gaps are fitted against ε, entropic
/// gaps against ε² log ε⁻². Points with gap < 10 gap_tolerance are dropped.
ScanResult scan_energy_gap(const SweepConfig& cfg);

/// Interior bias radius sup_x max{|y - T(x)| : Z(x,y) > 0} for the exact map T.
ScanResult scan_bias(const SweepConfig& cfg, const ExactSolution& exact);

/// R⁻² max_x Σ_{|x-y| >= ΛR} |x-y|² Z μ_w over window x, R the window
/// radius. Checks that consecutive ratios shrink.
ScanResult scan_entropic_tails(const SweepConfig& cfg, double Lambda = 4.0);

/// sup_window |T_ε - T|, gauge-aligned sup_window |f_ε - f| and the
/// interior Lipschitz constant of T_ε per ε. Errors below 1e-12 count as
/// converged in the decrease checks.
ScanResult scan_map_convergence(const SweepConfig& cfg, const ExactSolution& exact);

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

struct MonotonicityAudit {
  std::size_t violations = 0;
  /// min over quadruples of rhs - lhs (negative values within the slack are
  /// not violations).
  double worst_margin = 0.0;
  std::size_t quadruples = 0;
};

/// Samples n_quadruples pairs of support points (x,y), (x',y') and checks
///   h'(Z(x,y)) + h'(Z(x',y')) <= Δ/ε² + h'(Z(x',y)) + h'(Z(x,y')) + 10 tol/ε²
/// with Δ = |x-y'|² + |x'-y|² - |x-y|² - |x'-y'|². Entropic entries that
/// underflowed to 0 use h'(Z) = ψ/ε² from the potentials instead.
MonotonicityAudit audit_monotonicity(const Plan& plan, const DualPotentials& pot, const DiscreteMeasure& lambda,
                                     const DiscreteMeasure& mu, std::size_t n_quadruples, std::uint64_t seed,
                                     double tol = 1e-8, int threads = 1);

struct RescalingAudit {
  /// max |Z_s - Z/κ| between the directly solved transformed plan and the
  /// transformed original plan.
  double plan_distance = 0.0;
  /// |primal_s - κ (null-Lagrangian terms) - regulariser constant - κγ primal|.
  double objective_difference = 0.0;
  double eps_transformed = 0.0;
};

/// λ_s = κ (A⁻¹)_# λ, μ_s = κ (y -> γ A (y - b))_# μ solved at
/// ε_s = ε √γ κ^{(p-1)/2} reproduces the original plan up to the factor κ.
/// Requires A symmetric positive definite and γ, κ > 0.
RescalingAudit audit_rescaling(const DiscreteMeasure& lambda, const DiscreteMeasure& mu, const Regularizer& reg,
                               double eps, const Eigen::MatrixXd& A, const Point& b, double gamma, double kappa,
                               const SolverOptions& options = {});

}  // namespace rotmap
