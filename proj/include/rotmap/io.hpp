#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rotmap/baseline_ot.hpp"
#include "rotmap/dual_solver.hpp"
#include "rotmap/experiments.hpp"
#include "rotmap/measures.hpp"
#include "rotmap/transport_map.hpp"

// Plain-text serialisation. Every number is written with 17 significant
// digits so that files round-trip doubles exactly; NaN is written as "nan"
// in CSV and null in JSON.
namespace rotmap::io {

std::string format_number(double v);

/// First line "d,n", then one line "x_1,...,x_d,weight" per atom.
void write_measure_csv(std::ostream& os, const DiscreteMeasure& m);
/// Inverse of write_measure_csv. Throws InputError on malformed input.
DiscreteMeasure read_measure_csv(std::istream& is);

/// Header "x_index,y_index,Z", one line per positive entry.
void write_plan_csv(std::ostream& os, const Plan& plan);
/// Header "index,<name>", one line per entry.
void write_potential_csv(std::ostream& os, const Eigen::VectorXd& values, const std::string& name);
/// Flat object with iterations, residual, primal, dual, gap, wall_ms.
void write_report_json(std::ostream& os, const SolveReport& report);
/// Header "x_1..x_d,T_1..T_d,mass,support_radius".
void write_map_csv(std::ostream& os, const std::vector<MapSample>& samples);
/// Header "x_index,y_index,mass" with the coupling of an exact solution.
void write_coupling_csv(std::ostream& os, const ExactSolution& exact);

/// Header from the table columns, one line per row.
void write_scan_csv(std::ostream& os, const ScanTable& table);
/// slope, intercept, r_squared, points, dropped, predictions, checks.
void write_fit_json(std::ostream& os, const ScanResult& result);

}  // namespace rotmap::io
