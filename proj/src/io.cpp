#include "rotmap/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "rotmap/error.hpp"

namespace rotmap::io {

namespace {

std::string json_number(double v) { return std::isfinite(v) ? format_number(v) : "null"; }

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": '" << s << "' is not a number";
    throw InputError(msg.str());
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_measure_csv(std::ostream& os, const DiscreteMeasure& m) {
  os << m.dim() << ',' << m.size() << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int k = 0; k < m.dim(); ++k) os << format_number(m.points()(static_cast<Eigen::Index>(i), k)) << ',';
    os << format_number(m.weight(i)) << '\n';
  }
}

DiscreteMeasure read_measure_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("empty measure file");
  const auto head = split(line);
  if (head.size() != 2) throw InputError("line 1: expected 'd,n'");
  const auto d = static_cast<long>(parse_double(head[0], 1));
  const auto n = static_cast<long>(parse_double(head[1], 1));
  if (d < 1 || n < 1) throw InputError("line 1: d and n must be positive");
  Eigen::MatrixXd pts(n, d);
  Eigen::VectorXd w(n);
  for (long i = 0; i < n; ++i) {
    const auto line_no = static_cast<std::size_t>(i + 2);
    if (!std::getline(is, line)) throw InputError("measure file ends before n atoms");
    const auto cells = split(line);
    if (static_cast<long>(cells.size()) != d + 1) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << d + 1 << " fields";
      throw InputError(msg.str());
    }
    for (long k = 0; k < d; ++k) pts(i, k) = parse_double(cells[static_cast<std::size_t>(k)], line_no);
    w[i] = parse_double(cells.back(), line_no);
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

void write_plan_csv(std::ostream& os, const Plan& plan) {
  os << "x_index,y_index,Z\n";
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    plan.for_each_positive(i, [&](std::size_t j, double z) { os << i << ',' << j << ',' << format_number(z) << '\n'; });
  }
}

void write_potential_csv(std::ostream& os, const Eigen::VectorXd& values, const std::string& name) {
  os << "index," << name << '\n';
  for (Eigen::Index i = 0; i < values.size(); ++i) os << i << ',' << format_number(values[i]) << '\n';
}

void write_report_json(std::ostream& os, const SolveReport& r) {
  os << "{\"iterations\": " << r.iterations << ", \"residual\": " << json_number(r.residual)
     << ", \"primal\": " << json_number(r.primal) << ", \"dual\": " << json_number(r.dual)
     << ", \"gap\": " << json_number(r.gap) << ", \"wall_ms\": " << json_number(r.wall_ms) << "}\n";
}

void write_map_csv(std::ostream& os, const std::vector<MapSample>& samples) {
  const auto d = samples.empty() ? 0 : samples.front().x.size();
  for (Eigen::Index k = 0; k < d; ++k) os << "x_" << k + 1 << ',';
  for (Eigen::Index k = 0; k < d; ++k) os << "T_" << k + 1 << ',';
  os << "mass,support_radius\n";
  for (const auto& s : samples) {
    for (Eigen::Index k = 0; k < d; ++k) os << format_number(s.x[k]) << ',';
    for (Eigen::Index k = 0; k < d; ++k) os << format_number(s.T[k]) << ',';
    os << format_number(s.weight_mass) << ',' << format_number(s.support_radius) << '\n';
  }
}

void write_coupling_csv(std::ostream& os, const ExactSolution& exact) {
  os << "x_index,y_index,mass\n";
  for (const auto& e : exact.coupling) os << e.i << ',' << e.j << ',' << format_number(e.mass) << '\n';
}

void write_scan_csv(std::ostream& os, const ScanTable& table) {
  for (std::size_t k = 0; k < table.columns.size(); ++k) os << (k ? "," : "") << table.columns[k];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << format_number(row[k]);
    os << '\n';
  }
}

void write_fit_json(std::ostream& os, const ScanResult& res) {
  os << "{\n  \"name\": " << json_string(res.name) << ",\n";
  if (res.fit) {
    os << "  \"slope\": " << json_number(res.fit->slope) << ",\n";
    os << "  \"intercept\": " << json_number(res.fit->intercept) << ",\n";
    os << "  \"r_squared\": " << json_number(res.fit->r_squared) << ",\n";
    os << "  \"points\": [";
    for (std::size_t k = 0; k < res.fit->points.size(); ++k) {
      os << (k ? ", " : "") << '[' << json_number(res.fit->points[k].first) << ", "
         << json_number(res.fit->points[k].second) << ']';
    }
    os << "],\n";
  } else {
    os << "  \"slope\": null,\n  \"intercept\": null,\n  \"r_squared\": null,\n  \"points\": [],\n";
  }
  os << "  \"dropped\": [";
  for (std::size_t k = 0; k < res.dropped.size(); ++k) {
    os << (k ? ", " : "") << "{\"eps\": " << json_number(res.dropped[k].eps)
       << ", \"reason\": " << json_string(res.dropped[k].reason) << '}';
  }
  os << "],\n  \"predictions\": {";
  for (std::size_t k = 0; k < res.predictions.size(); ++k) {
    os << (k ? ", " : "") << json_string(res.predictions[k].first) << ": " << json_number(res.predictions[k].second);
  }
  os << "},\n  \"checks\": {";
  for (std::size_t k = 0; k < res.checks.size(); ++k) {
    os << (k ? ", " : "") << json_string(res.checks[k].first) << ": " << (res.checks[k].second ? "true" : "false");
  }
  os << "}\n}\n";
}

}  // namespace rotmap::io
