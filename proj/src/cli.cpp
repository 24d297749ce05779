#include "rotmap/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rotmap/error.hpp"
#include "rotmap/experiments.hpp"
#include "rotmap/io.hpp"
#include "rotmap/transport_map.hpp"

namespace rotmap::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kTailLambda = 4.0;
constexpr double kDefaultEpsFrom = 0.1;
constexpr double kDefaultEpsTo = 0.0125;
constexpr int kDefaultSolveN = 64;
constexpr int kDefaultTailsN = 128;
// Scans pick n by the mesh rule, capped so that a dense plan stays small.
constexpr long kMaxScanAtoms = 4096;

class AssertFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string num(double v) { return io::format_number(v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "null"; }

bool is_scan(const std::string& c) { return c.rfind("scan-", 0) == 0; }

void validate_config(const RunConfig& c) {
  const auto& cmds = command_names();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) throw InputError("unknown command " + c.command);
  if (!(c.p == 1.0 || (c.p > 1.0 && c.p <= 2.0))) throw InputError("--p must be 1 or lie in (1, 2]");
  if (!(c.eps > 0.0 && c.eps <= 1.0)) throw InputError("--eps must lie in (0, 1]");
  if (c.eps_from && !(*c.eps_from > 0.0 && *c.eps_from <= 1.0)) throw InputError("--eps-from must lie in (0, 1]");
  if (c.eps_to && !(*c.eps_to > 0.0 && *c.eps_to <= 1.0)) throw InputError("--eps-to must lie in (0, 1]");
  if (c.points < 4) throw InputError("--points must be >= 4");
  if (c.n && *c.n < 2) throw InputError("--n must be >= 2");
  if (!(c.tol > 0.0)) throw InputError("--tol must be > 0");
  if (c.max_iter < 1) throw InputError("--max-iter must be >= 1");
  if (c.threads < 1) throw InputError("--threads must be >= 1");
  if (c.quadruples < 1) throw InputError("--quadruples must be >= 1");
  if (!(c.gamma > 0.0) || !(c.kappa > 0.0)) throw InputError("--gamma and --kappa must be > 0");
  if (!(c.a_scale > 0.0)) throw InputError("--a-scale must be > 0");
  if (c.window_radius && !(*c.window_radius > 0.0)) throw InputError("--window-radius must be > 0");
  if (!(c.amplitude >= 0.0 && c.amplitude < 0.5)) throw InputError("--amplitude must lie in [0, 0.5)");
  if (c.out.empty()) throw InputError("--out must not be empty");
}

Regularizer regularizer(const RunConfig& c) { return Regularizer::from_p(c.p); }

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.threads = c.threads;
  return o;
}

InstanceSpec instance_spec(const RunConfig& c, int n) { return {c.instance, n, c.amplitude, c.seed}; }

int instance_dim(const RunConfig& c) { return make_instance(instance_spec(c, 2)).lambda.dim(); }

class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::function<void(std::ostream&)>& fn) const {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + (dir_ / name).string());
    fn(os);
    if (!os) throw std::runtime_error("write failed for " + (dir_ / name).string());
  }

 private:
  fs::path dir_;
};

// --- commands --------------------------------------------------------------

void cmd_solve(const RunConfig& c, const Outputs& out, std::ostream& log) {
  const Instance inst = make_instance(instance_spec(c, c.n.value_or(kDefaultSolveN)));
  const Solution s = solve(inst.lambda, inst.mu, regularizer(c), c.eps, solver_options(c));
  const auto samples = map_samples(s.potentials, s.plan, inst.lambda, inst.mu, c.threads);

  out.write("plan.csv", [&](std::ostream& os) { io::write_plan_csv(os, s.plan); });
  out.write("f.csv", [&](std::ostream& os) { io::write_potential_csv(os, s.potentials.f, "f"); });
  out.write("g.csv", [&](std::ostream& os) { io::write_potential_csv(os, s.potentials.g, "g"); });
  out.write("report.json", [&](std::ostream& os) { io::write_report_json(os, s.report); });
  out.write("map.csv", [&](std::ostream& os) { io::write_map_csv(os, samples); });
  if (inst.exact) {
    out.write("exact_coupling.csv", [&](std::ostream& os) { io::write_coupling_csv(os, *inst.exact); });
    out.write("exact_f.csv", [&](std::ostream& os) { io::write_potential_csv(os, inst.exact->potential_f, "f"); });
    out.write("exact_g.csv", [&](std::ostream& os) { io::write_potential_csv(os, inst.exact->potential_g, "g"); });
  }
  log << "solve iterations=" << s.report.iterations << " residual=" << num(s.report.residual)
      << " primal=" << num(s.report.primal) << " gap=" << num(s.report.gap) << '\n';
  if (c.assert_thresholds &&
      !(s.report.residual <= c.tol && std::abs(s.report.gap) <= gap_tolerance(s.report.primal))) {
    throw AssertFailure("solve: residual or duality gap above tolerance");
  }
}

SweepConfig sweep_config(const RunConfig& c, double eps_from, double eps_to) {
  SweepConfig sw;
  sw.reg = regularizer(c);
  sw.eps_values = geometric_eps(eps_from, eps_to, c.points);
  sw.solver = solver_options(c);
  int n = 0;
  if (c.n) {
    n = *c.n;
  } else {
    const int d = instance_dim(c);
    const int cap = static_cast<int>(std::floor(std::pow(static_cast<double>(kMaxScanAtoms), 1.0 / d) + 1e-9));
    n = std::min(mesh_rule_n(d, sw.reg, sw.eps_values.back()), cap);
  }
  sw.instance = instance_spec(c, n);
  if (c.window_radius) {
    const Instance inst = make_instance(sw.instance);
    sw.window = InteriorWindow{default_window(inst.lambda).center, *c.window_radius};
  }
  return sw;
}

void write_scan(const Outputs& out, const ScanResult& r, std::ostream& log) {
  out.write(r.name + ".csv", [&](std::ostream& os) { io::write_scan_csv(os, r.table); });
  out.write(r.name + ".fit.json", [&](std::ostream& os) { io::write_fit_json(os, r); });
  log << r.name;
  if (r.fit) log << " slope=" << num(r.fit->slope) << " r_squared=" << num(r.fit->r_squared);
  for (const auto& [k, v] : r.checks) log << ' ' << k << '=' << (v ? "true" : "false");
  log << '\n';
}

void require_fit(const ScanResult& r) {
  if (!r.fit) throw AssertFailure(r.name + ": too few points to fit");
}

// The sweep a scan command runs. scan-tails defaults to R = inradius/(2Λ),
// eps from R down to R/8 and n = 128.
SweepConfig build_sweep(const RunConfig& c) {
  if (c.command != "scan-tails") {
    return sweep_config(c, c.eps_from.value_or(kDefaultEpsFrom), c.eps_to.value_or(kDefaultEpsTo));
  }
  const SweepConfig probe = sweep_config(c, kDefaultEpsFrom, kDefaultEpsTo);
  const InteriorWindow dw = default_window(make_instance(probe.instance).lambda);
  // default_window has radius inradius/3.
  const double R = c.window_radius.value_or(3.0 * dw.radius / (2.0 * kTailLambda));
  SweepConfig sw = sweep_config(c, c.eps_from.value_or(R), c.eps_to.value_or(R / 8.0));
  // The mesh rule targets support radii; tails only need the window and the
  // ΛR shell resolved.
  if (!c.n) sw.instance.n_per_axis = kDefaultTailsN;
  sw.window = InteriorWindow{dw.center, R};
  return sw;
}

void cmd_scan(const RunConfig& c, const SweepConfig& sw, const Outputs& out, std::ostream& log) {
  if (c.command == "scan-tails") {
    const ScanResult r = scan_entropic_tails(sw, kTailLambda);
    write_scan(out, r, log);
    if (c.assert_thresholds) {
      const auto tail = r.table.column("tail");
      const bool decays = tail.front() > 0.0 && tail.back() * 10.0 <= tail.front();
      if (!decays || !r.check("ratios_shrinking")) throw AssertFailure("scan-tails: tail decay below factor 10");
    }
    return;
  }

  auto exact = [&] {
    Instance inst = make_instance(sw.instance);
    if (!inst.exact) throw InputError("instance " + c.instance + " has no exact baseline");
    return std::move(*inst.exact);
  };

  if (c.command == "scan-support") {
    const ScanResult r = scan_support_radius(sw);
    write_scan(out, r, log);
    if (c.assert_thresholds) {
      require_fit(r);
      if (std::abs(r.fit->slope - r.prediction("slope")) > 0.15 || r.fit->r_squared < 0.98) {
        throw AssertFailure("scan-support: slope outside target +-0.15 or r_squared < 0.98");
      }
    }
  } else if (c.command == "scan-gap") {
    const ScanResult r = scan_energy_gap(sw);
    write_scan(out, r, log);
    if (c.assert_thresholds) {
      if (sw.reg.is_entropic()) {
        if (!r.check("gap_ratio_at_most_1")) throw AssertFailure("scan-gap: entropic gap ratio exceeds 1");
      } else {
        require_fit(r);
        if (std::abs(r.fit->slope - r.prediction("slope")) > 0.2) {
          throw AssertFailure("scan-gap: slope outside target +-0.2");
        }
      }
    }
  } else if (c.command == "scan-bias") {
    const ScanResult r = scan_bias(sw, exact());
    write_scan(out, r, log);
    if (c.assert_thresholds) {
      require_fit(r);
      if (r.fit->slope < r.prediction("global_exponent") - 0.1) {
        throw AssertFailure("scan-bias: slope below the global exponent - 0.1");
      }
    }
  } else if (c.command == "scan-map") {
    const ScanResult r = scan_map_convergence(sw, exact());
    write_scan(out, r, log);
    if (c.assert_thresholds) {
      for (const char* k : {"map_error_strictly_decreasing", "map_error_final_within_2h", "potential_error_decreasing"}) {
        if (!r.check(k)) throw AssertFailure(std::string("scan-map: ") + k + " failed");
      }
    }
  }
}

void cmd_audit_monotonicity(const RunConfig& c, const Outputs& out, std::ostream& log) {
  const Instance inst = make_instance(instance_spec(c, c.n.value_or(kDefaultSolveN)));
  const Solution s = solve(inst.lambda, inst.mu, regularizer(c), c.eps, solver_options(c));
  const auto q = static_cast<std::size_t>(c.quadruples);
  const MonotonicityAudit a = audit_monotonicity(s.plan, s.potentials, inst.lambda, inst.mu, q, c.seed, c.tol, c.threads);
  Plan corrupted = s.plan;
  corrupted.swap_rows(0, corrupted.rows() - 1);
  const MonotonicityAudit neg =
      audit_monotonicity(corrupted, s.potentials, inst.lambda, inst.mu, q, c.seed, c.tol, c.threads);
  out.write("monotonicity.json", [&](std::ostream& os) {
    os << "{\"quadruples\": " << a.quadruples << ", \"violations\": " << a.violations
       << ", \"worst_margin\": " << num(a.worst_margin) << ", \"negative_control_violations\": " << neg.violations
       << "}\n";
  });
  log << "audit-monotonicity violations=" << a.violations << " worst_margin=" << num(a.worst_margin)
      << " negative_control_violations=" << neg.violations << '\n';
  if (c.assert_thresholds && (a.violations != 0 || neg.violations == 0)) {
    throw AssertFailure("audit-monotonicity: violations on the solved plan or none on the corrupted plan");
  }
}

void cmd_audit_rescaling(const RunConfig& c, const Outputs& out, std::ostream& log) {
  const Instance inst = make_instance(instance_spec(c, c.n.value_or(kDefaultSolveN)));
  const int d = inst.lambda.dim();
  if (static_cast<int>(c.shift.size()) != d) throw InputError("--shift needs one value per dimension");
  const Eigen::MatrixXd A = c.a_scale * Eigen::MatrixXd::Identity(d, d);
  const Point b = Eigen::Map<const Eigen::VectorXd>(c.shift.data(), d);
  const RescalingAudit r =
      audit_rescaling(inst.lambda, inst.mu, regularizer(c), c.eps, A, b, c.gamma, c.kappa, solver_options(c));
  out.write("rescaling.json", [&](std::ostream& os) {
    os << "{\"plan_distance\": " << num(r.plan_distance) << ", \"objective_difference\": "
       << num(r.objective_difference) << ", \"eps_transformed\": " << num(r.eps_transformed) << "}\n";
  });
  log << "audit-rescaling plan_distance=" << num(r.plan_distance)
      << " objective_difference=" << num(r.objective_difference) << '\n';
  if (c.assert_thresholds && !(r.plan_distance <= 10.0 * c.tol && r.objective_difference <= 10.0 * c.tol)) {
    throw AssertFailure("audit-rescaling: distance above 10 tol");
  }
}

void execute(const RunConfig& c, std::ostream& log) {
  // Everything that can be validated up front is, before the output
  // directory is touched.
  const int d = instance_dim(c);
  if ((c.command == "scan-support" || c.command == "scan-bias") && c.p == 1.0) {
    throw InputError(c.command + " needs a polynomial regulariser (p > 1); use scan-tails for p = 1");
  }
  if (c.command == "scan-tails" && c.p != 1.0) throw InputError("scan-tails needs the entropic regulariser (--p 1)");
  if (c.command == "audit-rescaling" && static_cast<int>(c.shift.size()) != d) {
    throw InputError("--shift needs one value per dimension");
  }
  std::optional<SweepConfig> sweep;
  if (is_scan(c.command)) {
    sweep = build_sweep(c);
    validate(*sweep);
  }
  const Outputs out(c.out);
  out.write("run_config.json", [&](std::ostream& os) { os << to_canonical_json(c); });
  if (c.command == "solve") {
    cmd_solve(c, out, log);
  } else if (sweep) {
    cmd_scan(c, *sweep, out, log);
  } else if (c.command == "audit-monotonicity") {
    cmd_audit_monotonicity(c, out, log);
  } else {
    cmd_audit_rescaling(c, out, log);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InputError("cannot read config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"solve",    "scan-support", "scan-gap",           "scan-bias",
                                                 "scan-tails", "scan-map",   "audit-monotonicity", "audit-rescaling"};
  return names;
}

std::string to_canonical_json(const RunConfig& c) {
  std::ostringstream os;
  os << "{\n"
     << "  \"schema\": 1,\n"
     << "  \"command\": \"" << c.command << "\",\n"
     << "  \"instance\": \"" << c.instance << "\",\n"
     << "  \"n\": " << (c.n ? std::to_string(*c.n) : "null") << ",\n"
     << "  \"amplitude\": " << num(c.amplitude) << ",\n"
     << "  \"seed\": " << c.seed << ",\n"
     << "  \"p\": " << num(c.p) << ",\n"
     << "  \"eps\": " << num(c.eps) << ",\n"
     << "  \"eps_from\": " << opt_num(c.eps_from) << ",\n"
     << "  \"eps_to\": " << opt_num(c.eps_to) << ",\n"
     << "  \"points\": " << c.points << ",\n"
     << "  \"tol\": " << num(c.tol) << ",\n"
     << "  \"max_iter\": " << c.max_iter << ",\n"
     << "  \"threads\": " << c.threads << ",\n"
     << "  \"out\": " << nlohmann::json(c.out).dump() << ",\n"
     << "  \"assert\": " << (c.assert_thresholds ? "true" : "false") << ",\n"
     << "  \"quadruples\": " << c.quadruples << ",\n"
     << "  \"gamma\": " << num(c.gamma) << ",\n"
     << "  \"kappa\": " << num(c.kappa) << ",\n"
     << "  \"a_scale\": " << num(c.a_scale) << ",\n"
     << "  \"shift\": [";
  for (std::size_t k = 0; k < c.shift.size(); ++k) os << (k ? ", " : "") << num(c.shift[k]);
  os << "],\n"
     << "  \"window_radius\": " << opt_num(c.window_radius) << "\n"
     << "}\n";
  return os.str();
}

RunConfig apply_json(const std::string& text, RunConfig c) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  if (!j.contains("schema") || j["schema"] != 1) throw InputError("config needs \"schema\": 1");

  using Setter = std::function<void(const nlohmann::json&)>;
  auto opt_double = [](std::optional<double>& dst) {
    return [&dst](const nlohmann::json& v) {
      if (v.is_null()) dst.reset(); else dst = v.get<double>();
    };
  };
  const std::vector<std::pair<std::string, Setter>> keys = {
      {"schema", [](const nlohmann::json&) {}},
      {"command", [&](const nlohmann::json& v) { c.command = v.get<std::string>(); }},
      {"instance", [&](const nlohmann::json& v) { c.instance = v.get<std::string>(); }},
      {"n", [&](const nlohmann::json& v) { if (v.is_null()) c.n.reset(); else c.n = v.get<int>(); }},
      {"amplitude", [&](const nlohmann::json& v) { c.amplitude = v.get<double>(); }},
      {"seed", [&](const nlohmann::json& v) { c.seed = v.get<std::uint64_t>(); }},
      {"p", [&](const nlohmann::json& v) { c.p = v.get<double>(); }},
      {"eps", [&](const nlohmann::json& v) { c.eps = v.get<double>(); }},
      {"eps_from", opt_double(c.eps_from)},
      {"eps_to", opt_double(c.eps_to)},
      {"points", [&](const nlohmann::json& v) { c.points = v.get<int>(); }},
      {"tol", [&](const nlohmann::json& v) { c.tol = v.get<double>(); }},
      {"max_iter", [&](const nlohmann::json& v) { c.max_iter = v.get<int>(); }},
      {"threads", [&](const nlohmann::json& v) { c.threads = v.get<int>(); }},
      {"out", [&](const nlohmann::json& v) { c.out = v.get<std::string>(); }},
      {"assert", [&](const nlohmann::json& v) { c.assert_thresholds = v.get<bool>(); }},
      {"quadruples", [&](const nlohmann::json& v) { c.quadruples = v.get<int>(); }},
      {"gamma", [&](const nlohmann::json& v) { c.gamma = v.get<double>(); }},
      {"kappa", [&](const nlohmann::json& v) { c.kappa = v.get<double>(); }},
      {"a_scale", [&](const nlohmann::json& v) { c.a_scale = v.get<double>(); }},
      {"shift", [&](const nlohmann::json& v) { c.shift = v.get<std::vector<double>>(); }},
      {"window_radius", opt_double(c.window_radius)},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return k.first == key; });
    if (it == keys.end()) throw InputError("unknown config key \"" + key + "\"");
    try {
      it->second(value);
    } catch (const nlohmann::json::exception&) {
      throw InputError("config key \"" + key + "\" has the wrong type");
    }
  }
  return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadratic optimal transport with entropic or polynomial regularisation: solver, rate scans, audits",
               "rotmap"};
  app.require_subcommand(1);

  RunConfig f;
  std::string config_path;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> setters;
  auto add = [&](const std::string& name, auto RunConfig::*member, const std::string& desc) {
    CLI::Option* o = app.add_option(name, f.*member, desc);
    setters.emplace_back(o, [member, &f](RunConfig& c) { c.*member = f.*member; });
    return o;
  };
  app.add_option("--config", config_path, "JSON config (schema 1); flags override it");
  add("--instance", &RunConfig::instance, "translation1d|dilation1d|translation2d|holder1d|holder2d|selfmap");
  add("--n", &RunConfig::n, "atoms per axis (default: mesh rule for scans, 64 otherwise)");
  add("--amplitude", &RunConfig::amplitude, "density modulation of the holder instances");
  add("--seed", &RunConfig::seed, "seed for holder phases and audit sampling");
  add("--p", &RunConfig::p, "regulariser exponent: 1 = entropic, (1,2] = polynomial");
  add("--eps", &RunConfig::eps, "regularisation parameter for solve and audits");
  add("--eps-from", &RunConfig::eps_from, "largest eps of a sweep");
  add("--eps-to", &RunConfig::eps_to, "smallest eps of a sweep");
  add("--points", &RunConfig::points, "number of eps values in a sweep (>= 4)");
  add("--tol", &RunConfig::tol, "marginal residual tolerance");
  add("--max-iter", &RunConfig::max_iter, "solver iteration cap");
  add("--threads", &RunConfig::threads, "worker threads (results do not depend on it)");
  add("--out", &RunConfig::out, "output directory");
  add("--quadruples", &RunConfig::quadruples, "samples for audit-monotonicity");
  add("--gamma", &RunConfig::gamma, "audit-rescaling dilation of the target");
  add("--kappa", &RunConfig::kappa, "audit-rescaling mass factor");
  add("--a-scale", &RunConfig::a_scale, "audit-rescaling A = a_scale * I");
  add("--shift", &RunConfig::shift, "audit-rescaling b, comma separated")->delimiter(',');
  add("--window-radius", &RunConfig::window_radius, "interior window radius for scans");
  CLI::Option* assert_flag = app.add_flag("--assert", f.assert_thresholds, "exit 4 when an acceptance threshold fails");
  setters.emplace_back(assert_flag, [&f](RunConfig& c) { c.assert_thresholds = f.assert_thresholds; });

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "solve one instance; writes plan, potentials, map and report"},
      {"scan-support", "support radius vs eps (polynomial)"},
      {"scan-gap", "energy gap vs eps"},
      {"scan-bias", "bias radius vs eps against the exact map (polynomial)"},
      {"scan-tails", "entropic tail mass vs eps (p = 1)"},
      {"scan-map", "map and potential convergence vs eps"},
      {"audit-monotonicity", "regularised cyclical monotonicity on sampled quadruples"},
      {"audit-rescaling", "affine rescaling equivariance"},
  };
  for (const auto& [name, desc] : commands) app.add_subcommand(name, desc)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error=validation detail=" << one_line(e.what()) << '\n';
    return kValidation;
  }

  try {
    RunConfig c;
    if (!config_path.empty()) c = apply_json(read_text(config_path), c);
    for (const auto& [opt, set] : setters) {
      if (opt->count() > 0) set(c);
    }
    c.command = app.get_subcommands().front()->get_name();
    validate_config(c);
    execute(c, out);
    return kOk;
  } catch (const AssertFailure& e) {
    err << "error=assert detail=" << one_line(e.what()) << '\n';
    return kAssertFailed;
  } catch (const NonConvergenceError& e) {
    err << "error=nonconvergence detail=" << one_line(e.what()) << " residual=" << num(e.residual())
        << " iterations=" << e.iterations() << '\n';
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    err << "error=validation detail=" << one_line(e.what()) << '\n';
    return kValidation;
  } catch (const std::domain_error& e) {
    err << "error=validation detail=" << one_line(e.what()) << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error=internal detail=" << one_line(e.what()) << '\n';
    return kInternal;
  }
}

}  // namespace rotmap::cli
