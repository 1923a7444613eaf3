#include "banachproj/cli.hpp"

#include "banachproj/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

namespace banachproj {

namespace {

struct Space {
  Exponent p;
  std::size_t n;
};

// Integers arrive signed or unsigned depending on how the JSON was built.
std::uint64_t integer_at_least(const Json& j, std::uint64_t lo, const std::string& what) {
  if (j.is_number_unsigned() && j.get<std::uint64_t>() >= lo) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0 && static_cast<std::uint64_t>(j.get<std::int64_t>()) >= lo)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(what + (lo == 0 ? " must be a nonnegative integer" : " must be a positive integer"));
}

Space parse_space(const Json& config) {
  if (!config.contains("space") || !config["space"].is_object()) throw ConfigError("config needs a \"space\" object");
  const Json& s = config["space"];
  if (!s.contains("p") || !s["p"].is_number()) throw ConfigError("space.p must be a number");
  if (!s.contains("n")) throw ConfigError("space.n must be a positive integer");
  const std::size_t n = integer_at_least(s["n"], 1, "space.n");
  const double p = s["p"].get<double>();
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("space.p must lie in (1, inf)");
  return Space{Exponent(p), n};
}

const Json& inputs_of(const Json& config) {
  if (!config.contains("inputs")) throw ConfigError("config needs \"inputs\"");
  return config["inputs"];
}

const Json& input_field(const Json& config, const char* key) {
  const Json& in = inputs_of(config);
  if (!in.is_object() || !in.contains(key)) throw ConfigError(std::string("inputs.") + key + " is required");
  return in[key];
}

double tolerance(const Json& config, const char* key, double fallback) {
  if (!config.contains("tolerances")) return fallback;
  const Json& t = config["tolerances"];
  if (!t.is_object()) throw ConfigError("tolerances must be an object");
  if (!t.contains(key)) return fallback;
  if (!t[key].is_number() || !(t[key].get<double>() > 0.0)) throw ConfigError(std::string("tolerances.") + key + " must be positive");
  return t[key].get<double>();
}

std::uint64_t seed_of(const Json& config) {
  if (!config.contains("seed")) return 0;
  return integer_at_least(config["seed"], 0, "seed");
}

std::vector<double> number_list(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError(what + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

SolverOptions solver_options(const Json& config) {
  SolverOptions o;
  o.tol = tolerance(config, "solver_tol", o.tol);
  o.cert_tol = tolerance(config, "cert_tol", o.cert_tol);
  o.max_iter = static_cast<std::size_t>(tolerance(config, "max_iter", static_cast<double>(o.max_iter)));
  return o;
}

Projector projector_for(const ConvexSet& c) {
  return [&c](const LpVector& z) { return project(c, z); };
}

bool is_polytope(const ConvexSet& c) { return c.as<PolytopeH>() || c.as<PolytopeV>(); }

void emit(const Json& config, const std::string& text, std::ostream& out) {
  if (config.contains("output_path") && config["output_path"].is_string()) {
    const std::string path = config["output_path"].get<std::string>();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output_path " + path);
    f << text;
    return;
  }
  out << text;
}

Json header(const Json& config, const Space& sp) {
  return Json{{"command", config["command"]}, {"space", Json{{"p", sp.p.value()}, {"n", sp.n}}}};
}

int cmd_project(const Json& config, std::ostream& out) {
  const Space sp = parse_space(config);
  const ConvexSet c = parse_set(config.at("set"), sp.n, sp.p);
  const Json& in = inputs_of(config);
  std::vector<LpVector> points;
  if (in.is_array() && !in.empty() && in[0].is_array()) {
    for (const auto& pt : in) points.push_back(parse_vector(pt, sp.n, sp.p, "inputs[]"));
  } else if (in.is_object() && in.contains("x")) {
    points.push_back(parse_vector(in["x"], sp.n, sp.p, "inputs.x"));
  } else if (in.is_object() && in.contains("points")) {
    for (const auto& pt : in["points"]) points.push_back(parse_vector(pt, sp.n, sp.p, "inputs.points[]"));
  } else {
    throw ConfigError("project inputs must be a list of points, {\"x\": ...} or {\"points\": [...]}");
  }
  const SolverOptions opts = solver_options(config);
  Json report = header(config, sp);
  report["set"] = set_to_json(c);
  Json results = Json::array();
  bool all_converged = true;
  for (const auto& x : points) {
    const auto cert = certified_projection(c, x, opts);
    all_converged = all_converged && cert.converged;
    results.push_back(to_json(cert));
  }
  report["results"] = results;
  emit(config, dump_json(report) + "\n", out);
  return all_converged ? kExitOk : kExitNonConvergence;
}

int cmd_derivative(const Json& config, std::ostream& out) {
  const Space sp = parse_space(config);
  const ConvexSet c = parse_set(config.at("set"), sp.n, sp.p);
  const LpVector x = parse_vector(input_field(config, "x"), sp.n, sp.p, "inputs.x");
  const LpVector v = parse_vector(input_field(config, "v"), sp.n, sp.p, "inputs.v");
  const double agreement = tolerance(config, "agreement", 1e-4);
  StepSchedule schedule = StepSchedule::dyadic(8, 30, tolerance(config, "quotient_tol", 1e-7));

  const DerivativeResult result = derivative(c, x, v);
  const auto oracle = numdiff_derivative(projector_for(c), x, v, schedule,
                                         is_polytope(c) ? std::optional<double>(solver_options(config).tol) : std::nullopt);
  const double gap = lp_norm(result.value - oracle.estimate);
  const double bound = agreement * std::max(1.0, lp_norm(result.value));

  Json report = header(config, sp);
  report["result"] = to_json(result);
  report["numdiff"] = to_json(oracle);
  report["discrepancy"] = gap;
  report["agreement_bound"] = bound;
  report["agrees"] = oracle.converged && gap <= bound;
  emit(config, dump_json(report) + "\n", out);
  if (!oracle.converged) return kExitNonConvergence;
  return gap <= bound ? kExitOk : kExitCheckFailed;
}

int cmd_classify(const Json& config, std::ostream& out) {
  const Space sp = parse_space(config);
  const ConvexSet c = parse_set(config.at("set"), sp.n, sp.p);
  const Json& in = inputs_of(config);
  Json report = header(config, sp);
  if (in.is_object() && in.contains("v")) {
    const auto* b = c.as<Ball>();
    if (!b) throw ConfigError("direction classification needs a ball set");
    const LpVector x = parse_vector(input_field(config, "x"), sp.n, sp.p, "inputs.x");
    const LpVector v = parse_vector(in["v"], sp.n, sp.p, "inputs.v");
    report["boundary_class"] = to_json(classify_direction(b->center, b->radius, x, v));
    emit(config, dump_json(report) + "\n", out);
    return kExitOk;
  }
  const LpVector y = parse_vector(input_field(config, "y"), sp.n, sp.p, "inputs.y");
  const PointClass pc = classify_point(c, y);
  bool witness_ok = true;
  if (pc.witness) witness_ok = lp_norm(project(c, y + *pc.witness) - y) <= 1e-8 * std::max(1.0, lp_norm(y));
  report["point_class"] = to_json(pc);
  report["witness_verified"] = witness_ok;
  emit(config, dump_json(report) + "\n", out);
  return witness_ok ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const Json& config, std::ostream& out) {
  const Space sp = parse_space(config);
  std::string suite;
  if (config.contains("suite") && config["suite"].is_string()) suite = config["suite"].get<std::string>();
  else throw ConfigError("verify needs a \"suite\" string");
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw ConfigError("unknown verify suite \"" + suite + "\"");
  if (suite == "hilbert" && sp.p.value() != 2.0) throw ConfigError("the hilbert suite requires space.p = 2");
  std::size_t count = 100;
  if (config.contains("count")) {
    count = integer_at_least(config["count"], 1, "count");
  }
  const SuiteReport rep = run_suite(suite, sp.p.value(), sp.n, seed_of(config), count);
  Json report = header(config, sp);
  report["suite"] = rep.suite;
  report["seed"] = seed_of(config);
  report["passed"] = rep.passed;
  report["failed"] = rep.failed;
  report["excluded"] = rep.excluded;
  Json failures = Json::array();
  for (const auto& f : rep.failures) failures.push_back(f);
  report["failures"] = failures;
  report["ok"] = rep.ok();
  emit(config, dump_json(report) + "\n", out);
  return rep.ok() ? kExitOk : kExitCheckFailed;
}

int cmd_moduli(const Json& config, std::ostream& out) {
  const Space sp = parse_space(config);
  if (sp.n < 2) throw ConfigError("moduli need space.n >= 2");
  std::vector<double> eps = default_moduli_grid(), ts = default_moduli_grid();
  ModuliOptions opts;
  opts.seed = seed_of(config);
  opts.threads = configured_threads();
  double lo = 0.02, hi = 0.2;
  if (config.contains("inputs") && config["inputs"].is_object()) {
    const Json& in = config["inputs"];
    if (in.contains("epsilons")) eps = number_list(in["epsilons"], "inputs.epsilons");
    if (in.contains("ts")) ts = number_list(in["ts"], "inputs.ts");
    if (in.contains("budget")) {
      opts.budget = integer_at_least(in["budget"], 1, "inputs.budget");
    }
    if (in.contains("fit_range")) {
      const auto r = number_list(in["fit_range"], "inputs.fit_range");
      if (r.size() != 2 || !(r[0] < r[1])) throw ConfigError("inputs.fit_range must be [lo, hi] with lo < hi");
      lo = r[0];
      hi = r[1];
    }
  }
  const ModuliEstimate est = estimate_moduli(sp.p.value(), sp.n, eps, ts, opts, lo, hi);

  bool delta_monotone = true, ratio_monotone = true, rho_bounded = true;
  for (std::size_t i = 1; i < est.epsilons.size(); ++i) {
    delta_monotone = delta_monotone && est.delta_values[i] >= est.delta_values[i - 1];
    ratio_monotone = ratio_monotone &&
                     est.delta_values[i] / est.epsilons[i] >= est.delta_values[i - 1] / est.epsilons[i - 1] * (1 - 1e-12);
  }
  for (std::size_t i = 0; i < est.ts.size(); ++i) rho_bounded = rho_bounded && est.rho_values[i] <= est.ts[i];

  std::string csv_path;
  if (config.contains("csv_path") && config["csv_path"].is_string()) {
    csv_path = config["csv_path"].get<std::string>();
  } else if (config.contains("output_path") && config["output_path"].is_string()) {
    csv_path = std::filesystem::path(config["output_path"].get<std::string>()).replace_extension(".csv").string();
  }
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open csv_path " + csv_path);
    f << moduli_csv(est);
  }

  Json report = header(config, sp);
  report["estimate"] = to_json(est);
  report["checks"] = Json{{"delta_nondecreasing", delta_monotone},
                          {"delta_over_eps_nondecreasing", ratio_monotone},
                          {"rho_at_most_t", rho_bounded}};
  report["csv_path"] = csv_path.empty() ? Json(nullptr) : Json(csv_path);
  emit(config, dump_json(report) + "\n", out);
  return delta_monotone && ratio_monotone && rho_bounded ? kExitOk : kExitCheckFailed;
}

int cmd_rate(const Json& config, std::ostream& out) {
  const Space sp = parse_space(config);
  const ConvexSet c = parse_set(config.at("set"), sp.n, sp.p);
  const LpVector x = parse_vector(input_field(config, "x"), sp.n, sp.p, "inputs.x");
  const Json& in = inputs_of(config);
  std::vector<LpVector> dirs;
  if (in.contains("directions")) {
    for (const auto& d : in["directions"]) dirs.push_back(normalized(parse_vector(d, sp.n, sp.p, "inputs.directions[]")));
  } else {
    std::size_t count = 32;
    if (in.contains("direction_count")) count = in["direction_count"].get<std::size_t>();
    std::mt19937_64 rng(seed_of(config));
    std::normal_distribution<double> N;
    while (dirs.size() < count) {
      Eigen::VectorXd g(static_cast<Eigen::Index>(sp.n));
      for (auto& e : g) e = N(rng);
      LpVector v(g, sp.p);
      if (!v.is_zero()) dirs.push_back(normalized(v));
    }
  }
  StepSchedule schedule = StepSchedule::dyadic(4, 20);
  if (is_polytope(c)) schedule = schedule.truncated(std::sqrt(solver_options(config).tol));
  const RateReport rep = cauchy_rate_probe(projector_for(c), x, dirs, schedule, configured_threads());
  const bool tail_small = rep.uniform_sup < 1e-5;
  const bool tail_monotone = tail_non_increasing(rep, 6);
  emit(config, rate_csv(rep), out);
  if (config.contains("summary_path") && config["summary_path"].is_string()) {
    Json summary = header(config, sp);
    summary["report"] = to_json(rep);
    summary["tail_below_1e-5"] = tail_small;
    summary["tail_non_increasing"] = tail_monotone;
    std::ofstream f(config["summary_path"].get<std::string>(), std::ios::binary);
    f << dump_json(summary) << "\n";
  }
  return tail_small && tail_monotone ? kExitOk : kExitCheckFailed;
}

}  // namespace

unsigned configured_threads() {
  if (const char* env = std::getenv("BANACHPROJ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_config(const Json& config, std::ostream& out, std::ostream& err) {
  try {
    if (!config.is_object()) throw ConfigError("config must be a JSON object");
    if (!config.contains("command") || !config["command"].is_string()) throw ConfigError("config needs a \"command\" string");
    const std::string cmd = config["command"].get<std::string>();
    if (cmd == "project") return cmd_project(config, out);
    if (cmd == "derivative") return cmd_derivative(config, out);
    if (cmd == "classify") return cmd_classify(config, out);
    if (cmd == "verify") return cmd_verify(config, out);
    if (cmd == "moduli") return cmd_moduli(config, out);
    if (cmd == "rate") return cmd_rate(config, out);
    throw ConfigError("unknown command \"" + cmd + "\"");
  } catch (const InfeasibleSet& e) {
    err << "infeasible set: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const NonConvergence& e) {
    err << "non-convergence: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const Json::exception& e) {
    err << "malformed config: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const std::invalid_argument& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitMalformed;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metric projections in l_p^n: projections, derivatives, and verification suites"};
  std::string command, config_path, out_path;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "project | derivative | classify | verify | moduli | rate (default: from config)");
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out_path, "override the config output_path");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitMalformed;
  }

  std::ifstream f(config_path);
  if (!f) {
    err << "cannot read config " << config_path << '\n';
    return kExitMalformed;
  }
  Json config;
  try {
    config = Json::parse(f);
  } catch (const Json::parse_error& e) {
    err << "malformed JSON in " << config_path << ": " << e.what() << '\n';
    return kExitMalformed;
  }
  if (!config.is_object()) {
    err << "config must be a JSON object\n";
    return kExitMalformed;
  }
  if (!command.empty()) {
    if (config.contains("command") && config["command"] != command) {
      err << "command \"" << command << "\" conflicts with config command " << config["command"].dump() << '\n';
      return kExitMalformed;
    }
    config["command"] = command;
  }
  if (seed) config["seed"] = *seed;
  if (!out_path.empty()) config["output_path"] = out_path;
  return run_config(config, out, err);
}

}  // namespace banachproj
