#pragma once

// Batch front end: JSON run configurations in, JSON/CSV artifacts out.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "roadspeed/asymptotics.hpp"
#include "roadspeed/dispersion.hpp"
#include "roadspeed/error.hpp"
#include "roadspeed/model.hpp"
#include "roadspeed/pdesim.hpp"
#include "roadspeed/speedfinder.hpp"
#include "roadspeed/validation.hpp"

namespace roadspeed::cli {

using Json = nlohmann::ordered_json;

enum class Command { speed, sweep, threshold, simulate, validate };

inline Command parse_command(std::string_view s) {
  if (s == "speed") return Command::speed;
  if (s == "sweep") return Command::sweep;
  if (s == "threshold") return Command::threshold;
  if (s == "simulate") return Command::simulate;
  if (s == "validate") return Command::validate;
  throw Error(ErrorKind::config, "cli.execute", "unknown command '" + std::string(s) + "'");
}

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kNumericalFailure = 3, kValidationFailure = 4 };

inline int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::invalid_parameter:
    case ErrorKind::invalid_grid:
    case ErrorKind::domain_too_small:
    case ErrorKind::resolution:
      return kConfigError;
    case ErrorKind::validation:
      return kValidationFailure;
    default:
      return kNumericalFailure;
  }
}

struct SweepSettings {
  std::vector<double> scales = geometric_scales(5);
  RescaleTarget which = RescaleTarget::mu;
  double tolerance = 0.05;
};

struct RunConfig {
  Command command = Command::speed;
  ModelParams params;
  std::optional<ExchangeSpec> mu;
  std::optional<ExchangeSpec> nu;
  SweepSettings sweep;
  SimConfig sim;
  InitialBump initial;
  SpeedSearchConfig search;
  std::size_t curve_points = 201;
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
};

namespace detail {

inline double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw Error(ErrorKind::config, "cli.parse_config", std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

inline std::size_t count(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
    throw Error(ErrorKind::config, "cli.parse_config", std::string("'") + key + "' must be a nonnegative integer");
  return j[key].get<std::size_t>();
}

/// Kernel mass may come from the kernel block or from params.{mu_bar,nu_bar}; when both
/// are given they must agree.
inline ExchangeSpec parse_kernel(const Json& j, const char* name, std::optional<double>& param_mass) {
  if (!j.is_object()) throw Error(ErrorKind::config, "cli.parse_config", std::string("'") + name + "' must be an object");
  if (!j.contains("shape") || !j["shape"].is_string())
    throw Error(ErrorKind::config, "cli.parse_config", std::string("'") + name + ".shape' is required");
  ExchangeSpec s;
  s.shape = parse_kernel_shape(j["shape"].get<std::string>());
  s.half_width = number(j, "half_width", 1.0);
  s.range_scale = number(j, "range_scale", 1.0);
  if (j.contains("mass")) {
    s.mass = number(j, "mass", 0.0);
    if (param_mass && *param_mass != s.mass)
      throw Error(ErrorKind::config, "cli.parse_config", std::string("'") + name + ".mass' disagrees with params");
    param_mass = s.mass;
  } else if (param_mass) {
    s.mass = *param_mass;
  } else {
    throw Error(ErrorKind::config, "cli.parse_config", std::string("no mass for kernel '") + name + "'");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::config, "cli.parse_config", std::string(name) + ": " + e.what());
  }
  return s;
}

}  // namespace detail

/// Parses and validates a configuration document. Every numeric field is checked
/// against its owning type before any computation starts.
inline RunConfig parse_config(const Json& doc, Command command) {
  if (!doc.is_object()) throw Error(ErrorKind::config, "cli.parse_config", "configuration must be a JSON object");
  RunConfig cfg;
  cfg.command = command;
  const Json params = doc.value("params", Json::object());
  if (!params.is_object()) throw Error(ErrorKind::config, "cli.parse_config", "'params' must be an object");
  cfg.params.d = detail::number(params, "d", 1.0);
  cfg.params.D = detail::number(params, "D", 1.0);
  cfg.params.a = detail::number(params, "a", 1.0);
  std::optional<double> mu_bar, nu_bar;
  if (params.contains("mu_bar")) mu_bar = detail::number(params, "mu_bar", 0.0);
  if (params.contains("nu_bar")) nu_bar = detail::number(params, "nu_bar", 0.0);
  if (doc.contains("mu")) cfg.mu = detail::parse_kernel(doc["mu"], "mu", mu_bar);
  if (doc.contains("nu")) cfg.nu = detail::parse_kernel(doc["nu"], "nu", nu_bar);
  cfg.params.mu_bar = mu_bar.value_or(1.0);
  cfg.params.nu_bar = nu_bar.value_or(1.0);
  try {
    cfg.params.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::config, "cli.parse_config", e.what());
  }
  const bool needs_kernels = command != Command::threshold;
  if (needs_kernels && (!cfg.mu || !cfg.nu))
    throw Error(ErrorKind::config, "cli.parse_config", "this command needs both 'mu' and 'nu' kernels");

  if (doc.contains("grid")) {
    const Json& g = doc["grid"];
    cfg.search.grid.points_per_width = detail::number(g, "points_per_width", cfg.search.grid.points_per_width);
    cfg.search.grid.points_per_decay = detail::number(g, "points_per_decay", cfg.search.grid.points_per_decay);
    cfg.search.grid.pad_decay_lengths = detail::number(g, "pad_decay_lengths", cfg.search.grid.pad_decay_lengths);
    if (!(cfg.search.grid.points_per_width > 0) || !(cfg.search.grid.points_per_decay > 0) ||
        !(cfg.search.grid.pad_decay_lengths >= 0))
      throw Error(ErrorKind::config, "cli.parse_config", "grid resolution settings must be positive");
  }
  if (doc.contains("sweep")) {
    const Json& s = doc["sweep"];
    if (s.contains("scales")) {
      if (!s["scales"].is_array()) throw Error(ErrorKind::config, "cli.parse_config", "'sweep.scales' must be an array");
      cfg.sweep.scales.clear();
      for (const auto& v : s["scales"]) {
        if (!v.is_number()) throw Error(ErrorKind::config, "cli.parse_config", "'sweep.scales' must hold numbers");
        cfg.sweep.scales.push_back(v.get<double>());
      }
    }
    if (s.contains("which")) cfg.sweep.which = parse_rescale_target(s["which"].get<std::string>());
    cfg.sweep.tolerance = detail::number(s, "tolerance", cfg.sweep.tolerance);
  }
  if (command == Command::sweep) {
    if (cfg.sweep.scales.empty()) throw Error(ErrorKind::config, "cli.parse_config", "'sweep.scales' is empty");
    for (std::size_t i = 0; i < cfg.sweep.scales.size(); ++i)
      if (!(cfg.sweep.scales[i] >= 1.0) || (i > 0 && !(cfg.sweep.scales[i] > cfg.sweep.scales[i - 1])))
        throw Error(ErrorKind::config, "cli.parse_config", "'sweep.scales' must be increasing and >= 1");
  }
  if (doc.contains("sim")) {
    const Json& s = doc["sim"];
    SimConfig& sc = cfg.sim;
    sc.Lx = detail::number(s, "Lx", sc.Lx);
    sc.Ly = detail::number(s, "Ly", sc.Ly);
    sc.nx = detail::count(s, "nx", sc.nx);
    sc.ny = detail::count(s, "ny", sc.ny);
    sc.dt = detail::number(s, "dt", sc.dt);
    sc.t_end = detail::number(s, "t_end", sc.t_end);
    sc.theta = detail::number(s, "theta", sc.theta);
    sc.fit_window = detail::number(s, "fit_window", sc.fit_window);
    sc.record_interval = detail::number(s, "record_interval", sc.record_interval);
    if (s.contains("signal")) {
      const std::string sig = s["signal"].get<std::string>();
      if (sig == "road") sc.signal = FrontSignal::road;
      else if (sig == "field") sc.signal = FrontSignal::field_centerline;
      else throw Error(ErrorKind::config, "cli.parse_config", "'sim.signal' must be 'road' or 'field'");
    }
  }
  if (doc.contains("initial")) {
    const Json& s = doc["initial"];
    cfg.initial.amplitude_u = detail::number(s, "amplitude_u", cfg.initial.amplitude_u);
    cfg.initial.amplitude_v = detail::number(s, "amplitude_v", cfg.initial.amplitude_v);
    cfg.initial.radius = detail::number(s, "radius", cfg.initial.radius);
    if (!(cfg.initial.amplitude_u >= 0) || !(cfg.initial.amplitude_v >= 0) || !(cfg.initial.radius > 0))
      throw Error(ErrorKind::config, "cli.parse_config", "initial bump needs nonnegative amplitudes and radius > 0");
  }
  if (command == Command::simulate) {
    // construct once to run the SimConfig checks before any output exists
    try {
      RoadFieldSimulator probe(cfg.sim, cfg.params, *cfg.mu, *cfg.nu);
    } catch (const Error& e) {
      throw Error(ErrorKind::config, "cli.parse_config", e.what());
    }
  }
  cfg.curve_points = detail::count(doc, "curve_points", cfg.curve_points);
  if (cfg.curve_points < 2) throw Error(ErrorKind::config, "cli.parse_config", "'curve_points' must be >= 2");
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path, Command command) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cli.load_config", "cannot open " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, "cli.load_config", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc, command);
}

/// Shortest round-trip decimal for a double; '.' separator regardless of locale.
inline std::string format_number(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Writes `content` to `path` through a sibling temporary and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::config, "cli.write_atomic", "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::config, "cli.write_atomic", "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += '\n';
  }
  return out;
}

inline Json params_json(const ModelParams& p) {
  return Json{{"d", p.d}, {"D", p.D}, {"a", p.a}, {"mu_bar", p.mu_bar}, {"nu_bar", p.nu_bar}};
}

inline Json optional_number(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

inline std::optional<double> upper_bound_if_defined(const ModelParams& p) {
  return p.D > p.d ? std::optional<double>(upper_bound_speed(p)) : std::nullopt;
}

/// Closed-form table for the `threshold` command.
inline Json threshold_table(const ModelParams& p) {
  const RegimeClassification cls = classify_regime(p);
  const std::optional<double> c_min =
      p.D > threshold_D(p) ? std::optional<double>(c_min_crossing(p)) : std::nullopt;
  return Json{{"params", params_json(p)},
              {"c_K", p.c_kpp()},
              {"threshold_D", threshold_D(p)},
              {"c_min", optional_number(c_min)},
              {"c_upper", optional_number(upper_bound_if_defined(p))},
              {"regime", std::string(to_string(cls.regime))},
              {"predicted_infimum", cls.predicted_infimum}};
}

struct Artifact {
  std::string name;
  std::string content;
};

/// Runs one command and returns the files it produces; nothing is written here.
inline std::vector<Artifact> run_command(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  std::vector<Artifact> out;
  switch (cfg.command) {
    case Command::threshold: {
      const Json t = threshold_table(p);
      out.push_back({"threshold.json", t.dump(2) + "\n"});
      std::vector<std::vector<double>> rows;
      std::string table = "quantity,value\n";
      table += "c_K," + format_number(p.c_kpp()) + "\n";
      table += "threshold_D," + format_number(threshold_D(p)) + "\n";
      if (!t["c_min"].is_null()) table += "c_min," + format_number(t["c_min"].get<double>()) + "\n";
      if (!t["c_upper"].is_null()) table += "c_upper," + format_number(t["c_upper"].get<double>()) + "\n";
      out.push_back({"threshold.csv", table});
      break;
    }
    case Command::speed: {
      const SpeedResult r = find_cstar(p, *cfg.mu, *cfg.nu, cfg.search);
      Json j{{"params", params_json(p)},
             {"c_star", r.c_star},
             {"lambda_star", optional_number(r.lambda_star)},
             {"regime", std::string(to_string(r.regime))},
             {"c_K", p.c_kpp()},
             {"c_upper", optional_number(upper_bound_if_defined(p))},
             {"gap_at_cstar", r.gap_at_cstar},
             {"iterations", r.iterations},
             {"bracket", Json::array({r.bracket.first, r.bracket.second})}};
      out.push_back({"speed.json", j.dump(2) + "\n"});
      std::vector<std::vector<double>> rows;
      if (r.regime == SpeedRegime::computed) {
        const PhiSolver solver = make_gap_solver(p, *cfg.mu, *cfg.nu, search_upper_speed(p), cfg.search.grid);
        for (const auto& s : sample_curves(r.c_star, solver, cfg.curve_points, cfg.search.endpoint_margin))
          rows.push_back({s.lambda, s.psi1, s.psi2});
      }
      // At c* = c_K the field curve degenerates to a point and only the header is written.
      out.push_back({"gamma-curves.csv", csv({"lambda", "psi1", "psi2"}, rows)});
      break;
    }
    case Command::sweep: {
      const SweepResult s = sweep_R(p, *cfg.mu, *cfg.nu, cfg.sweep.which, cfg.sweep.scales, cfg.search, cfg.sweep.tolerance);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < s.scales.size(); ++i) rows.push_back({s.scales[i], s.speeds[i], s.predicted_limit});
      out.push_back({"sweep.csv", csv({"R", "c_star", "predicted_limit"}, rows)});
      Json j{{"params", params_json(p)},
             {"which", std::string(to_string(cfg.sweep.which))},
             {"regime", std::string(to_string(s.regime))},
             {"predicted_limit", s.predicted_limit},
             {"extrapolated_limit", extrapolate_limit(s.speeds)},
             {"converged", s.converged},
             {"tolerance", cfg.sweep.tolerance}};
      out.push_back({"sweep.json", j.dump(2) + "\n"});
      break;
    }
    case Command::simulate: {
      RoadFieldSimulator sim(cfg.sim, p, *cfg.mu, *cfg.nu);
      const FrontTrace trace = sim.run_front_speed(cfg.initial);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < trace.times.size(); ++i) rows.push_back({trace.times[i], trace.positions[i]});
      out.push_back({"front.csv", csv({"t", "x_front"}, rows)});
      const SpeedResult r = find_cstar(p, *cfg.mu, *cfg.nu, cfg.search);
      Json j{{"params", params_json(p)},
             {"dispersion_c_star", r.c_star},
             {"fitted_speed", trace.fitted_speed},
             {"relative_difference", (trace.fitted_speed - r.c_star) / r.c_star},
             {"plateau", trace.plateau},
             {"dt", sim.dt()},
             {"t_end", cfg.sim.t_end}};
      out.push_back({"speed-compare.json", j.dump(2) + "\n"});
      break;
    }
    case Command::validate: {
      const ValidationReport rep = run_validation(p, *cfg.mu, *cfg.nu, cfg.seed, cfg.search);
      Json checks = Json::array();
      std::string text;
      for (const auto& c : rep.checks) {
        checks.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        text += std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
      }
      Json j{{"seed", cfg.seed}, {"passed", rep.all_passed()}, {"checks", checks}};
      out.push_back({"validation.json", j.dump(2) + "\n"});
      out.push_back({"validation.txt", text});
      break;
    }
  }
  return out;
}

/// Computes, then writes every artifact atomically. Returns the process exit status.
inline int execute(const RunConfig& cfg, std::ostream& err) {
  try {
    const std::vector<Artifact> files = run_command(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    for (const auto& f : files) write_atomic(cfg.out_dir / f.name, f.content);
    if (cfg.command == Command::validate) {
      for (const auto& f : files)
        if (f.name == "validation.json" && !Json::parse(f.content)["passed"].get<bool>()) {
          err << "cli.execute: validation error: one or more invariant checks failed\n";
          return kValidationFailure;
        }
    }
    return kSuccess;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace roadspeed::cli
