#include <fstream>

#include <fftw3.h>

#include "json.hpp"
#include "sasd/errors.hpp"
#include "sasd/experiments.hpp"
#include "sasd/io.hpp"

namespace sasd {

using nlohmann::json;

namespace {

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

template <typename T>
std::vector<T> list_of(const json& j, const std::string& key) {
  if (!j.is_array()) return {get_as<T>(j, key)};
  std::vector<T> out;
  for (const json& e : j) out.push_back(get_as<T>(e, key));
  return out;
}

ThetaSpec theta_of(const json& j) {
  if (j.is_number()) return parse_theta(format_double(j.get<double>()));
  if (j.is_string()) return parse_theta(j.get<std::string>());
  throw ConfigError("config key 'theta' must hold strings or numbers");
}

void apply(ExperimentConfig& c, const std::string& key, const json& v) {
  PipelineOptions& s = c.solve;
  if (key == "experiment") {
    c.kind = parse_experiment_kind(get_as<std::string>(v, key));
  } else if (key == "n0") {
    c.n0 = list_of<std::size_t>(v, key);
  } else if (key == "theta") {
    c.theta.clear();
    if (v.is_array()) {
      for (const json& e : v) c.theta.push_back(theta_of(e));
    } else {
      c.theta.push_back(theta_of(v));
    }
  } else if (key == "kernel") {
    c.kernel = parse_kernel_kind(get_as<std::string>(v, key));
  } else if (key == "sigma") {
    c.sigma = get_as<double>(v, key);
  } else if (key == "dist") {
    c.dist = parse_activation_kind(get_as<std::string>(v, key));
  } else if (key == "m_factor") {
    c.m_factor = get_as<std::size_t>(v, key);
  } else if (key == "noise") {
    c.noise = get_as<double>(v, key);
  } else if (key == "offset") {
    c.offset = get_as<double>(v, key);
  } else if (key == "trials") {
    c.trials = get_as<int>(v, key);
  } else if (key == "seed") {
    c.seed = get_as<std::uint64_t>(v, key);
  } else if (key == "init") {
    c.init = get_as<std::string>(v, key);
  } else if (key == "solver") {
    s.solver = parse_solver_kind(get_as<std::string>(v, key));
    c.solvers = {s.solver};
  } else if (key == "beta") {
    s.beta = get_as<double>(v, key);
  } else if (key == "lambda" || key == "lambda_star") {
    s.lambda = get_as<double>(v, key);
  } else if (key == "lambda0") {
    s.lambda0 = get_as<double>(v, key);
  } else if (key == "homotopy") {
    s.homotopy = get_as<bool>(v, key);
  } else if (key == "eta") {
    s.eta = get_as<double>(v, key);
  } else if (key == "delta") {
    s.delta = get_as<double>(v, key);
  } else if (key == "eps_star") {
    s.eps_star = get_as<double>(v, key);
  } else if (key == "reweight") {
    s.reweight = get_as<bool>(v, key);
  } else if (key == "reweight_rounds") {
    s.reweight_rounds = get_as<int>(v, key);
  } else if (key == "nonneg") {
    s.nonneg = get_as<bool>(v, key);
  } else if (key == "bias") {
    s.bias = get_as<bool>(v, key);
  } else if (key == "max_iters") {
    s.max_iters = get_as<int>(v, key);
  } else if (key == "iterate_tol") {
    s.iterate_tol = get_as<double>(v, key);
  } else if (key == "fft_budget") {
    s.fft_budget = get_as<std::uint64_t>(v, key);
  } else if (key == "solvers") {
    c.solvers.clear();
    for (const auto& name : list_of<std::string>(v, key)) c.solvers.push_back(parse_solver_kind(name));
  } else if (key == "inits") {
    c.inits = list_of<std::string>(v, key);
  } else if (key == "schedules") {
    c.schedules.clear();
    for (const auto& name : list_of<std::string>(v, key)) {
      if (name != "fixed" && name != "homotopy") {
        throw ConfigError("schedules entries must be fixed or homotopy");
      }
      c.schedules.push_back(name == "homotopy");
    }
  } else if (key == "target") {
    c.target = get_as<double>(v, key);
  } else if (key == "shifts") {
    c.shifts = list_of<long>(v, key);
  } else if (key == "resolution") {
    c.resolution = get_as<int>(v, key);
  } else if (key == "num_kernels") {
    c.num_kernels = get_as<std::size_t>(v, key);
  } else if (key == "threads") {
    c.threads = get_as<int>(v, key);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

json theta_json(const ThetaSpec& t) {
  if (t.power) return t.str();
  return t.value;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what(), e.byte);
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  // The experiment kind selects the defaults the other keys override.
  if (j.contains("experiment")) {
    const ExperimentKind kind = parse_experiment_kind(get_as<std::string>(j["experiment"], "experiment"));
    if (kind != base.kind) base = default_config(kind);
  }
  for (const auto& [key, value] : j.items()) apply(base, key, value);
  base.validate();
  return base;
}

std::string config_to_json(const ExperimentConfig& c) {
  const PipelineOptions& s = c.solve;
  json j;
  j["experiment"] = to_string(c.kind);
  j["n0"] = c.n0;
  j["theta"] = json::array();
  for (const auto& t : c.theta) j["theta"].push_back(theta_json(t));
  j["kernel"] = to_string(c.kernel);
  j["sigma"] = c.sigma;
  j["dist"] = to_string(c.dist);
  j["m_factor"] = c.m_factor;
  j["noise"] = c.noise;
  j["offset"] = c.offset;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["init"] = c.init;
  j["solver"] = to_string(s.solver);
  j["beta"] = s.beta;
  j["lambda"] = s.lambda;
  j["lambda0"] = s.lambda0;
  j["homotopy"] = s.homotopy;
  j["eta"] = s.eta;
  j["delta"] = s.delta;
  j["eps_star"] = s.eps_star;
  j["reweight"] = s.reweight;
  j["reweight_rounds"] = s.reweight_rounds;
  j["nonneg"] = s.nonneg;
  j["bias"] = s.bias;
  j["max_iters"] = s.max_iters;
  j["iterate_tol"] = s.iterate_tol;
  j["fft_budget"] = s.fft_budget;
  j["solvers"] = json::array();
  for (SolverKind k : c.solvers) j["solvers"].push_back(to_string(k));
  j["inits"] = c.inits;
  j["schedules"] = json::array();
  for (bool h : c.schedules) j["schedules"].push_back(h ? "homotopy" : "fixed");
  j["target"] = c.target;
  j["shifts"] = c.shifts;
  j["resolution"] = c.resolution;
  j["num_kernels"] = c.num_kernels;
  j["threads"] = c.threads;
  return j.dump(2);
}

void write_report(const ExperimentReport& report, const ExperimentConfig& config,
                  const std::filesystem::path& dir, double wall_seconds) {
  std::filesystem::create_directories(dir);
  json files = json::array();
  for (const Table& t : report.tables) {
    const std::string name = report.experiment + "_" + t.name + ".csv";
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << t.csv();
    files.push_back(name);
  }
  json manifest;
  manifest["experiment"] = report.experiment;
  manifest["config"] = json::parse(config_to_json(config));
  manifest["versions"]["toolkit"] = toolkit_version();
  manifest["versions"]["fftw"] = std::string(fftw_version);
  manifest["versions"]["compiler"] = std::string(__VERSION__);
  manifest["versions"]["cxx_standard"] = static_cast<long>(__cplusplus);
  manifest["seed"] = config.seed;
  manifest["seed_derivation"] =
      "each row carries its trial seed, derived from the base seed and (cell, trial)";
  manifest["fft_op_convention"] =
      "a convolution or correlation counts 3 transforms (two forward, one inverse); "
      "a standalone spectrum counts 1";
  json summary = json::object();
  for (const auto& [k, v] : report.summary) summary[k] = v;
  manifest["summary"] = summary;
  manifest["failures"] = report.failures;
  manifest["files"] = files;
  manifest["wall_time_seconds"] = wall_seconds;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

}  // namespace sasd
