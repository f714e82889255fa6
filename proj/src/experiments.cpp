#include "sasd/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

#include "sasd/cdl.hpp"
#include "sasd/conv.hpp"
#include "sasd/errors.hpp"
#include "sasd/io.hpp"
#include "sasd/pipeline.hpp"
#include "sasd/rng.hpp"

namespace sasd {

namespace {

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

// Runs job(i) for i in [0, count) on a bounded pool. Results must be written
// to slot i so that output order does not depend on scheduling.
template <typename Job>
void parallel_for(std::size_t count, int threads, Job job) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) job(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double default_target_lambda(std::size_t kernel_size) {
  return 0.1 / std::sqrt(static_cast<double>(kernel_size));
}

Vec starting_kernel(const std::string& init, std::span<const double> y, std::size_t n0,
                    std::uint64_t seed) {
  if (init == "random") return random_kernel(3 * n0 - 2, seed);
  return init_kernel(y, n0, seed);
}

}  // namespace

// ---------------------------------------------------------------------------
// Names and parsing

double ThetaSpec::at(std::size_t n0) const {
  return power ? std::pow(static_cast<double>(n0), value) : value;
}

std::string ThetaSpec::str() const { return power ? "n0^" + fmt(value) : fmt(value); }

ThetaSpec parse_theta(const std::string& text) {
  ThetaSpec t;
  std::string body = text;
  t.power = body.rfind("n0^", 0) == 0;
  if (t.power) body = body.substr(3);
  std::size_t used = 0;
  try {
    t.value = std::stod(body, &used);
  } catch (const std::exception&) {
    throw ConfigError("theta: cannot parse '" + text + "'");
  }
  if (used != body.size()) throw ConfigError("theta: cannot parse '" + text + "'");
  if (t.power ? !(t.value < 0.0) : !(t.value > 0.0 && t.value <= 1.0)) {
    throw ConfigError("theta: '" + text + "' must be a probability in (0, 1] or n0^e with e < 0");
  }
  return t;
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  if (name == "phase") return ExperimentKind::kPhase;
  if (name == "convergence") return ExperimentKind::kConvergence;
  if (name == "landscape") return ExperimentKind::kLandscape;
  if (name == "cdl") return ExperimentKind::kCdl;
  throw ConfigError("unknown experiment '" + name + "' (phase|convergence|landscape|cdl)");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kPhase: return "phase";
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kLandscape: return "landscape";
    case ExperimentKind::kCdl: return "cdl";
  }
  return "?";
}

SolverKind parse_solver_kind(const std::string& name) {
  if (name == "adm") return SolverKind::kAdm;
  if (name == "iadm") return SolverKind::kIadm;
  throw ConfigError("unknown solver '" + name + "' (adm|iadm)");
}

std::string to_string(SolverKind kind) { return kind == SolverKind::kAdm ? "adm" : "iadm"; }

void PipelineOptions::validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must lie in [0, 1)");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(lambda0 >= 0.0)) throw ConfigError("lambda0 must be >= 0");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(eps_star > 0.0)) throw ConfigError("eps_star must be positive");
  if (reweight_rounds < 1) throw ConfigError("reweight_rounds must be >= 1");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(iterate_tol >= 0.0)) throw ConfigError("iterate_tol must be >= 0");
}

void ExperimentConfig::validate() const {
  if (n0.empty()) throw ConfigError("n0 list is empty");
  if (theta.empty()) throw ConfigError("theta list is empty");
  for (std::size_t v : n0) {
    if (v < 2) throw ConfigError("every n0 must be >= 2");
  }
  for (const ThetaSpec& t : theta) {
    if (t.power ? !(t.value < 0.0) : !(t.value > 0.0 && t.value <= 1.0)) {
      throw ConfigError("theta entries must be probabilities in (0, 1] or powers n0^e, e < 0");
    }
  }
  if (m_factor < 3) throw ConfigError("m_factor must be >= 3 so that 3n0 - 2 <= m");
  if (!(noise >= 0.0)) throw ConfigError("noise must be >= 0");
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (init != "data" && init != "random") throw ConfigError("init must be data or random");
  for (const auto& s : inits) {
    if (s != "data" && s != "random") throw ConfigError("inits entries must be data or random");
  }
  if (solvers.empty() || inits.empty() || schedules.empty()) {
    throw ConfigError("convergence axes must be non-empty");
  }
  if (!(target > 0.0)) throw ConfigError("target must be positive");
  if (shifts.size() != 3) throw ConfigError("landscape needs exactly three shifts");
  if (resolution < 1) throw ConfigError("resolution must be >= 1");
  if (num_kernels < 1 || num_kernels > kMaxScoredAtoms) {
    throw ConfigError("num_kernels must lie in [1, 6]");
  }
  if (threads < 0) throw ConfigError("threads must be >= 0");
  solve.validate();
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::kPhase:
      break;
    case ExperimentKind::kConvergence:
      c.n0 = {50};
      c.theta = {{true, -0.75}};
      c.solve.max_iters = 1000000;
      c.solve.iterate_tol = 0.0;
      c.solve.eps_star = 1e-12;
      c.solve.fft_budget = 100000;
      break;
    case ExperimentKind::kLandscape:
      c.n0 = {20};
      c.theta = {{true, -0.75}};
      c.solve.lambda = 0.5;
      c.trials = 1;
      break;
    case ExperimentKind::kCdl:
      c.n0 = {50};
      c.theta = {{true, -0.75}};
      c.solve.homotopy = false;
      c.solve.reweight = true;
      c.solve.max_iters = 2000;
      c.solve.iterate_tol = 1e-6;
      break;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Reports

std::string Table::csv() const {
  std::string s;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (j) s += ',';
    s += columns[j];
  }
  s += '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) s += ',';
      s += row[j];
    }
    s += '\n';
  }
  return s;
}

const Table& ExperimentReport::table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("report has no table '" + name + "'");
}

double ExperimentReport::metric(const std::string& name) const {
  for (const auto& [k, v] : summary) {
    if (k == name) return v;
  }
  throw std::out_of_range("report has no metric '" + name + "'");
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t cell, std::size_t trial) {
  return derive_seed(derive_seed(seed, Stream::kTrial, cell), Stream::kTrial, trial);
}

// ---------------------------------------------------------------------------
// Pipeline

PipelineRun run_pipeline(const Problem& problem, const BilinearState& init,
                         const PipelineOptions& options, double lambda,
                         const std::function<double(const BilinearState&)>& observer) {
  options.validate();
  if (!(lambda > 0.0)) throw DomainError("run_pipeline: lambda must be positive");
  const std::uint64_t ops0 = fft_transform_count();

  SolverConfig cfg;
  cfg.penalty.lambda = lambda;
  cfg.penalty.nonnegative = options.nonneg;
  cfg.beta = options.solver == SolverKind::kAdm ? 0.0 : options.beta;
  cfg.observer = observer;

  StopRule stop;
  stop.max_iters = options.max_iters;
  stop.iterate_tol = options.iterate_tol;
  stop.max_fft_ops = options.fft_budget;

  PipelineRun out;
  out.lambda = lambda;
  out.state = init;
  auto append = [&](const std::vector<IterationRecord>& trace) {
    int it0 = out.trace.empty() ? 0 : out.trace.back().iteration;
    std::uint64_t f0 = out.trace.empty() ? 0 : out.trace.back().fft_ops;
    for (IterationRecord r : trace) {
      r.iteration += it0;
      r.fft_ops += f0;
      out.trace.push_back(r);
    }
  };

  if (options.homotopy) {
    HomotopySchedule hs;
    hs.lambda0 = options.lambda0 > 0.0 ? std::max(options.lambda0, lambda) : 0.0;
    hs.lambda_star = lambda;
    hs.eta = options.eta;
    hs.delta = options.delta;
    hs.eps_star = options.eps_star;
    ContinuationResult r = homotopy_solve(problem, out.state, hs, options.solver, cfg, stop);
    out.state = std::move(r.state);
    append(r.trace);
    out.momentum_warnings += r.momentum_warnings;
    out.stop_reason = r.stages.empty() ? "fft_budget" : r.stages.back().stop_reason;
  }
  const bool spent = options.fft_budget > 0 && !out.trace.empty() &&
                     out.trace.back().fft_ops >= options.fft_budget;
  if (!spent && (options.reweight || !options.homotopy)) {
    if (options.fft_budget > 0 && !out.trace.empty()) {
      stop.max_fft_ops = options.fft_budget - out.trace.back().fft_ops;
    }
    const int rounds = options.reweight ? options.reweight_rounds : 1;
    ContinuationResult r = reweight_solve(problem, out.state, options.solver, cfg, stop, rounds);
    out.state = std::move(r.state);
    append(r.trace);
    out.momentum_warnings += r.momentum_warnings;
    out.stop_reason = r.stages.empty() ? "fft_budget" : r.stages.back().stop_reason;
  }
  out.fft_ops = fft_transform_count() - ops0;
  return out;
}

// ---------------------------------------------------------------------------
// Phase transition

ExperimentReport run_phase_transition(const ExperimentConfig& config) {
  config.validate();
  struct Cell {
    std::size_t n0;
    ThetaSpec theta;
  };
  std::vector<Cell> cells;
  for (std::size_t n0 : config.n0) {
    for (const ThetaSpec& t : config.theta) cells.push_back({n0, t});
  }
  const std::size_t trials = static_cast<std::size_t>(config.trials);

  struct Outcome {
    std::vector<std::string> row;
    bool success = false;
    std::string failure;
  };
  std::vector<Outcome> outcomes(cells.size() * trials);

  parallel_for(outcomes.size(), config.threads, [&](std::size_t job) {
    const std::size_t c = job / trials, t = job % trials;
    const Cell& cell = cells[c];
    const std::size_t m = config.m_factor * cell.n0;
    const double theta = cell.theta.at(cell.n0);
    const double lambda =
        config.solve.lambda > 0.0 ? config.solve.lambda : 1e-2 / std::sqrt(theta * cell.n0);
    const std::uint64_t seed = trial_seed(config.seed, c, t);
    Outcome& out = outcomes[job];
    double error = 1.0;
    int iterations = 0;
    std::uint64_t ops = 0;
    std::string status = "ok";
    try {
      KernelSpec ks{config.kernel, cell.n0};
      ks.sigma = config.sigma;
      const Instance inst = make_instance(ks, {config.dist, m, theta},
                                          {config.noise, config.offset}, seed);
      const Problem p = make_problem(inst.y, 3 * cell.n0 - 2, 1, config.solve.bias);
      const BilinearState init =
          initial_state(p, {starting_kernel(config.init, inst.y, cell.n0, seed)});
      const PipelineRun run = run_pipeline(p, init, config.solve, lambda);
      error = recovery_error(inst.a0, run.state.kernels[0]);
      iterations = run.trace.empty() ? 0 : run.trace.back().iteration;
      ops = run.fft_ops;
    } catch (const std::exception& e) {
      status = "failed";
      out.failure = "cell " + fmt(c) + " trial " + fmt(t) + ": " + e.what();
    }
    out.success = status == "ok" && recovered(error);
    out.row = {fmt(c),          fmt(cell.n0),   cell.theta.str(), fmt(theta),
               fmt(m),          fmt(lambda),    fmt(t),           fmt(seed),
               fmt(error),      fmt(int(out.success)), fmt(iterations), fmt(ops),
               status};
  });

  ExperimentReport report;
  report.experiment = "phase";
  Table trial_table{"trials",
                    {"cell", "n0", "theta_spec", "theta", "m", "lambda", "trial", "seed", "error",
                     "success", "iterations", "fft_ops", "status"},
                    {}};
  Table cell_table{"cells",
                   {"cell", "n0", "theta_spec", "theta", "m", "seed", "trials", "successes",
                    "success_fraction", "failures"},
                   {}};
  std::size_t total_success = 0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::size_t successes = 0, failures = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const Outcome& o = outcomes[c * trials + t];
      trial_table.rows.push_back(o.row);
      successes += o.success;
      if (!o.failure.empty()) {
        ++failures;
        report.failures.push_back(o.failure);
      }
    }
    total_success += successes;
    const double theta = cells[c].theta.at(cells[c].n0);
    cell_table.rows.push_back({fmt(c), fmt(cells[c].n0), cells[c].theta.str(), fmt(theta),
                               fmt(config.m_factor * cells[c].n0), fmt(config.seed),
                               fmt(trials), fmt(successes),
                               fmt(static_cast<double>(successes) / trials), fmt(failures)});
  }
  report.tables = {std::move(cell_table), std::move(trial_table)};
  report.summary.push_back(
      {"success_fraction", static_cast<double>(total_success) / outcomes.size()});
  report.summary.push_back({"failed_trials", static_cast<double>(report.failures.size())});
  return report;
}

// ---------------------------------------------------------------------------
// Convergence ablation

ExperimentReport run_convergence(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n0 = config.n0.front();
  const std::size_t m = config.m_factor * n0;
  const double theta = config.theta.front().at(n0);
  const double lambda =
      config.solve.lambda > 0.0 ? config.solve.lambda : default_target_lambda(3 * n0 - 2);

  struct Combo {
    SolverKind solver;
    std::string init;
    bool homotopy;
  };
  std::vector<Combo> combos;
  for (SolverKind s : config.solvers) {
    for (const auto& i : config.inits) {
      for (bool h : config.schedules) combos.push_back({s, i, h});
    }
  }
  const std::size_t trials = static_cast<std::size_t>(config.trials);

  struct Outcome {
    std::vector<std::vector<std::string>> trace_rows;
    std::vector<std::string> run_row;
    std::string failure;
  };
  std::vector<Outcome> outcomes(trials * combos.size());

  parallel_for(outcomes.size(), config.threads, [&](std::size_t job) {
    const std::size_t t = job / combos.size();
    const Combo& combo = combos[job % combos.size()];
    const std::uint64_t seed = trial_seed(config.seed, 0, t);
    const std::string schedule = combo.homotopy ? "homotopy" : "fixed";
    Outcome& out = outcomes[job];
    double final_error = 1.0;
    long first_hit = -1;
    int iterations = 0;
    std::uint64_t ops = 0;
    std::string stop_reason = "none", status = "ok";
    try {
      KernelSpec ks{config.kernel, n0};
      ks.sigma = config.sigma;
      const Instance inst =
          make_instance(ks, {config.dist, m, theta}, {config.noise, config.offset}, seed);
      const Problem p = make_problem(inst.y, 3 * n0 - 2, 1, config.solve.bias);
      const BilinearState init =
          initial_state(p, {starting_kernel(combo.init, inst.y, n0, seed)});
      PipelineOptions opt = config.solve;
      opt.solver = combo.solver;
      opt.homotopy = combo.homotopy;
      const PipelineRun run =
          run_pipeline(p, init, opt, lambda, [&](const BilinearState& s) {
            return recovery_error(inst.a0, s.kernels[0]);
          });
      final_error = recovery_error(inst.a0, run.state.kernels[0]);
      for (const IterationRecord& r : run.trace) {
        if (first_hit < 0 && r.observed <= config.target) first_hit = static_cast<long>(r.fft_ops);
        out.trace_rows.push_back({fmt(t), fmt(seed), to_string(combo.solver), combo.init, schedule,
                                  fmt(r.iteration), fmt(r.objective), fmt(r.observed),
                                  fmt(r.fft_ops)});
      }
      iterations = run.trace.empty() ? 0 : run.trace.back().iteration;
      ops = run.fft_ops;
      stop_reason = run.stop_reason;
    } catch (const std::exception& e) {
      status = "failed";
      out.failure = "trial " + fmt(t) + " " + to_string(combo.solver) + "/" + combo.init + "/" +
                    schedule + ": " + e.what();
    }
    out.run_row = {fmt(t),           fmt(seed),       to_string(combo.solver), combo.init,
                   schedule,         fmt(final_error), fmt(first_hit),        fmt(iterations),
                   fmt(ops),         stop_reason,     status};
  });

  ExperimentReport report;
  report.experiment = "convergence";
  Table traces{"traces",
               {"trial", "seed", "solver", "init", "schedule", "iteration", "objective",
                "iterate_error", "fft_ops"},
               {}};
  Table runs{"runs",
             {"trial", "seed", "solver", "init", "schedule", "final_error", "first_hit_fft_ops",
              "iterations", "fft_ops", "stop_reason", "status"},
             {}};
  for (auto& o : outcomes) {
    for (auto& r : o.trace_rows) traces.rows.push_back(std::move(r));
    runs.rows.push_back(std::move(o.run_row));
    if (!o.failure.empty()) report.failures.push_back(o.failure);
  }
  report.tables = {std::move(runs), std::move(traces)};
  report.summary.push_back({"lambda_star", lambda});
  report.summary.push_back({"target", config.target});
  report.summary.push_back({"failed_runs", static_cast<double>(report.failures.size())});
  return report;
}

// ---------------------------------------------------------------------------
// Landscape slice

ExperimentReport run_landscape_slice(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n0 = config.n0.front();
  const std::size_t n = 3 * n0 - 2;
  const std::size_t m = config.m_factor * n0;
  const double theta = config.theta.front().at(n0);
  const double lambda = config.solve.lambda > 0.0 ? config.solve.lambda : default_target_lambda(n);
  const std::uint64_t seed = trial_seed(config.seed, 0, 0);

  KernelSpec ks{config.kernel, n0};
  ks.sigma = config.sigma;
  const Instance inst = make_instance(ks, {config.dist, m, theta}, {config.noise, config.offset}, seed);

  // Shifts of the truth embedded at the centre of the length-n window.
  Vec centred(n, 0.0);
  for (std::size_t i = 0; i < n0; ++i) centred[n0 - 1 + i] = inst.a0[i];
  std::vector<Vec> shifts;
  for (long s : config.shifts) shifts.push_back(shift_cyclic(centred, s));

  // Gram–Schmidt, twice per vector.
  std::vector<Vec> basis;
  for (const Vec& s : shifts) {
    Vec v = s;
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& q : basis) {
        const double c = dot(q, v);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * q[i];
      }
    }
    const double len = norm2(v);
    if (len <= 1e-8 * norm2(s)) {
      throw DomainError("landscape: the three shifts are linearly dependent");
    }
    for (double& x : v) x /= len;
    basis.push_back(std::move(v));
  }
  auto chart = [&](const Vec& a) {
    return std::array<double, 3>{dot(basis[0], a), dot(basis[1], a), dot(basis[2], a)};
  };

  struct Point {
    std::string kind;
    std::array<double, 3> c;
  };
  std::vector<Point> points;
  Vec balanced(n, 0.0);
  for (const Vec& s : shifts) {
    points.push_back({"shift", chart(normalize(s))});
    for (std::size_t i = 0; i < n; ++i) balanced[i] += s[i];
  }
  points.push_back({"balanced", chart(normalize(balanced))});
  const int R = config.resolution;
  for (int i = 0; i <= R; ++i) {
    const double polar = std::numbers::pi * i / R;
    const int azimuths = (i == 0 || i == R) ? 1 : 2 * R;
    for (int j = 0; j < azimuths; ++j) {
      const double az = std::numbers::pi * j / R;
      points.push_back({"grid",
                        {std::sin(polar) * std::cos(az), std::sin(polar) * std::sin(az),
                         std::cos(polar)}});
    }
  }

  struct Value {
    double phi = 0.0;
    bool converged = false;
  };
  std::vector<Value> values(points.size());
  parallel_for(points.size(), config.threads, [&](std::size_t k) {
    Vec a(n, 0.0);
    for (int d = 0; d < 3; ++d) {
      for (std::size_t i = 0; i < n; ++i) a[i] += points[k].c[d] * basis[d][i];
    }
    a = normalize(a);
    const MarginalResult r = marginal_phi(a, Extent{n}, inst.y, Extent{m}, lambda);
    values[k] = {r.value, r.converged};
  });

  ExperimentReport report;
  report.experiment = "landscape";
  Table slice{"slice", {"point", "kind", "c1", "c2", "c3", "phi", "converged", "seed"}, {}};
  double worst_shift = -1.0, best_grid = 1e300, balanced_phi = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    slice.rows.push_back({fmt(k), p.kind, fmt(p.c[0]), fmt(p.c[1]), fmt(p.c[2]),
                          fmt(values[k].phi), fmt(int(values[k].converged)), fmt(seed)});
    if (p.kind == "shift") worst_shift = std::max(worst_shift, values[k].phi);
    if (p.kind == "balanced") balanced_phi = values[k].phi;
    if (p.kind == "grid") best_grid = std::min(best_grid, values[k].phi);
  }
  report.tables = {std::move(slice)};
  report.summary = {{"lambda", lambda},
                    {"max_shift_phi", worst_shift},
                    {"balanced_phi", balanced_phi},
                    {"min_grid_phi", best_grid}};
  return report;
}

// ---------------------------------------------------------------------------
// Multi-kernel demo

ExperimentReport run_cdl(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n0 = config.n0.front();
  const std::size_t m = config.m_factor * n0;
  const std::size_t N = config.num_kernels;
  const double theta = config.theta.front().at(n0);
  const double lambda =
      config.solve.lambda > 0.0 ? config.solve.lambda : default_target_lambda(3 * n0 - 2);
  const std::size_t trials = static_cast<std::size_t>(config.trials);

  struct Outcome {
    std::vector<std::string> row;
    bool success = false;
    bool duplicate = false;
    std::string failure;
  };
  std::vector<Outcome> outcomes(trials);
  parallel_for(trials, config.threads, [&](std::size_t t) {
    const std::uint64_t seed = trial_seed(config.seed, 0, t);
    Outcome& out = outcomes[t];
    double error = 1.0;
    std::string per_atom, status = "ok";
    int iterations = 0;
    std::uint64_t ops = 0;
    try {
      KernelSpec ks{config.kernel, n0};
      ks.sigma = config.sigma;
      const CdlInstance inst =
          build_cdl_problem(std::vector<KernelSpec>(N, ks),
                            std::vector<ActivationSpec>(N, {config.dist, m, theta}),
                            {config.noise, config.offset}, seed, config.solve.bias);
      const BilinearState init =
          initial_state(inst.problem, init_multi(inst.problem.y, n0, N, seed));
      const PipelineRun run = run_pipeline(inst.problem, init, config.solve, lambda);
      const CdlScore score = cdl_score(inst.kernels, run.state.kernels);
      error = score.error;
      for (std::size_t k = 0; k < N; ++k) per_atom += (k ? ";" : "") + fmt(score.errors[k]);
      out.duplicate = has_duplicate_kernels(run.state.kernels);
      iterations = run.trace.empty() ? 0 : run.trace.back().iteration;
      ops = run.fft_ops;
    } catch (const std::exception& e) {
      status = "failed";
      out.failure = "trial " + fmt(t) + ": " + e.what();
    }
    out.success = status == "ok" && recovered(error);
    out.row = {fmt(t),          fmt(seed),       fmt(error),           per_atom,
               fmt(int(out.duplicate)), fmt(int(out.success)), fmt(iterations), fmt(ops),
               status};
  });

  ExperimentReport report;
  report.experiment = "cdl";
  Table table{"trials",
              {"trial", "seed", "error", "atom_errors", "duplicate", "success", "iterations",
               "fft_ops", "status"},
              {}};
  std::size_t successes = 0, flagged = 0;
  for (auto& o : outcomes) {
    table.rows.push_back(std::move(o.row));
    successes += o.success;
    flagged += o.success && o.duplicate;
    if (!o.failure.empty()) report.failures.push_back(o.failure);
  }
  report.tables = {std::move(table)};
  report.summary = {{"lambda", lambda},
                    {"successes", static_cast<double>(successes)},
                    {"duplicates_among_successes", static_cast<double>(flagged)},
                    {"failed_trials", static_cast<double>(report.failures.size())}};
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::kPhase: return run_phase_transition(config);
    case ExperimentKind::kConvergence: return run_convergence(config);
    case ExperimentKind::kLandscape: return run_landscape_slice(config);
    case ExperimentKind::kCdl: return run_cdl(config);
  }
  throw ConfigError("unknown experiment kind");
}

// ---------------------------------------------------------------------------
// Single-signal deconvolution

DeconvolveResult deconvolve(const Image& y, Extent n0, const PipelineOptions& options,
                            std::uint64_t seed) {
  options.validate();
  const bool is_1d = y.shape.is_1d();
  if (n0.rows < 1 || n0.cols < 1) throw DomainError("deconvolve: empty kernel window");
  if (is_1d && n0.cols != 1) throw DimensionError("deconvolve: 2D window for a 1D signal");
  const Extent kernel = is_1d ? Extent{3 * n0.rows - 2}
                              : Extent{3 * n0.rows - 2, 3 * n0.cols - 2};
  if (!kernel.fits_in(y.shape)) {
    throw DimensionError("deconvolve: signal too short for a kernel window of this size");
  }
  Problem p;
  p.y = y.values;
  p.signal = y.shape;
  p.kernel = kernel;
  p.num_kernels = 1;
  p.fit_bias = options.bias;
  p.validate();

  const Vec a0 = is_1d ? init_kernel(y.values, n0.rows, seed) : init_kernel_2d(y, n0, seed);
  const BilinearState init = initial_state(p, {a0});
  const double lambda =
      options.lambda > 0.0 ? options.lambda : default_target_lambda(kernel.size());

  DeconvolveResult out;
  out.run = run_pipeline(p, init, options, lambda);
  out.lambda = lambda;
  const BilinearState& s = out.run.state;
  out.full_kernel = s.kernels[0];
  out.bias = s.bias;
  const ShiftCorrection2d sc =
      shift_correct(y.shape, y.values, kernel, s.kernels[0], s.maps[0], n0, s.bias);
  out.kernel = Image(n0, sc.kernel);
  out.map = Image(y.shape, sc.map);
  Vec rec = cconv(y.shape, sc.map, n0, sc.kernel);
  for (double& v : rec) v += s.bias;
  out.reconstruction = Image(y.shape, std::move(rec));
  out.residual = sc.error;
  out.row_shift = sc.row_offset;
  out.col_shift = sc.col_offset;
  return out;
}

std::string toolkit_version() { return "0.1.0"; }

}  // namespace sasd
