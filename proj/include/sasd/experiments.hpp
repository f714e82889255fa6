#pragma once

// Synthetic study harness: phase-transition grids, convergence ablations,
// landscape slices and multi-kernel demos, plus the single-signal
// deconvolution pipeline used by the command-line tool. Reports are plain
// tables of preformatted text so that reruns compare byte for byte.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sasd/continuation.hpp"
#include "sasd/synth.hpp"

namespace sasd {

/// Sparsity level either as a literal probability or as a power n0^e.
struct ThetaSpec {
  bool power = true;
  double value = -0.75;

  double at(std::size_t n0) const;
  std::string str() const;
};

/// Accepts "n0^-0.75" (power form) or a plain probability such as "0.05".
ThetaSpec parse_theta(const std::string& text);

enum class ExperimentKind { kPhase, kConvergence, kLandscape, kCdl };
ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);
SolverKind parse_solver_kind(const std::string& name);
std::string to_string(SolverKind kind);

// Malformed configuration (bad key, value out of range, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// How one signal is taken from an initial kernel to a solution.
struct PipelineOptions {
  SolverKind solver = SolverKind::kIadm;
  double beta = 0.9;
  double lambda = 0.0;        // λ★; 0 picks the experiment's default
  bool homotopy = true;
  double lambda0 = 0.0;       // 0 picks max_k ‖ccorr(a_k, y − b)‖∞
  double eta = 0.9;
  double delta = 0.1;
  double eps_star = 1e-6;
  bool reweight = false;
  int reweight_rounds = 3;
  bool nonneg = false;
  bool bias = false;
  int max_iters = 5000;
  double iterate_tol = 1e-9;
  std::uint64_t fft_budget = 0;   // whole-run transform budget, 0 = unlimited

  void validate() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kPhase;
  std::vector<std::size_t> n0 = {20, 30, 40};
  std::vector<ThetaSpec> theta = {{true, -0.9}, {true, -0.75}, {true, -0.5}};
  KernelKind kernel = KernelKind::kUniformSphere;
  double sigma = 0.5;                 // gaussian-window width
  ActivationKind dist = ActivationKind::kBernoulliRademacher;
  std::size_t m_factor = 100;         // m = m_factor · n0
  double noise = 0.0;
  double offset = 0.0;                // constant added to y
  int trials = 10;
  std::uint64_t seed = 1;
  std::string init = "data";          // data | random
  PipelineOptions solve;

  // Convergence ablation axes and the error level whose first hit is reported.
  std::vector<SolverKind> solvers = {SolverKind::kAdm, SolverKind::kIadm};
  std::vector<std::string> inits = {"data", "random"};
  std::vector<bool> schedules = {false, true};   // false = fixed λ, true = homotopy
  double target = 1e-2;

  // Landscape slice: three shift indices and the polar resolution of the grid.
  std::vector<long> shifts = {0, 1, 2};
  int resolution = 12;

  std::size_t num_kernels = 2;        // multi-kernel demo

  int threads = 0;                    // 0 = hardware concurrency

  void validate() const;
};

/// Tuned defaults per experiment kind; flags and config files override them.
ExperimentConfig default_config(ExperimentKind kind);

/// Parses a JSON config object over `base`. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base);
std::string config_to_json(const ExperimentConfig& config);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<Table> tables;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<std::string> failures;   // per-trial errors, already reflected in the tables

  const Table& table(const std::string& name) const;
  double metric(const std::string& name) const;
};

/// Seed of trial t in cell c; recorded in every row.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t cell, std::size_t trial);

/// Result of one pipeline run from a given start.
struct PipelineRun {
  BilinearState state;
  std::vector<IterationRecord> trace;
  double lambda = 0.0;
  std::uint64_t fft_ops = 0;
  std::string stop_reason;
  int momentum_warnings = 0;
};

/// Homotopy and/or reweighting around ADM/iADM as selected in `options`.
/// `lambda` is the target penalty. The observer, when set, is attached to every
/// inner iteration.
PipelineRun run_pipeline(const Problem& problem, const BilinearState& init,
                         const PipelineOptions& options, double lambda,
                         const std::function<double(const BilinearState&)>& observer = {});

ExperimentReport run_phase_transition(const ExperimentConfig& config);
ExperimentReport run_convergence(const ExperimentConfig& config);
ExperimentReport run_landscape_slice(const ExperimentConfig& config);
ExperimentReport run_cdl(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Writes one CSV per table and manifest.json into `dir`.
void write_report(const ExperimentReport& report, const ExperimentConfig& config,
                  const std::filesystem::path& dir, double wall_seconds);

struct DeconvolveResult {
  Image kernel;          // shift-corrected window of shape n0
  Image map;             // activation aligned with `kernel`
  Image reconstruction;  // kernel ⊛ map + bias
  Vec full_kernel;       // solver iterate of shape 3n0 − 2
  double bias = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  long row_shift = 0;
  long col_shift = 0;
  PipelineRun run;
};

/// Deconvolves one observation (1D when y.shape.cols == 1). λ★ defaults to
/// 0.1/√n with n the kernel iterate size.
DeconvolveResult deconvolve(const Image& y, Extent n0, const PipelineOptions& options,
                            std::uint64_t seed);

/// Library version reported in manifests.
std::string toolkit_version();

}  // namespace sasd
