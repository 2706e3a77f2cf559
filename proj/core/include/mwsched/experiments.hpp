#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mwsched/bounds.hpp"
#include "mwsched/scenario.hpp"
#include "mwsched/simulator.hpp"

namespace mwsched {

/// Every analytic bound evaluated for one resolved scenario.
struct BoundSet {
  std::optional<BoundReport> legacy;
  std::optional<BoundReport> general;   // CSV: bound_thm1_*
  std::optional<BoundReport> balanced;  // CSV: bound_thm2_*
  std::optional<BoundReport> multirate;
  std::vector<std::string> notes;
};

BoundSet compute_bounds(const ResolvedScenario& resolved);

/// One simulated (scenario, seed) run with its bounds.
struct ResultRow {
  std::string run_id;
  std::string experiment;
  std::size_t links = 0;
  std::optional<double> rho;
  SchedulerKind scheduler = SchedulerKind::lcq;
  Slot slots = 0;
  std::uint64_t seed = 0;
  double lambda_tot = 0.0;
  SimStats stats;
  BoundSet bounds;
  std::optional<DriftProbe> drift;

  std::string notes() const;
};

struct ExperimentOptions {
  Slot slots = 1'000'000;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double warmup = 0.0;
  unsigned threads = 0;  // 0 = hardware concurrency
  bool drift_probe = false;
};

/// Simulates one scenario at one seed and evaluates its bounds.
ResultRow run_row(const Scenario& scenario, std::string experiment, bool with_drift = false);

/// Runs every (scenario, seed) pair; rows come back sorted by N, then seed,
/// then scheduler, independent of worker scheduling.
std::vector<ResultRow> run_all(const std::vector<Scenario>& scenarios, const std::string& experiment,
                               const ExperimentOptions& options);

/// Symmetric ON/OFF, uniform Bernoulli traffic scaled to rho, LCQ.
std::vector<ResultRow> run_fig1(double p, double rho, std::span<const std::size_t> n_list,
                                const ExperimentOptions& options);
/// Symmetric ON/OFF, tiered (1, 2, 4) Bernoulli traffic scaled to rho, LCQ. N must be odd.
std::vector<ResultRow> run_fig2(double p, double rho, std::span<const std::size_t> n_list,
                                const ExperimentOptions& options);
/// Multi-rate system with Pr[S = 5] = Pr[S = 0] = 1/2 and Bernoulli(3/N)
/// traffic under max-weight (and the modified variant when requested).
std::vector<ResultRow> run_counterexample(std::span<const std::size_t> n_list,
                                          const ExperimentOptions& options,
                                          bool include_modified = false);
/// Base scenario repeated over link counts; options.seeds override the scenario seed.
std::vector<ResultRow> run_sweep(const Scenario& base, std::span<const std::size_t> n_list,
                                 const ExperimentOptions& options);

/// The counterexample system for N links (max-weight scheduler).
Scenario counterexample_scenario(std::size_t links);

const std::vector<std::string>& csv_columns();
void write_csv(std::span<const ResultRow> rows, std::ostream& out);
/// Writes header + rows to `path`; throws on empty input or I/O failure.
void emit_csv(std::span<const ResultRow> rows, const std::filesystem::path& path);

}  // namespace mwsched
