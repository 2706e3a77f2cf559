#include "mwsched/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "mwsched/capacity.hpp"
#include "mwsched/error.hpp"

namespace mwsched {

namespace {

void note_if_inapplicable(BoundSet& set, const char* name, const std::optional<BoundReport>& r) {
  if (r && !r->applicable) set.notes.push_back(std::string(name) + ": " + r->reason);
}

template <typename F>
std::optional<BoundReport> guarded(BoundSet& set, const char* name, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    set.notes.push_back(std::string(name) + ": " + e.what());
    return std::nullopt;
  }
}

}  // namespace

BoundSet compute_bounds(const ResolvedScenario& resolved) {
  BoundSet set;
  if (!resolved.rho) {
    set.notes.push_back("bounds: " + resolved.rho_note);
    return set;
  }
  if (!resolved.rho_note.empty()) set.notes.push_back("rho: " + resolved.rho_note);
  const double rho = *resolved.rho;
  const auto moments = arrival_moments(resolved.arrivals);
  const auto& lambda = resolved.lambda;

  if (resolved.channels.is_on_off()) {
    const auto params = CapacityParams::from_channels(resolved.channels);
    set.legacy = guarded(set, "legacy", [&] { return legacy_onoff_bound(lambda, params, moments, rho); });
    set.general = guarded(set, "thm1", [&] { return general_lcq_bound(lambda, params, moments, rho); });
    set.balanced = guarded(set, "thm2", [&] { return balanced_lcq_bound(lambda, params, moments, rho); });
  } else {
    set.notes.push_back("legacy/thm1/thm2: multi-rate channels");
  }
  set.multirate = guarded(set, "multirate", [&] {
    return multirate_bound(lambda, resolved.channels, moments, rho);
  });
  note_if_inapplicable(set, "legacy", set.legacy);
  note_if_inapplicable(set, "thm1", set.general);
  note_if_inapplicable(set, "thm2", set.balanced);
  note_if_inapplicable(set, "multirate", set.multirate);
  return set;
}

std::string ResultRow::notes() const {
  std::string out;
  for (const auto& n : bounds.notes) {
    if (!out.empty()) out += "; ";
    out += n;
  }
  return out;
}

ResultRow run_row(const Scenario& scenario, std::string experiment, bool with_drift) {
  const ResolvedScenario resolved = resolve(scenario);
  SimulationConfig config{resolved.channels, resolved.arrivals, resolved.scheduler,
                          scenario.slots,    scenario.seed,     scenario.warmup,
                          with_drift};

  ResultRow row;
  row.experiment = std::move(experiment);
  row.links = scenario.links;
  row.rho = resolved.rho;
  row.scheduler = scenario.scheduler;
  row.slots = scenario.slots;
  row.seed = scenario.seed;
  row.lambda_tot = resolved.arrivals.total_rate();
  row.run_id = row.experiment + "-N" + std::to_string(row.links) + "-" +
               std::string(to_string(row.scheduler)) + "-s" + std::to_string(row.seed);
  row.stats = run_simulation(config);
  if (with_drift) {
    row.drift = drift_probe(row.stats.z_trace, scenario.links);
    row.stats.z_trace.clear();
    row.stats.z_trace.shrink_to_fit();
  }
  row.bounds = compute_bounds(resolved);
  return row;
}

std::vector<ResultRow> run_all(const std::vector<Scenario>& scenarios, const std::string& experiment,
                               const ExperimentOptions& options) {
  std::vector<Scenario> jobs;
  for (const auto& base : scenarios) {
    for (const auto seed : options.seeds) {
      Scenario s = base;
      s.seed = seed;
      s.slots = options.slots;
      s.warmup = options.warmup;
      validate(s);
      jobs.push_back(std::move(s));
    }
  }

  std::vector<std::optional<ResultRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_row(jobs[i], experiment, options.drift_probe);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> rows;
  rows.reserve(results.size());
  for (auto& r : results) rows.push_back(std::move(*r));
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.links != b.links) return a.links < b.links;
    if (a.seed != b.seed) return a.seed < b.seed;
    return static_cast<int>(a.scheduler) < static_cast<int>(b.scheduler);
  });
  return rows;
}

namespace {

Scenario symmetric_onoff_scenario(std::size_t n, double p, double rho, ShapeKind shape,
                                  ExperimentTag tag) {
  Scenario s;
  s.links = n;
  s.channel = ChannelKind::onoff;
  s.on_probability = p;
  s.law = ArrivalLaw::bernoulli;
  s.shape = shape;
  s.target_rho = rho;
  s.scheduler = SchedulerKind::lcq;
  s.experiment = tag;
  return s;
}

}  // namespace

std::vector<ResultRow> run_fig1(double p, double rho, std::span<const std::size_t> n_list,
                                const ExperimentOptions& options) {
  std::vector<Scenario> scenarios;
  for (auto n : n_list) {
    scenarios.push_back(symmetric_onoff_scenario(n, p, rho, ShapeKind::uniform, ExperimentTag::fig1));
    validate(scenarios.back());
  }
  return run_all(scenarios, "fig1", options);
}

std::vector<ResultRow> run_fig2(double p, double rho, std::span<const std::size_t> n_list,
                                const ExperimentOptions& options) {
  std::vector<Scenario> scenarios;
  for (auto n : n_list) {
    if (n % 2 == 0) throw ValidationError("fig2 needs odd N, got " + std::to_string(n));
    scenarios.push_back(symmetric_onoff_scenario(n, p, rho, ShapeKind::tiered, ExperimentTag::fig2));
    validate(scenarios.back());
  }
  return run_all(scenarios, "fig2", options);
}

Scenario counterexample_scenario(std::size_t links) {
  if (links < 3) throw ValidationError("counterexample needs N >= 3, got " + std::to_string(links));
  Scenario s;
  s.links = links;
  s.channel = ChannelKind::multirate;
  s.rate_pmf = {0.5, 0.0, 0.0, 0.0, 0.0, 0.5};
  s.law = ArrivalLaw::bernoulli;
  s.rate = 3.0 / static_cast<double>(links);
  s.scheduler = SchedulerKind::max_weight_multirate;
  s.experiment = ExperimentTag::counterexample;
  validate(s);
  return s;
}

std::vector<ResultRow> run_counterexample(std::span<const std::size_t> n_list,
                                          const ExperimentOptions& options, bool include_modified) {
  std::vector<Scenario> scenarios;
  for (auto n : n_list) {
    scenarios.push_back(counterexample_scenario(n));
    if (include_modified) {
      scenarios.push_back(scenarios.back());
      scenarios.back().scheduler = SchedulerKind::modified_max_weight;
    }
  }
  return run_all(scenarios, "counterexample", options);
}

std::vector<ResultRow> run_sweep(const Scenario& base, std::span<const std::size_t> n_list,
                                 const ExperimentOptions& options) {
  std::vector<Scenario> scenarios;
  for (auto n : n_list) scenarios.push_back(with_links(base, n));
  return run_all(scenarios, "sweep", options);
}

// ---------------------------------------------------------------------------
// CSV

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "run_id",          "experiment",        "N",
      "rho",             "scheduler",         "T",
      "seed",            "qtot_mean",         "delay_measured",
      "delay_little",    "z_mean",            "prob_z_ge_half",
      "residual_backlog_mean", "full_backlog_mean", "bound_legacy_W",
      "bound_thm1_W",    "bound_thm1_K",      "bound_thm2_W",
      "bound_thm2_K",    "bound_thm2_beta",   "bound_multirate_W",
      "applicability_notes",
  };
  return cols;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string delay_of(const std::optional<BoundReport>& r) {
  return r && r->applicable ? fmt(r->delay_bound) : std::string();
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::span<const ResultRow> rows, std::ostream& out) {
  if (rows.empty()) throw ValidationError("no rows");
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : rows) {
    const auto& s = r.stats;
    const auto& b = r.bounds;
    std::vector<std::string> cells = {
        quote(r.run_id),
        quote(r.experiment),
        std::to_string(r.links),
        fmt(r.rho),
        std::string(to_string(r.scheduler)),
        std::to_string(r.slots),
        std::to_string(r.seed),
        fmt(s.qtot_mean),
        fmt(s.delay_measured),
        fmt(s.delay_little),
        fmt(s.z_mean),
        fmt(s.prob_z_ge_half),
        fmt(s.residual_backlog_mean),
        fmt(s.full_backlog_mean),
        delay_of(b.legacy),
        delay_of(b.general),
        b.general && b.general->k ? std::to_string(*b.general->k) : std::string(),
        delay_of(b.balanced),
        b.balanced && b.balanced->k ? std::to_string(*b.balanced->k) : std::string(),
        b.balanced && b.balanced->beta ? fmt(*b.balanced->beta) : std::string(),
        delay_of(b.multirate),
        quote(r.notes()),
    };
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << "\n";
  }
}

void emit_csv(std::span<const ResultRow> rows, const std::filesystem::path& path) {
  if (rows.empty()) throw ValidationError("no rows");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace mwsched
