// mwsched: command-line driver for the max-weight downlink simulator.
//
//   mwsched simulate <scenario>          simulate a scenario file, CSV rows out
//   mwsched bounds <scenario>            print every analytic bound for a scenario
//   mwsched fig1 | fig2 | counterexample canned experiments
//   mwsched sweep <scenario> --vary N=3,10,30
//
// Common flags: --slots, --seeds (count or comma list), --out <csv>, --warmup.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mwsched/bounds.hpp"
#include "mwsched/capacity.hpp"
#include "mwsched/error.hpp"
#include "mwsched/experiments.hpp"
#include "mwsched/scenario.hpp"

namespace {

using namespace mwsched;

struct CommonFlags {
  std::optional<Slot> slots;
  std::string seeds;
  std::string out;
  std::optional<double> warmup;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--slots", f.slots, "Slots per run");
  cmd->add_option("--seeds", f.seeds, "Seed count (1..k) or comma-separated seed list");
  cmd->add_option("--out", f.out, "CSV output path (default: stdout)");
  cmd->add_option("--warmup", f.warmup, "Leading fraction of slots excluded from averages")
      ->check(CLI::Range(0.0, 0.999999));
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw ValidationError(what + ": '" + item + "' is not a non-negative integer");
    }
    out.push_back(static_cast<T>(v));
  }
  if (out.empty()) throw ValidationError(what + ": empty list");
  return out;
}

std::vector<std::uint64_t> resolve_seeds(const std::string& text, std::uint64_t first,
                                         std::uint64_t default_count) {
  if (text.find(',') != std::string::npos) return parse_list<std::uint64_t>(text, "--seeds");
  const std::uint64_t count = text.empty() ? default_count : parse_list<std::uint64_t>(text, "--seeds").front();
  if (count == 0) throw ValidationError("--seeds: need at least one seed");
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(first + i);
  return seeds;
}

ExperimentOptions options_from(const CommonFlags& f, Slot default_slots, std::uint64_t first_seed,
                               std::uint64_t default_seed_count, double default_warmup) {
  ExperimentOptions o;
  o.slots = f.slots.value_or(default_slots);
  o.seeds = resolve_seeds(f.seeds, first_seed, default_seed_count);
  o.warmup = f.warmup.value_or(default_warmup);
  o.threads = f.threads;
  return o;
}

void write_rows(const std::vector<ResultRow>& rows, const std::string& out) {
  if (out.empty()) {
    write_csv(rows, std::cout);
  } else {
    emit_csv(rows, out);
    std::cerr << "wrote " << rows.size() << " rows to " << out << "\n";
  }
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void print_report(std::ostream& os, const char* name, const std::optional<BoundReport>& r) {
  os << name << ":";
  if (!r) {
    os << " unavailable\n";
    return;
  }
  if (!r->applicable) {
    os << " not applicable (" << r->reason << ")\n";
    return;
  }
  os << " backlog<=" << num(r->backlog_bound) << " delay<=" << num(r->delay_bound);
  auto opt = [&](const char* key, const auto& v) {
    if (v) os << " " << key << "=" << num(static_cast<double>(*v));
  };
  opt("K", r->k);
  opt("theta", r->theta);
  opt("epsilon", r->epsilon);
  opt("B_theta", r->b_theta);
  opt("C", r->c);
  opt("grouped_delay", r->grouped_delay_bound);
  opt("N_hat", r->n_hat);
  opt("z", r->z);
  opt("beta", r->beta);
  opt("D", r->d);
  opt("poisson_backlog", r->poisson_backlog_bound);
  opt("poisson_delay", r->poisson_delay_bound);
  opt("mu_sym", r->mu_sym);
  opt("S2_hat", r->s_hat_sq);
  opt("mu_hat", r->mu_hat);
  os << "\n";
}

int run_bounds(const std::string& path) {
  const Scenario s = load_scenario(path);
  const ResolvedScenario resolved = resolve(s);
  std::cout << echo(s) << "\n";
  std::cout << "lambda_tot: " << num(resolved.arrivals.total_rate()) << "\n";
  std::cout << "rho: " << (resolved.rho ? num(*resolved.rho) : std::string("unavailable"));
  if (!resolved.rho_note.empty()) std::cout << " (" << resolved.rho_note << ")";
  std::cout << "\n";
  const BoundSet b = compute_bounds(resolved);
  print_report(std::cout, "legacy", b.legacy);
  print_report(std::cout, "thm1", b.general);
  print_report(std::cout, "thm2", b.balanced);
  print_report(std::cout, "multirate", b.multirate);
  for (const auto& note : b.notes) std::cout << "note: " << note << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-weight opportunistic scheduling laboratory"};
  app.require_subcommand(1);

  std::string scenario_path;
  CommonFlags sim_flags, fig1_flags, fig2_flags, cx_flags, sweep_flags;

  auto* simulate = app.add_subcommand("simulate", "Simulate a scenario file");
  simulate->add_option("scenario", scenario_path, "Scenario file")->required();
  add_common(simulate, sim_flags);

  auto* bounds = app.add_subcommand("bounds", "Evaluate analytic bounds for a scenario file");
  bounds->add_option("scenario", scenario_path, "Scenario file")->required();

  double p = 0.5, rho = 0.8;
  std::string fig1_n = "3,10,30,100", fig2_n = "3,11,31,101", cx_n = "12,30,60";

  auto* fig1 = app.add_subcommand("fig1", "Symmetric ON/OFF traffic under LCQ");
  fig1->add_option("--p", p, "ON probability")->check(CLI::Range(0.0, 1.0));
  fig1->add_option("--rho", rho, "Target load (< 1)");
  fig1->add_option("--n", fig1_n, "Comma-separated link counts");
  add_common(fig1, fig1_flags);

  auto* fig2 = app.add_subcommand("fig2", "Tiered (1,2,4) ON/OFF traffic under LCQ");
  fig2->add_option("--p", p, "ON probability")->check(CLI::Range(0.0, 1.0));
  fig2->add_option("--rho", rho, "Target load (< 1)");
  fig2->add_option("--n", fig2_n, "Comma-separated odd link counts");
  add_common(fig2, fig2_flags);

  bool modified = false, drift = false;
  auto* cx = app.add_subcommand("counterexample", "Multi-rate system with residual packets");
  cx->add_option("--n", cx_n, "Comma-separated link counts (>= 3)");
  cx->add_flag("--modified", modified, "Also run the modified max-weight policy");
  cx->add_flag("--drift", drift, "Report conditional drift of the non-empty queue count");
  add_common(cx, cx_flags);

  std::string vary;
  auto* sweep = app.add_subcommand("sweep", "Repeat a scenario over several link counts");
  sweep->add_option("scenario", scenario_path, "Scenario file")->required();
  sweep->add_option("--vary", vary, "N=<comma list>")->required();
  add_common(sweep, sweep_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bounds) return run_bounds(scenario_path);

    if (*simulate) {
      const Scenario s = load_scenario(scenario_path);
      const auto opts = options_from(sim_flags, s.slots, s.seed,
                                     static_cast<std::uint64_t>(s.replications), s.warmup);
      write_rows(run_all({s}, std::string(to_string(s.experiment)), opts), sim_flags.out);
      return 0;
    }
    if (*fig1) {
      if (!(rho < 1.0)) throw ValidationError("--rho: fig1 requires rho < 1");
      const auto n = parse_list<std::size_t>(fig1_n, "--n");
      write_rows(run_fig1(p, rho, n, options_from(fig1_flags, 1'000'000, 1, 3, 0.0)), fig1_flags.out);
      return 0;
    }
    if (*fig2) {
      if (!(rho < 1.0)) throw ValidationError("--rho: fig2 requires rho < 1");
      const auto n = parse_list<std::size_t>(fig2_n, "--n");
      write_rows(run_fig2(p, rho, n, options_from(fig2_flags, 1'000'000, 1, 3, 0.0)), fig2_flags.out);
      return 0;
    }
    if (*cx) {
      const auto n = parse_list<std::size_t>(cx_n, "--n");
      auto opts = options_from(cx_flags, 1'000'000, 1, 3, 0.0);
      opts.drift_probe = drift;
      const auto rows = run_counterexample(n, opts, modified);
      if (drift) {
        for (const auto& r : rows) {
          const auto& d = *r.drift;
          std::cerr << r.run_id << ": E[dZ | Z >= " << d.threshold << "] = "
                    << (d.mean_at_or_above ? num(*d.mean_at_or_above) : "no samples")
                    << ", E[dZ | Z < " << d.threshold << "] = "
                    << (d.mean_below ? num(*d.mean_below) : "no samples") << "\n";
        }
      }
      write_rows(rows, cx_flags.out);
      return 0;
    }
    if (*sweep) {
      if (vary.rfind("N=", 0) != 0) throw ValidationError("--vary: expected N=<list>");
      const auto n = parse_list<std::size_t>(vary.substr(2), "--vary");
      const Scenario s = load_scenario(scenario_path);
      const auto opts = options_from(sweep_flags, s.slots, s.seed,
                                     static_cast<std::uint64_t>(s.replications), s.warmup);
      write_rows(run_sweep(s, n, opts), sweep_flags.out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
