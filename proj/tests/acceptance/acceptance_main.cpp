// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//
//   acceptance [csv-dir]    also writes each experiment table to csv-dir

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mwsched/bounds.hpp"
#include "mwsched/capacity.hpp"
#include "mwsched/experiments.hpp"
#include "mwsched/simulator.hpp"
#include "oracles.hpp"

using namespace mwsched;

namespace {

constexpr Slot kSlots = 1'000'000;

struct Check {
  bool ok = true;
  std::vector<std::string> failures;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failed_criteria = 0;
std::filesystem::path csv_dir;
std::vector<ResultRow> stable_rows;

void report(int id, const std::string& title, const Check& c, const std::string& detail) {
  std::printf("%s %d %s: %s\n", c.ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  for (const auto& f : c.failures) std::printf("    - %s\n", f.c_str());
  std::fflush(stdout);
  if (!c.ok) ++failed_criteria;
}

void save(const std::vector<ResultRow>& rows, const std::string& name) {
  if (!csv_dir.empty()) emit_csv(rows, csv_dir / (name + ".csv"));
  for (const auto& r : rows) {
    if (r.rho && *r.rho < 1.0) stable_rows.push_back(r);
  }
}

ExperimentOptions default_options() {
  ExperimentOptions o;
  o.slots = kSlots;
  o.seeds = {1, 2, 3};
  return o;
}

// Average of field(row) over the rows with N links.
double mean_over(const std::vector<ResultRow>& rows, std::size_t n, auto field) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.links == n) {
      sum += field(r);
      ++count;
    }
  }
  return count ? sum / count : std::nan("");
}

void criterion_fig1() {
  const std::vector<std::size_t> n{3, 10, 30, 100};
  const auto rows = run_fig1(0.5, 0.8, n, default_options());
  save(rows, "fig1");
  Check c;
  double min_ratio = 1e300, max_ratio = 0.0;
  for (const auto& r : rows) {
    const double q = r.stats.qtot_mean;
    double tightest = 1e300;
    for (const auto* b : {&r.bounds.general, &r.bounds.balanced, &r.bounds.legacy}) {
      if (!*b || !(*b)->applicable) continue;
      c.expect(q <= (*b)->backlog_bound,
               fmt("%s: qtot_mean %.4g > %s backlog bound %.4g", r.run_id.c_str(), q,
                   std::string(to_string((*b)->kind)).c_str(), (*b)->backlog_bound));
      tightest = std::min(tightest, (*b)->backlog_bound);
    }
    c.expect(r.bounds.general && r.bounds.general->applicable && r.bounds.legacy && r.bounds.legacy->applicable,
             r.run_id + ": general or legacy bound missing");
    if (r.links >= 9) {
      const double ratio = tightest / q;
      min_ratio = std::min(min_ratio, ratio);
      max_ratio = std::max(max_ratio, ratio);
      c.expect(ratio >= 2.0 && ratio <= 50.0, fmt("%s: tightest-bound/simulation ratio %.3g outside [2, 50]",
                                                  r.run_id.c_str(), ratio));
    }
  }
  auto qtot = [](const ResultRow& r) { return r.stats.qtot_mean; };
  const double flat = mean_over(rows, 100, qtot) / mean_over(rows, 10, qtot);
  c.expect(flat <= 1.5, fmt("Qtot(100)/Qtot(10) = %.4f > 1.5", flat));
  report(1, "fig1 reproduction", c,
         fmt("Qtot(N=3,10,30,100) = %.3f %.3f %.3f %.3f; flatness %.3f <= 1.5; bound/sim ratio in [%.2f, %.2f]",
             mean_over(rows, 3, qtot), mean_over(rows, 10, qtot), mean_over(rows, 30, qtot),
             mean_over(rows, 100, qtot), flat, min_ratio, max_ratio));
}

void criterion_fig2() {
  const std::vector<std::size_t> n{3, 11, 31, 101};
  const auto rows = run_fig2(0.5, 0.8, n, default_options());
  save(rows, "fig2");
  Check c;
  for (const auto& r : rows) {
    const bool have = r.bounds.general && r.bounds.general->applicable;
    c.expect(have, r.run_id + ": general bound not applicable");
    if (have) {
      c.expect(r.stats.qtot_mean <= r.bounds.general->backlog_bound,
               fmt("%s: qtot_mean %.4g > general backlog bound %.4g", r.run_id.c_str(), r.stats.qtot_mean,
                   r.bounds.general->backlog_bound));
    }
  }
  auto qtot = [](const ResultRow& r) { return r.stats.qtot_mean; };
  const double flat = mean_over(rows, 101, qtot) / mean_over(rows, 11, qtot);
  c.expect(flat <= 1.5, fmt("Qtot(101)/Qtot(11) = %.4f > 1.5", flat));
  report(2, "fig2 reproduction", c,
         fmt("Qtot(N=3,11,31,101) = %.3f %.3f %.3f %.3f; flatness %.3f <= 1.5", mean_over(rows, 3, qtot),
             mean_over(rows, 11, qtot), mean_over(rows, 31, qtot), mean_over(rows, 101, qtot), flat));
}

void criterion_poisson() {
  Scenario s;
  s.links = 100;
  s.on_probability = 0.5;
  s.law = ArrivalLaw::poisson;
  s.target_rho = 0.8;
  s.scheduler = SchedulerKind::lcq;
  const auto rows = run_all({s}, "poisson", default_options());
  save(rows, "poisson");
  Check c;
  double worst = 0.0, special = 0.0, general = 0.0;
  for (const auto& r : rows) {
    const auto& b = r.bounds.balanced;
    c.expect(b && b->applicable && b->poisson_delay_bound, r.run_id + ": Poisson specialization missing");
    if (!(b && b->applicable && b->poisson_delay_bound)) continue;
    c.expect(b->k == 4, fmt("K = %d, expected 4", b->k.value_or(-1)));
    special = *b->poisson_delay_bound;
    general = b->delay_bound;
    c.expect(std::abs(special - 36.0) <= 1e-6, fmt("specialized delay bound %.9g != 36", special));
    const double w = r.stats.delay_measured.value_or(1e300);
    worst = std::max(worst, w);
    c.expect(w <= special, fmt("%s: delay %.4g > %.4g", r.run_id.c_str(), w, special));
    c.expect(w <= general, fmt("%s: delay %.4g > balanced bound %.4g", r.run_id.c_str(), w, general));
  }
  report(3, "Poisson specialization", c,
         fmt("max measured W = %.3f <= (2K - lambda_tot)/(1 - rho) = %.3f and <= general balanced bound %.3f",
             worst, special, general));
}

void criterion_counterexample() {
  const std::vector<std::size_t> n{12, 30, 60};
  const auto rows = run_counterexample(n, default_options());
  save(rows, "counterexample");
  Check c;
  std::string zs;
  for (const auto& r : rows) {
    const double floor_z = static_cast<double>(r.links) / 6.0 - 3.0 * r.stats.z_stderr;
    c.expect(r.stats.z_mean >= floor_z,
             fmt("%s: z_mean %.4g < N/6 - 3 se = %.4g", r.run_id.c_str(), r.stats.z_mean, floor_z));
    c.expect(r.stats.prob_z_ge_half >= 1.0 / 3.0 - 0.02,
             fmt("%s: Pr[Z >= N/2] = %.4f < 1/3 - 0.02", r.run_id.c_str(), r.stats.prob_z_ge_half));
    if (r.seed == 1) {
      zs += fmt("N=%zu z=%.2f (N/6=%.2f, se %.3f) P=%.3f; ", r.links, r.stats.z_mean, r.links / 6.0,
                r.stats.z_stderr, r.stats.prob_z_ge_half);
    }
  }
  auto residual = [](const ResultRow& r) { return r.stats.residual_backlog_mean; };
  auto full = [](const ResultRow& r) { return r.stats.full_backlog_mean; };
  const double growth = mean_over(rows, 60, residual) / mean_over(rows, 12, residual);
  const double flat = mean_over(rows, 60, full) / mean_over(rows, 12, full);
  c.expect(growth >= 3.0, fmt("residual(60)/residual(12) = %.4f < 3", growth));
  c.expect(flat <= 2.0, fmt("full(60)/full(12) = %.4f > 2", flat));
  report(4, "multi-rate counterexample", c,
         zs + fmt("residual ratio %.3f >= 3; full-backlog ratio %.3f <= 2", growth, flat));
}

void criterion_single_link() {
  const double exact = oracle::single_link_mean(0.5, 0.3, 200);
  Scenario s;
  s.links = 1;
  s.on_probability = 0.5;
  s.law = ArrivalLaw::bernoulli;
  s.rate = 0.3;
  s.scheduler = SchedulerKind::lcq;
  auto opts = default_options();
  opts.seeds = {1};
  const auto rows = run_all({s}, "single_link", opts);
  save(rows, "single_link");
  Check c;
  const double q = rows.at(0).stats.qtot_mean;
  const double err = std::abs(q - exact) / exact;
  c.expect(err <= 0.02, fmt("qtot_mean %.5f vs chain %.5f: relative error %.4f > 0.02", q, exact, err));
  report(5, "single-link exact chain", c, fmt("qtot_mean %.5f, chain mean %.5f, relative error %.4f <= 0.02", q,
                                             exact, err));
}

void criterion_stability() {
  Scenario s;
  s.links = 10;
  s.on_probability = 0.5;
  s.law = ArrivalLaw::bernoulli;
  s.scheduler = SchedulerKind::lcq;
  auto opts = default_options();
  opts.seeds = {1};
  s.target_rho = 0.95;
  const auto stable = run_all({s}, "stability", opts);
  save(stable, "stability");
  s.target_rho = 1.2;
  const auto unstable = run_all({s}, "instability", opts);
  save(unstable, "instability");
  Check c;
  const double lo = static_cast<double>(stable.at(0).stats.final_qtot) / kSlots;
  const double hi = static_cast<double>(unstable.at(0).stats.final_qtot) / kSlots;
  c.expect(lo <= 1e-3, fmt("rho = 0.95: final Qtot/T = %.3g > 1e-3", lo));
  c.expect(hi >= 0.01, fmt("rho = 1.2: final Qtot/T = %.3g < 0.01", hi));
  report(9, "stability witnesses", c, fmt("rho=0.95 final Qtot/T = %.3g <= 1e-3; rho=1.2 final Qtot/T = %.3g >= 0.01",
                                          lo, hi));
}

void criterion_little() {
  Check c;
  double worst = 0.0;
  for (const auto& r : stable_rows) {
    if (!r.stats.delay_measured || !r.stats.delay_little) {
      c.expect(false, r.experiment + "/" + r.run_id + ": delay missing");
      continue;
    }
    const double m = *r.stats.delay_measured;
    const double err = std::abs(*r.stats.delay_little - m) / m;
    worst = std::max(worst, err);
    c.expect(err <= 0.02, fmt("%s/%s: |little - measured|/measured = %.4f", r.experiment.c_str(),
                              r.run_id.c_str(), err));
  }
  report(6, "Little consistency", c,
         fmt("%zu stable runs, worst relative gap %.5f <= 0.02", stable_rows.size(), worst));
}

void criterion_capacity() {
  std::mt19937_64 gen(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Check c;
  int lemma1 = 0, lemma2 = 0, fast = 0, closure = 0, homogeneity = 0;

  for (int i = 0; i < 1000; ++i) {
    const double p = i == 0 ? 1.0 : std::max(1e-9, u(gen));
    const int k = 1 + static_cast<int>(gen() % 50);
    if (!(mu_sym_k(p, k) > mu_sym_k(p, k + 1))) ++lemma1;
  }

  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + gen() % 10;
    std::vector<double> p(n);
    for (auto& x : p) x = 0.05 + 0.95 * u(gen);
    const CapacityParams params(p);
    const int big_k = 1 + static_cast<int>(gen() % n);
    const std::size_t k = 1 + gen() % static_cast<std::size_t>(big_k);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), gen);
    std::vector<double> lambda(n, 0.0);
    for (std::size_t j = 0; j < k; ++j) lambda[idx[j]] = mu_sym_k(params.p_min(), big_k);
    if (!(oracle::onoff_load(lambda, p) <= 1.0 + kBoundarySlack) || !onoff_membership(lambda, params)) ++lemma2;
  }

  for (std::size_t n = 1; n <= 20; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const double p = 0.05 + 0.95 * u(gen);
      const auto params = CapacityParams::symmetric(n, p);
      std::vector<double> lambda(n);
      for (auto& x : lambda) x = u(gen) / static_cast<double>(n);
      const auto a = onoff_load(lambda, params), b = onoff_load_enumerated(lambda, params);
      if (std::abs(a.rho - b.rho) > 1e-12 * std::max(1.0, b.rho)) ++fast;
      for (double target : {0.99, 1.0, 1.01}) {
        auto scaled = lambda;
        for (auto& x : scaled) x *= target / b.rho;
        if (onoff_membership(scaled, params) != onoff_membership_enumerated(scaled, params)) ++fast;
      }
    }
  }

  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + gen() % 10;
    std::vector<double> p(n), lambda(n);
    for (auto& x : p) x = 0.05 + 0.95 * u(gen);
    for (auto& x : lambda) x = u(gen) / static_cast<double>(n);
    const CapacityParams params(p);
    if (onoff_membership(lambda, params)) {
      auto smaller = lambda;
      for (auto& x : smaller) x *= u(gen);
      if (!onoff_membership(smaller, params)) ++closure;
    }
    const double scale = 0.01 + 10.0 * u(gen);
    auto scaled = lambda;
    for (auto& x : scaled) x *= scale;
    const double lhs = onoff_load(scaled, params).rho, rhs = scale * onoff_load(lambda, params).rho;
    if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, rhs)) ++homogeneity;
  }

  c.expect(lemma1 == 0, fmt("%d mu_sym monotonicity failures", lemma1));
  c.expect(lemma2 == 0, fmt("%d hypercube membership failures", lemma2));
  c.expect(fast == 0, fmt("%d fast-path mismatches", fast));
  c.expect(closure == 0, fmt("%d downward-closure failures", closure));
  c.expect(homogeneity == 0, fmt("%d homogeneity failures", homogeneity));
  report(7, "capacity properties", c,
         "1000 monotonicity, 500 hypercube, 100 fast-path (N <= 20), 500 closure/homogeneity cases; 0 failures");
}

void criterion_bound_identities() {
  Check c;
  double worst_reduction = 0.0;
  int positivity = 0, monotone = 0, cases = 0;
  for (std::size_t n : {1u, 2u, 3u, 5u, 10u, 30u, 100u}) {
    for (double p : {0.3, 0.5, 0.9}) {
      const auto params = CapacityParams::symmetric(n, p);
      const auto channels = ChannelModel::symmetric_on_off(n, p);
      for (auto law : {ArrivalLaw::bernoulli, ArrivalLaw::poisson}) {
        const auto lam = scale_to_load(std::vector<double>(n, 1.0), params, 0.7);
        const auto m = arrival_moments(ArrivalModel(law == ArrivalLaw::bernoulli ? ArrivalModel::bernoulli(lam)
                                                                                  : ArrivalModel::poisson(lam)));
        const double legacy = legacy_onoff_bound(lam, params, m, 0.7).delay_bound;
        for (int k = static_cast<int>(n); k <= static_cast<int>(n) + 2; ++k) {
          const double at = general_lcq_bound(lam, params, m, 0.7, k).grouped_delay_bound.value();
          worst_reduction = std::max(worst_reduction, std::abs(at - legacy) / legacy);
        }
        for (int k = 1; k < static_cast<int>(n); ++k) {
          if (!(r_k(p, k + 1) > m.lambda_tot)) continue;
          const auto r = general_lcq_bound(lam, params, m, 0.7, k);
          ++cases;
          if (!(*r.theta > 0.0) || !(*r.epsilon > 0.0)) ++positivity;
        }
        for (int i = 0; i < 20; ++i) {
          const double rho = 0.7 + 0.01 * i, next = rho + 0.01;
          auto step = [&](const BoundReport& a, const BoundReport& b) {
            if (!a.applicable || !b.applicable) return;
            if (b.delay_bound < a.delay_bound || b.backlog_bound < a.backlog_bound) {
              ++monotone;
              c.failures.push_back(fmt("%s N=%zu p=%.1f %s: rho %.2f -> %.2f gives W %.6g -> %.6g (K %d -> %d)",
                                       std::string(to_string(a.kind)).c_str(), n, p,
                                       std::string(to_string(law)).c_str(), rho, next, a.delay_bound,
                                       b.delay_bound, a.k.value_or(0), b.k.value_or(0)));
            }
          };
          step(legacy_onoff_bound(lam, params, m, rho), legacy_onoff_bound(lam, params, m, next));
          step(general_lcq_bound(lam, params, m, rho), general_lcq_bound(lam, params, m, next));
          step(balanced_lcq_bound(lam, params, m, rho), balanced_lcq_bound(lam, params, m, next));
          step(multirate_bound(lam, channels, m, rho), multirate_bound(lam, channels, m, next));
        }
      }
    }
  }
  c.expect(worst_reduction <= 1e-12, fmt("K >= N differs from legacy by %.3g relative", worst_reduction));
  c.expect(positivity == 0, fmt("%d cases with theta <= 0 or epsilon <= 0", positivity));
  if (monotone) c.ok = false;
  report(8, "bound identities", c,
         fmt("K >= N vs legacy max relative gap %.2g <= 1e-12; theta, epsilon > 0 on %d cases; "
             "%d decreasing steps on 20-point rho grids",
             worst_reduction, cases, monotone));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    csv_dir = argv[1];
    std::filesystem::create_directories(csv_dir);
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    criterion_fig1();
    criterion_fig2();
    criterion_poisson();
    criterion_counterexample();
    criterion_single_link();
    criterion_stability();
    criterion_little();
    criterion_capacity();
    criterion_bound_identities();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 2;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s: %d of 9 criteria failed (%.1f s)\n", failed_criteria ? "FAIL" : "PASS", failed_criteria, secs);
  return failed_criteria ? 1 : 0;
}
