#include "mwsched/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mwsched/error.hpp"

namespace mwsched {

namespace {

constexpr int kMaxK = 10'000'000;

BoundReport not_applicable(BoundKind kind, std::string reason) {
  BoundReport r;
  r.kind = kind;
  r.applicable = false;
  r.reason = std::move(reason);
  return r;
}

// Shared gate for all bounds: 0 < rho < 1 and some traffic.
std::optional<std::string> load_gate(double rho, double lambda_tot) {
  if (!(rho < 1.0)) return "rho >= 1";
  if (!(rho > 0.0)) return "rho <= 0";
  if (!(lambda_tot > 0.0)) return "lambda_tot = 0";
  return std::nullopt;
}

void check_lengths(std::span<const double> lambda, std::size_t links,
                   const ArrivalMoments& moments) {
  if (lambda.size() != links || moments.rates.size() != links) {
    throw ValidationError("bound inputs disagree on the number of links");
  }
}

}  // namespace

std::string_view to_string(BoundKind kind) noexcept {
  switch (kind) {
    case BoundKind::legacy_onoff: return "legacy_onoff";
    case BoundKind::lcq_general: return "lcq_general";
    case BoundKind::lcq_balanced: return "lcq_balanced";
    case BoundKind::multirate: return "multirate";
  }
  return "unknown";
}

ArrivalMoments arrival_moments(std::span<const double> rates,
                               std::span<const double> second_moments,
                               std::optional<double> total_second_moment) {
  if (rates.size() != second_moments.size()) {
    throw ValidationError("arrival_moments: rate and second-moment lengths differ");
  }
  ArrivalMoments m;
  m.rates.assign(rates.begin(), rates.end());
  m.second_moments.assign(second_moments.begin(), second_moments.end());
  double variance_sum = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double l = rates[i];
    const double e2 = second_moments[i];
    if (e2 + 1e-15 < l * l) throw ValidationError("arrival_moments: E[A^2] < lambda^2");
    m.lambda_tot += l;
    m.sum_second_moment += e2;
    m.sum_rate_squares += l * l;
    variance_sum += e2 - l * l;
  }
  m.total_second_moment =
      total_second_moment.value_or(variance_sum + m.lambda_tot * m.lambda_tot);
  return m;
}

ArrivalMoments arrival_moments(const ArrivalModel& model) {
  const auto rates = model.rates();
  std::vector<double> second(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double l = rates[i];
    second[i] = model.link(i).law == ArrivalLaw::bernoulli ? l : l + l * l;
  }
  auto m = arrival_moments(rates, second);
  m.uniform_poisson = model.all_of(ArrivalLaw::poisson) &&
                      std::all_of(rates.begin(), rates.end(),
                                  [&](double r) { return r == rates.front(); });
  return m;
}

BoundReport legacy_onoff_bound(std::span<const double> lambda, const CapacityParams& params,
                               const ArrivalMoments& moments, double rho) {
  check_lengths(lambda, params.links(), moments);
  const double lt = moments.lambda_tot;
  if (auto why = load_gate(rho, lt)) return not_applicable(BoundKind::legacy_onoff, *why);
  const auto n = static_cast<double>(lambda.size());
  const double r_n = r_k(params.p_min(), static_cast<int>(lambda.size()));
  BoundReport r;
  r.kind = BoundKind::legacy_onoff;
  r.applicable = true;
  r.delay_bound = n * (1.0 + moments.sum_second_moment / lt - 2.0 * moments.sum_rate_squares / lt) /
                  (2.0 * r_n * (1.0 - rho));
  r.backlog_bound = lt * r.delay_bound;
  r.legacy_delay_bound = r.delay_bound;
  return r;
}

KSelectors k_selectors(double lambda_tot, double p_min, double rho) {
  if (!(p_min > 0.0 && p_min <= 1.0)) throw ValidationError("k_selectors: p_min must lie in (0, 1]");
  if (!(lambda_tot < 1.0)) throw ValidationError("k_selectors: lambda_tot must be < 1");
  if (!(rho < 1.0)) throw ValidationError("k_selectors: rho must be < 1");
  KSelectors out{};
  int k = 1;
  while (!(r_k(p_min, k + 1) > lambda_tot)) {
    if (++k > kMaxK) throw ValidationError("k_selectors: K search did not terminate");
  }
  out.min_condition = k;

  const double ratio = std::log(2.0 / (1.0 - rho)) / std::log(1.0 / (1.0 - p_min));
  out.example = std::max(1, static_cast<int>(std::ceil(ratio)) - 1);

  const double target = (1.0 + rho) / 2.0;
  k = 1;
  while (r_k(p_min, k) < target) {
    if (++k > kMaxK) throw ValidationError("k_selectors: K search did not terminate");
  }
  out.balanced = k;
  return out;
}

namespace {

BoundReport general_at_k(std::span<const double> lambda, const CapacityParams& params,
                         const ArrivalMoments& m, double rho, int k, double legacy_delay) {
  const int n = static_cast<int>(lambda.size());
  const double p = params.p_min();
  const double lt = m.lambda_tot;
  const double r_k1 = r_k(p, k + 1);
  if (!(r_k1 > lt)) {
    throw ValidationError("K = " + std::to_string(k) + " violates 1 - (1 - p_min)^(K+1) > lambda_tot (" +
                          std::to_string(r_k1) + " <= " + std::to_string(lt) + ")");
  }
  const double r_n = r_k(p, n);
  const double mu_n = mu_sym_k(p, n);
  const double slack = 1.0 - rho;

  BoundReport r;
  r.kind = BoundKind::lcq_general;
  r.applicable = true;
  r.k = k;
  if (k < n) {
    const double mu_k = mu_sym_k(p, k);
    const double rk = r_k(p, k);
    r.theta = slack * (mu_k - mu_n) / r_k1;
    r.c = r_k1 / (r_n * k * lt / (n * slack) + rk * (r_k1 - lt) / slack);
    r.epsilon = slack * (mu_n * lt + mu_k * (r_k1 - lt)) / r_k1;
  } else {
    r.theta = 0.0;
    r.c = slack / r_n;
    r.epsilon = slack * mu_n;
  }
  r.b_theta = lt / 2.0 + m.sum_second_moment / 2.0 - m.sum_rate_squares +
              *r.theta / 2.0 * (m.total_second_moment + lt - 2.0 * lt * lt);
  // For K >= N a single group covers every link, so the prefactor stops at N.
  const int k_eff = std::min(k, n);
  const double grouped_backlog = k_eff * *r.b_theta * *r.c / (slack * slack);
  r.grouped_delay_bound = grouped_backlog / lt;
  r.legacy_delay_bound = legacy_delay;
  r.delay_bound = std::min(*r.grouped_delay_bound, legacy_delay);
  r.backlog_bound = lt * r.delay_bound;
  return r;
}

}  // namespace

BoundReport general_lcq_bound(std::span<const double> lambda, const CapacityParams& params,
                              const ArrivalMoments& moments, double rho, std::optional<int> k) {
  check_lengths(lambda, params.links(), moments);
  const double lt = moments.lambda_tot;
  if (auto why = load_gate(rho, lt)) return not_applicable(BoundKind::lcq_general, *why);
  if (k && *k < 1) throw ValidationError("K must be a positive integer");
  const double legacy = legacy_onoff_bound(lambda, params, moments, rho).delay_bound;
  if (k) return general_at_k(lambda, params, moments, rho, *k, legacy);

  const auto sel = k_selectors(lt, params.p_min(), rho);
  const int n = static_cast<int>(lambda.size());
  const int k_last = std::max(n, sel.min_condition);
  BoundReport best = general_at_k(lambda, params, moments, rho, sel.min_condition, legacy);
  for (int kk = sel.min_condition + 1; kk <= k_last; ++kk) {
    auto r = general_at_k(lambda, params, moments, rho, kk, legacy);
    if (*r.grouped_delay_bound < *best.grouped_delay_bound) best = std::move(r);
  }
  return best;
}

BoundReport balanced_lcq_bound(std::span<const double> lambda, const CapacityParams& params,
                               const ArrivalMoments& moments, double rho) {
  check_lengths(lambda, params.links(), moments);
  const double lt = moments.lambda_tot;
  if (auto why = load_gate(rho, lt)) return not_applicable(BoundKind::lcq_balanced, *why);
  const int n = static_cast<int>(lambda.size());
  const int k = k_selectors(lt, params.p_min(), rho).balanced;

  BoundReport r;
  r.kind = BoundKind::lcq_balanced;
  r.k = k;
  if (k > n) {
    r.applicable = false;
    r.reason = "K > N";
    return r;
  }
  const auto bal = f_balance_beta(lambda, k, rho);
  r.n_hat = bal.n_hat;
  r.beta = bal.beta;
  r.z = bal.n_hat > 1 ? (1.0 - 1.0 / k) / (1.0 - 1.0 / static_cast<double>(bal.n_hat)) : 0.0;
  if (*r.z * bal.beta >= 0.5) {
    r.applicable = false;
    r.reason = "beta >= 1/(2z)";
    return r;
  }
  const double slack = 1.0 - rho;
  r.applicable = true;
  r.d = 0.5 * (lt + moments.total_second_moment);
  r.backlog_bound = k * *r.d / (slack * (0.5 - *r.z * bal.beta));
  r.delay_bound = r.backlog_bound / lt;
  if (moments.uniform_poisson && n % k == 0) {
    r.poisson_backlog_bound = (2.0 * k * lt - lt * lt) / slack;
    r.poisson_delay_bound = (2.0 * k - lt) / slack;
  }
  return r;
}

double max_rate_second_moment(const ChannelModel& channels) {
  int top = 0;
  for (std::size_t i = 0; i < channels.links(); ++i) top = std::max(top, channels.mu_max(i));
  // Pr[max <= v] = prod_i Pr[S_i <= v]
  auto cdf_of_max = [&](int v) {
    double prod = 1.0;
    for (std::size_t i = 0; i < channels.links(); ++i) {
      prod *= 1.0 - channels.prob_at_least(i, v + 1);
    }
    return prod;
  };
  double out = 0.0;
  double below = cdf_of_max(0);
  for (int v = 1; v <= top; ++v) {
    const double at_most = cdf_of_max(v);
    out += static_cast<double>(v) * v * (at_most - below);
    below = at_most;
  }
  return out;
}

BoundReport multirate_bound(std::span<const double> lambda, const ChannelModel& channels,
                            const ArrivalMoments& moments, double rho) {
  check_lengths(lambda, channels.links(), moments);
  const double lt = moments.lambda_tot;
  if (auto why = load_gate(rho, lt)) return not_applicable(BoundKind::multirate, *why);
  const auto n = static_cast<double>(lambda.size());

  BoundReport r;
  r.kind = BoundKind::multirate;
  r.applicable = true;
  r.mu_sym = multirate_mu_sym_lower(channels);
  r.s_hat_sq = max_rate_second_moment(channels);
  int mu_hat = channels.mu_max(0);
  double rate_weighted_max = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    mu_hat = std::min(mu_hat, channels.mu_max(i));
    rate_weighted_max += lambda[i] * channels.mu_max(i);
  }
  r.mu_hat = mu_hat;
  const double moment_term =
      moments.sum_second_moment / (2.0 * lt) - 3.0 * moments.sum_rate_squares / (2.0 * lt);
  const double rate_term = std::min(rate_weighted_max / lt, *r.s_hat_sq / lt);
  r.delay_bound = n * (moment_term + rate_term) / ((1.0 - rho) * *r.mu_sym);
  r.backlog_bound = lt * r.delay_bound;
  return r;
}

}  // namespace mwsched
