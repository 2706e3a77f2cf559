#include "mwsched/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mwsched/error.hpp"

namespace mwsched {

CapacityParams::CapacityParams(std::vector<double> on_probabilities)
    : p_(std::move(on_probabilities)) {
  if (p_.empty()) throw ValidationError("capacity params need at least one link");
  for (double p : p_) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw ValidationError("ON probabilities must lie in (0, 1], got " + std::to_string(p));
    }
  }
  p_min_ = *std::min_element(p_.begin(), p_.end());
  symmetric_ = std::all_of(p_.begin(), p_.end(), [&](double p) { return p == p_.front(); });
}

CapacityParams CapacityParams::symmetric(std::size_t links, double p) {
  return CapacityParams(std::vector<double>(links, p));
}

CapacityParams CapacityParams::from_channels(const ChannelModel& channels) {
  if (!channels.is_on_off()) {
    throw ValidationError("capacity params require ON/OFF channels");
  }
  std::vector<double> p(channels.links());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = channels.on_probability(i);
  return CapacityParams(std::move(p));
}

double r_k(double p_min, int k) {
  if (k < 1) throw ValidationError("r_k: k must be a positive integer");
  if (!(p_min > 0.0 && p_min <= 1.0)) throw ValidationError("r_k: p_min must lie in (0, 1]");
  return 1.0 - std::pow(1.0 - p_min, k);
}

double mu_sym_k(double p_min, int k) { return r_k(p_min, k) / static_cast<double>(k); }

namespace {

void check_rates(std::span<const double> lambda, const CapacityParams& params) {
  if (lambda.size() != params.links()) {
    throw ValidationError("rate vector has " + std::to_string(lambda.size()) +
                          " entries but the region has " + std::to_string(params.links()) +
                          " links");
  }
  for (double l : lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("rates must be finite and >= 0");
  }
}

void require_enumerable(const CapacityParams& params) {
  if (params.links() > kMaxEnumeratedLinks) {
    throw ExactCheckUnavailable("exact check unavailable: heterogeneous ON probabilities with " +
                                std::to_string(params.links()) + " links (limit " +
                                std::to_string(kMaxEnumeratedLinks) + ")");
  }
}

std::vector<std::size_t> order_descending(std::span<const double> lambda) {
  std::vector<std::size_t> idx(lambda.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return lambda[a] > lambda[b]; });
  return idx;
}

// Depth-first walk over all subsets carrying (sum of rates, product of OFF probabilities).
template <typename Visit>
bool walk_subsets(std::span<const double> lambda, std::span<const double> p, std::size_t next,
                  double sum, double off_product, std::uint32_t mask, Visit& visit) {
  for (std::size_t i = next; i < lambda.size(); ++i) {
    const double s = sum + lambda[i];
    const double off = off_product * (1.0 - p[i]);
    const std::uint32_t m = mask | (std::uint32_t{1} << i);
    if (!visit(s, 1.0 - off, m)) return false;
    if (!walk_subsets(lambda, p, i + 1, s, off, m, visit)) return false;
  }
  return true;
}

std::vector<std::size_t> mask_to_subset(std::uint32_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
    if (mask & 1u) out.push_back(i);
  }
  return out;
}

LoadReport symmetric_load(std::span<const double> lambda, double p) {
  const auto idx = order_descending(lambda);
  LoadReport out;
  double prefix = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = 1; k <= idx.size(); ++k) {
    prefix += lambda[idx[k - 1]];
    const double ratio = prefix / r_k(p, static_cast<int>(k));
    if (ratio > out.rho) {
      out.rho = ratio;
      best_k = k;
    }
  }
  out.binding_subset.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(best_k));
  std::sort(out.binding_subset.begin(), out.binding_subset.end());
  return out;
}

}  // namespace

bool onoff_membership_enumerated(std::span<const double> lambda, const CapacityParams& params) {
  check_rates(lambda, params);
  require_enumerable(params);
  auto visit = [](double sum, double capacity, std::uint32_t) {
    return sum <= capacity + kBoundarySlack;
  };
  return walk_subsets(lambda, params.on_probabilities(), 0, 0.0, 1.0, 0u, visit);
}

LoadReport onoff_load_enumerated(std::span<const double> lambda, const CapacityParams& params) {
  check_rates(lambda, params);
  require_enumerable(params);
  double best = 0.0;
  std::uint32_t best_mask = 0;
  auto visit = [&](double sum, double capacity, std::uint32_t mask) {
    const double ratio = sum / capacity;
    if (ratio > best) {
      best = ratio;
      best_mask = mask;
    }
    return true;
  };
  walk_subsets(lambda, params.on_probabilities(), 0, 0.0, 1.0, 0u, visit);
  return LoadReport{best, mask_to_subset(best_mask)};
}

bool onoff_membership(std::span<const double> lambda, const CapacityParams& params) {
  check_rates(lambda, params);
  if (!params.is_symmetric()) return onoff_membership_enumerated(lambda, params);
  const auto idx = order_descending(lambda);
  const double p = params.p_min();
  double prefix = 0.0;
  for (std::size_t k = 1; k <= idx.size(); ++k) {
    prefix += lambda[idx[k - 1]];
    if (prefix > r_k(p, static_cast<int>(k)) + kBoundarySlack) return false;
  }
  return true;
}

LoadReport onoff_load(std::span<const double> lambda, const CapacityParams& params) {
  check_rates(lambda, params);
  if (!params.is_symmetric()) return onoff_load_enumerated(lambda, params);
  return symmetric_load(lambda, params.p_min());
}

std::vector<double> scale_to_load(std::span<const double> shape, const CapacityParams& params,
                                  double rho_target) {
  if (!(rho_target > 0.0) || !std::isfinite(rho_target)) {
    throw ValidationError("target load must be positive");
  }
  const double load = onoff_load(shape, params).rho;
  if (!(load > 0.0)) throw ValidationError("rate shape must have a positive entry");
  const double c = rho_target / load;
  std::vector<double> out(shape.begin(), shape.end());
  for (double& v : out) v *= c;
  return out;
}

BalanceReport f_balance_beta(std::span<const double> lambda, int k_groups, double rho) {
  if (k_groups < 1) throw ValidationError("f_balance_beta: K must be >= 1");
  if (!(rho < 1.0)) throw ValidationError("f_balance_beta: rho must be < 1");
  if (lambda.empty()) throw ValidationError("f_balance_beta: empty rate vector");
  const auto n = lambda.size();
  const auto k = static_cast<std::size_t>(k_groups);
  BalanceReport out;
  out.n_hat = ((n + k - 1) / k) * k;
  const double lambda_tot = std::accumulate(lambda.begin(), lambda.end(), 0.0);
  const double avg = lambda_tot / static_cast<double>(out.n_hat);
  const double max_rate = *std::max_element(lambda.begin(), lambda.end());
  // Round-off in the average must not turn uniform traffic into unbalanced traffic.
  double excess = max_rate - avg;
  if (excess <= kBoundarySlack * std::max(1.0, avg)) excess = 0.0;
  out.beta = excess * static_cast<double>(k_groups) / (1.0 - rho);
  out.f = out.beta * (1.0 - rho) / static_cast<double>(k_groups);
  return out;
}

double multirate_mu_sym_lower(const ChannelModel& channels) {
  const std::size_t n = channels.links();
  int mu_hat = channels.mu_max(0);
  for (std::size_t i = 1; i < n; ++i) mu_hat = std::min(mu_hat, channels.mu_max(i));
  double p_min = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = channels.prob_at_least(i, mu_hat);
    if (!(p > 0.0)) {
      throw ValidationError("link " + std::to_string(i) + " has Pr[S >= " +
                            std::to_string(mu_hat) + "] = 0");
    }
    p_min = std::min(p_min, p);
  }
  return static_cast<double>(mu_hat) * r_k(p_min, static_cast<int>(n));
}

double multirate_load_upper(std::span<const double> lambda, const ChannelModel& channels) {
  if (lambda.size() != channels.links()) throw ValidationError("rate vector length mismatch");
  if (lambda.empty()) return 0.0;
  const double max_rate = *std::max_element(lambda.begin(), lambda.end());
  return static_cast<double>(lambda.size()) * max_rate / multirate_mu_sym_lower(channels);
}

}  // namespace mwsched
