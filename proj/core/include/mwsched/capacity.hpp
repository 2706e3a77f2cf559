#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mwsched/model.hpp"

namespace mwsched {

/// ON probabilities of an ON/OFF downlink.
class CapacityParams {
 public:
  explicit CapacityParams(std::vector<double> on_probabilities);
  static CapacityParams symmetric(std::size_t links, double p);
  /// Requires an ON/OFF channel model.
  static CapacityParams from_channels(const ChannelModel& channels);

  std::size_t links() const noexcept { return p_.size(); }
  std::span<const double> on_probabilities() const noexcept { return p_; }
  double p_min() const noexcept { return p_min_; }
  bool is_symmetric() const noexcept { return symmetric_; }

 private:
  std::vector<double> p_;
  double p_min_;
  bool symmetric_;
};

struct LoadReport {
  double rho = 0.0;
  std::vector<std::size_t> binding_subset;  // sorted link indices
};

/// Largest link count for which heterogeneous-p regions are enumerated.
inline constexpr std::size_t kMaxEnumeratedLinks = 24;
/// Slack on region boundary comparisons.
inline constexpr double kBoundarySlack = 1e-12;

/// 1 - (1 - p_min)^k, the sum-rate any k links can jointly get.
double r_k(double p_min, int k);
/// r_k / k, the hypercube edge that fits on any k coordinates of the region.
double mu_sym_k(double p_min, int k);

/// lambda in the ON/OFF region: sum over L of lambda_i <= 1 - prod over L of (1 - p_i)
/// for every non-empty subset L. Exact: symmetric p uses sorted prefixes,
/// otherwise all subsets are visited (links <= kMaxEnumeratedLinks).
bool onoff_membership(std::span<const double> lambda, const CapacityParams& params);

/// Smallest rho with lambda in rho * region, with the subset attaining it.
LoadReport onoff_load(std::span<const double> lambda, const CapacityParams& params);

/// Subset enumeration regardless of symmetry. Used as the oracle for the fast path.
LoadReport onoff_load_enumerated(std::span<const double> lambda, const CapacityParams& params);
bool onoff_membership_enumerated(std::span<const double> lambda, const CapacityParams& params);

/// c * shape with c chosen so the result has load rho_target.
std::vector<double> scale_to_load(std::span<const double> shape, const CapacityParams& params,
                                  double rho_target);

struct BalanceReport {
  double beta = 0.0;
  double f = 0.0;          // beta * (1 - rho) / K
  std::size_t n_hat = 0;   // ceil(N / K) * K
};

/// Tightest beta >= 0 with lambda_i <= lambda_tot / N_hat + beta (1 - rho) / K for all i.
BalanceReport f_balance_beta(std::span<const double> lambda, int k_groups, double rho);

/// mu_hat * (1 - (1 - p_min)^N): a lower bound on the largest symmetric
/// sum rate of a multi-rate downlink, with mu_hat = min mu_max and
/// p_min = min Pr[S_i >= mu_hat].
double multirate_mu_sym_lower(const ChannelModel& channels);

/// N * max(lambda) / multirate_mu_sym_lower: an upper bound on the load of
/// lambda via downward closure of the region. Exact for symmetric traffic
/// over symmetric channels that take only the values 0 and mu_max.
double multirate_load_upper(std::span<const double> lambda, const ChannelModel& channels);

}  // namespace mwsched
