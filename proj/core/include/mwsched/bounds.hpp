#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mwsched/capacity.hpp"
#include "mwsched/model.hpp"

namespace mwsched {

/// First and second moments of the per-slot arrival vector.
struct ArrivalMoments {
  std::vector<double> rates;            // lambda_i
  std::vector<double> second_moments;   // E[A_i^2]
  double lambda_tot = 0.0;
  double sum_second_moment = 0.0;       // sum_i E[A_i^2]
  double total_second_moment = 0.0;     // E[A_tot^2]
  double sum_rate_squares = 0.0;        // sum_i lambda_i^2
  bool uniform_poisson = false;         // every link Poisson with the same rate
};

ArrivalMoments arrival_moments(const ArrivalModel& model);

/// Moments for independent streams from explicit per-link values. With
/// `total_second_moment` set, it replaces the independence formula (for
/// modelling correlated arrivals).
ArrivalMoments arrival_moments(std::span<const double> rates,
                               std::span<const double> second_moments,
                               std::optional<double> total_second_moment = std::nullopt);

enum class BoundKind { legacy_onoff, lcq_general, lcq_balanced, multirate };

std::string_view to_string(BoundKind kind) noexcept;

struct BoundReport {
  BoundKind kind = BoundKind::legacy_onoff;
  bool applicable = false;
  std::string reason;  // why not applicable; empty otherwise

  double backlog_bound = 0.0;  // bound on time-average Q_tot, packets
  double delay_bound = 0.0;    // backlog_bound / lambda_tot, slots

  // general LCQ bound
  std::optional<int> k;
  std::optional<double> theta;
  std::optional<double> epsilon;
  std::optional<double> b_theta;
  std::optional<double> c;
  std::optional<double> grouped_delay_bound;  // K B_theta C / (lambda_tot (1-rho)^2)
  std::optional<double> legacy_delay_bound;

  // balanced-traffic bound
  std::optional<std::size_t> n_hat;
  std::optional<double> z;
  std::optional<double> beta;
  std::optional<double> d;
  std::optional<double> poisson_backlog_bound;  // uniform Poisson with K | N
  std::optional<double> poisson_delay_bound;

  // multi-rate bound
  std::optional<double> mu_sym;
  std::optional<double> s_hat_sq;
  std::optional<int> mu_hat;
};

/// O(N) delay bound for LCQ:
/// W <= N [1 + sum E[A_i^2]/lambda_tot - 2 sum lambda_i^2/lambda_tot] / (2 r_N (1 - rho)).
BoundReport legacy_onoff_bound(std::span<const double> lambda, const CapacityParams& params,
                               const ArrivalMoments& moments, double rho);

struct KSelectors {
  int min_condition;  // smallest K >= 1 with r_{K+1} > lambda_tot
  int example;        // max[1, ceil(log(2/(1-rho)) / log(1/(1-p_min))) - 1]
  int balanced;       // smallest K with r_K >= (1 + rho) / 2
};

KSelectors k_selectors(double lambda_tot, double p_min, double rho);

/// N-independent LCQ bound Q_tot <= K B_theta C / (1 - rho)^2, with the
/// delay reported as the smaller of that and the legacy bound. Without `k`
/// every admissible K in [K_min, N] is tried and the best report returned.
/// A given `k` violating r_{K+1} > lambda_tot throws ValidationError.
BoundReport general_lcq_bound(std::span<const double> lambda, const CapacityParams& params,
                              const ArrivalMoments& moments, double rho,
                              std::optional<int> k = std::nullopt);

/// Bound for f-balanced traffic: Q_tot <= K D / ((1 - rho)(1/2 - z beta)),
/// D = (lambda_tot + E[A_tot^2]) / 2, K the smallest with r_K >= (1 + rho) / 2.
/// Not applicable when K > N or beta >= 1/(2z).
BoundReport balanced_lcq_bound(std::span<const double> lambda, const CapacityParams& params,
                               const ArrivalMoments& moments, double rho);

/// E[max_i S_i^2] computed exactly from the per-link CDFs.
double max_rate_second_moment(const ChannelModel& channels);

/// O(N) max-weight bound for multi-rate channels.
BoundReport multirate_bound(std::span<const double> lambda, const ChannelModel& channels,
                            const ArrivalMoments& moments, double rho);

}  // namespace mwsched
