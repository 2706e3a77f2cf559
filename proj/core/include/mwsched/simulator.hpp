#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mwsched/model.hpp"
#include "mwsched/schedulers.hpp"

namespace mwsched {

struct SimulationConfig {
  ChannelModel channels;
  ArrivalModel arrivals;
  SchedulerKind scheduler = SchedulerKind::lcq;
  Slot horizon = 1'000'000;
  std::uint64_t seed = 1;
  /// Fraction of leading slots excluded from time averages and delay.
  double warmup_fraction = 0.0;
  /// Keep Z(0..T) for drift_probe.
  bool record_z_trace = false;
};

struct SimStats {
  Slot horizon = 0;
  Slot measured_slots = 0;
  double qtot_mean = 0.0;
  std::vector<double> q_mean;
  std::optional<double> delay_measured;  // empty when nothing departed
  std::optional<double> delay_little;    // empty when the nominal rate is 0
  double z_mean = 0.0;
  double z_stderr = 0.0;  // batch-means standard error of z_mean
  double prob_z_ge_half = 0.0;
  double residual_backlog_mean = 0.0;
  double full_backlog_mean = 0.0;
  Packets total_arrivals = 0;
  Packets total_departures = 0;
  Packets final_qtot = 0;
  std::vector<std::int32_t> z_trace;  // Z(0..T) when requested
};

/// Runs the slotted loop from empty queues. For each slot: sample S(t),
/// select a link, serve, admit A(t). Conservation and ledger consistency are
/// verified at the end (ContractViolation on failure).
SimStats run_simulation(const SimulationConfig& config);

/// Average delay by Little's law against the nominal total rate.
double little_delay(double qtot_mean, double lambda_tot);

struct BacklogSplit {
  Packets residual = 0;  // packets in queues with 0 < Q_i < mu_max
  Packets full = 0;      // packets in queues with Q_i >= mu_max
};

BacklogSplit residual_split(std::span<const Packets> q, const ChannelModel& channels);
BacklogSplit residual_split(const QueueState& q, const ChannelModel& channels);

/// Threshold used for "Z >= N/2": ceil(N/2).
std::size_t half_threshold(std::size_t links) noexcept;

struct DriftProbe {
  std::size_t threshold = 0;
  std::size_t samples_at_or_above = 0;
  std::size_t samples_below = 0;
  std::optional<double> mean_at_or_above;  // E[Z(t+1) - Z(t) | Z(t) >= threshold]
  std::optional<double> mean_below;        // E[Z(t+1) - Z(t) | Z(t) < threshold]
};

DriftProbe drift_probe(std::span<const std::int32_t> z_trace, std::size_t links);

}  // namespace mwsched
