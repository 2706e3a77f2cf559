#include "mwsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mwsched/error.hpp"
#include "mwsched/rng.hpp"

namespace mwsched {

namespace {

constexpr std::size_t kBatches = 50;

double batch_stderr(const std::vector<double>& batch_means) {
  const auto b = batch_means.size();
  if (b < 2) return 0.0;
  double mean = 0.0;
  for (double v : batch_means) mean += v;
  mean /= static_cast<double>(b);
  double ss = 0.0;
  for (double v : batch_means) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

}  // namespace

std::size_t half_threshold(std::size_t links) noexcept { return (links + 1) / 2; }

BacklogSplit residual_split(std::span<const Packets> q, const ChannelModel& channels) {
  BacklogSplit out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] >= channels.mu_max(i)) {
      out.full += q[i];
    } else {
      out.residual += q[i];
    }
  }
  return out;
}

BacklogSplit residual_split(const QueueState& q, const ChannelModel& channels) {
  return residual_split(q.backlogs(), channels);
}

double little_delay(double qtot_mean, double lambda_tot) {
  if (!(lambda_tot > 0.0)) throw ValidationError("little_delay: total arrival rate must be > 0");
  return qtot_mean / lambda_tot;
}

SimStats run_simulation(const SimulationConfig& config) {
  const std::size_t n = config.channels.links();
  if (config.arrivals.links() != n) {
    throw ValidationError("channel model has " + std::to_string(n) +
                          " links but arrival model has " +
                          std::to_string(config.arrivals.links()));
  }
  if (config.horizon < 1) throw ValidationError("horizon must be >= 1 slot");
  if (!(config.warmup_fraction >= 0.0 && config.warmup_fraction < 1.0)) {
    throw ValidationError("warmup fraction must lie in [0, 1)");
  }

  const Slot horizon = config.horizon;
  const auto warmup = static_cast<Slot>(std::floor(config.warmup_fraction * static_cast<double>(horizon)));
  const Slot measured = horizon - warmup;
  const std::size_t half = half_threshold(n);

  const auto channel_streams = link_streams(config.seed, StreamPurpose::channel, n);
  const auto arrival_streams = link_streams(config.seed, StreamPurpose::arrival, n);
  Scheduler scheduler(config.scheduler, config.seed);

  std::vector<int> mu_max(n);
  for (std::size_t i = 0; i < n; ++i) mu_max[i] = config.channels.mu_max(i);

  QueueState q(n);
  std::vector<int> rates(n);
  std::vector<int> mu(n, 0);
  std::vector<Packets> arrivals(n);

  SimStats stats;
  stats.horizon = horizon;
  stats.measured_slots = measured;
  std::vector<double> q_sum(n, 0.0);
  double qtot_sum = 0.0, z_sum = 0.0, residual_sum = 0.0, full_sum = 0.0;
  Slot z_ge_half = 0;
  Packets measured_departures = 0;
  double delay_sum = 0.0;

  const Slot batch_len = std::max<Slot>(1, measured / static_cast<Slot>(kBatches));
  std::vector<double> batch_means;
  double batch_acc = 0.0;
  Slot batch_fill = 0;

  if (config.record_z_trace) stats.z_trace.reserve(static_cast<std::size_t>(horizon) + 1);

  for (Slot t = 0; t < horizon; ++t) {
    const auto backlog = q.backlogs();
    const std::size_t z = q.nonempty();
    if (config.record_z_trace) stats.z_trace.push_back(static_cast<std::int32_t>(z));

    if (t >= warmup) {
      qtot_sum += static_cast<double>(q.total());
      z_sum += static_cast<double>(z);
      if (z >= half) ++z_ge_half;
      Packets residual = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const Packets qi = backlog[i];
        q_sum[i] += static_cast<double>(qi);
        if (qi < mu_max[i]) residual += qi;
      }
      residual_sum += static_cast<double>(residual);
      full_sum += static_cast<double>(q.total() - residual);

      batch_acc += static_cast<double>(z);
      if (++batch_fill == batch_len) {
        batch_means.push_back(batch_acc / static_cast<double>(batch_len));
        batch_acc = 0.0;
        batch_fill = 0;
      }
    }

    sample_channels(config.channels, channel_streams, t, rates);
    const Selection chosen = scheduler.select(backlog, rates, t);
    if (chosen) mu[*chosen] = rates[*chosen];
    sample_arrivals(config.arrivals, arrival_streams, t, arrivals);
    const StepOutcome step = step_queues(q, mu, rates, arrivals, t);
    if (chosen) mu[*chosen] = 0;

    stats.total_arrivals += step.arrivals;
    stats.total_departures += step.departures;
    if (t >= warmup) {
      measured_departures += step.departures;
      delay_sum += static_cast<double>(step.delay_sum);
    }
  }
  if (config.record_z_trace) stats.z_trace.push_back(static_cast<std::int32_t>(q.nonempty()));

  stats.final_qtot = q.total();
  if (stats.final_qtot != stats.total_arrivals - stats.total_departures) {
    throw ContractViolation("packet conservation violated");
  }
  Packets ledger_total = 0;
  for (std::size_t i = 0; i < n; ++i) ledger_total += q.ledger_length(i);
  if (ledger_total != stats.final_qtot) throw ContractViolation("ledger out of sync with backlog");

  const auto m = static_cast<double>(measured);
  stats.qtot_mean = qtot_sum / m;
  stats.q_mean.resize(n);
  for (std::size_t i = 0; i < n; ++i) stats.q_mean[i] = q_sum[i] / m;
  stats.z_mean = z_sum / m;
  stats.z_stderr = batch_stderr(batch_means);
  stats.prob_z_ge_half = static_cast<double>(z_ge_half) / m;
  stats.residual_backlog_mean = residual_sum / m;
  stats.full_backlog_mean = full_sum / m;
  if (measured_departures > 0) {
    stats.delay_measured = delay_sum / static_cast<double>(measured_departures);
  }
  const double lambda_tot = config.arrivals.total_rate();
  if (lambda_tot > 0.0) stats.delay_little = little_delay(stats.qtot_mean, lambda_tot);
  return stats;
}

DriftProbe drift_probe(std::span<const std::int32_t> z_trace, std::size_t links) {
  DriftProbe out;
  out.threshold = half_threshold(links);
  double sum_hi = 0.0, sum_lo = 0.0;
  for (std::size_t t = 0; t + 1 < z_trace.size(); ++t) {
    const double delta = static_cast<double>(z_trace[t + 1] - z_trace[t]);
    if (static_cast<std::size_t>(z_trace[t]) >= out.threshold) {
      sum_hi += delta;
      ++out.samples_at_or_above;
    } else {
      sum_lo += delta;
      ++out.samples_below;
    }
  }
  if (out.samples_at_or_above > 0) {
    out.mean_at_or_above = sum_hi / static_cast<double>(out.samples_at_or_above);
  }
  if (out.samples_below > 0) out.mean_below = sum_lo / static_cast<double>(out.samples_below);
  return out;
}

}  // namespace mwsched
