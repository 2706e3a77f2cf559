#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "mwsched/rng.hpp"

namespace mwsched {

using Slot = std::int64_t;
using Packets = std::int64_t;

/// Per-link channel law over the integer rates {0, ..., mu_max}.
///
/// ON/OFF channels are the special case mu_max = 1.
class ChannelModel {
 public:
  static ChannelModel on_off(std::vector<double> on_probabilities);
  static ChannelModel symmetric_on_off(std::size_t links, double on_probability);
  /// pmfs[i][v] = Pr[S_i = v] for v = 0..mu_max_i.
  static ChannelModel multi_rate(std::vector<std::vector<double>> pmfs);
  static ChannelModel symmetric_multi_rate(std::size_t links, std::vector<double> pmf);

  std::size_t links() const noexcept { return pmf_.size(); }
  int mu_max(std::size_t link) const { return static_cast<int>(pmf_.at(link).size()) - 1; }
  std::span<const double> pmf(std::size_t link) const { return pmf_.at(link); }

  /// Pr[S_i >= rate].
  double prob_at_least(std::size_t link, int rate) const;
  /// Pr[S_i >= 1]; the ON probability for ON/OFF links.
  double on_probability(std::size_t link) const { return prob_at_least(link, 1); }

  bool is_on_off() const noexcept;
  bool is_symmetric() const noexcept;

  /// Inverse-CDF draw from link's law given u in [0, 1).
  int sample(std::size_t link, double u) const noexcept;

 private:
  explicit ChannelModel(std::vector<std::vector<double>> pmfs);

  std::vector<std::vector<double>> pmf_;
  std::vector<std::vector<double>> cdf_;
};

enum class ArrivalLaw { bernoulli, poisson };

struct LinkArrivals {
  ArrivalLaw law;
  double rate;  // packets/slot
};

/// Independent i.i.d. per-link arrival processes.
class ArrivalModel {
 public:
  explicit ArrivalModel(std::vector<LinkArrivals> links);
  static ArrivalModel bernoulli(std::span<const double> rates);
  static ArrivalModel poisson(std::span<const double> rates);
  static ArrivalModel uniform(ArrivalLaw law, std::size_t links, double rate);

  std::size_t links() const noexcept { return links_.size(); }
  const LinkArrivals& link(std::size_t i) const { return links_.at(i); }
  std::vector<double> rates() const;
  double total_rate() const noexcept;
  bool all_of(ArrivalLaw law) const noexcept;

  /// Inverse-CDF draw of the arrival count for a link given u in [0, 1).
  Packets sample(std::size_t link, double u) const noexcept;

 private:
  std::vector<LinkArrivals> links_;
  std::vector<double> exp_neg_rate_;  // Poisson P[A = 0]
};

/// Per-link backlogs with a FIFO ledger of arrival slots.
///
/// Arrivals admitted together share one ledger entry, so Poisson batches
/// cost O(1) regardless of size.
class QueueState {
 public:
  struct Service {
    Packets packets = 0;
    std::int64_t delay_sum = 0;  // sum over served packets of (service slot - arrival slot)
  };

  explicit QueueState(std::size_t links);

  std::size_t links() const noexcept { return backlog_.size(); }
  Packets backlog(std::size_t link) const { return backlog_.at(link); }
  std::span<const Packets> backlogs() const noexcept { return backlog_; }
  Packets total() const noexcept { return total_; }
  /// Z: number of non-empty queues.
  std::size_t nonempty() const noexcept { return nonempty_; }
  Packets ledger_length(std::size_t link) const;

  void admit(std::size_t link, Packets count, Slot arrival_slot);
  /// Removes up to `count` packets FIFO from `link` at `service_slot`.
  Service serve(std::size_t link, Packets count, Slot service_slot);

 private:
  struct Batch {
    Slot arrival;
    Packets count;
  };

  std::vector<Packets> backlog_;
  std::vector<std::deque<Batch>> ledger_;
  Packets total_ = 0;
  std::size_t nonempty_ = 0;
};

/// True iff mu has at most one non-zero entry and that entry equals S.
bool feasibility_check(std::span<const int> mu, std::span<const int> rates);

void sample_channels(const ChannelModel& model, std::span<const RngStream> streams,
                     Slot t, std::span<int> out);
std::vector<int> sample_channels(const ChannelModel& model,
                                 std::span<const RngStream> streams, Slot t);

void sample_arrivals(const ArrivalModel& model, std::span<const RngStream> streams,
                     Slot t, std::span<Packets> out);
std::vector<Packets> sample_arrivals(const ArrivalModel& model,
                                     std::span<const RngStream> streams, Slot t);

struct StepOutcome {
  Packets departures = 0;
  std::int64_t delay_sum = 0;
  Packets arrivals = 0;
};

/// One slot of Q_i(t+1) = max[Q_i(t) - mu_i(t), 0] + A_i(t).
///
/// Service happens before arrivals are admitted, so a packet arriving in
/// slot t is first eligible at t+1 and its delay is at least one slot.
/// Throws ContractViolation when mu is not feasible for `rates`.
StepOutcome step_queues(QueueState& q, std::span<const int> mu,
                        std::span<const int> rates, std::span<const Packets> arrivals,
                        Slot t);

}  // namespace mwsched
