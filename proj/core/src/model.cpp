#include "mwsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mwsched/error.hpp"

namespace mwsched {

namespace {

constexpr double kPmfSumTolerance = 1e-9;

void validate_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 1], got " + std::to_string(p));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ChannelModel

ChannelModel::ChannelModel(std::vector<std::vector<double>> pmfs) : pmf_(std::move(pmfs)) {
  if (pmf_.empty()) throw ValidationError("channel model needs at least one link");
  cdf_.reserve(pmf_.size());
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    const auto& pmf = pmf_[i];
    if (pmf.size() < 2) {
      throw ValidationError("link " + std::to_string(i) + ": mu_max must be >= 1");
    }
    for (double p : pmf) validate_probability(p, "rate probability");
    const double sum = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    if (std::abs(sum - 1.0) > kPmfSumTolerance) {
      throw ValidationError("link " + std::to_string(i) +
                            ": rate probabilities sum to " + std::to_string(sum));
    }
    std::vector<double> cdf(pmf.size());
    std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());
    cdf.back() = 1.0;
    cdf_.push_back(std::move(cdf));
  }
}

ChannelModel ChannelModel::on_off(std::vector<double> on_probabilities) {
  std::vector<std::vector<double>> pmfs;
  pmfs.reserve(on_probabilities.size());
  for (double p : on_probabilities) {
    validate_probability(p, "ON probability");
    pmfs.push_back({1.0 - p, p});
  }
  return ChannelModel(std::move(pmfs));
}

ChannelModel ChannelModel::symmetric_on_off(std::size_t links, double on_probability) {
  return on_off(std::vector<double>(links, on_probability));
}

ChannelModel ChannelModel::multi_rate(std::vector<std::vector<double>> pmfs) {
  return ChannelModel(std::move(pmfs));
}

ChannelModel ChannelModel::symmetric_multi_rate(std::size_t links, std::vector<double> pmf) {
  return ChannelModel(std::vector<std::vector<double>>(links, pmf));
}

double ChannelModel::prob_at_least(std::size_t link, int rate) const {
  const auto& pmf = pmf_.at(link);
  if (rate <= 0) return 1.0;
  if (rate >= static_cast<int>(pmf.size())) return 0.0;
  double tail = 0.0;
  for (std::size_t v = static_cast<std::size_t>(rate); v < pmf.size(); ++v) tail += pmf[v];
  return std::min(tail, 1.0);
}

bool ChannelModel::is_on_off() const noexcept {
  return std::all_of(pmf_.begin(), pmf_.end(), [](const auto& p) { return p.size() == 2; });
}

bool ChannelModel::is_symmetric() const noexcept {
  return std::all_of(pmf_.begin(), pmf_.end(), [&](const auto& p) { return p == pmf_.front(); });
}

int ChannelModel::sample(std::size_t link, double u) const noexcept {
  const auto& cdf = cdf_[link];
  int v = 0;
  while (u >= cdf[static_cast<std::size_t>(v)]) ++v;
  return v;
}

// ---------------------------------------------------------------------------
// ArrivalModel

ArrivalModel::ArrivalModel(std::vector<LinkArrivals> links) : links_(std::move(links)) {
  if (links_.empty()) throw ValidationError("arrival model needs at least one link");
  exp_neg_rate_.reserve(links_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    if (!(l.rate >= 0.0) || !std::isfinite(l.rate)) {
      throw ValidationError("link " + std::to_string(i) + ": arrival rate must be >= 0");
    }
    if (l.law == ArrivalLaw::bernoulli && l.rate > 1.0) {
      throw ValidationError("link " + std::to_string(i) +
                            ": Bernoulli arrival rate must be <= 1, got " + std::to_string(l.rate));
    }
    if (l.law == ArrivalLaw::poisson && l.rate > 500.0) {
      throw ValidationError("link " + std::to_string(i) + ": Poisson rate too large");
    }
    exp_neg_rate_.push_back(std::exp(-l.rate));
  }
}

namespace {

std::vector<LinkArrivals> with_law(ArrivalLaw law, std::span<const double> rates) {
  std::vector<LinkArrivals> out;
  out.reserve(rates.size());
  for (double r : rates) out.push_back({law, r});
  return out;
}

}  // namespace

ArrivalModel ArrivalModel::bernoulli(std::span<const double> rates) {
  return ArrivalModel(with_law(ArrivalLaw::bernoulli, rates));
}

ArrivalModel ArrivalModel::poisson(std::span<const double> rates) {
  return ArrivalModel(with_law(ArrivalLaw::poisson, rates));
}

ArrivalModel ArrivalModel::uniform(ArrivalLaw law, std::size_t links, double rate) {
  const std::vector<double> rates(links, rate);
  return ArrivalModel(with_law(law, rates));
}

std::vector<double> ArrivalModel::rates() const {
  std::vector<double> out;
  out.reserve(links_.size());
  for (const auto& l : links_) out.push_back(l.rate);
  return out;
}

double ArrivalModel::total_rate() const noexcept {
  double s = 0.0;
  for (const auto& l : links_) s += l.rate;
  return s;
}

bool ArrivalModel::all_of(ArrivalLaw law) const noexcept {
  return std::all_of(links_.begin(), links_.end(), [law](const auto& l) { return l.law == law; });
}

Packets ArrivalModel::sample(std::size_t link, double u) const noexcept {
  const auto& l = links_[link];
  if (l.law == ArrivalLaw::bernoulli) return u < l.rate ? 1 : 0;
  // Poisson by sequential inversion.
  double term = exp_neg_rate_[link];
  double cdf = term;
  Packets k = 0;
  while (u >= cdf) {
    ++k;
    term *= l.rate / static_cast<double>(k);
    if (term <= 0.0) break;  // cdf saturated below u through rounding
    cdf += term;
  }
  return k;
}

// ---------------------------------------------------------------------------
// QueueState

QueueState::QueueState(std::size_t links) : backlog_(links, 0), ledger_(links) {}

Packets QueueState::ledger_length(std::size_t link) const {
  Packets n = 0;
  for (const auto& b : ledger_.at(link)) n += b.count;
  return n;
}

void QueueState::admit(std::size_t link, Packets count, Slot arrival_slot) {
  if (count < 0) throw ContractViolation("negative arrival count");
  if (count == 0) return;
  if (backlog_.at(link) == 0) ++nonempty_;
  backlog_[link] += count;
  total_ += count;
  auto& fifo = ledger_[link];
  if (!fifo.empty() && fifo.back().arrival == arrival_slot) {
    fifo.back().count += count;
  } else {
    fifo.push_back({arrival_slot, count});
  }
}

QueueState::Service QueueState::serve(std::size_t link, Packets count, Slot service_slot) {
  if (count < 0) throw ContractViolation("negative service count");
  Service out;
  Packets& q = backlog_.at(link);
  Packets remaining = std::min(count, q);
  auto& fifo = ledger_[link];
  while (remaining > 0) {
    Batch& head = fifo.front();
    const Packets take = std::min(remaining, head.count);
    out.packets += take;
    out.delay_sum += take * (service_slot - head.arrival);
    head.count -= take;
    remaining -= take;
    if (head.count == 0) fifo.pop_front();
  }
  q -= out.packets;
  total_ -= out.packets;
  if (out.packets > 0 && q == 0) --nonempty_;
  return out;
}

// ---------------------------------------------------------------------------
// Operations

bool feasibility_check(std::span<const int> mu, std::span<const int> rates) {
  if (mu.size() != rates.size()) return false;
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] < 0) return false;
    if (mu[i] != 0) {
      if (++nonzero > 1 || mu[i] != rates[i]) return false;
    }
  }
  return true;
}

void sample_channels(const ChannelModel& model, std::span<const RngStream> streams, Slot t,
                     std::span<int> out) {
  const std::size_t n = model.links();
  const auto c = static_cast<std::uint64_t>(t);
  for (std::size_t i = 0; i < n; ++i) out[i] = model.sample(i, streams[i].uniform_at(c));
}

std::vector<int> sample_channels(const ChannelModel& model, std::span<const RngStream> streams,
                                 Slot t) {
  std::vector<int> out(model.links());
  sample_channels(model, streams, t, out);
  return out;
}

void sample_arrivals(const ArrivalModel& model, std::span<const RngStream> streams, Slot t,
                     std::span<Packets> out) {
  const std::size_t n = model.links();
  const auto c = static_cast<std::uint64_t>(t);
  for (std::size_t i = 0; i < n; ++i) out[i] = model.sample(i, streams[i].uniform_at(c));
}

std::vector<Packets> sample_arrivals(const ArrivalModel& model,
                                     std::span<const RngStream> streams, Slot t) {
  std::vector<Packets> out(model.links());
  sample_arrivals(model, streams, t, out);
  return out;
}

StepOutcome step_queues(QueueState& q, std::span<const int> mu, std::span<const int> rates,
                        std::span<const Packets> arrivals, Slot t) {
  const std::size_t n = q.links();
  if (mu.size() != n || rates.size() != n || arrivals.size() != n) {
    throw ContractViolation("step_queues: vector length mismatch");
  }
  if (!feasibility_check(mu, rates)) {
    throw ContractViolation("step_queues: infeasible transmission vector");
  }
  StepOutcome out;
  for (std::size_t i = 0; i < n; ++i) {
    if (mu[i] > 0) {
      const auto s = q.serve(i, mu[i], t);
      out.departures += s.packets;
      out.delay_sum += s.delay_sum;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (arrivals[i] < 0) throw ContractViolation("step_queues: negative arrivals");
    q.admit(i, arrivals[i], t);
    out.arrivals += arrivals[i];
  }
  return out;
}

}  // namespace mwsched
