#include "mwsched/schedulers.hpp"

#include <algorithm>

namespace mwsched {

std::string_view to_string(SchedulerKind kind) noexcept {
  switch (kind) {
    case SchedulerKind::lcq: return "lcq";
    case SchedulerKind::max_weight_multirate: return "maxweight_multirate";
    case SchedulerKind::modified_max_weight: return "modified_maxweight";
    case SchedulerKind::random_connected: return "random_connected";
    case SchedulerKind::round_robin: return "round_robin";
  }
  return "unknown";
}

std::optional<SchedulerKind> parse_scheduler_kind(std::string_view name) noexcept {
  if (name == "lcq") return SchedulerKind::lcq;
  if (name == "maxweight_multirate" || name == "maxweight") {
    return SchedulerKind::max_weight_multirate;
  }
  if (name == "modified_maxweight" || name == "modified") return SchedulerKind::modified_max_weight;
  if (name == "random_connected") return SchedulerKind::random_connected;
  if (name == "round_robin") return SchedulerKind::round_robin;
  return std::nullopt;
}

namespace {

// Argmax of weight(i) over links, idle when the maximum is 0, ties uniform.
template <typename Weight>
Selection argmax_uniform_ties(std::size_t n, std::uint64_t draw, Weight weight) {
  std::int64_t best = 0;
  std::size_t ties = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t w = weight(i);
    if (w > best) {
      best = w;
      ties = 1;
    } else if (w == best && w > 0) {
      ++ties;
    }
  }
  if (best == 0) return std::nullopt;
  std::uint64_t pick = ties == 1 ? 0 : bounded(draw, ties);
  for (std::size_t i = 0; i < n; ++i) {
    if (weight(i) == best && pick-- == 0) return i;
  }
  return std::nullopt;  // unreachable
}

}  // namespace

Selection maxweight_multirate_select(std::span<const Packets> q, std::span<const int> s,
                                     std::uint64_t draw) {
  return argmax_uniform_ties(q.size(), draw, [&](std::size_t i) { return q[i] * s[i]; });
}

Selection lcq_select(std::span<const Packets> q, std::span<const int> s, std::uint64_t draw) {
  return maxweight_multirate_select(q, s, draw);
}

Selection modified_maxweight_select(std::span<const Packets> q, std::span<const int> s,
                                    std::uint64_t draw) {
  return argmax_uniform_ties(q.size(), draw, [&](std::size_t i) {
    return q[i] * std::min<Packets>(q[i], s[i]);
  });
}

Selection random_connected_select(std::span<const Packets> q, std::span<const int> s,
                                  std::uint64_t draw) {
  return argmax_uniform_ties(q.size(), draw, [&](std::size_t i) -> std::int64_t {
    return q[i] > 0 && s[i] > 0 ? 1 : 0;
  });
}

Selection round_robin_select(std::span<const Packets> q, std::span<const int> s,
                             std::size_t& pointer) {
  const std::size_t n = q.size();
  for (std::size_t step = 1; step <= n; ++step) {
    const std::size_t i = (pointer + step) % n;
    if (q[i] > 0 && s[i] > 0) {
      pointer = i;
      return i;
    }
  }
  return std::nullopt;
}

Scheduler::Scheduler(SchedulerKind kind, std::uint64_t master_seed)
    : kind_(kind), tie_break_(master_seed, StreamLabel{StreamPurpose::tie_break, 0}) {}

Selection Scheduler::select(std::span<const Packets> q, std::span<const int> s, Slot t) {
  const auto draw = [&] { return tie_break_.bits_at(static_cast<std::uint64_t>(t)); };
  switch (kind_) {
    case SchedulerKind::lcq: return lcq_select(q, s, draw());
    case SchedulerKind::max_weight_multirate: return maxweight_multirate_select(q, s, draw());
    case SchedulerKind::modified_max_weight: return modified_maxweight_select(q, s, draw());
    case SchedulerKind::random_connected: return random_connected_select(q, s, draw());
    case SchedulerKind::round_robin: return round_robin_select(q, s, rr_pointer_);
  }
  return std::nullopt;
}

}  // namespace mwsched
