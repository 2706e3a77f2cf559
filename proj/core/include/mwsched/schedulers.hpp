#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "mwsched/model.hpp"
#include "mwsched/rng.hpp"

namespace mwsched {

enum class SchedulerKind {
  lcq,                   // longest connected queue, argmax Q_i S_i
  max_weight_multirate,  // argmax Q_i S_i for general rates
  modified_max_weight,   // argmax Q_i min[Q_i, S_i]
  random_connected,      // uniform over links with Q_i > 0 and S_i > 0
  round_robin,           // cyclic over the same eligible set
};

std::string_view to_string(SchedulerKind kind) noexcept;
/// Accepts the names printed by to_string plus "maxweight" and "modified".
std::optional<SchedulerKind> parse_scheduler_kind(std::string_view name) noexcept;

/// Selected link, or nullopt for an idle slot.
using Selection = std::optional<std::size_t>;

// The selection functions are pure in (q, s, draw). `draw` is 64 random bits
// used only to break ties (or, for random_connected, to pick a link).

Selection lcq_select(std::span<const Packets> q, std::span<const int> s, std::uint64_t draw);
Selection maxweight_multirate_select(std::span<const Packets> q, std::span<const int> s,
                                     std::uint64_t draw);
Selection modified_maxweight_select(std::span<const Packets> q, std::span<const int> s,
                                    std::uint64_t draw);
Selection random_connected_select(std::span<const Packets> q, std::span<const int> s,
                                  std::uint64_t draw);
/// Scans from pointer+1 cyclically; advances `pointer` to the served link.
Selection round_robin_select(std::span<const Packets> q, std::span<const int> s,
                             std::size_t& pointer);

/// Per-run scheduler: owns the tie-break stream and the round-robin pointer.
class Scheduler {
 public:
  Scheduler(SchedulerKind kind, std::uint64_t master_seed);

  SchedulerKind kind() const noexcept { return kind_; }
  Selection select(std::span<const Packets> q, std::span<const int> s, Slot t);

 private:
  SchedulerKind kind_;
  RngStream tie_break_;
  std::size_t rr_pointer_ = 0;
};

}  // namespace mwsched
