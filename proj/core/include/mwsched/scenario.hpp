#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mwsched/model.hpp"
#include "mwsched/schedulers.hpp"

namespace mwsched {

enum class ChannelKind { onoff, multirate };
enum class ShapeKind { uniform, tiered, explicit_list };
enum class ExperimentTag { custom, fig1, fig2, counterexample };

std::string_view to_string(ExperimentTag tag) noexcept;
std::string_view to_string(ArrivalLaw law) noexcept;

/// A complete, validated experiment description. See README for the file grammar.
struct Scenario {
  std::size_t links = 0;

  ChannelKind channel = ChannelKind::onoff;
  std::optional<double> on_probability;  // symmetric ON/OFF
  std::vector<double> on_probabilities;  // per-link ON/OFF
  std::vector<double> rate_pmf;          // multirate, identical across links

  ArrivalLaw law = ArrivalLaw::bernoulli;
  ShapeKind shape = ShapeKind::uniform;
  std::vector<double> shape_values;      // explicit_list only
  std::optional<double> target_rho;
  std::optional<double> rate;            // explicit uniform per-link rate
  std::vector<double> rates;             // explicit per-link rates

  SchedulerKind scheduler = SchedulerKind::lcq;

  Slot slots = 1'000'000;
  std::uint64_t seed = 1;
  int replications = 1;
  double warmup = 0.0;
  ExperimentTag experiment = ExperimentTag::custom;
};

/// Parses the sectioned key = value format. Unknown sections or keys,
/// duplicates, and invalid values throw ValidationError naming the key.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Re-checks cross-field constraints; parse_scenario calls this.
void validate(const Scenario& scenario);

/// Canonical document with every default written out. Parses back to the same scenario.
std::string echo(const Scenario& scenario);

/// Rate shape before scaling (uniform = all ones, tiered = 1,..,2,..,4).
std::vector<double> rate_shape(const Scenario& scenario);

/// The three-tier pattern used for heterogeneous traffic: (N-1)/2 links at
/// weight 1, (N-1)/2 at weight 2, one at weight 4. N must be odd and >= 3.
std::vector<double> tiered_shape(std::size_t links);

/// Concrete models for one run.
struct ResolvedScenario {
  ChannelModel channels;
  ArrivalModel arrivals;
  SchedulerKind scheduler;
  std::vector<double> lambda;
  /// Load of lambda: exact for ON/OFF, an upper bound for multi-rate.
  /// Empty when no exact value is available.
  std::optional<double> rho;
  std::string rho_note;  // why rho is missing or approximate
};

ResolvedScenario resolve(const Scenario& scenario);

/// Same scenario with a different link count. Per-link lists cannot be resized.
Scenario with_links(const Scenario& scenario, std::size_t links);

}  // namespace mwsched
