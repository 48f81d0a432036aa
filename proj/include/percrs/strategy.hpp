#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "percrs/persona.hpp"

namespace percrs {

enum class StrategyId : int {
  Credibility = 0,
  Authority = 1,
  SocialProof = 2,
  EmotionalResonance = 3,
  PersonalizedRelevance = 4,
  LogicalAppeal = 5,
};

inline constexpr std::size_t kStrategyCount = 6;

struct PersuasionStrategy {
  StrategyId id;
  std::string_view name;          // "Social Proof"
  std::string_view abbreviation;  // "S.P."
  std::string_view definition;    // catalog description
  std::string_view prompt_definition;  // imperative phrasing used in the system prompt
};

// The six strategies in catalog order.
const std::array<PersuasionStrategy, kStrategyCount>& strategy_catalog();

const PersuasionStrategy& strategy_info(StrategyId id);
std::optional<StrategyId> strategy_from_name(std::string_view name);  // case-insensitive

// "[Social Proof]" -- the annotation the system agent is instructed to
// append after applying a strategy.
std::string render_strategy_tag(StrategyId id);

struct ParsedUtterance {
  std::string clean_text;
  std::vector<StrategyId> strategies;     // in order of appearance
  std::vector<std::string> unknown_tags;  // bracketed tokens left in clean_text
};

// Extracts every bracketed strategy-name tag (case-insensitive full-name
// match) from a raw system reply. Known tags are removed along with the
// whitespace they would leave behind; unknown bracketed text stays in
// clean_text and is reported in unknown_tags. Re-parsing clean_text is a
// no-op.
ParsedUtterance parse_strategy_tags(std::string_view raw);

// One conversation's contribution to the strategy-frequency matrix: the
// profile it ran under plus every strategy occurrence parsed from its
// system utterances.
struct StrategyUsageSample {
  PersonalityProfile profile;
  std::vector<StrategyId> occurrences;
};

// 10 trait-polarity rows (O+,O-,C+,...,N-) by 6 strategy columns. A
// conversation increments the cell for each of the 5 polarities its
// profile exhibits, once per tag occurrence.
struct StrategyFrequencyMatrix {
  std::array<std::array<std::uint64_t, kStrategyCount>, 2 * kTraitCount>
      counts{};

  static std::size_t row_index(TraitDimension d, Polarity p);
  static std::string row_label(std::size_t row);  // "OPE+", "OPE-", ...

  void add(TraitDimension d, Polarity p, StrategyId s, std::uint64_t n = 1);
  std::uint64_t total() const;

  // Row frequencies summing to 1; all-zero rows stay all-zero.
  std::array<double, kStrategyCount> normalized_row(std::size_t row) const;

  StrategyFrequencyMatrix& operator+=(const StrategyFrequencyMatrix& other);

  // Header: group,Cr.,Au.,S.P.,E.R.,P.R.,L.A.
  std::string to_csv(bool normalized = false) const;
};

StrategyFrequencyMatrix tally_strategy_usage(
    std::span<const StrategyUsageSample> samples);

}  // namespace percrs
