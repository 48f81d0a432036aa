#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "percrs/dialogue.hpp"
#include "percrs/outcome.hpp"
#include "percrs/persona.hpp"

namespace percrs {

// A judge's polarity call for each of the five dimensions (order O,C,E,A,N).
struct JudgeVerdict {
  std::array<Polarity, kTraitCount> predictions{
      Polarity::Positive, Polarity::Positive, Polarity::Positive,
      Polarity::Positive, Polarity::Positive};

  Polarity prediction(TraitDimension d) const {
    return predictions[static_cast<std::size_t>(d)];
  }

  friend bool operator==(const JudgeVerdict&, const JudgeVerdict&) = default;
};

enum class VerdictParseErrorKind {
  NoBracketedList,
  MalformedEntry,
  UnknownDimension,
  UnknownPolarity,
  DuplicateDimension,
  MissingDimension,
};

class VerdictParseError : public std::runtime_error {
 public:
  VerdictParseError(VerdictParseErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  VerdictParseErrorKind kind() const { return kind_; }

 private:
  VerdictParseErrorKind kind_;
};

// The personality-recognition instruction: both polarity descriptor lists
// for every dimension, the transcript, and the output-format exemplar.
// Throws std::invalid_argument on an empty conversation.
std::string build_judge_prompt(
    const Conversation& conversation,
    const TraitCatalog& catalog = TraitCatalog::bf4crs_default());

// ["Openness: Positive", ..., "Neuroticism: Negative"]
std::string render_verdict(const JudgeVerdict& verdict);

// Parses the first bracketed list in the reply; tolerant of surrounding
// prose, quote style, and case. All five dimensions must appear exactly
// once; each failure mode carries its own VerdictParseErrorKind.
JudgeVerdict parse_verdict(std::string_view reply);

JudgeVerdict judge_personality(const Conversation& conversation,
                               Backend& judge_backend,
                               const JudgeOptions& options = {},
                               const TraitCatalog& catalog =
                                   TraitCatalog::bf4crs_default());

// Macro averages over the two polarity classes per dimension; the
// positive-class mode scores Positive as the positive label instead.
enum class AveragingMode { MacroOverClasses, PositiveClass };

std::string_view averaging_mode_name(AveragingMode mode);

struct DimensionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ConsistencyReport {
  std::array<DimensionScore, kTraitCount> per_dimension;
  DimensionScore averaged;  // unweighted mean over the five dimensions
  int n = 0;
  AveragingMode mode = AveragingMode::MacroOverClasses;
};

ConsistencyReport score_consistency(
    std::span<const std::pair<JudgeVerdict, PersonalityProfile>> pairs,
    AveragingMode mode = AveragingMode::MacroOverClasses);

std::string consistency_to_csv(const ConsistencyReport& report);

// Verdict files: one JSON record per line
//   {"session_id": "...", "source": "judge", "Openness": "Positive", ...}
struct VerdictRecord {
  std::string session_id;
  std::string source;  // "judge" | "human" | "truth"
  JudgeVerdict verdict;
};

std::vector<VerdictRecord> load_verdict_records(
    const std::filesystem::path& path);
void save_verdict_records(const std::filesystem::path& path,
                          std::span<const VerdictRecord> records);

}  // namespace percrs
