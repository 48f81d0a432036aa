#include "percrs/consistency.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "percrs/common.hpp"

namespace percrs {

namespace {

std::string trimmed(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

struct BinaryCounts {
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

// Scoring convention: a class absent from both truth and prediction is
// vacuously perfect; a class with instances but an empty ratio scores 0.
DimensionScore score_class(const BinaryCounts& c) {
  DimensionScore s;
  if (c.tp + c.fp + c.fn == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  s.precision = (c.tp + c.fp) > 0
                    ? static_cast<double>(c.tp) / (c.tp + c.fp)
                    : 0.0;
  s.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn)
                               : 0.0;
  s.f1 = (s.precision + s.recall) > 0.0
             ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
             : 0.0;
  return s;
}

}  // namespace

std::string build_judge_prompt(const Conversation& conversation,
                               const TraitCatalog& catalog) {
  if (conversation.utterances.empty()) {
    throw std::invalid_argument(
        "build_judge_prompt: conversation must be non-empty");
  }
  std::ostringstream out;
  for (TraitDimension d : kTraitOrder) {
    out << trait_name(d) << ":\n";
    for (Polarity p : {Polarity::Positive, Polarity::Negative}) {
      const auto& cell = catalog.cell(d, p);
      out << '[' << polarity_word(p) << "] " << cell.descriptors[0] << "; "
          << cell.descriptors[1] << "; " << cell.descriptors[2] << ";\n";
    }
    out << '\n';
  }
  out << "The conversational recommendation history is:\n"
      << render_transcript(conversation) << '\n';
  out << "Based on the given conversational recommendation history, "
         "recognize the user's personality traits according to the above "
         "definitions.\n\n";
  out << "The output must strictly follow the Python list format below:\n";
  out << "[\"Openness: Positive\", \"Conscientiousness: Positive\", "
         "\"Extraversion: Positive\", \"Agreeableness: Positive\", "
         "\"Neuroticism: Negative\"]\n";
  return out.str();
}

std::string render_verdict(const JudgeVerdict& verdict) {
  std::ostringstream out;
  out << '[';
  bool first = true;
  for (TraitDimension d : kTraitOrder) {
    if (!first) out << ", ";
    first = false;
    out << '"' << trait_name(d) << ": " << polarity_word(verdict.prediction(d))
        << '"';
  }
  out << ']';
  return out.str();
}

JudgeVerdict parse_verdict(std::string_view reply) {
  auto open = reply.find('[');
  if (open == std::string_view::npos) {
    throw VerdictParseError(VerdictParseErrorKind::NoBracketedList,
                            "verdict: no bracketed list in reply");
  }
  auto close = reply.find(']', open + 1);
  if (close == std::string_view::npos) {
    throw VerdictParseError(VerdictParseErrorKind::NoBracketedList,
                            "verdict: bracketed list never closes");
  }
  std::string_view body = reply.substr(open + 1, close - open - 1);

  // Entries split on commas; quotes (single or double) are optional.
  std::vector<std::string> entries;
  std::string current;
  bool in_quote = false;
  char quote = '"';
  for (char c : body) {
    if (in_quote) {
      if (c == quote) {
        in_quote = false;
      } else {
        current += c;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      in_quote = true;
      quote = c;
    } else if (c == ',') {
      entries.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  entries.push_back(current);

  JudgeVerdict verdict;
  std::array<bool, kTraitCount> seen{};
  for (const auto& raw_entry : entries) {
    std::string entry = trimmed(raw_entry);
    if (entry.empty()) continue;
    auto colon = entry.find(':');
    if (colon == std::string::npos) {
      throw VerdictParseError(VerdictParseErrorKind::MalformedEntry,
                              "verdict: entry \"" + entry +
                                  "\" is not Dimension: Polarity");
    }
    std::string dim_text = trimmed(entry.substr(0, colon));
    std::string pol_text = trimmed(entry.substr(colon + 1));
    auto dim = trait_from_name(dim_text);
    if (!dim) dim = trait_from_code(dim_text);
    if (!dim) {
      throw VerdictParseError(VerdictParseErrorKind::UnknownDimension,
                              "verdict: unknown dimension \"" + dim_text +
                                  "\"");
    }
    auto pol = polarity_from_word(pol_text);
    if (!pol) {
      throw VerdictParseError(VerdictParseErrorKind::UnknownPolarity,
                              "verdict: unknown polarity \"" + pol_text +
                                  "\"");
    }
    auto idx = static_cast<std::size_t>(*dim);
    if (seen[idx]) {
      throw VerdictParseError(VerdictParseErrorKind::DuplicateDimension,
                              "verdict: dimension \"" + dim_text +
                                  "\" appears twice");
    }
    seen[idx] = true;
    verdict.predictions[idx] = *pol;
  }
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    if (!seen[i]) {
      throw VerdictParseError(
          VerdictParseErrorKind::MissingDimension,
          "verdict: dimension \"" +
              std::string(trait_name(kTraitOrder[i])) + "\" is missing");
    }
  }
  return verdict;
}

JudgeVerdict judge_personality(const Conversation& conversation,
                               Backend& judge_backend,
                               const JudgeOptions& options,
                               const TraitCatalog& catalog) {
  ChatRequest request;
  request.messages.push_back(
      {ChatRole::SystemInstruction, build_judge_prompt(conversation, catalog)});
  request.messages.push_back(
      {ChatRole::UserTurn, "Classify the user's personality traits now."});
  request.model_name = options.model_name;
  request.temperature = options.temperature;
  request.max_reply_tokens = options.max_reply_tokens;

  std::string last_error;
  for (int attempt = 0; attempt < std::max(options.parse_attempts, 1);
       ++attempt) {
    Completion reply = complete(judge_backend, request, options.retry);
    try {
      return parse_verdict(reply.text);
    } catch (const VerdictParseError& e) {
      last_error = e.what();
    }
  }
  throw VerdictParseError(VerdictParseErrorKind::NoBracketedList,
                          "judge_personality: giving up after repeated "
                          "unparseable replies (" +
                              last_error + ")");
}

std::string_view averaging_mode_name(AveragingMode mode) {
  return mode == AveragingMode::MacroOverClasses ? "macro" : "positive-class";
}

ConsistencyReport score_consistency(
    std::span<const std::pair<JudgeVerdict, PersonalityProfile>> pairs,
    AveragingMode mode) {
  if (pairs.empty()) {
    throw UndefinedMetricError(
        "score_consistency: needs at least one (verdict, truth) pair");
  }
  ConsistencyReport report;
  report.n = static_cast<int>(pairs.size());
  report.mode = mode;

  for (std::size_t i = 0; i < kTraitCount; ++i) {
    TraitDimension d = kTraitOrder[i];
    BinaryCounts positive;  // Positive treated as the positive label
    BinaryCounts negative;  // Negative treated as the positive label
    for (const auto& [verdict, truth] : pairs) {
      bool pred_pos = verdict.prediction(d) == Polarity::Positive;
      bool true_pos = truth.polarity(d) == Polarity::Positive;
      if (pred_pos && true_pos) ++positive.tp;
      if (pred_pos && !true_pos) ++positive.fp;
      if (!pred_pos && true_pos) ++positive.fn;
      if (!pred_pos && !true_pos) ++negative.tp;
      if (!pred_pos && true_pos) ++negative.fp;
      if (pred_pos && !true_pos) ++negative.fn;
    }
    DimensionScore score;
    if (mode == AveragingMode::MacroOverClasses) {
      DimensionScore a = score_class(positive);
      DimensionScore b = score_class(negative);
      score.precision = (a.precision + b.precision) / 2.0;
      score.recall = (a.recall + b.recall) / 2.0;
      score.f1 = (a.f1 + b.f1) / 2.0;
    } else {
      score = score_class(positive);
    }
    report.per_dimension[i] = score;
    report.averaged.precision += score.precision / kTraitCount;
    report.averaged.recall += score.recall / kTraitCount;
    report.averaged.f1 += score.f1 / kTraitCount;
  }
  return report;
}

std::string consistency_to_csv(const ConsistencyReport& report) {
  std::ostringstream out;
  out << "dimension,P,R,F1\n";
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    const auto& s = report.per_dimension[i];
    out << trait_name(kTraitOrder[i]) << ',' << s.precision << ',' << s.recall
        << ',' << s.f1 << '\n';
  }
  out << "Averaged," << report.averaged.precision << ','
      << report.averaged.recall << ',' << report.averaged.f1 << '\n';
  return out.str();
}

std::vector<VerdictRecord> load_verdict_records(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("verdict file: cannot read " + path.string());
  }
  std::vector<VerdictRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("verdict file: malformed JSON on line " +
                        std::to_string(line_no) + ": " + e.what());
    }
    VerdictRecord record;
    record.session_id = j.value("session_id", "");
    record.source = j.value("source", "judge");
    for (TraitDimension d : kTraitOrder) {
      std::string key(trait_name(d));
      auto pol = polarity_from_word(j.value(key, ""));
      if (!pol) {
        throw ConfigError("verdict file: line " + std::to_string(line_no) +
                          " lacks a polarity for " + key);
      }
      record.verdict.predictions[static_cast<std::size_t>(d)] = *pol;
    }
    records.push_back(std::move(record));
  }
  return records;
}

void save_verdict_records(const std::filesystem::path& path,
                          std::span<const VerdictRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("verdict file: cannot write " + path.string());
  }
  for (const auto& record : records) {
    nlohmann::json j;
    j["session_id"] = record.session_id;
    j["source"] = record.source;
    for (TraitDimension d : kTraitOrder) {
      j[std::string(trait_name(d))] =
          std::string(polarity_word(record.verdict.prediction(d)));
    }
    out << j.dump() << '\n';
  }
}

}  // namespace percrs
