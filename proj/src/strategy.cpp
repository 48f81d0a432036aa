#include "percrs/strategy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace percrs {

namespace {

constexpr std::array<PersuasionStrategy, kStrategyCount> kCatalog = {{
    {StrategyId::Credibility, "Credibility", "Cr.",
     "Provides factual, objective, and verifiable information to build trust "
     "in recommendations.",
     "Emphasize the importance of providing factual, objective, and "
     "verifiable information to build trust in recommendations."},
    {StrategyId::Authority, "Authority", "Au.",
     "Associating recommendations with experts or organizations increases "
     "trust.",
     "Enhance the perceived credibility of recommendations by leveraging "
     "endorsements from trusted sources."},
    {StrategyId::SocialProof, "Social Proof", "S.P.",
     "Uses collective behavior influence by highlighting positive feedback "
     "and high ratings.",
     "Utilize the influence of collective behavior by showcasing positive "
     "feedback and high ratings from other users."},
    {StrategyId::EmotionalResonance, "Emotional Resonance", "E.R.",
     "Appeals to emotions by framing recommendations as sources of positive "
     "experiences.",
     "Seek to create a deeper connection with users by appealing to their "
     "emotions."},
    {StrategyId::PersonalizedRelevance, "Personalized Relevance", "P.R.",
     "Aligns recommendations with user preferences and past behaviors.",
     "Align recommendations with the user's individual values, preferences, "
     "and past behaviors to enhance relevance and personalization."},
    {StrategyId::LogicalAppeal, "Logical Appeal", "L.A.",
     "Explains the reasoning behind recommendations, helping users understand "
     "why items align with their interests.",
     "Persuade users by presenting clear, factual, and rational arguments, "
     "emphasizing the benefits and logical reasons for the recommendation."},
}};

// Lowercases and collapses internal whitespace runs to single spaces, so
// "[social  proof]" still matches.
std::string normalize_token(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char raw : s) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

bool is_punct_joiner(char c) {
  return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' ||
         c == '?' || c == ')';
}

}  // namespace

const std::array<PersuasionStrategy, kStrategyCount>& strategy_catalog() {
  return kCatalog;
}

const PersuasionStrategy& strategy_info(StrategyId id) {
  return kCatalog[static_cast<std::size_t>(id)];
}

std::optional<StrategyId> strategy_from_name(std::string_view name) {
  std::string needle = normalize_token(name);
  for (const auto& s : kCatalog) {
    if (needle == normalize_token(s.name)) return s.id;
  }
  return std::nullopt;
}

std::string render_strategy_tag(StrategyId id) {
  return "[" + std::string(strategy_info(id).name) + "]";
}

ParsedUtterance parse_strategy_tags(std::string_view raw) {
  ParsedUtterance out;
  std::string& clean = out.clean_text;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] != '[') {
      clean += raw[i];
      ++i;
      continue;
    }
    std::size_t close = raw.find(']', i + 1);
    if (close == std::string_view::npos) {
      clean.append(raw.substr(i));
      break;
    }
    std::string_view token = raw.substr(i + 1, close - i - 1);
    auto id = strategy_from_name(token);
    if (!id) {
      out.unknown_tags.emplace_back(token);
      clean.append(raw.substr(i, close - i + 1));
      i = close + 1;
      continue;
    }
    out.strategies.push_back(*id);
    // Swallow the whitespace the tag leaves behind: trailing spaces already
    // emitted plus spaces following the tag, re-inserting one separator only
    // when the tag sat between two words.
    bool had_left_ws = false;
    while (!clean.empty() &&
           std::isspace(static_cast<unsigned char>(clean.back()))) {
      clean.pop_back();
      had_left_ws = true;
    }
    std::size_t next = close + 1;
    bool had_right_ws = false;
    while (next < raw.size() &&
           std::isspace(static_cast<unsigned char>(raw[next]))) {
      ++next;
      had_right_ws = true;
    }
    if (!clean.empty() && next < raw.size()) {
      if ((had_left_ws || had_right_ws) && !is_punct_joiner(raw[next])) {
        clean += ' ';
      }
    }
    i = next;
  }
  return out;
}

std::size_t StrategyFrequencyMatrix::row_index(TraitDimension d, Polarity p) {
  return 2 * static_cast<std::size_t>(d) + (p == Polarity::Positive ? 0 : 1);
}

std::string StrategyFrequencyMatrix::row_label(std::size_t row) {
  TraitDimension d = kTraitOrder[row / 2];
  Polarity p = (row % 2 == 0) ? Polarity::Positive : Polarity::Negative;
  return std::string(trait_code(d)) + polarity_char(p);
}

void StrategyFrequencyMatrix::add(TraitDimension d, Polarity p, StrategyId s,
                                  std::uint64_t n) {
  counts[row_index(d, p)][static_cast<std::size_t>(s)] += n;
}

std::uint64_t StrategyFrequencyMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) {
    for (auto c : row) sum += c;
  }
  return sum;
}

std::array<double, kStrategyCount> StrategyFrequencyMatrix::normalized_row(
    std::size_t row) const {
  std::array<double, kStrategyCount> out{};
  std::uint64_t sum = 0;
  for (auto c : counts[row]) sum += c;
  if (sum == 0) return out;
  for (std::size_t j = 0; j < kStrategyCount; ++j) {
    out[j] = static_cast<double>(counts[row][j]) / static_cast<double>(sum);
  }
  return out;
}

StrategyFrequencyMatrix& StrategyFrequencyMatrix::operator+=(
    const StrategyFrequencyMatrix& other) {
  for (std::size_t r = 0; r < counts.size(); ++r) {
    for (std::size_t c = 0; c < kStrategyCount; ++c) {
      counts[r][c] += other.counts[r][c];
    }
  }
  return *this;
}

std::string StrategyFrequencyMatrix::to_csv(bool normalized) const {
  std::ostringstream out;
  out << "group";
  for (const auto& s : kCatalog) out << ',' << s.abbreviation;
  out << '\n';
  for (std::size_t r = 0; r < counts.size(); ++r) {
    out << row_label(r);
    if (normalized) {
      auto freq = normalized_row(r);
      for (double f : freq) out << ',' << f;
    } else {
      for (auto c : counts[r]) out << ',' << c;
    }
    out << '\n';
  }
  return out.str();
}

StrategyFrequencyMatrix tally_strategy_usage(
    std::span<const StrategyUsageSample> samples) {
  StrategyFrequencyMatrix matrix;
  for (const auto& sample : samples) {
    for (StrategyId s : sample.occurrences) {
      for (TraitDimension d : kTraitOrder) {
        matrix.add(d, sample.profile.polarity(d), s);
      }
    }
  }
  return matrix;
}

}  // namespace percrs
