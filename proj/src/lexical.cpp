#include "percrs/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "percrs/common.hpp"

namespace percrs {

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::string normalized;
  normalized.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      normalized += static_cast<char>(std::tolower(c));
    } else if (c == '\'' && i > 0 && i + 1 < text.size() &&
               is_word_byte(static_cast<unsigned char>(text[i - 1])) &&
               is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      normalized += '\'';
    } else {
      normalized += ' ';
    }
  }
  std::vector<std::string> tokens;
  std::istringstream stream(normalized);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

std::vector<TraitCorpus> build_corpora(
    std::span<const Conversation> conversations,
    CorpusGranularity granularity) {
  std::vector<TraitCorpus> corpora;
  if (granularity == CorpusGranularity::PerConversation) {
    for (const auto& convo : conversations) {
      TraitCorpus corpus;
      corpus.group = convo.session_id;
      for (const auto& u : convo.utterances) {
        if (u.role != Role::User) continue;
        if (!corpus.document.empty()) corpus.document += ' ';
        corpus.document += u.text;
      }
      corpora.push_back(std::move(corpus));
    }
    return corpora;
  }

  corpora.resize(2 * kTraitCount);
  for (std::size_t row = 0; row < corpora.size(); ++row) {
    corpora[row].group = StrategyFrequencyMatrix::row_label(row);
  }
  for (const auto& convo : conversations) {
    std::string user_text;
    for (const auto& u : convo.utterances) {
      if (u.role != Role::User) continue;
      if (!user_text.empty()) user_text += ' ';
      user_text += u.text;
    }
    if (user_text.empty()) continue;
    for (TraitDimension d : kTraitOrder) {
      auto row = StrategyFrequencyMatrix::row_index(
          d, convo.profile.polarity(d));
      auto& doc = corpora[row].document;
      if (!doc.empty()) doc += ' ';
      doc += user_text;
    }
  }
  return corpora;
}

TfIdfTable build_tfidf(std::span<const TraitCorpus> corpora) {
  if (corpora.size() < 2) {
    throw std::invalid_argument("build_tfidf: needs at least two corpora");
  }
  const std::size_t doc_count = corpora.size();

  std::vector<std::map<std::string, std::size_t>> term_counts(doc_count);
  std::vector<std::size_t> doc_tokens(doc_count, 0);
  std::map<std::string, std::size_t> document_frequency;
  for (std::size_t d = 0; d < doc_count; ++d) {
    for (auto& token : tokenize(corpora[d].document)) {
      ++term_counts[d][token];
    }
    for (const auto& [token, count] : term_counts[d]) {
      doc_tokens[d] += count;
      ++document_frequency[token];
    }
  }

  TfIdfTable table;
  table.document_count = static_cast<int>(doc_count);
  for (const auto& [token, df] : document_frequency) {
    table.vocabulary.push_back(token);
  }

  const double n = static_cast<double>(doc_count);
  for (std::size_t d = 0; d < doc_count; ++d) {
    table.groups.push_back(corpora[d].group);
    std::vector<ScoredToken> scored;
    scored.reserve(term_counts[d].size());
    for (const auto& [token, count] : term_counts[d]) {
      double tf = static_cast<double>(count) /
                  static_cast<double>(doc_tokens[d]);
      double df = static_cast<double>(document_frequency.at(token));
      double idf = std::log((1.0 + n) / (1.0 + df)) + 1.0;
      scored.push_back({token, tf * idf});
    }
    std::sort(scored.begin(), scored.end(),
              [](const ScoredToken& a, const ScoredToken& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.token < b.token;
              });
    table.ranked.push_back(std::move(scored));
  }
  return table;
}

std::vector<std::string> representative_words(const TfIdfTable& table,
                                              std::string_view group,
                                              std::size_t k) {
  for (std::size_t i = 0; i < table.groups.size(); ++i) {
    if (table.groups[i] != group) continue;
    std::vector<std::string> words;
    std::size_t take = std::min(k, table.ranked[i].size());
    words.reserve(take);
    for (std::size_t j = 0; j < take; ++j) {
      words.push_back(table.ranked[i][j].token);
    }
    return words;
  }
  throw std::invalid_argument("representative_words: unknown group \"" +
                              std::string(group) + "\"");
}

std::string tfidf_to_csv(const TfIdfTable& table, std::size_t top_k) {
  std::ostringstream out;
  out << "group,rank,token,score\n";
  for (std::size_t i = 0; i < table.groups.size(); ++i) {
    std::size_t limit = top_k == 0
                            ? table.ranked[i].size()
                            : std::min(top_k, table.ranked[i].size());
    for (std::size_t j = 0; j < limit; ++j) {
      out << table.groups[i] << ',' << (j + 1) << ','
          << table.ranked[i][j].token << ',' << table.ranked[i][j].score
          << '\n';
    }
  }
  return out.str();
}

}  // namespace percrs
