#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "percrs/dialogue.hpp"

namespace percrs {

// Lowercases, strips punctuation except intra-word apostrophes, splits on
// whitespace. No stopword removal. Non-ASCII bytes pass through as word
// characters.
std::vector<std::string> tokenize(std::string_view text);

// One document per analysis group: all user-role utterance text from the
// conversations in that group, concatenated.
struct TraitCorpus {
  std::string group;     // e.g. "OPE+"
  std::string document;
};

enum class CorpusGranularity { PerTraitPolarity, PerConversation };

// PerTraitPolarity: the 10 trait rows, each conversation contributing its
// user text to the 5 rows its profile exhibits. PerConversation: one
// document per session.
std::vector<TraitCorpus> build_corpora(
    std::span<const Conversation> conversations,
    CorpusGranularity granularity = CorpusGranularity::PerTraitPolarity);

struct ScoredToken {
  std::string token;
  double score;
};

struct TfIdfTable {
  std::vector<std::string> groups;
  std::vector<std::vector<ScoredToken>> ranked;  // by group, descending score
  std::vector<std::string> vocabulary;           // sorted
  int document_count = 0;
};

// tf = raw count / document token count; idf = ln((1+N)/(1+df)) + 1;
// score = tf * idf. Rankings order by descending score with lexicographic
// tie-breaks. Requires at least two corpora.
TfIdfTable build_tfidf(std::span<const TraitCorpus> corpora);

// Top-k tokens for a group. Throws std::invalid_argument on an unknown
// group.
std::vector<std::string> representative_words(const TfIdfTable& table,
                                              std::string_view group,
                                              std::size_t k);

// "group,rank,token,score" rows, optionally truncated to the top k per
// group (k = 0 keeps everything).
std::string tfidf_to_csv(const TfIdfTable& table, std::size_t top_k = 0);

}  // namespace percrs
