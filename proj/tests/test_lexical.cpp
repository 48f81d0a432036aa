#include "percrs/lexical.hpp"

#include <cmath>
#include <map>

#include <doctest.h>

#include "test_support.hpp"

using namespace percrs;
using percrs::testing::golden_seed;
using percrs::testing::golden_system_script;
using percrs::testing::golden_user_script;
using percrs::testing::scripted_config;

namespace {

// Independent two-loop recomputation of the documented tf-idf variant.
std::map<std::string, double> naive_tfidf(
    const std::vector<TraitCorpus>& corpora, std::size_t doc) {
  std::map<std::string, double> scores;
  auto tokens = tokenize(corpora[doc].document);
  std::map<std::string, int> counts;
  for (const auto& t : tokens) ++counts[t];
  for (const auto& [token, count] : counts) {
    int df = 0;
    for (const auto& corpus : corpora) {
      auto other = tokenize(corpus.document);
      for (const auto& t : other) {
        if (t == token) {
          ++df;
          break;
        }
      }
    }
    double tf = static_cast<double>(count) / tokens.size();
    double idf =
        std::log((1.0 + corpora.size()) / (1.0 + df)) + 1.0;
    scores[token] = tf * idf;
  }
  return scores;
}

const std::vector<TraitCorpus>& toy_corpus() {
  static const std::vector<TraitCorpus> corpora = {
      {"doc1", "curious new adventure explore new topics"},
      {"doc2", "familiar same usual same known comfort"},
      {"doc3", "maybe might unsure maybe little perhaps"},
      {"doc4", "thank you appreciate help thank you kindly"},
  };
  return corpora;
}

}  // namespace

TEST_CASE("tokenize lowercases and keeps intra-word apostrophes") {
  CHECK(tokenize("Maybe, I'm unsure!") ==
        std::vector<std::string>{"maybe", "i'm", "unsure"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("Thank you. Thank you.") ==
        std::vector<std::string>{"thank", "you", "thank", "you"});
  CHECK(tokenize("'quoted' words") ==
        std::vector<std::string>{"quoted", "words"});
  CHECK(tokenize("plot-driven films") ==
        std::vector<std::string>{"plot", "driven", "films"});
}

TEST_CASE("rarer tokens outrank common ones at equal tf") {
  std::vector<TraitCorpus> docs = {{"d1", "a b"}, {"d2", "a c"}};
  auto table = build_tfidf(docs);
  double score_a = 0;
  double score_b = 0;
  for (const auto& [token, score] : table.ranked[0]) {
    if (token == "a") score_a = score;
    if (token == "b") score_b = score;
  }
  CHECK(score_b > score_a);
}

TEST_CASE("toy corpus matches the naive oracle") {
  const auto& corpora = toy_corpus();
  auto table = build_tfidf(corpora);
  REQUIRE(table.document_count == 4);
  for (std::size_t d = 0; d < corpora.size(); ++d) {
    auto oracle = naive_tfidf(corpora, d);
    REQUIRE(table.ranked[d].size() == oracle.size());
    for (const auto& [token, score] : table.ranked[d]) {
      REQUIRE(oracle.count(token) == 1);
      CHECK(score == doctest::Approx(oracle[token]).epsilon(1e-9));
    }
  }
}

TEST_CASE("representative_words returns the oracle's top-k") {
  const auto& corpora = toy_corpus();
  auto table = build_tfidf(corpora);
  for (std::size_t k : {1u, 3u, 5u}) {
    for (std::size_t d = 0; d < corpora.size(); ++d) {
      auto words = representative_words(table, corpora[d].group, k);
      auto oracle = naive_tfidf(corpora, d);
      std::vector<std::pair<double, std::string>> ranked;
      for (const auto& [token, score] : oracle) {
        ranked.emplace_back(-score, token);
      }
      std::sort(ranked.begin(), ranked.end());
      REQUIRE(words.size() == std::min<std::size_t>(k, ranked.size()));
      for (std::size_t i = 0; i < words.size(); ++i) {
        CHECK(words[i] == ranked[i].second);
      }
    }
  }

  CHECK(representative_words(table, "doc1", 0).empty());
  auto all = representative_words(table, "doc1", 999);
  CHECK(all.size() == table.ranked[0].size());
  CHECK_THROWS_AS(representative_words(table, "nope", 3),
                  std::invalid_argument);
}

TEST_CASE("tie order is deterministic and lexicographic") {
  std::vector<TraitCorpus> docs = {{"d1", "zeta alpha"}, {"d2", "other words"}};
  auto table = build_tfidf(docs);
  // Both tokens in d1 have identical tf and df; alphabetical order breaks
  // the tie.
  REQUIRE(table.ranked[0].size() == 2);
  CHECK(table.ranked[0][0].token == "alpha");
  CHECK(table.ranked[0][1].token == "zeta");
}

TEST_CASE("relative ranks survive document duplication") {
  std::vector<TraitCorpus> docs = {
      {"d1", "curious curious new adventure"},
      {"d2", "familiar same usual"},
  };
  auto table = build_tfidf(docs);
  std::vector<TraitCorpus> doubled = {
      {"d1", docs[0].document + " " + docs[0].document},
      {"d2", docs[1].document},
  };
  auto table2 = build_tfidf(doubled);
  REQUIRE(table.ranked[0].size() == table2.ranked[0].size());
  for (std::size_t i = 0; i < table.ranked[0].size(); ++i) {
    CHECK(table.ranked[0][i].token == table2.ranked[0][i].token);
  }
}

TEST_CASE("corpora contain user utterances only") {
  auto config =
      scripted_config(golden_user_script(), golden_system_script(), 14);
  auto convo = run_session(golden_seed(), PersonalityProfile{}, config);
  std::vector<Conversation> conversations = {convo};
  auto corpora = build_corpora(conversations);
  REQUIRE(corpora.size() == 10);
  for (const auto& corpus : corpora) {
    // "knowledge graph" appears only in system utterances.
    CHECK(corpus.document.find("knowledge graph") == std::string::npos);
  }
  // The all-positive profile fills the five positive rows.
  int populated = 0;
  for (const auto& corpus : corpora) {
    if (!corpus.document.empty()) {
      ++populated;
      CHECK(corpus.document.find("credible sources") != std::string::npos);
    }
  }
  CHECK(populated == 5);

  auto per_convo =
      build_corpora(conversations, CorpusGranularity::PerConversation);
  REQUIRE(per_convo.size() == 1);
  CHECK(per_convo[0].group == convo.session_id);
}

TEST_CASE("fewer than two corpora is an error") {
  std::vector<TraitCorpus> one = {{"d1", "alone"}};
  CHECK_THROWS_AS(build_tfidf(one), std::invalid_argument);
}

TEST_CASE("csv emission is rank ordered") {
  auto table = build_tfidf(toy_corpus());
  auto csv = tfidf_to_csv(table, 2);
  CHECK(csv.rfind("group,rank,token,score\n", 0) == 0);
  CHECK(csv.find("doc1,1,") != std::string::npos);
  CHECK(csv.find("doc1,2,") != std::string::npos);
  CHECK(csv.find("doc1,3,") == std::string::npos);  // truncated at k=2
}
