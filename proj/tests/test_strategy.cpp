#include "percrs/strategy.hpp"

#include <random>

#include <doctest.h>

using namespace percrs;

TEST_CASE("strategy catalog matches the documented table") {
  const auto& catalog = strategy_catalog();
  REQUIRE(catalog.size() == 6);
  CHECK(catalog[2].abbreviation == "S.P.");
  CHECK(std::string(catalog[0].definition).find("verifiable information") !=
        std::string::npos);
  CHECK(catalog[0].name == "Credibility");
  CHECK(catalog[5].name == "Logical Appeal");
}

TEST_CASE("parse_strategy_tags extracts and removes known tags") {
  auto parsed = parse_strategy_tags("It's quite popular. [Social Proof]");
  CHECK(parsed.clean_text == "It's quite popular.");
  REQUIRE(parsed.strategies.size() == 1);
  CHECK(parsed.strategies[0] == StrategyId::SocialProof);
  CHECK(parsed.unknown_tags.empty());

  auto untagged = parse_strategy_tags("No tags here.");
  CHECK(untagged.clean_text == "No tags here.");
  CHECK(untagged.strategies.empty());

  auto multi = parse_strategy_tags("A [Authority] B [Logical Appeal]");
  CHECK(multi.clean_text == "A B");
  REQUIRE(multi.strategies.size() == 2);
  CHECK(multi.strategies[0] == StrategyId::Authority);
  CHECK(multi.strategies[1] == StrategyId::LogicalAppeal);
}

TEST_CASE("parse_strategy_tags keeps unknown bracketed text") {
  auto parsed = parse_strategy_tags("Watch it [sic] today. [Social Proof]");
  CHECK(parsed.clean_text == "Watch it [sic] today.");
  REQUIRE(parsed.unknown_tags.size() == 1);
  CHECK(parsed.unknown_tags[0] == "sic");
  REQUIRE(parsed.strategies.size() == 1);
}

TEST_CASE("parse_strategy_tags tolerates case and inner spacing") {
  auto parsed = parse_strategy_tags("Great pick. [social  proof]");
  REQUIRE(parsed.strategies.size() == 1);
  CHECK(parsed.strategies[0] == StrategyId::SocialProof);
  // Abbreviations are not tag syntax.
  auto abbrev = parse_strategy_tags("Great pick. [S.P.]");
  CHECK(abbrev.strategies.empty());
  CHECK(abbrev.unknown_tags.size() == 1);
}

TEST_CASE("parse_strategy_tags is idempotent on clean text") {
  std::mt19937 rng(123);
  const char* fragments[] = {"Watch \"X\"",   "it rates 9/10", "trust me",
                             "experts agree", "[note]",        "you'll love it"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    int pieces = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < pieces; ++i) {
      if (i > 0) text += ' ';
      text += fragments[rng() % 6];
      if (rng() % 2 == 0) {
        text += ' ';
        text += render_strategy_tag(
            static_cast<StrategyId>(rng() % kStrategyCount));
      }
    }
    auto first = parse_strategy_tags(text);
    auto second = parse_strategy_tags(first.clean_text);
    CHECK(second.clean_text == first.clean_text);
    CHECK(second.strategies.empty());
  }
}

TEST_CASE("render then parse recovers the strategy id") {
  for (const auto& s : strategy_catalog()) {
    auto parsed = parse_strategy_tags("Take a look. " + render_strategy_tag(s.id));
    REQUIRE(parsed.strategies.size() == 1);
    CHECK(parsed.strategies[0] == s.id);
    CHECK(parsed.clean_text == "Take a look.");
  }
}

TEST_CASE("tally attributes each occurrence to five rows") {
  PersonalityProfile all_positive;
  StrategyUsageSample sample{all_positive, {StrategyId::SocialProof}};
  auto matrix = tally_strategy_usage(
      std::span<const StrategyUsageSample>(&sample, 1));
  CHECK(matrix.total() == 5);
  for (TraitDimension d : kTraitOrder) {
    auto row = StrategyFrequencyMatrix::row_index(d, Polarity::Positive);
    CHECK(matrix.counts[row][static_cast<std::size_t>(
              StrategyId::SocialProof)] == 1);
    auto neg_row = StrategyFrequencyMatrix::row_index(d, Polarity::Negative);
    CHECK(matrix.counts[neg_row][static_cast<std::size_t>(
              StrategyId::SocialProof)] == 0);
  }
}

TEST_CASE("tally of an empty input is the zero matrix") {
  auto matrix =
      tally_strategy_usage(std::span<const StrategyUsageSample>());
  CHECK(matrix.total() == 0);
}

TEST_CASE("opposite profiles fill disjoint rows") {
  PersonalityProfile positive;
  PersonalityProfile negative;
  for (TraitDimension d : kTraitOrder) negative.set(d, Polarity::Negative);
  std::vector<StrategyUsageSample> samples = {
      {positive, {StrategyId::Credibility}},
      {negative, {StrategyId::Authority}},
  };
  auto matrix = tally_strategy_usage(
      std::span<const StrategyUsageSample>(samples));
  CHECK(matrix.total() == 10);
  for (TraitDimension d : kTraitOrder) {
    auto pos_row = StrategyFrequencyMatrix::row_index(d, Polarity::Positive);
    auto neg_row = StrategyFrequencyMatrix::row_index(d, Polarity::Negative);
    CHECK(matrix.counts[pos_row][0] == 1);  // Credibility
    CHECK(matrix.counts[pos_row][1] == 0);
    CHECK(matrix.counts[neg_row][1] == 1);  // Authority
    CHECK(matrix.counts[neg_row][0] == 0);
  }
}

TEST_CASE("matrix count total is five times the tag occurrences") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<StrategyUsageSample> samples;
    std::size_t occurrences = 0;
    int count = static_cast<int>(rng() % 8);
    for (int i = 0; i < count; ++i) {
      StrategyUsageSample sample;
      for (std::size_t d = 0; d < kTraitCount; ++d) {
        sample.profile.polarities[d] =
            rng() % 2 == 0 ? Polarity::Positive : Polarity::Negative;
      }
      int tags = static_cast<int>(rng() % 5);
      for (int t = 0; t < tags; ++t) {
        sample.occurrences.push_back(
            static_cast<StrategyId>(rng() % kStrategyCount));
      }
      occurrences += sample.occurrences.size();
      samples.push_back(std::move(sample));
    }
    auto matrix = tally_strategy_usage(
        std::span<const StrategyUsageSample>(samples));
    CHECK(matrix.total() == 5 * occurrences);
  }
}

TEST_CASE("normalized rows sum to one and csv carries the header") {
  PersonalityProfile profile;
  StrategyUsageSample sample{
      profile, {StrategyId::Credibility, StrategyId::Credibility,
                StrategyId::LogicalAppeal}};
  auto matrix = tally_strategy_usage(
      std::span<const StrategyUsageSample>(&sample, 1));
  auto row = matrix.normalized_row(
      StrategyFrequencyMatrix::row_index(TraitDimension::Openness,
                                         Polarity::Positive));
  double sum = 0;
  for (double v : row) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

  auto zero_row = matrix.normalized_row(
      StrategyFrequencyMatrix::row_index(TraitDimension::Openness,
                                         Polarity::Negative));
  for (double v : zero_row) CHECK(v == 0.0);

  auto csv = matrix.to_csv();
  CHECK(csv.rfind("group,Cr.,Au.,S.P.,E.R.,P.R.,L.A.\n", 0) == 0);
  CHECK(csv.find("OPE+") != std::string::npos);
  CHECK(csv.find("NEU-") != std::string::npos);
}
