#include "percrs/persona.hpp"

#include <array>
#include <fstream>
#include <set>

#include <doctest.h>

#include "percrs/common.hpp"
#include "test_support.hpp"

using namespace percrs;

TEST_CASE("enumerate_profiles covers the full space in canonical order") {
  auto all = enumerate_profiles();
  REQUIRE(all.size() == 32);

  PersonalityProfile all_positive;
  CHECK(all.front() == all_positive);

  PersonalityProfile all_negative;
  for (TraitDimension d : kTraitOrder) all_negative.set(d, Polarity::Negative);
  CHECK(all.back() == all_negative);

  std::set<std::string> codes;
  for (const auto& p : all) codes.insert(profile_code(p));
  CHECK(codes.size() == 32);  // pairwise distinct
}

TEST_CASE("sample_profile is a pure function of the seed") {
  CHECK(sample_profile(42) == sample_profile(42));
  CHECK(sample_profile(7) == sample_profile(7));
}

TEST_CASE("sample_profile is close to uniform per dimension") {
  std::array<int, kTraitCount> positives{};
  std::set<std::string> seen;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    auto p = sample_profile(static_cast<std::uint64_t>(i));
    seen.insert(profile_code(p));
    for (std::size_t d = 0; d < kTraitCount; ++d) {
      if (p.polarities[d] == Polarity::Positive) ++positives[d];
    }
  }
  for (std::size_t d = 0; d < kTraitCount; ++d) {
    double freq = positives[d] / static_cast<double>(n);
    CHECK(freq >= 0.45);
    CHECK(freq <= 0.55);
  }
  CHECK(seen.size() == 32);  // all profiles observed
}

TEST_CASE("render_personality_instruction picks the right catalog cells") {
  PersonalityProfile all_positive;
  auto text = render_personality_instruction(all_positive);
  CHECK(text.find("Receptive to new content") != std::string::npos);
  CHECK(text.find("Easily discouraged") != std::string::npos);  // NEU+
  CHECK(text.find("Prefer familiar content") == std::string::npos);

  PersonalityProfile mixed;
  mixed.set(TraitDimension::Neuroticism, Polarity::Negative);
  auto mixed_text = render_personality_instruction(mixed);
  CHECK(mixed_text.find("Emotionally stable") != std::string::npos);
  CHECK(mixed_text.find("Easily discouraged") == std::string::npos);
  CHECK(text != mixed_text);
}

TEST_CASE("instruction contains exactly one polarity cell per dimension") {
  const auto& catalog = TraitCatalog::bf4crs_default();
  for (const auto& profile : enumerate_profiles()) {
    auto text = render_personality_instruction(profile);
    for (TraitDimension d : kTraitOrder) {
      const auto& chosen = catalog.cell(d, profile.polarity(d));
      const auto& other =
          catalog.cell(d, profile.polarity(d) == Polarity::Positive
                              ? Polarity::Negative
                              : Polarity::Positive);
      for (const auto& phrase : chosen.descriptors) {
        CHECK(text.find(phrase) != std::string::npos);
      }
      for (const auto& phrase : other.descriptors) {
        CHECK(text.find(phrase) == std::string::npos);
      }
    }
  }
}

TEST_CASE("profile_code examples and bijectivity") {
  PersonalityProfile all_positive;
  CHECK(profile_code(all_positive) == "OPE+/CON+/EXT+/AGR+/NEU+");

  PersonalityProfile all_negative;
  for (TraitDimension d : kTraitOrder) all_negative.set(d, Polarity::Negative);
  CHECK(profile_code(all_negative) == "OPE-/CON-/EXT-/AGR-/NEU-");

  PersonalityProfile mixed;
  mixed.set(TraitDimension::Conscientiousness, Polarity::Negative);
  mixed.set(TraitDimension::Agreeableness, Polarity::Negative);
  CHECK(profile_code(mixed) == "OPE+/CON-/EXT+/AGR-/NEU+");

  for (const auto& p : enumerate_profiles()) {
    auto round_trip = profile_from_code(profile_code(p));
    REQUIRE(round_trip.has_value());
    CHECK(*round_trip == p);
    auto compact = profile_from_code(profile_compact_code(p));
    REQUIRE(compact.has_value());
    CHECK(*compact == p);
  }

  CHECK_FALSE(profile_from_code("OPE+/CON-").has_value());
  CHECK_FALSE(profile_from_code("OPE+/OPE-/EXT+/AGR-/NEU+").has_value());
  CHECK_FALSE(profile_from_code("XYZ+/CON-/EXT+/AGR-/NEU+").has_value());
}

TEST_CASE("trait catalog validation and file loading") {
  CHECK_THROWS_AS(TraitCatalog::from_cells({}), ConfigError);

  // One cell short of complete.
  std::vector<TraitDescriptor> cells;
  for (TraitDimension d : kTraitOrder) {
    for (Polarity p : {Polarity::Positive, Polarity::Negative}) {
      cells.push_back({d, p, {"a", "b", "c"}});
    }
  }
  cells.pop_back();
  CHECK_THROWS_AS(TraitCatalog::from_cells(cells), ConfigError);

  auto dir = std::filesystem::temp_directory_path();
  auto path = dir / "percrs_test_catalog.json";
  {
    std::ofstream out(path);
    out << "[";
    bool first = true;
    for (TraitDimension d : kTraitOrder) {
      for (const char* pol : {"positive", "negative"}) {
        if (!first) out << ",";
        first = false;
        out << R"({"dimension":")" << trait_name(d) << R"(","polarity":")"
            << pol << R"(","descriptors":["x )" << trait_code(d) << " " << pol
            << R"( 1","x2","x3"]})";
      }
    }
    out << "]";
  }
  auto catalog = TraitCatalog::load(path);
  CHECK(catalog.complete());
  CHECK(catalog.cell(TraitDimension::Openness, Polarity::Positive)
            .descriptors[0] == "x OPE positive 1");
  std::filesystem::remove(path);

  CHECK_THROWS_AS(TraitCatalog::load(dir / "does_not_exist.json"),
                  ConfigError);
}
