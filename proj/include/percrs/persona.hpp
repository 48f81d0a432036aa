#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace percrs {

// One pole of a Big Five dimension. The numeric values are part of the
// on-disk profile encoding (+1 / -1).
enum class Polarity : int { Negative = -1, Positive = +1 };

constexpr int polarity_value(Polarity p) { return static_cast<int>(p); }
constexpr char polarity_char(Polarity p) {
  return p == Polarity::Positive ? '+' : '-';
}
std::string_view polarity_word(Polarity p);  // "Positive" / "Negative"
std::optional<Polarity> polarity_from_char(char c);
std::optional<Polarity> polarity_from_value(int v);
std::optional<Polarity> polarity_from_word(std::string_view w);  // case-insensitive

enum class TraitDimension : int {
  Openness = 0,
  Conscientiousness = 1,
  Extraversion = 2,
  Agreeableness = 3,
  Neuroticism = 4,
};

inline constexpr std::size_t kTraitCount = 5;

// Canonical dimension order used everywhere: O, C, E, A, N.
inline constexpr std::array<TraitDimension, kTraitCount> kTraitOrder = {
    TraitDimension::Openness,       TraitDimension::Conscientiousness,
    TraitDimension::Extraversion,   TraitDimension::Agreeableness,
    TraitDimension::Neuroticism,
};

std::string_view trait_name(TraitDimension d);    // "Openness"
std::string_view trait_code(TraitDimension d);    // "OPE"
std::string_view trait_letter(TraitDimension d);  // "O"
std::optional<TraitDimension> trait_from_name(std::string_view s);  // case-insensitive
std::optional<TraitDimension> trait_from_code(std::string_view s);  // case-insensitive

// A full five-dimensional polarity assignment; the user agent's whole
// conditioning signal. 32 distinct values exist.
struct PersonalityProfile {
  std::array<Polarity, kTraitCount> polarities{
      Polarity::Positive, Polarity::Positive, Polarity::Positive,
      Polarity::Positive, Polarity::Positive};

  Polarity polarity(TraitDimension d) const {
    return polarities[static_cast<std::size_t>(d)];
  }
  void set(TraitDimension d, Polarity p) {
    polarities[static_cast<std::size_t>(d)] = p;
  }

  friend bool operator==(const PersonalityProfile&,
                         const PersonalityProfile&) = default;
};

// One catalog cell: the behavioral phrases describing a dimension at a
// given polarity. Exactly three phrases per cell.
struct TraitDescriptor {
  TraitDimension dimension{};
  Polarity polarity{};
  std::array<std::string, 3> descriptors;
};

// The 10-cell (dimension x polarity) descriptor catalog that persona
// instructions and the personality judge prompt are rendered from. The
// default catalog is embedded; alternative catalogs (other domains) load
// from a JSON file, one record per cell:
//   {"dimension": "Openness", "polarity": "+", "descriptors": ["a","b","c"]}
class TraitCatalog {
 public:
  TraitCatalog() = default;

  static const TraitCatalog& bf4crs_default();
  static TraitCatalog from_cells(std::vector<TraitDescriptor> cells);
  static TraitCatalog load(const std::filesystem::path& path);

  // Throws ConfigError when the cell is missing.
  const TraitDescriptor& cell(TraitDimension d, Polarity p) const;
  bool complete() const;

 private:
  std::array<std::optional<TraitDescriptor>, 2 * kTraitCount> cells_;
  static std::size_t cell_index(TraitDimension d, Polarity p);
};

// All 32 profiles in a stable canonical order: O,C,E,A,N from most to
// least significant, positive before negative. First element is
// all-positive, last is all-negative.
std::vector<PersonalityProfile> enumerate_profiles();

// Each dimension drawn independently and uniformly from {-1,+1}. Pure
// function of the seed.
PersonalityProfile sample_profile(std::uint64_t seed);

// The text block substituted for the personality placeholder in the user
// prompt: one line per dimension listing that polarity's three catalog
// phrases. Throws ConfigError on an incomplete catalog.
std::string render_personality_instruction(
    const PersonalityProfile& profile,
    const TraitCatalog& catalog = TraitCatalog::bf4crs_default());

std::string profile_code(const PersonalityProfile& p);          // "OPE+/CON-/..."
std::string profile_compact_code(const PersonalityProfile& p);  // "O+C-E+A-N+"

// Accepts both code forms above; returns nullopt on anything malformed.
std::optional<PersonalityProfile> profile_from_code(std::string_view code);

}  // namespace percrs
