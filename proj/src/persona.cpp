#include "percrs/persona.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "percrs/common.hpp"

namespace percrs {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

constexpr std::array<std::string_view, kTraitCount> kNames = {
    "Openness", "Conscientiousness", "Extraversion", "Agreeableness",
    "Neuroticism"};
constexpr std::array<std::string_view, kTraitCount> kCodes = {
    "OPE", "CON", "EXT", "AGR", "NEU"};
constexpr std::array<std::string_view, kTraitCount> kLetters = {"O", "C", "E",
                                                                "A", "N"};

}  // namespace

std::string_view polarity_word(Polarity p) {
  return p == Polarity::Positive ? "Positive" : "Negative";
}

std::optional<Polarity> polarity_from_char(char c) {
  if (c == '+') return Polarity::Positive;
  if (c == '-') return Polarity::Negative;
  return std::nullopt;
}

std::optional<Polarity> polarity_from_value(int v) {
  if (v == +1) return Polarity::Positive;
  if (v == -1) return Polarity::Negative;
  return std::nullopt;
}

std::optional<Polarity> polarity_from_word(std::string_view w) {
  std::string l = lower(w);
  if (l == "positive" || l == "+" || l == "pos") return Polarity::Positive;
  if (l == "negative" || l == "-" || l == "neg") return Polarity::Negative;
  return std::nullopt;
}

std::string_view trait_name(TraitDimension d) {
  return kNames[static_cast<std::size_t>(d)];
}

std::string_view trait_code(TraitDimension d) {
  return kCodes[static_cast<std::size_t>(d)];
}

std::string_view trait_letter(TraitDimension d) {
  return kLetters[static_cast<std::size_t>(d)];
}

std::optional<TraitDimension> trait_from_name(std::string_view s) {
  std::string l = lower(s);
  for (TraitDimension d : kTraitOrder) {
    if (l == lower(trait_name(d))) return d;
  }
  return std::nullopt;
}

std::optional<TraitDimension> trait_from_code(std::string_view s) {
  std::string l = lower(s);
  for (TraitDimension d : kTraitOrder) {
    if (l == lower(trait_code(d)) || l == lower(trait_letter(d))) return d;
  }
  return std::nullopt;
}

std::size_t TraitCatalog::cell_index(TraitDimension d, Polarity p) {
  return 2 * static_cast<std::size_t>(d) +
         (p == Polarity::Positive ? 0 : 1);
}

const TraitCatalog& TraitCatalog::bf4crs_default() {
  static const TraitCatalog catalog = from_cells({
      {TraitDimension::Openness,
       Polarity::Positive,
       {"Receptive to new content", "Curious about new topics",
        "Engage in deep conversation"}},
      {TraitDimension::Openness,
       Polarity::Negative,
       {"Prefer familiar content", "Resistant to change", "Lack of curiosity"}},
      {TraitDimension::Conscientiousness,
       Polarity::Positive,
       {"Goal-oriented", "Organized and thoughtful", "Provide useful feedback"}},
      {TraitDimension::Conscientiousness,
       Polarity::Negative,
       {"Lack of focus", "Easily distracted", "Little feedback"}},
      {TraitDimension::Extraversion,
       Polarity::Positive,
       {"Active participation", "Enjoy engagement",
        "Interested in communication"}},
      {TraitDimension::Extraversion,
       Polarity::Negative,
       {"Avoid interaction", "Hesitant to express",
        "Uninterested in socializing"}},
      {TraitDimension::Agreeableness,
       Polarity::Positive,
       {"Empathetic and caring", "Cooperative and trusting",
        "Polite and appreciative"}},
      {TraitDimension::Agreeableness,
       Polarity::Negative,
       {"Indifferent to others", "Uncooperative", "Rude language"}},
      {TraitDimension::Neuroticism,
       Polarity::Positive,
       {"Emotional fluctuation", "Lack of confidence", "Easily discouraged"}},
      {TraitDimension::Neuroticism,
       Polarity::Negative,
       {"Emotionally stable", "Confident response", "Handle challenges well"}},
  });
  return catalog;
}

TraitCatalog TraitCatalog::from_cells(std::vector<TraitDescriptor> cells) {
  TraitCatalog catalog;
  for (auto& cell : cells) {
    auto idx = cell_index(cell.dimension, cell.polarity);
    if (catalog.cells_[idx].has_value()) {
      throw ConfigError("trait catalog: duplicate cell " +
                        std::string(trait_code(cell.dimension)) +
                        polarity_char(cell.polarity));
    }
    for (const auto& phrase : cell.descriptors) {
      if (phrase.empty()) {
        throw ConfigError("trait catalog: empty descriptor phrase in " +
                          std::string(trait_code(cell.dimension)));
      }
    }
    catalog.cells_[idx] = std::move(cell);
  }
  if (!catalog.complete()) {
    throw ConfigError("trait catalog: must define all 10 dimension/polarity cells");
  }
  return catalog;
}

TraitCatalog TraitCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("trait catalog: cannot read " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("trait catalog: invalid JSON in " + path.string() + ": " +
                      e.what());
  }
  if (!doc.is_array()) {
    throw ConfigError("trait catalog: top-level value must be an array");
  }
  std::vector<TraitDescriptor> cells;
  for (const auto& item : doc) {
    TraitDescriptor cell;
    auto dim = trait_from_name(item.value("dimension", ""));
    if (!dim) dim = trait_from_code(item.value("dimension", ""));
    if (!dim) {
      throw ConfigError("trait catalog: unknown dimension \"" +
                        item.value("dimension", "") + "\"");
    }
    auto pol = polarity_from_word(item.value("polarity", ""));
    if (!pol) {
      throw ConfigError("trait catalog: unknown polarity \"" +
                        item.value("polarity", "") + "\"");
    }
    const auto& phrases = item.at("descriptors");
    if (!phrases.is_array() || phrases.size() != 3) {
      throw ConfigError("trait catalog: each cell needs exactly 3 descriptors");
    }
    cell.dimension = *dim;
    cell.polarity = *pol;
    for (std::size_t i = 0; i < 3; ++i) {
      cell.descriptors[i] = phrases[i].get<std::string>();
    }
    cells.push_back(std::move(cell));
  }
  return from_cells(std::move(cells));
}

const TraitDescriptor& TraitCatalog::cell(TraitDimension d, Polarity p) const {
  const auto& slot = cells_[cell_index(d, p)];
  if (!slot.has_value()) {
    throw ConfigError("trait catalog: missing cell " +
                      std::string(trait_code(d)) + polarity_char(p));
  }
  return *slot;
}

bool TraitCatalog::complete() const {
  return std::all_of(cells_.begin(), cells_.end(),
                     [](const auto& c) { return c.has_value(); });
}

std::vector<PersonalityProfile> enumerate_profiles() {
  std::vector<PersonalityProfile> all;
  all.reserve(32);
  for (unsigned mask = 0; mask < 32; ++mask) {
    PersonalityProfile p;
    for (std::size_t i = 0; i < kTraitCount; ++i) {
      // Bit 4 is Openness; a set bit selects the negative pole so that the
      // enumeration starts all-positive and ends all-negative.
      bool negative = (mask >> (kTraitCount - 1 - i)) & 1u;
      p.polarities[i] = negative ? Polarity::Negative : Polarity::Positive;
    }
    all.push_back(p);
  }
  return all;
}

PersonalityProfile sample_profile(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PersonalityProfile p;
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    p.polarities[i] = (rng() & 1u) ? Polarity::Positive : Polarity::Negative;
  }
  return p;
}

std::string render_personality_instruction(const PersonalityProfile& profile,
                                           const TraitCatalog& catalog) {
  std::ostringstream out;
  for (TraitDimension d : kTraitOrder) {
    const auto& cell = catalog.cell(d, profile.polarity(d));
    out << trait_name(d) << ": " << cell.descriptors[0] << "; "
        << cell.descriptors[1] << "; " << cell.descriptors[2] << ".\n";
  }
  return out.str();
}

std::string profile_code(const PersonalityProfile& p) {
  std::string out;
  for (TraitDimension d : kTraitOrder) {
    if (!out.empty()) out += '/';
    out += trait_code(d);
    out += polarity_char(p.polarity(d));
  }
  return out;
}

std::string profile_compact_code(const PersonalityProfile& p) {
  std::string out;
  for (TraitDimension d : kTraitOrder) {
    out += trait_letter(d);
    out += polarity_char(p.polarity(d));
  }
  return out;
}

std::optional<PersonalityProfile> profile_from_code(std::string_view code) {
  std::vector<std::pair<TraitDimension, Polarity>> parts;
  std::size_t i = 0;
  while (i < code.size()) {
    if (code[i] == '/') {
      ++i;
      continue;
    }
    // A part is a trait label (1 or 3 letters) followed by '+'/'-'.
    std::size_t j = i;
    while (j < code.size() && std::isalpha(static_cast<unsigned char>(code[j])))
      ++j;
    if (j == i || j >= code.size()) return std::nullopt;
    auto dim = trait_from_code(code.substr(i, j - i));
    auto pol = polarity_from_char(code[j]);
    if (!dim || !pol) return std::nullopt;
    parts.emplace_back(*dim, *pol);
    i = j + 1;
  }
  if (parts.size() != kTraitCount) return std::nullopt;
  PersonalityProfile profile;
  std::array<bool, kTraitCount> seen{};
  for (auto [dim, pol] : parts) {
    auto idx = static_cast<std::size_t>(dim);
    if (seen[idx]) return std::nullopt;
    seen[idx] = true;
    profile.polarities[idx] = pol;
  }
  return profile;
}

}  // namespace percrs
