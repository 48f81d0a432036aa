#include "percrs/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace percrs {

namespace {

using nlohmann::json;

std::string trimmed(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> string_list(const json& j, const char* key,
                                     std::size_t line) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) {
    throw SeedFormatError("seed record: \"" + std::string(key) +
                              "\" must be a list (line " +
                              std::to_string(line) + ")",
                          line);
  }
  for (const auto& item : j.at(key)) out.push_back(item.get<std::string>());
  return out;
}

SeedCase parse_record(const json& j, std::size_t line) {
  SeedCase seed;
  seed.id = j.value("id", "");
  auto domain = domain_from_name(j.value("domain", "Movies"));
  if (!domain) {
    throw SeedFormatError("seed record: unknown domain \"" +
                              j.value("domain", "") + "\" (line " +
                              std::to_string(line) + ")",
                          line);
  }
  seed.domain = *domain;
  seed.user_name = j.value("user_name", "");
  seed.gender = j.value("gender", "");
  seed.age_range = j.value("age_range", "");
  seed.residence = j.value("residence", "");
  seed.accepted_items = string_list(j, "accepted_items", line);
  seed.accepted_celebrities = string_list(j, "accepted_celebrities", line);
  seed.rejected_items = string_list(j, "rejected_items", line);
  seed.first_utterance = j.value("first_utterance", "");
  seed.target_item = j.value("target_item", "");
  if (j.contains("kg_triples")) {
    for (const auto& t : j.at("kg_triples")) {
      if (!t.is_array() || t.size() != 3) {
        throw SeedFormatError(
            "seed record: kg_triples entries must be [subject, predicate, "
            "object] (line " +
                std::to_string(line) + ")",
            line);
      }
      seed.kg_triples.push_back({t[0].get<std::string>(),
                                 t[1].get<std::string>(),
                                 t[2].get<std::string>()});
    }
  }

  if (trimmed(seed.first_utterance).empty()) {
    throw SeedFormatError(
        "seed record: first_utterance is required (line " +
            std::to_string(line) + ")",
        line);
  }
  if (trimmed(seed.target_item).empty()) {
    throw SeedFormatError("seed record: target_item is required (line " +
                              std::to_string(line) + ")",
                          line);
  }
  if (std::find(seed.rejected_items.begin(), seed.rejected_items.end(),
                seed.target_item) != seed.rejected_items.end()) {
    throw SeedFormatError(
        "seed record: target_item appears in rejected_items (line " +
            std::to_string(line) + ")",
        line);
  }
  for (const auto& t : seed.kg_triples) {
    if (trimmed(t.subject).empty() || trimmed(t.predicate).empty() ||
        trimmed(t.object).empty()) {
      throw SeedFormatError(
          "seed record: kg triple parts must be non-empty (line " +
              std::to_string(line) + ")",
          line);
    }
  }
  return seed;
}

}  // namespace

std::string DomainTag::name() const {
  switch (kind) {
    case Domain::Movies: return "Movies";
    case Domain::Music: return "Music";
    case Domain::Food: return "Food";
    case Domain::Poi: return "POI";
    case Domain::Other: return label.empty() ? "Other" : label;
  }
  return "Movies";
}

std::string DomainTag::item_noun() const {
  switch (kind) {
    case Domain::Movies: return "movie";
    case Domain::Music: return "song";
    case Domain::Food: return "dish";
    case Domain::Poi: return "restaurant";
    case Domain::Other: break;
  }
  std::string noun = label.empty() ? "item" : label;
  std::transform(noun.begin(), noun.end(), noun.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return noun;
}

std::string DomainTag::item_noun_plural() const {
  switch (kind) {
    case Domain::Movies: return "movies";
    case Domain::Music: return "songs";
    case Domain::Food: return "dishes";
    case Domain::Poi: return "restaurants";
    case Domain::Other: break;
  }
  return item_noun() + "s";
}

std::optional<DomainTag> domain_from_name(std::string_view name) {
  std::string l(name);
  std::transform(l.begin(), l.end(), l.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (l == "movies" || l == "movie") return DomainTag{Domain::Movies, ""};
  if (l == "music") return DomainTag{Domain::Music, ""};
  if (l == "food") return DomainTag{Domain::Food, ""};
  if (l == "poi") return DomainTag{Domain::Poi, ""};
  if (l.empty()) return std::nullopt;
  return DomainTag{Domain::Other, std::string(name)};
}

std::vector<SeedCase> load_seed_cases(
    const std::filesystem::path& path,
    const std::optional<DomainTag>& domain_filter) {
  std::ifstream in(path);
  if (!in) {
    throw SeedFormatError("seed file: cannot read " + path.string(), 0);
  }
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<SeedCase> seeds;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SeedFormatError("seed file: malformed JSON on line " +
                                std::to_string(line_no) + ": " + e.what(),
                            line_no);
    }
    if (!header_seen) {
      if (!j.is_object() || !j.contains("format")) {
        throw SeedFormatError(
            "seed file: first line must be the {\"format\": 1} header", 1);
      }
      if (j.at("format").get<int>() != 1) {
        throw SeedFormatError("seed file: unsupported format version", 1);
      }
      header_seen = true;
      continue;
    }
    SeedCase seed = parse_record(j, line_no);
    if (domain_filter && !(seed.domain == *domain_filter)) continue;
    seeds.push_back(std::move(seed));
  }
  if (!header_seen) {
    throw SeedFormatError("seed file: empty file (missing header)", 0);
  }
  return seeds;
}

std::string serialize_seed_case(const SeedCase& seed) {
  json j;
  j["id"] = seed.id;
  j["domain"] = seed.domain.name();
  j["user_name"] = seed.user_name;
  j["gender"] = seed.gender;
  j["age_range"] = seed.age_range;
  j["residence"] = seed.residence;
  j["accepted_items"] = seed.accepted_items;
  j["accepted_celebrities"] = seed.accepted_celebrities;
  j["rejected_items"] = seed.rejected_items;
  j["first_utterance"] = seed.first_utterance;
  j["target_item"] = seed.target_item;
  auto triples = json::array();
  for (const auto& t : seed.kg_triples) {
    triples.push_back(json::array({t.subject, t.predicate, t.object}));
  }
  j["kg_triples"] = triples;
  return j.dump();
}

void save_seed_cases(const std::filesystem::path& path,
                     std::span<const SeedCase> seeds) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw SeedFormatError("seed file: cannot write " + path.string(), 0);
  }
  out << "{\"format\": 1}\n";
  for (const auto& seed : seeds) out << serialize_seed_case(seed) << '\n';
}

std::string render_kg_block(std::span<const KgTriple> triples) {
  if (triples.empty()) return "(no external facts)";
  std::ostringstream out;
  bool first = true;
  for (const auto& t : triples) {
    if (!first) out << '\n';
    first = false;
    out << '(' << t.subject << ", " << t.predicate << ", " << t.object << ')';
  }
  return out.str();
}

}  // namespace percrs
