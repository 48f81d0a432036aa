#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace percrs {

enum class Domain { Movies, Music, Food, Poi, Other };

// Domain plus the free-form label carried by Other.
struct DomainTag {
  Domain kind = Domain::Movies;
  std::string label;  // only meaningful when kind == Other

  std::string name() const;
  // Noun used when the prompt templates speak about items of this domain.
  std::string item_noun() const;    // "movie", "song", ...
  std::string item_noun_plural() const;

  friend bool operator==(const DomainTag& a, const DomainTag& b) {
    return a.kind == b.kind && (a.kind != Domain::Other || a.label == b.label);
  }
};

std::optional<DomainTag> domain_from_name(std::string_view name);

struct KgTriple {
  std::string subject;
  std::string predicate;
  std::string object;
};

// Everything one simulated session starts from. The system agent never
// sees the user_* / accepted_* / rejected_* fields; they exist only for
// the user prompt.
struct SeedCase {
  std::string id;
  DomainTag domain;
  std::string user_name;
  std::string gender;
  std::string age_range;
  std::string residence;
  std::vector<std::string> accepted_items;
  std::vector<std::string> accepted_celebrities;
  std::vector<std::string> rejected_items;
  std::string first_utterance;
  std::string target_item;
  std::vector<KgTriple> kg_triples;
};

class SeedFormatError : public std::runtime_error {
 public:
  SeedFormatError(std::string message, std::size_t line)
      : std::runtime_error(std::move(message)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Seed files are UTF-8, line-delimited: a {"format": 1} header line, then
// one JSON record per line. Records are validated (non-empty first
// utterance and target, target not among rejected items, non-empty triple
// parts); violations raise SeedFormatError naming the line.
std::vector<SeedCase> load_seed_cases(
    const std::filesystem::path& path,
    const std::optional<DomainTag>& domain_filter = std::nullopt);

// Canonical single-line JSON encoding; load-then-save round-trips such
// files byte for byte.
std::string serialize_seed_case(const SeedCase& seed);
void save_seed_cases(const std::filesystem::path& path,
                     std::span<const SeedCase> seeds);

// One "(subject, predicate, object)" line per triple, in input order. An
// empty list renders the "(no external facts)" sentinel line instead.
std::string render_kg_block(std::span<const KgTriple> triples);

}  // namespace percrs
