#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "percrs/dataset.hpp"
#include "percrs/gateway.hpp"
#include "percrs/persona.hpp"
#include "percrs/strategy.hpp"

namespace percrs {

enum class Role { User, System };

std::string_view role_name(Role role);  // "user" / "system"

struct Utterance {
  int turn_index = 0;  // 0-based position in the conversation
  Role role = Role::User;
  std::string text;                    // tag-free
  std::vector<StrategyId> strategies;  // system utterances only
  std::string raw_text;                // as produced by the backend
};

enum class TerminationKind { UserGoodbye, MaxLength, BackendFailure };

std::string_view termination_name(TerminationKind kind);
std::optional<TerminationKind> termination_from_name(std::string_view name);

struct Conversation {
  std::string session_id;
  SeedCase seed;
  PersonalityProfile profile;
  bool persuasion_enabled = true;
  std::vector<Utterance> utterances;
  TerminationKind termination = TerminationKind::MaxLength;
  int rounds = 0;  // ceil(|utterances| / 2)
  std::string failure_note;  // set when termination == BackendFailure

  // Total completion attempts spent per agent, for run metadata.
  int user_attempts = 0;
  int system_attempts = 0;
};

std::vector<std::string> default_farewell_lexicon();

struct OrchestratorConfig {
  int max_utterances = 20;  // must be even and >= 2
  bool persuasion_enabled = true;
  std::shared_ptr<Backend> user_backend;
  std::shared_ptr<Backend> system_backend;
  RetryPolicy retry;
  std::vector<std::string> farewell_lexicon = default_farewell_lexicon();
  TraitCatalog catalog = TraitCatalog::bf4crs_default();
  std::string user_model = "user-agent";
  std::string system_model = "system-agent";
  double user_temperature = 0.7;
  double system_temperature = 0.7;
  int max_reply_tokens = 256;
};

// The seeker-side instruction. Embeds the seed's profile facts and the
// rendered personality block; requires the four scalar profile fields to
// be present.
std::string build_user_prompt(
    const SeedCase& seed, const PersonalityProfile& profile,
    const TraitCatalog& catalog = TraitCatalog::bf4crs_default());

// The recommender-side instruction. Carries only the knowledge-graph block
// and the target item -- never any user profile field. With persuasion
// enabled it lists the six candidate strategies and the tagging rule; with
// it disabled no strategy name appears at all.
std::string build_system_prompt(const SeedCase& seed, bool persuasion_enabled);

// UserGoodbye when the latest user text contains a farewell phrase at word
// boundaries (case-insensitive); otherwise MaxLength once utterance_count
// reaches the cap; otherwise nothing. Goodbye wins over length.
std::optional<TerminationKind> detect_termination(
    std::string_view latest_user_text, int utterance_count,
    const OrchestratorConfig& config);

// Runs one simulated session: utterance 0 is the seed's first utterance
// verbatim, then system and user turns alternate until a termination
// condition fires. Backend failures terminate the session with the partial
// transcript retained and flagged; they do not throw.
Conversation run_session(const SeedCase& seed,
                         const PersonalityProfile& profile,
                         const OrchestratorConfig& config);

// Fresh per-session backend pair (user, system); used so scripted runs can
// replay the same script in every session regardless of scheduling.
using BackendPairFactory =
    std::function<std::pair<std::shared_ptr<Backend>, std::shared_ptr<Backend>>()>;

// Runs the full seeds x profiles cross product with at most `parallelism`
// sessions in flight. Output order is canonical (seed-major, profile-minor)
// no matter how execution interleaves.
std::vector<Conversation> run_batch(
    std::span<const SeedCase> seeds,
    std::span<const PersonalityProfile> profiles,
    const OrchestratorConfig& config, int parallelism,
    const BackendPairFactory& per_session_backends = nullptr);

// Strategy occurrences from system utterances, attributed to all five of
// each conversation's trait polarities.
StrategyFrequencyMatrix tally_strategy_usage(
    std::span<const Conversation> conversations);

}  // namespace percrs
