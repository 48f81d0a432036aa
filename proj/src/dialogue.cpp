#include "percrs/dialogue.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <sstream>
#include <thread>

#include "percrs/common.hpp"

namespace percrs {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Case-insensitive phrase search with word boundaries on both ends, so
// "goodbye" never triggers on "bye" and "thankful" never triggers on
// "thank you"/"thanks".
bool contains_phrase(const std::string& haystack_lower,
                     const std::string& phrase_lower) {
  std::size_t pos = 0;
  while ((pos = haystack_lower.find(phrase_lower, pos)) !=
         std::string::npos) {
    bool left_ok = pos == 0 || !is_word_char(haystack_lower[pos - 1]);
    std::size_t end = pos + phrase_lower.size();
    bool right_ok = end >= haystack_lower.size() ||
                    !is_word_char(haystack_lower[end]);
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

std::string join(const std::vector<std::string>& items) {
  if (items.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i];
  }
  return out;
}

void require_field(const std::string& value, const char* name,
                   const std::string& seed_id) {
  if (value.empty()) {
    throw std::invalid_argument("seed \"" + seed_id + "\": field " + name +
                                " is required for the user prompt");
  }
}

void validate_config(const OrchestratorConfig& config) {
  if (config.max_utterances < 2 || config.max_utterances % 2 != 0) {
    throw ConfigError("orchestrator: max_utterances must be even and >= 2");
  }
  if (!config.user_backend || !config.system_backend) {
    throw ConfigError("orchestrator: both agent backends must be configured");
  }
}

ChatRequest agent_request(const std::string& instruction,
                          const std::vector<Utterance>& utterances,
                          Role generating, const OrchestratorConfig& config) {
  ChatRequest request;
  request.messages.push_back({ChatRole::SystemInstruction, instruction});
  for (const auto& u : utterances) {
    // Each agent sees its own past turns as assistant turns and the other
    // agent's as user turns. The user agent gets tag-free system text.
    bool own = u.role == generating;
    const std::string& text =
        (generating == Role::User && u.role == Role::System) ? u.text
                                                             : u.raw_text;
    request.messages.push_back(
        {own ? ChatRole::AssistantTurn : ChatRole::UserTurn, text});
  }
  if (generating == Role::User) {
    request.model_name = config.user_model;
    request.temperature = config.user_temperature;
  } else {
    request.model_name = config.system_model;
    request.temperature = config.system_temperature;
  }
  request.max_reply_tokens = config.max_reply_tokens;
  return request;
}

}  // namespace

std::string_view role_name(Role role) {
  return role == Role::User ? "user" : "system";
}

std::string_view termination_name(TerminationKind kind) {
  switch (kind) {
    case TerminationKind::UserGoodbye: return "user_goodbye";
    case TerminationKind::MaxLength: return "max_length";
    case TerminationKind::BackendFailure: return "backend_failure";
  }
  return "max_length";
}

std::optional<TerminationKind> termination_from_name(std::string_view name) {
  if (name == "user_goodbye") return TerminationKind::UserGoodbye;
  if (name == "max_length") return TerminationKind::MaxLength;
  if (name == "backend_failure") return TerminationKind::BackendFailure;
  return std::nullopt;
}

std::vector<std::string> default_farewell_lexicon() {
  return {"goodbye", "bye", "thank you", "thanks", "no more questions"};
}

std::string build_user_prompt(const SeedCase& seed,
                              const PersonalityProfile& profile,
                              const TraitCatalog& catalog) {
  require_field(seed.user_name, "user_name", seed.id);
  require_field(seed.gender, "gender", seed.id);
  require_field(seed.age_range, "age_range", seed.id);
  require_field(seed.residence, "residence", seed.id);

  const std::string noun = seed.domain.item_noun();
  const std::string nouns = seed.domain.item_noun_plural();

  std::ostringstream out;
  out << "You are a seeker chatting with a recommender for " << noun
      << " recommendations.\n";
  out << "Your profile: You are " << seed.user_name << ", a " << seed.gender
      << " in the age range of " << seed.age_range << ", living in "
      << seed.residence << ". You enjoy " << nouns << " like "
      << join(seed.accepted_items) << " and celebrities like "
      << join(seed.accepted_celebrities) << ", but dislike " << nouns
      << " such as " << join(seed.rejected_items) << ".\n\n";
  out << "Your personality is measured as:\n"
      << render_personality_instruction(profile, catalog) << "\n";
  out << "You must follow the instructions below during the chat.\n";
  out << "1. Pretend you have limited knowledge about the recommended "
      << nouns << ", and the only information source is the recommender.\n";
  out << "2. You don't need to introduce yourself or recommend anything, but "
         "feel free to share personal interests and reflect on your "
         "personality. Mention the "
      << noun << " title in quotation marks.\n";
  out << "3. You may end the conversation if you're satisfied with the "
         "recommendation or lose interest (e.g., by saying \"thank you\" or "
         "\"no more questions\").\n";
  out << "4. Keep responses brief, ideally within 20 words.\n";
  return out.str();
}

std::string build_system_prompt(const SeedCase& seed,
                                bool persuasion_enabled) {
  const std::string noun = seed.domain.item_noun();

  std::ostringstream out;
  out << "You are a recommender chatting with the user to provide "
         "recommendations.\n";
  if (persuasion_enabled) {
    out << "Now, you need to select the most suitable persuasion strategies "
           "from the candidate strategies to generate a persuasive response "
           "to recommend the target "
        << noun << ".\n\n";
    out << "#### Candidate Strategies ####\n";
    int index = 1;
    for (const auto& s : strategy_catalog()) {
      out << "(" << index++ << ") Strategy Name: " << s.name << "\n"
          << "Definition: " << s.prompt_definition << "\n\n";
    }
  } else {
    out << "\n";
  }
  out << "The detailed information about the target item from a credible "
         "knowledge graph is represented as the subject-predicate-object "
         "triples:\n"
      << render_kg_block(seed.kg_triples) << "\n\n";
  out << "You must follow the instructions below during the chat.\n";
  out << "1. Respond to the user's questions and generate the next-turn "
         "response according to the context coherently.\n";
  out << "2. Your goal is to recommend the target " << noun << ": \""
      << seed.target_item << "\" to the user step by step.\n";
  out << "3. Using the provided KG information ensures that your responses "
         "are credible and accurate.\n";
  out << "4. Make the conversation more like a real-life chat and be "
         "specific. Mention the "
      << noun << " title in quotation marks.\n";
  out << "5. Keep responses concise, ideally within 20 words.\n";
  if (persuasion_enabled) {
    out << "6. Every time you apply one of the candidate strategies, append "
           "its name in square brackets at the end of the sentence, for "
           "example: It's quite popular. ["
        << strategy_info(StrategyId::SocialProof).name << "]\n";
  }
  return out.str();
}

std::optional<TerminationKind> detect_termination(
    std::string_view latest_user_text, int utterance_count,
    const OrchestratorConfig& config) {
  std::string haystack = lower(latest_user_text);
  for (const auto& phrase : config.farewell_lexicon) {
    if (contains_phrase(haystack, lower(phrase))) {
      return TerminationKind::UserGoodbye;
    }
  }
  if (utterance_count >= config.max_utterances) {
    return TerminationKind::MaxLength;
  }
  return std::nullopt;
}

Conversation run_session(const SeedCase& seed,
                         const PersonalityProfile& profile,
                         const OrchestratorConfig& config) {
  validate_config(config);

  Conversation convo;
  convo.session_id = seed.id + "#" + profile_compact_code(profile);
  convo.seed = seed;
  convo.profile = profile;
  convo.persuasion_enabled = config.persuasion_enabled;

  const std::string user_prompt =
      build_user_prompt(seed, profile, config.catalog);
  const std::string system_prompt =
      build_system_prompt(seed, config.persuasion_enabled);

  convo.utterances.push_back(
      {0, Role::User, seed.first_utterance, {}, seed.first_utterance});

  auto finish = [&convo](TerminationKind kind) {
    convo.termination = kind;
    convo.rounds =
        static_cast<int>((convo.utterances.size() + 1) / 2);
  };

  while (true) {
    // System turn.
    try {
      auto request = agent_request(system_prompt, convo.utterances,
                                   Role::System, config);
      Completion reply =
          complete(*config.system_backend, request, config.retry);
      convo.system_attempts += reply.attempt_count;
      if (reply.text.empty()) {
        throw BackendError(BackendErrorKind::MalformedResponse,
                           "system agent returned an empty reply");
      }
      auto parsed = parse_strategy_tags(reply.text);
      convo.utterances.push_back({static_cast<int>(convo.utterances.size()),
                                  Role::System, parsed.clean_text,
                                  parsed.strategies, reply.text});
    } catch (const BackendError& e) {
      convo.failure_note = e.what();
      finish(TerminationKind::BackendFailure);
      return convo;
    }

    // The latest user utterance is always the one before the system reply.
    const std::string& last_user_text =
        convo.utterances[convo.utterances.size() - 2].text;
    if (auto done = detect_termination(
            last_user_text, static_cast<int>(convo.utterances.size()),
            config)) {
      finish(*done);
      return convo;
    }

    // User turn.
    try {
      auto request =
          agent_request(user_prompt, convo.utterances, Role::User, config);
      Completion reply = complete(*config.user_backend, request, config.retry);
      convo.user_attempts += reply.attempt_count;
      if (reply.text.empty()) {
        throw BackendError(BackendErrorKind::MalformedResponse,
                           "user agent returned an empty reply");
      }
      convo.utterances.push_back({static_cast<int>(convo.utterances.size()),
                                  Role::User, reply.text, {}, reply.text});
    } catch (const BackendError& e) {
      convo.failure_note = e.what();
      finish(TerminationKind::BackendFailure);
      return convo;
    }
  }
}

std::vector<Conversation> run_batch(
    std::span<const SeedCase> seeds,
    std::span<const PersonalityProfile> profiles,
    const OrchestratorConfig& config, int parallelism,
    const BackendPairFactory& per_session_backends) {
  if (parallelism < 1) {
    throw ConfigError("run_batch: parallelism must be >= 1");
  }
  const std::size_t total = seeds.size() * profiles.size();
  std::vector<Conversation> results(total);
  if (total == 0) return results;

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      std::size_t index = next.fetch_add(1);
      if (index >= total || failed.load()) return;
      const SeedCase& seed = seeds[index / profiles.size()];
      const PersonalityProfile& profile = profiles[index % profiles.size()];
      try {
        OrchestratorConfig session_config = config;
        if (per_session_backends) {
          auto [user_backend, system_backend] = per_session_backends();
          session_config.user_backend = std::move(user_backend);
          session_config.system_backend = std::move(system_backend);
        }
        results[index] = run_session(seed, profile, session_config);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), total);
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

StrategyFrequencyMatrix tally_strategy_usage(
    std::span<const Conversation> conversations) {
  std::vector<StrategyUsageSample> samples;
  samples.reserve(conversations.size());
  for (const auto& convo : conversations) {
    StrategyUsageSample sample;
    sample.profile = convo.profile;
    for (const auto& u : convo.utterances) {
      if (u.role != Role::System) continue;
      sample.occurrences.insert(sample.occurrences.end(),
                                u.strategies.begin(), u.strategies.end());
    }
    samples.push_back(std::move(sample));
  }
  return tally_strategy_usage(std::span<const StrategyUsageSample>(samples));
}

}  // namespace percrs
