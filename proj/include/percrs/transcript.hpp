#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "percrs/dialogue.hpp"
#include "percrs/outcome.hpp"

namespace percrs {

// On-disk session record, one JSON object per line. Fields are stable and
// alphabetically serialized so scripted runs reproduce files byte for
// byte.
struct TranscriptRecord {
  int schema_version = 1;
  std::string session_id;
  std::string seed_id;
  std::string domain;
  PersonalityProfile profile;
  std::string target_item;
  bool persuasion_enabled = true;
  std::vector<Utterance> utterances;
  TerminationKind termination = TerminationKind::MaxLength;
  int rounds = 0;
  std::string failure_note;  // backend_failure sessions only

  std::optional<SessionOutcome> outcome;
  std::optional<IntentionTrace> intentions;
  std::string intentions_note;  // e.g. "no_recommendation_turn"
  std::string outcome_note;     // set when judging a record failed

  struct Metadata {
    std::string user_model;
    std::string system_model;
    std::string judge_model;
    double user_temperature = 0.7;
    double system_temperature = 0.7;
    int user_attempts = 0;
    int system_attempts = 0;
  } metadata;
};

TranscriptRecord record_from_conversation(const Conversation& conversation,
                                          const OrchestratorConfig& config);

// Rebuilds the conversation view the analysis modules consume. The seed
// carries only what the record stored (id, domain, target, opening line).
Conversation conversation_from_record(const TranscriptRecord& record);

std::string serialize_transcript_record(const TranscriptRecord& record);
TranscriptRecord parse_transcript_record(const std::string& line);

std::vector<TranscriptRecord> load_transcripts(
    const std::filesystem::path& path);
void save_transcripts(const std::filesystem::path& path,
                      std::span<const TranscriptRecord> records);

}  // namespace percrs
