#include "percrs/transcript.hpp"

#include <fstream>

#include <json.hpp>

#include "percrs/common.hpp"

namespace percrs {

namespace {

using nlohmann::json;

json profile_to_json(const PersonalityProfile& profile) {
  json j;
  for (TraitDimension d : kTraitOrder) {
    j[std::string(trait_letter(d))] = polarity_value(profile.polarity(d));
  }
  return j;
}

PersonalityProfile profile_from_json(const json& j) {
  PersonalityProfile profile;
  for (TraitDimension d : kTraitOrder) {
    auto value = polarity_from_value(j.at(std::string(trait_letter(d))).get<int>());
    if (!value) {
      throw ConfigError("transcript: profile values must be +1 or -1");
    }
    profile.set(d, *value);
  }
  return profile;
}

}  // namespace

TranscriptRecord record_from_conversation(const Conversation& conversation,
                                          const OrchestratorConfig& config) {
  TranscriptRecord record;
  record.session_id = conversation.session_id;
  record.seed_id = conversation.seed.id;
  record.domain = conversation.seed.domain.name();
  record.profile = conversation.profile;
  record.target_item = conversation.seed.target_item;
  record.persuasion_enabled = conversation.persuasion_enabled;
  record.utterances = conversation.utterances;
  record.termination = conversation.termination;
  record.rounds = conversation.rounds;
  record.failure_note = conversation.failure_note;
  record.metadata.user_model = config.user_model;
  record.metadata.system_model = config.system_model;
  record.metadata.user_temperature = config.user_temperature;
  record.metadata.system_temperature = config.system_temperature;
  record.metadata.user_attempts = conversation.user_attempts;
  record.metadata.system_attempts = conversation.system_attempts;
  return record;
}

Conversation conversation_from_record(const TranscriptRecord& record) {
  Conversation convo;
  convo.session_id = record.session_id;
  convo.seed.id = record.seed_id;
  if (auto domain = domain_from_name(record.domain)) {
    convo.seed.domain = *domain;
  }
  convo.seed.target_item = record.target_item;
  if (!record.utterances.empty()) {
    convo.seed.first_utterance = record.utterances.front().text;
  }
  convo.profile = record.profile;
  convo.persuasion_enabled = record.persuasion_enabled;
  convo.utterances = record.utterances;
  convo.termination = record.termination;
  convo.rounds = record.rounds;
  convo.failure_note = record.failure_note;
  return convo;
}

std::string serialize_transcript_record(const TranscriptRecord& record) {
  json j;
  j["schema_version"] = record.schema_version;
  j["session_id"] = record.session_id;
  j["seed_id"] = record.seed_id;
  j["domain"] = record.domain;
  j["profile"] = profile_to_json(record.profile);
  j["target_item"] = record.target_item;
  j["persuasion_enabled"] = record.persuasion_enabled;

  auto utterances = json::array();
  for (const auto& u : record.utterances) {
    json uj;
    uj["turn"] = u.turn_index;
    uj["role"] = std::string(role_name(u.role));
    uj["text"] = u.text;
    auto strategies = json::array();
    for (StrategyId s : u.strategies) {
      strategies.push_back(std::string(strategy_info(s).name));
    }
    uj["strategies"] = strategies;
    uj["raw_text"] = u.raw_text;
    utterances.push_back(std::move(uj));
  }
  j["utterances"] = utterances;
  j["termination"] = std::string(termination_name(record.termination));
  j["rounds"] = record.rounds;
  if (!record.failure_note.empty()) j["failure_note"] = record.failure_note;

  if (record.outcome) {
    json oj;
    oj["accepted_any"] = record.outcome->accepted_any;
    oj["accepted_target"] = record.outcome->accepted_target;
    if (record.outcome->success_round) {
      oj["success_round"] = *record.outcome->success_round;
    }
    oj["rounds_total"] = record.outcome->rounds_total;
    oj["detection_path"] = record.outcome->detection_path;
    j["outcome"] = oj;
  }
  if (record.intentions) {
    j["intentions"] = {{"i_pre", record.intentions->i_pre},
                       {"i_post", record.intentions->i_post},
                       {"i_true", record.intentions->i_true}};
  }
  if (!record.intentions_note.empty()) {
    j["intentions_note"] = record.intentions_note;
  }
  if (!record.outcome_note.empty()) j["outcome_note"] = record.outcome_note;

  json meta;
  meta["user_model"] = record.metadata.user_model;
  meta["system_model"] = record.metadata.system_model;
  if (!record.metadata.judge_model.empty()) {
    meta["judge_model"] = record.metadata.judge_model;
  }
  meta["user_temperature"] = record.metadata.user_temperature;
  meta["system_temperature"] = record.metadata.system_temperature;
  meta["user_attempts"] = record.metadata.user_attempts;
  meta["system_attempts"] = record.metadata.system_attempts;
  j["metadata"] = meta;

  return j.dump();
}

TranscriptRecord parse_transcript_record(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("transcript: malformed JSON record: ") +
                      e.what());
  }
  TranscriptRecord record;
  if (!j.contains("schema_version")) {
    throw ConfigError("transcript: record lacks schema_version");
  }
  record.schema_version = j.at("schema_version").get<int>();
  record.session_id = j.value("session_id", "");
  record.seed_id = j.value("seed_id", "");
  record.domain = j.value("domain", "Movies");
  record.profile = profile_from_json(j.at("profile"));
  record.target_item = j.value("target_item", "");
  record.persuasion_enabled = j.value("persuasion_enabled", true);

  for (const auto& uj : j.at("utterances")) {
    Utterance u;
    u.turn_index = uj.at("turn").get<int>();
    std::string role = uj.at("role").get<std::string>();
    if (role == "user") {
      u.role = Role::User;
    } else if (role == "system") {
      u.role = Role::System;
    } else {
      throw ConfigError("transcript: unknown utterance role \"" + role + "\"");
    }
    u.text = uj.at("text").get<std::string>();
    u.raw_text = uj.value("raw_text", u.text);
    for (const auto& s : uj.value("strategies", json::array())) {
      auto id = strategy_from_name(s.get<std::string>());
      if (!id) {
        throw ConfigError("transcript: unknown strategy \"" +
                          s.get<std::string>() + "\"");
      }
      u.strategies.push_back(*id);
    }
    record.utterances.push_back(std::move(u));
  }

  auto termination = termination_from_name(j.value("termination", ""));
  if (!termination) {
    throw ConfigError("transcript: unknown termination \"" +
                      j.value("termination", "") + "\"");
  }
  record.termination = *termination;
  record.rounds = j.value("rounds", 0);
  record.failure_note = j.value("failure_note", "");

  if (j.contains("outcome")) {
    const auto& oj = j.at("outcome");
    SessionOutcome outcome;
    outcome.session_id = record.session_id;
    outcome.accepted_any = oj.at("accepted_any").get<bool>();
    outcome.accepted_target = oj.at("accepted_target").get<bool>();
    if (oj.contains("success_round")) {
      outcome.success_round = oj.at("success_round").get<int>();
    }
    outcome.rounds_total = oj.at("rounds_total").get<int>();
    outcome.detection_path = oj.value("detection_path", "judge");
    record.outcome = outcome;
  }
  if (j.contains("intentions")) {
    const auto& ij = j.at("intentions");
    IntentionTrace trace;
    trace.i_pre = ij.value("i_pre", 0.0);
    trace.i_post = ij.at("i_post").get<double>();
    trace.i_true = ij.at("i_true").get<double>();
    record.intentions = trace;
  }
  record.intentions_note = j.value("intentions_note", "");
  record.outcome_note = j.value("outcome_note", "");

  if (j.contains("metadata")) {
    const auto& mj = j.at("metadata");
    record.metadata.user_model = mj.value("user_model", "");
    record.metadata.system_model = mj.value("system_model", "");
    record.metadata.judge_model = mj.value("judge_model", "");
    record.metadata.user_temperature = mj.value("user_temperature", 0.7);
    record.metadata.system_temperature = mj.value("system_temperature", 0.7);
    record.metadata.user_attempts = mj.value("user_attempts", 0);
    record.metadata.system_attempts = mj.value("system_attempts", 0);
  }
  return record;
}

std::vector<TranscriptRecord> load_transcripts(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("transcript: cannot read " + path.string());
  }
  std::vector<TranscriptRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      records.push_back(parse_transcript_record(line));
    } catch (const ConfigError& e) {
      throw ConfigError("transcript: line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return records;
}

void save_transcripts(const std::filesystem::path& path,
                      std::span<const TranscriptRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("transcript: cannot write " + path.string());
  }
  for (const auto& record : records) {
    out << serialize_transcript_record(record) << '\n';
  }
}

}  // namespace percrs
