#include "percrs/runner.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "percrs/common.hpp"
#include "percrs/outcome.hpp"

namespace percrs {

namespace {

using nlohmann::json;

BackendSpec parse_backend_spec(const json& j, const char* role) {
  BackendSpec spec;
  std::string kind = j.value("kind", "scripted");
  if (kind == "scripted") {
    spec.kind = BackendSpec::Kind::Scripted;
    for (const auto& reply : j.value("replies", json::array())) {
      spec.replies.push_back(reply.get<std::string>());
    }
    spec.per_session = j.value("per_session", true);
    spec.model = j.value("model", "scripted");
  } else if (kind == "http") {
    spec.kind = BackendSpec::Kind::Http;
    spec.base_url = j.value("base_url", "");
    if (spec.base_url.empty()) {
      throw ConfigError(std::string("config: ") + role +
                        ": http backend needs base_url");
    }
    spec.path = j.value("path", "/v1/chat/completions");
    spec.max_concurrent = j.value("max_concurrent", 4);
    spec.timeout_s = j.value("timeout_s", 60);
    spec.model = j.value("model", "");
    if (spec.model.empty()) {
      throw ConfigError(std::string("config: ") + role +
                        ": http backend needs a model name");
    }
  } else {
    throw ConfigError(std::string("config: ") + role +
                      ": unknown backend kind \"" + kind + "\"");
  }
  if (j.contains("temperature")) {
    spec.temperature = j.at("temperature").get<double>();
  }
  return spec;
}

ProfileMode parse_profile_mode(const json& j, RunConfig& config) {
  if (!j.contains("profiles")) return ProfileMode::All32;
  const auto& p = j.at("profiles");
  if (p.is_array()) {
    for (const auto& code : p) {
      config.explicit_profiles.push_back(code.get<std::string>());
    }
    return ProfileMode::Explicit;
  }
  std::string mode = p.get<std::string>();
  if (mode == "all32") return ProfileMode::All32;
  if (mode.rfind("sample:", 0) == 0) {
    config.sample_count = std::stoi(mode.substr(7));
    if (config.sample_count <= 0) {
      throw ConfigError("config: profiles sample count must be positive");
    }
    return ProfileMode::Sample;
  }
  throw ConfigError("config: profiles must be \"all32\", \"sample:N\" or a "
                    "list of profile codes");
}

// Judging reconstructs a per-record judge backend so scripted runs stay
// deterministic regardless of record order.
std::shared_ptr<Backend> judge_backend_for_record(
    const BackendSpec& spec, std::shared_ptr<Backend>& shared) {
  if (spec.kind == BackendSpec::Kind::Scripted && spec.per_session) {
    return make_scripted_backend(spec.replies, "judge-scripted");
  }
  if (!shared) shared = make_backend(spec, "judge");
  return shared;
}

std::vector<Conversation> conversations_from_records(
    std::span<const TranscriptRecord> records) {
  std::vector<Conversation> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(conversation_from_record(r));
  return out;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << body;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config: invalid JSON in " + path.string() + ": " +
                      e.what());
  }

  RunConfig config;
  if (j.contains("user_backend")) {
    config.user_backend = parse_backend_spec(j.at("user_backend"), "user_backend");
  }
  if (j.contains("system_backend")) {
    config.system_backend =
        parse_backend_spec(j.at("system_backend"), "system_backend");
  }
  if (j.contains("judge_backend")) {
    config.judge_backend =
        parse_backend_spec(j.at("judge_backend"), "judge_backend");
    if (!j.at("judge_backend").contains("temperature")) {
      config.judge_backend.temperature = 0.0;
    }
  } else {
    config.judge_backend.temperature = 0.0;
  }

  config.max_utterances = j.value("max_utterances", 20);
  config.persuasion_enabled = j.value("persuasion", true);
  config.parallelism = j.value("parallelism", 1);
  config.max_reply_tokens = j.value("max_reply_tokens", 256);
  if (j.contains("retry")) {
    const auto& r = j.at("retry");
    config.retry.max_attempts = r.value("max_attempts", 3);
    config.retry.initial_delay =
        std::chrono::milliseconds(r.value("initial_delay_ms", 200));
    config.retry.multiplier = r.value("multiplier", 2.0);
    config.retry.max_delay =
        std::chrono::milliseconds(r.value("max_delay_ms", 5000));
  }

  config.seeds_path = j.value("seeds", "");
  if (j.contains("domain_filter")) {
    config.domain_filter = domain_from_name(j.at("domain_filter").get<std::string>());
    if (!config.domain_filter) {
      throw ConfigError("config: unknown domain_filter");
    }
  }
  config.profile_mode = parse_profile_mode(j, config);
  config.out_path = j.value("out", "");
  config.random_seed = j.value("random_seed", std::uint64_t{0});
  config.trait_catalog_path = j.value("trait_catalog", "");

  if (!config.out_path.empty() && config.out_path == config.seeds_path) {
    throw ConfigError("config: seeds and out must be distinct paths");
  }
  return config;
}

std::vector<PersonalityProfile> resolve_profiles(const RunConfig& config) {
  switch (config.profile_mode) {
    case ProfileMode::All32:
      return enumerate_profiles();
    case ProfileMode::Sample: {
      std::vector<PersonalityProfile> profiles;
      profiles.reserve(config.sample_count);
      std::mt19937_64 master(config.random_seed);
      for (int i = 0; i < config.sample_count; ++i) {
        profiles.push_back(sample_profile(master()));
      }
      return profiles;
    }
    case ProfileMode::Explicit: {
      std::vector<PersonalityProfile> profiles;
      for (const auto& code : config.explicit_profiles) {
        auto profile = profile_from_code(code);
        if (!profile) {
          throw ConfigError("config: malformed profile code \"" + code + "\"");
        }
        profiles.push_back(*profile);
      }
      if (profiles.empty()) {
        throw ConfigError("config: explicit profile list is empty");
      }
      return profiles;
    }
  }
  return {};
}

std::shared_ptr<Backend> make_backend(const BackendSpec& spec,
                                      const std::string& role_id) {
  if (spec.kind == BackendSpec::Kind::Scripted) {
    return make_scripted_backend(spec.replies, role_id + "-scripted");
  }
  HttpChatBackend::Options options;
  options.base_url = spec.base_url;
  options.path = spec.path;
  options.api_key = api_key_from_env();
  options.max_concurrent = spec.max_concurrent;
  options.timeout = std::chrono::seconds(spec.timeout_s);
  return std::make_shared<HttpChatBackend>(std::move(options));
}

SimulateStats cmd_simulate(const RunConfig& config) {
  if (config.seeds_path.empty()) {
    throw ConfigError("simulate: a seeds file is required");
  }
  if (config.out_path.empty()) {
    throw ConfigError("simulate: an output path is required");
  }

  auto seeds = load_seed_cases(config.seeds_path, config.domain_filter);
  auto profiles = resolve_profiles(config);

  OrchestratorConfig orchestrator;
  orchestrator.max_utterances = config.max_utterances;
  orchestrator.persuasion_enabled = config.persuasion_enabled;
  orchestrator.retry = config.retry;
  orchestrator.max_reply_tokens = config.max_reply_tokens;
  orchestrator.user_model = config.user_backend.model;
  orchestrator.system_model = config.system_backend.model;
  orchestrator.user_temperature = config.user_backend.temperature;
  orchestrator.system_temperature = config.system_backend.temperature;
  if (!config.trait_catalog_path.empty()) {
    orchestrator.catalog = TraitCatalog::load(config.trait_catalog_path);
  }

  BackendPairFactory factory;
  bool scripted_per_session =
      (config.user_backend.kind == BackendSpec::Kind::Scripted &&
       config.user_backend.per_session) ||
      (config.system_backend.kind == BackendSpec::Kind::Scripted &&
       config.system_backend.per_session);
  if (scripted_per_session) {
    auto user_spec = config.user_backend;
    auto system_spec = config.system_backend;
    std::shared_ptr<Backend> shared_user;
    std::shared_ptr<Backend> shared_system;
    if (!(user_spec.kind == BackendSpec::Kind::Scripted &&
          user_spec.per_session)) {
      shared_user = make_backend(user_spec, "user");
    }
    if (!(system_spec.kind == BackendSpec::Kind::Scripted &&
          system_spec.per_session)) {
      shared_system = make_backend(system_spec, "system");
    }
    factory = [user_spec, system_spec, shared_user, shared_system]() {
      auto user = shared_user ? shared_user
                              : make_backend(user_spec, "user");
      auto system = shared_system ? shared_system
                                  : make_backend(system_spec, "system");
      return std::make_pair(user, system);
    };
  } else {
    orchestrator.user_backend = make_backend(config.user_backend, "user");
    orchestrator.system_backend = make_backend(config.system_backend, "system");
  }

  auto conversations = run_batch(seeds, profiles, orchestrator,
                                 config.parallelism, factory);

  std::vector<TranscriptRecord> records;
  records.reserve(conversations.size());
  SimulateStats stats;
  stats.sessions = static_cast<int>(conversations.size());
  for (const auto& convo : conversations) {
    if (convo.termination == TerminationKind::BackendFailure) ++stats.failed;
    records.push_back(record_from_conversation(convo, orchestrator));
  }
  save_transcripts(config.out_path, records);
  return stats;
}

JudgeStats cmd_judge(const std::filesystem::path& transcripts,
                     const RunConfig& config, bool force,
                     const std::filesystem::path& out) {
  auto records = load_transcripts(transcripts);
  JudgeStats stats;
  stats.records = static_cast<int>(records.size());

  JudgeOptions options;
  options.model_name = config.judge_backend.model;
  options.temperature = config.judge_backend.temperature;
  options.retry = config.retry;

  std::shared_ptr<Backend> shared;
  for (auto& record : records) {
    if (record.outcome && !force) {
      ++stats.skipped;
      continue;
    }
    record.outcome.reset();
    record.intentions.reset();
    record.outcome_note.clear();
    record.intentions_note.clear();

    auto backend = judge_backend_for_record(config.judge_backend, shared);
    Conversation convo = conversation_from_record(record);
    try {
      record.outcome = judge_outcome(convo, *backend, options);
      record.metadata.judge_model = options.model_name;
      ++stats.judged;
    } catch (const OutcomeUnavailableError& e) {
      record.outcome_note = e.what();
      ++stats.failed;
      continue;
    }
    try {
      record.intentions = elicit_intentions(convo, *backend, options);
    } catch (const UndefinedIntentionsError&) {
      record.intentions_note = "no_recommendation_turn";
    } catch (const OutcomeUnavailableError& e) {
      record.intentions_note = e.what();
    }
  }

  save_transcripts(out.empty() ? transcripts : out, records);
  return stats;
}

void cmd_report(const std::filesystem::path& transcripts,
                const std::filesystem::path& out_dir,
                const ReportRequest& request) {
  auto records = load_transcripts(transcripts);
  if (records.empty()) {
    throw ConfigError("report: no transcript records in " +
                      transcripts.string());
  }

  std::vector<SessionMetricsInput> sessions;
  std::set<std::string> models;
  std::set<std::string> domains;
  for (const auto& record : records) {
    if (!record.outcome) {
      if (!record.outcome_note.empty()) continue;  // flagged unjudgeable
      throw ConfigError(
          "report: transcript record \"" + record.session_id +
          "\" has no outcome; run `percrs judge` on the file first");
    }
    SessionMetricsInput session;
    session.profile = record.profile;
    session.persuasion_enabled = record.persuasion_enabled;
    session.model_name = record.metadata.system_model;
    if (auto domain = domain_from_name(record.domain)) {
      session.domain = *domain;
    }
    session.outcome = *record.outcome;
    session.intentions = record.intentions;
    sessions.push_back(std::move(session));
    models.insert(record.metadata.system_model);
    domains.insert(record.domain);
  }

  std::vector<GroupKey> keys;
  for (const auto& kind : request.group_by) {
    if (kind == "all") {
      keys.push_back(GroupKey::all());
    } else if (kind == "trait") {
      auto trait_keys = GroupKey::trait_polarity_keys();
      keys.insert(keys.end(), trait_keys.begin(), trait_keys.end());
    } else if (kind == "condition") {
      keys.push_back(GroupKey::condition(true));
      keys.push_back(GroupKey::condition(false));
    } else if (kind == "model") {
      for (const auto& m : models) keys.push_back(GroupKey::model(m));
    } else if (kind == "domain") {
      for (const auto& d : domains) {
        if (auto tag = domain_from_name(d)) {
          keys.push_back(GroupKey::for_domain(*tag));
        }
      }
    } else {
      throw ConfigError("report: unknown group-by kind \"" + kind + "\"");
    }
  }

  std::filesystem::create_directories(out_dir);
  auto reports = aggregate(sessions, keys, request.scr_basis);
  write_text_file(out_dir / "metrics.csv", reports_to_csv(reports));

  auto conversations = conversations_from_records(records);
  auto matrix = tally_strategy_usage(std::span<const Conversation>(conversations));
  write_text_file(out_dir / "strategy_matrix.csv", matrix.to_csv());

  if (request.top_k > 0) {
    auto corpora = build_corpora(conversations);
    auto table = build_tfidf(corpora);
    write_text_file(out_dir / "lexical.csv", tfidf_to_csv(table, request.top_k));
  }

  if (request.verdicts) {
    auto verdict_records = load_verdict_records(*request.verdicts);
    std::map<std::string, PersonalityProfile> truth;
    for (const auto& record : records) {
      truth[record.session_id] = record.profile;
    }
    std::vector<std::pair<JudgeVerdict, PersonalityProfile>> pairs;
    for (const auto& v : verdict_records) {
      auto it = truth.find(v.session_id);
      if (it == truth.end()) continue;
      pairs.emplace_back(v.verdict, it->second);
    }
    if (!pairs.empty()) {
      auto report = score_consistency(pairs);
      write_text_file(out_dir / "consistency.csv", consistency_to_csv(report));
    }
  }

  if (request.format == "structured") {
    json doc;
    doc["n_records"] = records.size();
    doc["scr_basis"] = request.scr_basis == SuccessBasis::AnyAccepted
                           ? "accepted_any"
                           : "accepted_target";
    doc["strategy_counting"] = "per_tag_occurrence";
    auto rows = json::array();
    for (const auto& r : reports) {
      json row;
      row["group"] = r.group.label();
      row["n"] = r.n_sessions;
      row["n_prs_valid"] = r.n_prs_valid;
      if (r.sr) row["SR"] = *r.sr;
      if (r.gsr) row["GSR"] = *r.gsr;
      if (r.prs) row["PRS"] = *r.prs;
      if (r.scr) row["SCR"] = *r.scr;
      if (r.tcr) row["TCR"] = *r.tcr;
      rows.push_back(std::move(row));
    }
    doc["metrics"] = rows;
    write_text_file(out_dir / "report.json", doc.dump(2) + "\n");
  }
}

void cmd_consistency(const std::filesystem::path& transcripts,
                     const RunConfig& config,
                     const std::filesystem::path& out_dir,
                     const ConsistencyRequest& request) {
  auto records = load_transcripts(transcripts);
  if (records.empty()) {
    throw ConfigError("consistency: no transcript records");
  }
  std::filesystem::create_directories(out_dir);

  JudgeOptions options;
  options.model_name = config.judge_backend.model;
  options.temperature = config.judge_backend.temperature;
  options.retry = config.retry;

  TraitCatalog catalog = config.trait_catalog_path.empty()
                             ? TraitCatalog::bf4crs_default()
                             : TraitCatalog::load(config.trait_catalog_path);

  std::shared_ptr<Backend> shared;
  std::vector<VerdictRecord> verdicts;
  std::vector<std::pair<JudgeVerdict, PersonalityProfile>> judge_pairs;
  std::map<std::string, std::pair<JudgeVerdict, PersonalityProfile>> by_session;
  for (const auto& record : records) {
    auto backend = judge_backend_for_record(config.judge_backend, shared);
    Conversation convo = conversation_from_record(record);
    JudgeVerdict verdict = judge_personality(convo, *backend, options, catalog);
    verdicts.push_back({record.session_id, "judge", verdict});
    judge_pairs.emplace_back(verdict, record.profile);
    by_session[record.session_id] = {verdict, record.profile};
  }
  save_verdict_records(out_dir / "verdicts.jsonl", verdicts);

  auto judge_report = score_consistency(judge_pairs, request.mode);
  write_text_file(out_dir / "consistency_judge.csv",
                  consistency_to_csv(judge_report));

  if (!request.human_verdicts) return;

  auto human = load_verdict_records(*request.human_verdicts);
  std::vector<std::pair<JudgeVerdict, PersonalityProfile>> human_pairs;
  std::vector<std::pair<JudgeVerdict, JudgeVerdict>> shared_verdicts;
  for (const auto& h : human) {
    auto it = by_session.find(h.session_id);
    if (it == by_session.end()) continue;
    human_pairs.emplace_back(h.verdict, it->second.second);
    shared_verdicts.emplace_back(it->second.first, h.verdict);
  }
  if (human_pairs.empty()) {
    throw ConfigError(
        "consistency: no human verdicts matched transcript session ids");
  }
  auto human_report = score_consistency(human_pairs, request.mode);
  write_text_file(out_dir / "consistency_human.csv",
                  consistency_to_csv(human_report));

  // Judge/human agreement: per-dimension correlation of polarity calls
  // over shared sessions, plus one correlation between the two
  // per-dimension F1 vectors.
  std::ostringstream corr;
  corr << "dimension,pearson\n";
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    TraitDimension d = kTraitOrder[i];
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [judge_verdict, human_verdict] : shared_verdicts) {
      xs.push_back(polarity_value(judge_verdict.prediction(d)));
      ys.push_back(polarity_value(human_verdict.prediction(d)));
    }
    corr << trait_name(d) << ',';
    try {
      corr << pearson(xs, ys);
    } catch (const UndefinedMetricError&) {
      corr << "";
    } catch (const std::invalid_argument&) {
      corr << "";
    }
    corr << '\n';
  }
  std::vector<double> judge_f1;
  std::vector<double> human_f1;
  for (std::size_t i = 0; i < kTraitCount; ++i) {
    judge_f1.push_back(judge_report.per_dimension[i].f1);
    human_f1.push_back(human_report.per_dimension[i].f1);
  }
  corr << "f1_vectors,";
  try {
    corr << pearson(judge_f1, human_f1);
  } catch (const UndefinedMetricError&) {
    corr << "";
  }
  corr << '\n';
  write_text_file(out_dir / "correlation.csv", corr.str());
}

void cmd_lexical(const std::filesystem::path& transcripts,
                 const std::filesystem::path& out_csv, std::size_t top_k,
                 CorpusGranularity granularity) {
  auto records = load_transcripts(transcripts);
  if (records.empty()) {
    throw ConfigError("lexical: no transcript records");
  }
  auto conversations = conversations_from_records(records);
  auto corpora = build_corpora(conversations, granularity);
  auto table = build_tfidf(corpora);
  write_text_file(out_csv, tfidf_to_csv(table, top_k));
}

}  // namespace percrs
