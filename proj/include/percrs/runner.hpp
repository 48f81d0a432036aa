#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "percrs/consistency.hpp"
#include "percrs/dataset.hpp"
#include "percrs/dialogue.hpp"
#include "percrs/gateway.hpp"
#include "percrs/lexical.hpp"
#include "percrs/metrics.hpp"
#include "percrs/transcript.hpp"

namespace percrs {

// Declarative backend selection for one agent role.
struct BackendSpec {
  enum class Kind { Scripted, Http };
  Kind kind = Kind::Scripted;

  // Scripted: fixed reply list. per_session restarts the script for every
  // session, which keeps parallel batches deterministic.
  std::vector<std::string> replies;
  bool per_session = true;

  // Http: endpoint settings. The API key comes from PERCRS_API_KEY.
  std::string base_url;
  std::string path = "/v1/chat/completions";
  int max_concurrent = 4;
  int timeout_s = 60;

  std::string model = "scripted";
  double temperature = 0.7;
};

enum class ProfileMode { All32, Sample, Explicit };

struct RunConfig {
  BackendSpec user_backend;
  BackendSpec system_backend;
  BackendSpec judge_backend;

  int max_utterances = 20;
  bool persuasion_enabled = true;
  int parallelism = 1;
  int max_reply_tokens = 256;
  RetryPolicy retry;

  std::filesystem::path seeds_path;
  std::optional<DomainTag> domain_filter;

  ProfileMode profile_mode = ProfileMode::All32;
  int sample_count = 0;                        // Sample mode
  std::vector<std::string> explicit_profiles;  // Explicit mode, profile codes

  std::filesystem::path out_path;
  std::uint64_t random_seed = 0;

  std::filesystem::path trait_catalog_path;  // empty = embedded default
};

// JSON config document mirroring the fields above; see docs/formats.md.
RunConfig load_run_config(const std::filesystem::path& path);

// Resolves the configured profile set: all 32, N sampled from the config
// seed, or the explicit code list.
std::vector<PersonalityProfile> resolve_profiles(const RunConfig& config);

std::shared_ptr<Backend> make_backend(const BackendSpec& spec,
                                      const std::string& role_id);

struct SimulateStats {
  int sessions = 0;
  int failed = 0;  // backend_failure terminations
};

// simulate: run the seeds x profiles batch and write one transcript record
// per line to config.out_path.
SimulateStats cmd_simulate(const RunConfig& config);

struct JudgeStats {
  int records = 0;
  int judged = 0;
  int skipped = 0;  // already judged, --force not given
  int failed = 0;   // flagged with outcome_note
};

// judge: fill outcome and intentions on each record; idempotent unless
// force is set. Writes to out (defaults to rewriting the input).
JudgeStats cmd_judge(const std::filesystem::path& transcripts,
                     const RunConfig& config, bool force,
                     const std::filesystem::path& out = {});

struct ReportRequest {
  std::vector<std::string> group_by = {"all"};  // trait|condition|model|domain|all
  std::string format = "csv";                   // csv|structured
  std::size_t top_k = 0;                        // > 0 adds the lexical table
  std::optional<std::filesystem::path> verdicts;  // adds the consistency table
  SuccessBasis scr_basis = SuccessBasis::AnyAccepted;
};

// report: emit metric tables, the strategy-frequency matrix, and optional
// lexical/consistency tables into out_dir. Rejects unjudged input.
void cmd_report(const std::filesystem::path& transcripts,
                const std::filesystem::path& out_dir,
                const ReportRequest& request);

struct ConsistencyRequest {
  std::optional<std::filesystem::path> human_verdicts;
  AveragingMode mode = AveragingMode::MacroOverClasses;
};

// consistency: classify each session's personality with the judge backend,
// persist the verdicts, and score them against the injected ground truth.
// With human verdicts present, also scores those and reports judge/human
// correlations.
void cmd_consistency(const std::filesystem::path& transcripts,
                     const RunConfig& config,
                     const std::filesystem::path& out_dir,
                     const ConsistencyRequest& request = {});

// lexical: trait-polarity TF-IDF table over user utterances.
void cmd_lexical(const std::filesystem::path& transcripts,
                 const std::filesystem::path& out_csv, std::size_t top_k,
                 CorpusGranularity granularity =
                     CorpusGranularity::PerTraitPolarity);

}  // namespace percrs
