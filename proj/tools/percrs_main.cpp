#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "percrs/common.hpp"
#include "percrs/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartialFailure = 3;

percrs::RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return {};
  return percrs::load_run_config(path);
}

void apply_profiles_flag(percrs::RunConfig& config, const std::string& flag) {
  if (flag.empty()) return;
  if (flag == "all32") {
    config.profile_mode = percrs::ProfileMode::All32;
    return;
  }
  if (flag.rfind("sample:", 0) == 0) {
    config.profile_mode = percrs::ProfileMode::Sample;
    config.sample_count = std::stoi(flag.substr(7));
    if (config.sample_count <= 0) {
      throw percrs::ConfigError("--profiles sample count must be positive");
    }
    return;
  }
  throw percrs::ConfigError("--profiles must be all32 or sample:N");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"percrs: personality-conditioned CRS simulation and evaluation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string seeds_path;
  std::string out_path;
  std::string transcripts_path;
  std::string profiles_flag;
  std::string persuasion_flag;
  std::vector<std::string> group_by;
  std::string format = "csv";
  std::string mode_flag = "macro";
  std::string human_path;
  std::string verdicts_path;
  std::size_t top_k = 0;
  bool force = false;
  bool per_conversation = false;

  auto* simulate = app.add_subcommand("simulate", "Run a simulation batch");
  simulate->add_option("--config", config_path, "Run config JSON");
  simulate->add_option("--seeds", seeds_path, "Seed case file");
  simulate->add_option("--out", out_path, "Transcript output file");
  simulate->add_option("--profiles", profiles_flag, "all32 or sample:N");
  simulate->add_option("--persuasion", persuasion_flag, "on or off");

  auto* judge = app.add_subcommand("judge", "Judge outcomes and intentions");
  judge->add_option("--config", config_path, "Run config JSON");
  judge->add_option("--transcripts", transcripts_path, "Transcript file")
      ->required();
  judge->add_option("--out", out_path, "Output file (default: rewrite input)");
  judge->add_flag("--force", force, "Re-judge already judged records");

  auto* report = app.add_subcommand("report", "Emit metric and analysis tables");
  report->add_option("--transcripts", transcripts_path, "Judged transcript file")
      ->required();
  report->add_option("--out", out_path, "Output directory")->required();
  report
      ->add_option("--group-by", group_by,
                   "trait, condition, model, domain, all")
      ->delimiter(',');
  report->add_option("--format", format, "csv or structured");
  report->add_option("--top-k", top_k, "Also emit the top-k lexical table");
  report->add_option("--verdicts", verdicts_path,
                     "Verdict file for the consistency table");

  auto* consistency =
      app.add_subcommand("consistency", "Personality-consistency evaluation");
  consistency->add_option("--config", config_path, "Run config JSON");
  consistency
      ->add_option("--transcripts", transcripts_path, "Transcript file")
      ->required();
  consistency->add_option("--out", out_path, "Output directory")->required();
  consistency->add_option("--human", human_path, "Human verdict file");
  consistency->add_option("--mode", mode_flag, "macro or positive");

  auto* lexical = app.add_subcommand("lexical", "TF-IDF word analysis");
  lexical->add_option("--transcripts", transcripts_path, "Transcript file")
      ->required();
  lexical->add_option("--out", out_path, "Output CSV path")->required();
  lexical->add_option("--top-k", top_k, "Keep only the top-k rows per group");
  lexical->add_flag("--per-conversation", per_conversation,
                    "One document per conversation instead of per trait");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      percrs::RunConfig config = load_config_or_default(config_path);
      if (!seeds_path.empty()) config.seeds_path = seeds_path;
      if (!out_path.empty()) config.out_path = out_path;
      apply_profiles_flag(config, profiles_flag);
      if (!persuasion_flag.empty()) {
        if (persuasion_flag != "on" && persuasion_flag != "off") {
          throw percrs::ConfigError("--persuasion must be on or off");
        }
        config.persuasion_enabled = persuasion_flag == "on";
      }
      auto stats = percrs::cmd_simulate(config);
      std::cout << "simulate: " << stats.sessions << " sessions, "
                << stats.failed << " failed\n";
      return stats.failed == 0 ? kExitOk : kExitPartialFailure;
    }

    if (judge->parsed()) {
      percrs::RunConfig config = load_config_or_default(config_path);
      auto stats = percrs::cmd_judge(transcripts_path, config, force,
                                     out_path.empty() ? transcripts_path
                                                      : out_path);
      std::cout << "judge: " << stats.records << " records, " << stats.judged
                << " judged, " << stats.skipped << " skipped, " << stats.failed
                << " failed\n";
      return stats.failed == 0 ? kExitOk : kExitPartialFailure;
    }

    if (report->parsed()) {
      percrs::ReportRequest request;
      if (!group_by.empty()) request.group_by = group_by;
      request.format = format;
      request.top_k = top_k;
      if (!verdicts_path.empty()) request.verdicts = verdicts_path;
      percrs::cmd_report(transcripts_path, out_path, request);
      std::cout << "report: tables written to " << out_path << "\n";
      return kExitOk;
    }

    if (consistency->parsed()) {
      percrs::RunConfig config = load_config_or_default(config_path);
      percrs::ConsistencyRequest request;
      if (!human_path.empty()) request.human_verdicts = human_path;
      if (mode_flag == "positive") {
        request.mode = percrs::AveragingMode::PositiveClass;
      } else if (mode_flag != "macro") {
        throw percrs::ConfigError("--mode must be macro or positive");
      }
      percrs::cmd_consistency(transcripts_path, config, out_path, request);
      std::cout << "consistency: reports written to " << out_path << "\n";
      return kExitOk;
    }

    if (lexical->parsed()) {
      percrs::cmd_lexical(transcripts_path, out_path, top_k,
                          per_conversation
                              ? percrs::CorpusGranularity::PerConversation
                              : percrs::CorpusGranularity::PerTraitPolarity);
      std::cout << "lexical: table written to " << out_path << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
