#include "percrs/runner.hpp"

#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "percrs/common.hpp"
#include "test_support.hpp"

using namespace percrs;
using percrs::testing::fixture_path;
using percrs::testing::golden_system_script;
using percrs::testing::golden_user_script;
using percrs::testing::read_file;

namespace {

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "percrs_runner_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

RunConfig scripted_run_config(const std::filesystem::path& out,
                              int parallelism = 1) {
  RunConfig config;
  config.seeds_path = fixture_path("seeds_synthetic.jsonl");
  config.domain_filter = DomainTag{Domain::Movies, ""};
  config.out_path = out;
  config.parallelism = parallelism;
  config.max_utterances = 14;
  config.retry.max_attempts = 1;
  config.retry.initial_delay = std::chrono::milliseconds(0);

  config.user_backend.kind = BackendSpec::Kind::Scripted;
  config.user_backend.replies = golden_user_script();
  config.user_backend.model = "scripted-user";
  config.system_backend.kind = BackendSpec::Kind::Scripted;
  config.system_backend.replies = golden_system_script();
  config.system_backend.model = "scripted-system";

  config.judge_backend.kind = BackendSpec::Kind::Scripted;
  config.judge_backend.replies = {
      R"(["accepted_any: yes", "accepted_target: yes", "success_round: 7"])",
      R"(["intention: 0.3"])",
      R"(["intention: 0.6"])",
  };
  return config;
}

}  // namespace

TEST_CASE("run config files load and validate") {
  auto dir = temp_dir();
  auto path = dir / "config.json";
  {
    std::ofstream out(path);
    out << R"({
      "seeds": "seeds.jsonl",
      "out": "transcripts.jsonl",
      "max_utterances": 16,
      "persuasion": false,
      "parallelism": 3,
      "random_seed": 99,
      "profiles": "sample:5",
      "user_backend": {"kind": "scripted", "replies": ["a"], "model": "u"},
      "system_backend": {"kind": "http", "base_url": "http://x", "model": "m"},
      "judge_backend": {"kind": "scripted", "replies": []},
      "retry": {"max_attempts": 2, "initial_delay_ms": 10}
    })";
  }
  auto config = load_run_config(path);
  CHECK(config.max_utterances == 16);
  CHECK_FALSE(config.persuasion_enabled);
  CHECK(config.parallelism == 3);
  CHECK(config.random_seed == 99);
  CHECK(config.profile_mode == ProfileMode::Sample);
  CHECK(config.sample_count == 5);
  CHECK(config.user_backend.kind == BackendSpec::Kind::Scripted);
  CHECK(config.system_backend.kind == BackendSpec::Kind::Http);
  CHECK(config.system_backend.base_url == "http://x");
  CHECK(config.judge_backend.temperature == 0.0);  // judge default
  CHECK(config.retry.max_attempts == 2);

  auto bad = dir / "bad_config.json";
  {
    std::ofstream out(bad);
    out << R"({"seeds": "same.jsonl", "out": "same.jsonl"})";
  }
  CHECK_THROWS_AS(load_run_config(bad), ConfigError);
  CHECK_THROWS_AS(load_run_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("profile resolution covers the three modes") {
  RunConfig config;
  config.profile_mode = ProfileMode::All32;
  CHECK(resolve_profiles(config).size() == 32);

  config.profile_mode = ProfileMode::Sample;
  config.sample_count = 7;
  config.random_seed = 4;
  auto sampled = resolve_profiles(config);
  CHECK(sampled.size() == 7);
  CHECK(resolve_profiles(config) == sampled);  // seeded determinism

  config.profile_mode = ProfileMode::Explicit;
  config.explicit_profiles = {"OPE+/CON-/EXT+/AGR-/NEU+", "O-C-E-A-N-"};
  auto explicit_profiles = resolve_profiles(config);
  REQUIRE(explicit_profiles.size() == 2);
  CHECK(profile_code(explicit_profiles[0]) == "OPE+/CON-/EXT+/AGR-/NEU+");
  config.explicit_profiles = {"garbage"};
  CHECK_THROWS_AS(resolve_profiles(config), ConfigError);
}

TEST_CASE("simulate writes one record per session, reproducibly") {
  auto dir = temp_dir();
  auto out_a = dir / "batch_a.jsonl";
  auto out_b = dir / "batch_b.jsonl";

  auto config = scripted_run_config(out_a);
  auto stats = cmd_simulate(config);
  CHECK(stats.sessions == 6 * 32);  // movie seeds x all-32 profiles
  CHECK(stats.failed == 0);

  config.out_path = out_b;
  cmd_simulate(config);
  CHECK(read_file(out_a) == read_file(out_b));

  auto records = load_transcripts(out_a);
  REQUIRE(records.size() == 192);
  CHECK(records[0].session_id == "m-01#O+C+E+A+N+");
  CHECK(records[0].utterances.size() == 14);
  CHECK_FALSE(records[0].outcome.has_value());
}

TEST_CASE("parallel simulate output is byte-identical to serial") {
  auto dir = temp_dir();
  auto serial = dir / "serial.jsonl";
  auto parallel = dir / "parallel.jsonl";
  auto config = scripted_run_config(serial, 1);
  cmd_simulate(config);
  config.out_path = parallel;
  config.parallelism = 8;
  cmd_simulate(config);
  CHECK(read_file(serial) == read_file(parallel));
}

TEST_CASE("transcript records round-trip losslessly") {
  auto dir = temp_dir();
  auto out = dir / "roundtrip.jsonl";
  auto config = scripted_run_config(out);
  cmd_simulate(config);
  cmd_judge(out, config, false);

  auto records = load_transcripts(out);
  auto rewrite = dir / "rewrite.jsonl";
  save_transcripts(rewrite, records);
  CHECK(read_file(out) == read_file(rewrite));
}

TEST_CASE("judge fills outcomes and is idempotent") {
  auto dir = temp_dir();
  auto out = dir / "judged.jsonl";
  auto config = scripted_run_config(out);
  cmd_simulate(config);

  auto stats = cmd_judge(out, config, false);
  CHECK(stats.records == 192);
  CHECK(stats.judged == 192);
  CHECK(stats.failed == 0);

  auto records = load_transcripts(out);
  REQUIRE(records[0].outcome.has_value());
  CHECK(records[0].outcome->accepted_target);
  CHECK(records[0].outcome->success_round == 7);
  REQUIRE(records[0].intentions.has_value());
  CHECK(records[0].intentions->i_post == doctest::Approx(0.3));

  // Rerunning without --force consumes no judge replies at all: a shared
  // empty script would otherwise be exhausted immediately.
  auto rerun_config = config;
  rerun_config.judge_backend.replies.clear();
  rerun_config.judge_backend.per_session = false;
  auto rerun = cmd_judge(out, rerun_config, false);
  CHECK(rerun.skipped == 192);
  CHECK(rerun.judged == 0);
  CHECK(rerun.failed == 0);
}

TEST_CASE("records without a recommendation turn are flagged") {
  auto dir = temp_dir();
  auto out = dir / "norec.jsonl";
  auto config = scripted_run_config(out);
  // Conversation never mentions the target.
  config.user_backend.replies = {"Thanks, goodbye!"};
  config.system_backend.replies = {"Hello there!", "Goodbye!"};
  config.max_utterances = 20;
  config.judge_backend.replies = {
      R"(["accepted_any: no", "accepted_target: no", "success_round: none"])"};
  cmd_simulate(config);
  auto stats = cmd_judge(out, config, false);
  CHECK(stats.failed == 0);
  auto records = load_transcripts(out);
  REQUIRE(records[0].outcome.has_value());
  CHECK_FALSE(records[0].intentions.has_value());
  CHECK(records[0].intentions_note == "no_recommendation_turn");
}

TEST_CASE("report rejects unjudged transcripts by name") {
  auto dir = temp_dir();
  auto out = dir / "unjudged.jsonl";
  auto config = scripted_run_config(out);
  cmd_simulate(config);
  try {
    cmd_report(out, dir / "reports", {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("percrs judge") != std::string::npos);
  }
}

TEST_CASE("report emits the grouped tables") {
  auto dir = temp_dir();
  auto out = dir / "for_report.jsonl";
  auto config = scripted_run_config(out);
  cmd_simulate(config);
  cmd_judge(out, config, false);

  ReportRequest request;
  request.group_by = {"trait", "all"};
  request.format = "structured";
  request.top_k = 5;
  auto report_dir = dir / "reports";
  cmd_report(out, report_dir, request);

  auto metrics_csv = read_file(report_dir / "metrics.csv");
  CHECK(metrics_csv.rfind("group,n,SR,GSR,PRS,SCR,TCR\n", 0) == 0);
  // 10 trait rows + 1 all row + header
  int lines = 0;
  for (char c : metrics_csv) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 12);
  CHECK(metrics_csv.find("OPE+") != std::string::npos);
  CHECK(metrics_csv.find("ALL,192") != std::string::npos);

  auto matrix_csv = read_file(report_dir / "strategy_matrix.csv");
  CHECK(matrix_csv.rfind("group,Cr.,Au.,S.P.,E.R.,P.R.,L.A.\n", 0) == 0);

  auto lexical_csv = read_file(report_dir / "lexical.csv");
  CHECK(lexical_csv.rfind("group,rank,token,score\n", 0) == 0);

  auto structured = read_file(report_dir / "report.json");
  auto doc = nlohmann::json::parse(structured);
  CHECK(doc["metrics"].size() == 11);
  CHECK(doc["strategy_counting"] == "per_tag_occurrence");
}

TEST_CASE("report numbers match an independent recomputation") {
  auto dir = temp_dir();
  auto out = dir / "oracle.jsonl";
  auto config = scripted_run_config(out);
  config.explicit_profiles = {"O+C+E+A+N+"};
  config.profile_mode = ProfileMode::Explicit;
  cmd_simulate(config);
  cmd_judge(out, config, false);

  auto records = load_transcripts(out);
  REQUIRE(records.size() == 6);

  ReportRequest request;
  request.group_by = {"all"};
  auto report_dir = dir / "oracle_reports";
  cmd_report(out, report_dir, request);
  auto csv = read_file(report_dir / "metrics.csv");
  // Every session: accepted at round 7 of 7, intentions (0.3, 0.6), so
  // SR = GSR = 1, PRS = 0.5, SCR = TCR = 7.
  CHECK(csv.find("ALL,6,1,1,0.5,7,7") != std::string::npos);
}

TEST_CASE("consistency command scores judge verdicts against truth") {
  auto dir = temp_dir();
  auto out = dir / "consistency_input.jsonl";
  auto config = scripted_run_config(out);
  config.profile_mode = ProfileMode::Explicit;
  config.explicit_profiles = {"O+C+E+A+N-"};
  cmd_simulate(config);

  config.judge_backend.replies = {
      R"(["Openness: Positive", "Conscientiousness: Positive", "Extraversion: Positive", "Agreeableness: Positive", "Neuroticism: Negative"])"};
  auto out_dir = dir / "consistency_out";
  cmd_consistency(out, config, out_dir, {});

  auto verdicts = load_verdict_records(out_dir / "verdicts.jsonl");
  CHECK(verdicts.size() == 6);
  CHECK(verdicts[0].source == "judge");

  auto csv = read_file(out_dir / "consistency_judge.csv");
  CHECK(csv.rfind("dimension,P,R,F1\n", 0) == 0);
  CHECK(csv.find("Averaged,1,1,1") != std::string::npos);  // all correct
}

TEST_CASE("lexical command writes the trait table") {
  auto dir = temp_dir();
  auto out = dir / "lexical_input.jsonl";
  auto config = scripted_run_config(out);
  cmd_simulate(config);
  auto csv_path = dir / "lexical.csv";
  cmd_lexical(out, csv_path, 3);
  auto csv = read_file(csv_path);
  CHECK(csv.rfind("group,rank,token,score\n", 0) == 0);
  CHECK(csv.find("OPE+,1,") != std::string::npos);
}
