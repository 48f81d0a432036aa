#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "percrs/dialogue.hpp"
#include "percrs/gateway.hpp"

namespace percrs {

// Policy for read-only judge calls (outcome, intentions, personality).
// Deterministic by default: temperature 0.
struct JudgeOptions {
  std::string model_name = "judge";
  double temperature = 0.0;
  int max_reply_tokens = 128;
  RetryPolicy retry;
  // Full ask-and-parse cycles before giving up on the judge reply.
  int parse_attempts = 2;
};

struct SessionOutcome {
  std::string session_id;
  bool accepted_any = false;
  bool accepted_target = false;
  std::optional<int> success_round;  // present iff accepted_any
  int rounds_total = 0;
  std::string detection_path;  // "judge" or "fallback"
};

struct IntentionTrace {
  double i_pre = 0.0;  // fixed
  double i_post = 0.0;
  double i_true = 0.0;
};

class OutcomeUnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Session lacks a recommendation-bearing system turn; excluded from PRS.
class UndefinedIntentionsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain "role: text" transcript lines (tag-free), shared by the judge
// prompt builders.
std::string render_transcript(const Conversation& conversation,
                              std::size_t limit_utterances = SIZE_MAX);

std::string build_outcome_prompt(const Conversation& conversation);
std::string build_intention_prompt(const Conversation& conversation,
                                   std::size_t limit_utterances);

// Expected reply line:
//   ["accepted_any: yes", "accepted_target: no", "success_round: none"]
// Entries may arrive in any order; surrounding prose is ignored.
SessionOutcome parse_outcome_reply(std::string_view reply, int rounds_total);

// Expected reply line: ["intention: 0.4"] with the score in [0,1].
double parse_intention_reply(std::string_view reply);

// Judge-primary with a rule fallback: when the judge reply stays
// unparseable (or the backend keeps failing) the target title is searched
// in user turns together with an acceptance phrase. detection_path records
// which route produced the outcome.
SessionOutcome judge_outcome(const Conversation& conversation,
                             Backend& judge_backend,
                             const JudgeOptions& options = {});

// Rule fallback alone (no backend).
std::optional<SessionOutcome> rule_based_outcome(
    const Conversation& conversation);

// First system utterance whose tag-free text mentions the target item,
// case-insensitively; the cut point for i_post.
std::optional<std::size_t> first_recommendation_turn(
    const Conversation& conversation);

// Two judge calls: willingness after the first recommendation-bearing
// round (i_post, judged on the prefix transcript) and at conversation end
// (i_true). i_pre is fixed at 0 and i_post is clamped to i_true.
IntentionTrace elicit_intentions(const Conversation& conversation,
                                 Backend& judge_backend,
                                 const JudgeOptions& options = {});

}  // namespace percrs
