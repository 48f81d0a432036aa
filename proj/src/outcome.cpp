#include "percrs/outcome.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace percrs {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trimmed(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

// Quoted entries of the first bracketed list in the reply.
std::vector<std::string> bracketed_entries(std::string_view reply) {
  auto open = reply.find('[');
  if (open == std::string_view::npos) {
    throw std::runtime_error("judge reply: no bracketed list found");
  }
  auto close = reply.find(']', open + 1);
  if (close == std::string_view::npos) {
    throw std::runtime_error("judge reply: unterminated bracketed list");
  }
  std::string_view body = reply.substr(open + 1, close - open - 1);
  std::vector<std::string> entries;
  std::size_t i = 0;
  while (i < body.size()) {
    char c = body[i];
    if (c == '"' || c == '\'') {
      auto end = body.find(c, i + 1);
      if (end == std::string_view::npos) {
        throw std::runtime_error("judge reply: unterminated quote in list");
      }
      entries.push_back(std::string(body.substr(i + 1, end - i - 1)));
      i = end + 1;
    } else if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else {
      // Unquoted entry: read to the next comma.
      auto end = body.find(',', i);
      if (end == std::string_view::npos) end = body.size();
      std::string entry = trimmed(body.substr(i, end - i));
      if (!entry.empty()) entries.push_back(std::move(entry));
      i = end;
    }
  }
  if (entries.empty()) {
    throw std::runtime_error("judge reply: bracketed list is empty");
  }
  return entries;
}

std::pair<std::string, std::string> split_entry(const std::string& entry) {
  auto colon = entry.find(':');
  if (colon == std::string::npos) {
    throw std::runtime_error("judge reply: entry \"" + entry +
                             "\" is not key: value");
  }
  return {lower(trimmed(entry.substr(0, colon))),
          trimmed(entry.substr(colon + 1))};
}

bool parse_yes_no(const std::string& value) {
  std::string v = lower(value);
  if (v == "yes" || v == "true") return true;
  if (v == "no" || v == "false") return false;
  throw std::runtime_error("judge reply: expected yes/no, got \"" + value +
                           "\"");
}

constexpr std::array<std::string_view, 14> kAcceptancePhrases = {
    "i'd like to give it a try", "i'll give it a try", "give it a try",
    "i'll consider",             "i will consider",    "i'll check it out",
    "i will check it out",       "i'll watch",         "i will watch",
    "i'll try",                  "i will try",         "i accept",
    "sounds great",              "i'll take",
};

int round_of_utterance(std::size_t index) {
  return static_cast<int>(index / 2) + 1;
}

}  // namespace

std::string render_transcript(const Conversation& conversation,
                              std::size_t limit_utterances) {
  std::ostringstream out;
  std::size_t count =
      std::min(limit_utterances, conversation.utterances.size());
  for (std::size_t i = 0; i < count; ++i) {
    const auto& u = conversation.utterances[i];
    out << role_name(u.role) << ": " << u.text << '\n';
  }
  return out.str();
}

std::string build_outcome_prompt(const Conversation& conversation) {
  const std::string noun = conversation.seed.domain.item_noun();
  std::ostringstream out;
  out << "You are evaluating a finished recommendation conversation.\n\n";
  out << "The recommender's target " << noun << " was: \""
      << conversation.seed.target_item << "\".\n\n";
  out << "Conversation transcript:\n"
      << render_transcript(conversation) << "\n";
  out << "Answer three questions about the user's final position:\n";
  out << "1. Did the user accept any recommended item during the "
         "conversation?\n";
  out << "2. Did the user accept the target item \""
      << conversation.seed.target_item << "\"?\n";
  out << "3. If the user accepted, in which round did the first acceptance "
         "happen? Rounds count from 1; one round is a user turn plus the "
         "following system turn.\n\n";
  out << "Reply with exactly one line in this list format:\n";
  out << "[\"accepted_any: yes\", \"accepted_target: no\", \"success_round: "
         "none\"]\n";
  out << "Use yes or no for the first two entries and a round number or none "
         "for the third.\n";
  return out.str();
}

std::string build_intention_prompt(const Conversation& conversation,
                                   std::size_t limit_utterances) {
  const std::string noun = conversation.seed.domain.item_noun();
  std::ostringstream out;
  out << "You are rating a user's willingness to accept a recommended item.\n\n";
  out << "The recommender's target " << noun << " is: \""
      << conversation.seed.target_item << "\".\n\n";
  out << "Conversation so far:\n"
      << render_transcript(conversation, limit_utterances) << "\n";
  out << "On a scale from 0 to 1, where 0 means no intention at all and 1 "
         "means certain acceptance, how willing is the user to accept the "
         "target " << noun << " at this point?\n\n";
  out << "Reply with exactly one line in this list format:\n";
  out << "[\"intention: 0.4\"]\n";
  return out.str();
}

SessionOutcome parse_outcome_reply(std::string_view reply, int rounds_total) {
  SessionOutcome outcome;
  outcome.rounds_total = rounds_total;
  std::optional<bool> any;
  std::optional<bool> target;
  std::optional<std::string> round_text;
  for (const auto& entry : bracketed_entries(reply)) {
    auto [key, value] = split_entry(entry);
    if (key == "accepted_any") {
      any = parse_yes_no(value);
    } else if (key == "accepted_target") {
      target = parse_yes_no(value);
    } else if (key == "success_round") {
      round_text = value;
    } else {
      throw std::runtime_error("judge reply: unknown key \"" + key + "\"");
    }
  }
  if (!any || !target || !round_text) {
    throw std::runtime_error(
        "judge reply: accepted_any, accepted_target and success_round are all "
        "required");
  }
  outcome.accepted_target = *target;
  // A target acceptance is an acceptance.
  outcome.accepted_any = *any || *target;
  if (outcome.accepted_any) {
    std::string v = lower(*round_text);
    if (v == "none" || v.empty()) {
      throw std::runtime_error(
          "judge reply: success_round required when the user accepted");
    }
    int round = 0;
    try {
      round = std::stoi(v);
    } catch (const std::exception&) {
      throw std::runtime_error("judge reply: success_round \"" + *round_text +
                               "\" is not a number");
    }
    if (round < 1) {
      throw std::runtime_error("judge reply: success_round must be >= 1");
    }
    outcome.success_round = std::min(round, rounds_total);
  }
  return outcome;
}

double parse_intention_reply(std::string_view reply) {
  for (const auto& entry : bracketed_entries(reply)) {
    auto [key, value] = split_entry(entry);
    if (key != "intention") continue;
    double score = 0.0;
    try {
      score = std::stod(value);
    } catch (const std::exception&) {
      throw std::runtime_error("judge reply: intention \"" + value +
                               "\" is not a number");
    }
    return std::clamp(score, 0.0, 1.0);
  }
  throw std::runtime_error("judge reply: no intention entry found");
}

std::optional<SessionOutcome> rule_based_outcome(
    const Conversation& conversation) {
  if (conversation.utterances.empty()) return std::nullopt;
  SessionOutcome outcome;
  outcome.session_id = conversation.session_id;
  outcome.rounds_total = conversation.rounds;
  outcome.detection_path = "fallback";
  const std::string target = lower(conversation.seed.target_item);
  for (const auto& u : conversation.utterances) {
    if (u.role != Role::User) continue;
    std::string text = lower(u.text);
    if (text.find(target) == std::string::npos) continue;
    for (auto phrase : kAcceptancePhrases) {
      if (text.find(phrase) != std::string::npos) {
        outcome.accepted_any = true;
        outcome.accepted_target = true;
        outcome.success_round =
            round_of_utterance(static_cast<std::size_t>(u.turn_index));
        return outcome;
      }
    }
  }
  return outcome;  // nothing detected: a valid negative outcome
}

SessionOutcome judge_outcome(const Conversation& conversation,
                             Backend& judge_backend,
                             const JudgeOptions& options) {
  if (conversation.utterances.empty()) {
    throw OutcomeUnavailableError("judge_outcome: conversation is empty");
  }
  ChatRequest request;
  request.messages.push_back(
      {ChatRole::SystemInstruction, build_outcome_prompt(conversation)});
  request.messages.push_back(
      {ChatRole::UserTurn, "Evaluate the conversation now."});
  request.model_name = options.model_name;
  request.temperature = options.temperature;
  request.max_reply_tokens = options.max_reply_tokens;

  for (int attempt = 0; attempt < std::max(options.parse_attempts, 1);
       ++attempt) {
    try {
      Completion reply = complete(judge_backend, request, options.retry);
      SessionOutcome outcome =
          parse_outcome_reply(reply.text, conversation.rounds);
      outcome.session_id = conversation.session_id;
      outcome.detection_path = "judge";
      return outcome;
    } catch (const BackendError&) {
      break;  // transport retries already exhausted inside complete()
    } catch (const std::runtime_error&) {
      continue;  // unparseable reply: ask again
    }
  }
  if (auto fallback = rule_based_outcome(conversation)) return *fallback;
  throw OutcomeUnavailableError(
      "judge_outcome: judge unusable and rule fallback inapplicable for "
      "session " +
      conversation.session_id);
}

std::optional<std::size_t> first_recommendation_turn(
    const Conversation& conversation) {
  const std::string target = lower(conversation.seed.target_item);
  for (const auto& u : conversation.utterances) {
    if (u.role != Role::System) continue;
    if (lower(u.text).find(target) != std::string::npos) {
      return static_cast<std::size_t>(u.turn_index);
    }
  }
  return std::nullopt;
}

IntentionTrace elicit_intentions(const Conversation& conversation,
                                 Backend& judge_backend,
                                 const JudgeOptions& options) {
  auto cut = first_recommendation_turn(conversation);
  if (!cut) {
    throw UndefinedIntentionsError(
        "elicit_intentions: no system turn mentions the target item in "
        "session " +
        conversation.session_id);
  }

  auto ask = [&](std::size_t limit) {
    ChatRequest request;
    request.messages.push_back(
        {ChatRole::SystemInstruction,
         build_intention_prompt(conversation, limit)});
    request.messages.push_back(
        {ChatRole::UserTurn, "Rate the user's intention now."});
    request.model_name = options.model_name;
    request.temperature = options.temperature;
    request.max_reply_tokens = options.max_reply_tokens;

    std::string last_error;
    for (int attempt = 0; attempt < std::max(options.parse_attempts, 1);
         ++attempt) {
      try {
        Completion reply = complete(judge_backend, request, options.retry);
        return parse_intention_reply(reply.text);
      } catch (const std::runtime_error& e) {
        last_error = e.what();
      }
    }
    throw OutcomeUnavailableError("elicit_intentions: " + last_error);
  };

  IntentionTrace trace;
  trace.i_pre = 0.0;
  trace.i_post = ask(*cut + 1);  // prefix ends with the recommending turn
  trace.i_true = ask(conversation.utterances.size());
  trace.i_post = std::min(trace.i_post, trace.i_true);
  return trace;
}

}  // namespace percrs
