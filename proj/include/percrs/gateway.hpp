#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace percrs {

enum class ChatRole { SystemInstruction, UserTurn, AssistantTurn };

struct ChatMessage {
  ChatRole role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;  // first must be a SystemInstruction
  std::string model_name;
  double temperature = 0.7;
  int max_reply_tokens = 256;
};

struct Completion {
  std::string text;
  std::string backend_id;
  std::chrono::milliseconds latency{0};
  int attempt_count = 1;
};

enum class BackendErrorKind {
  Auth,               // bad/missing credentials; never retried
  Timeout,            // request timed out; retried
  RateLimited,        // throttled; retried
  ServerError,        // backend-side 5xx; retried
  Transport,          // connection-level failure; retried
  Rejected,           // other non-retryable HTTP failure
  MalformedResponse,  // reply arrived but not in the expected shape
  ScriptExhausted,    // scripted backend out of replies
};

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  BackendErrorKind kind() const { return kind_; }
  bool retryable() const {
    return kind_ == BackendErrorKind::Timeout ||
           kind_ == BackendErrorKind::RateLimited ||
           kind_ == BackendErrorKind::ServerError ||
           kind_ == BackendErrorKind::Transport;
  }

 private:
  BackendErrorKind kind_;
};

// One completion attempt, no retry semantics. Implementations must be safe
// for concurrent attempt() calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  virtual std::string attempt(const ChatRequest& request) = 0;  // throws BackendError
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{5000};
};

// Validates the request, runs attempts against the backend, and backs off
// exponentially between retryable failures. Either returns the full reply
// text or throws the last BackendError; never a partial reply.
Completion complete(Backend& backend, const ChatRequest& request,
                    const RetryPolicy& policy = {});

// Deterministic stand-in for a model: replays a fixed reply list in order,
// ignoring request content. Exhaustion raises ScriptExhausted. The reply
// index advances atomically, so a shared handle serializes consumers.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> replies,
                           std::string id = "scripted");

  std::string id() const override { return id_; }
  std::string attempt(const ChatRequest& request) override;

  std::size_t consumed() const;
  std::size_t remaining() const;

 private:
  std::vector<std::string> replies_;
  std::string id_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;
};

std::shared_ptr<ScriptedBackend> make_scripted_backend(
    std::vector<std::string> replies, std::string id = "scripted");

// Remote chat-completions endpoint speaking the usual JSON wire shape
// (POST {base_url}{path} with a messages array of role/content pairs).
// In-flight requests are capped at max_concurrent across all threads
// sharing the handle.
class HttpChatBackend : public Backend {
 public:
  struct Options {
    std::string base_url;                      // e.g. "https://api.example.com"
    std::string path = "/v1/chat/completions";
    std::string api_key;                       // empty = no Authorization header
    int max_concurrent = 4;
    std::chrono::seconds timeout{60};
  };

  explicit HttpChatBackend(Options options);
  ~HttpChatBackend() override;

  std::string id() const override;
  std::string attempt(const ChatRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Credentials come from the PERCRS_API_KEY environment variable only;
// returns "" when unset.
std::string api_key_from_env();

std::string_view chat_role_name(ChatRole role);  // "system"/"user"/"assistant"

}  // namespace percrs
