#include "percrs/gateway.hpp"

#include <cstdlib>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace percrs {

namespace {

void validate(const ChatRequest& request) {
  if (request.messages.empty()) {
    throw std::invalid_argument("chat request: messages must be non-empty");
  }
  if (request.messages.front().role != ChatRole::SystemInstruction) {
    throw std::invalid_argument(
        "chat request: first message must be the system instruction");
  }
  for (std::size_t i = 0; i + 1 < request.messages.size(); ++i) {
    if (request.messages[i].content.empty()) {
      throw std::invalid_argument(
          "chat request: only the final message may be empty (message " +
          std::to_string(i) + ")");
    }
  }
  if (request.temperature < 0.0) {
    throw std::invalid_argument("chat request: temperature must be >= 0");
  }
  if (request.max_reply_tokens <= 0) {
    throw std::invalid_argument("chat request: max_reply_tokens must be > 0");
  }
}

}  // namespace

std::string_view chat_role_name(ChatRole role) {
  switch (role) {
    case ChatRole::SystemInstruction: return "system";
    case ChatRole::UserTurn: return "user";
    case ChatRole::AssistantTurn: return "assistant";
  }
  return "user";
}

Completion complete(Backend& backend, const ChatRequest& request,
                    const RetryPolicy& policy) {
  validate(request);
  auto started = std::chrono::steady_clock::now();
  auto delay = policy.initial_delay;
  int attempts = std::max(policy.max_attempts, 1);
  for (int attempt = 1;; ++attempt) {
    try {
      std::string text = backend.attempt(request);
      Completion done;
      done.text = std::move(text);
      done.backend_id = backend.id();
      done.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      done.attempt_count = attempt;
      return done;
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= attempts) throw;
      std::this_thread::sleep_for(delay);
      auto next = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(delay.count()) * policy.multiplier));
      delay = std::min(next, policy.max_delay);
    }
  }
}

ScriptedBackend::ScriptedBackend(std::vector<std::string> replies,
                                 std::string id)
    : replies_(std::move(replies)), id_(std::move(id)) {}

std::string ScriptedBackend::attempt(const ChatRequest&) {
  std::lock_guard lock(mutex_);
  if (next_ >= replies_.size()) {
    throw BackendError(BackendErrorKind::ScriptExhausted,
                       "scripted backend \"" + id_ + "\" exhausted after " +
                           std::to_string(replies_.size()) + " replies");
  }
  return replies_[next_++];
}

std::size_t ScriptedBackend::consumed() const {
  std::lock_guard lock(mutex_);
  return next_;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return replies_.size() - next_;
}

std::shared_ptr<ScriptedBackend> make_scripted_backend(
    std::vector<std::string> replies, std::string id) {
  return std::make_shared<ScriptedBackend>(std::move(replies), std::move(id));
}

struct HttpChatBackend::Impl {
  Options options;
  std::counting_semaphore<> slots;

  explicit Impl(Options opts)
      : options(std::move(opts)),
        slots(std::max(options.max_concurrent, 1)) {}
};

HttpChatBackend::HttpChatBackend(Options options)
    : impl_(std::make_unique<Impl>(std::move(options))) {
  if (impl_->options.base_url.empty()) {
    throw std::invalid_argument("http backend: base_url must be set");
  }
}

HttpChatBackend::~HttpChatBackend() = default;

std::string HttpChatBackend::id() const {
  return "http:" + impl_->options.base_url;
}

std::string HttpChatBackend::attempt(const ChatRequest& request) {
  nlohmann::json body;
  body["model"] = request.model_name;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_reply_tokens;
  auto messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    messages.push_back(
        {{"role", std::string(chat_role_name(m.role))}, {"content", m.content}});
  }
  body["messages"] = messages;

  impl_->slots.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{impl_->slots};

  httplib::Client client(impl_->options.base_url);
  client.set_connection_timeout(impl_->options.timeout);
  client.set_read_timeout(impl_->options.timeout);
  client.set_write_timeout(impl_->options.timeout);
  httplib::Headers headers;
  if (!impl_->options.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + impl_->options.api_key);
  }

  auto result = client.Post(impl_->options.path, headers, body.dump(),
                            "application/json");
  if (!result) {
    auto err = result.error();
    if (err == httplib::Error::ConnectionTimeout ||
        err == httplib::Error::Read || err == httplib::Error::Write) {
      throw BackendError(BackendErrorKind::Timeout,
                         "http backend: request timed out");
    }
    throw BackendError(BackendErrorKind::Transport,
                       "http backend: transport failure (" +
                           std::string(httplib::to_string(err)) + ")");
  }

  int status = result->status;
  if (status == 401 || status == 403) {
    throw BackendError(BackendErrorKind::Auth,
                       "http backend: authentication rejected (HTTP " +
                           std::to_string(status) + ")");
  }
  if (status == 429) {
    throw BackendError(BackendErrorKind::RateLimited,
                       "http backend: rate limited (HTTP 429)");
  }
  if (status == 408) {
    throw BackendError(BackendErrorKind::Timeout,
                       "http backend: server reported timeout (HTTP 408)");
  }
  if (status >= 500) {
    throw BackendError(BackendErrorKind::ServerError,
                       "http backend: server error (HTTP " +
                           std::to_string(status) + ")");
  }
  if (status != 200) {
    throw BackendError(BackendErrorKind::Rejected,
                       "http backend: request rejected (HTTP " +
                           std::to_string(status) + ")");
  }

  try {
    auto reply = nlohmann::json::parse(result->body);
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(BackendErrorKind::MalformedResponse,
                       std::string("http backend: unexpected reply shape: ") +
                           e.what());
  }
}

std::string api_key_from_env() {
  const char* key = std::getenv("PERCRS_API_KEY");
  return key ? key : "";
}

}  // namespace percrs
