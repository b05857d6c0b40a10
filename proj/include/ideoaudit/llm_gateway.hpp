#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ideoaudit/canonical_json.hpp"

namespace ideoaudit::gateway {

enum class Role { system, user, assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view s);

struct ChatMessage {
  Role role = Role::user;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
  int max_tokens = 1024;
  std::optional<std::int64_t> rng_seed;

  /// Single-turn convenience constructor.
  static ChatRequest user_prompt(std::string model, std::string prompt, double temperature, int max_tokens = 1024);

  /// Throws ConfigError when an invariant is broken (no messages, empty
  /// user/assistant content, temperature outside [0, 2], max_tokens < 1).
  void validate() const;

  const std::string& last_user_message() const;
};

enum class Backend { live, replay, scripted };
std::string_view to_string(Backend backend);

struct ChatResponse {
  std::string content;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  Backend backend = Backend::scripted;
};

enum class Mode { live, record, replay, scripted };
std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view s);

struct BackendConfig {
  Mode mode = Mode::scripted;
  std::string endpoint_url = "https://api.openai.com/v1";
  std::string api_key_env_var = "OPENAI_API_KEY";
  std::string cache_dir = "cache";
  std::optional<std::string> script_path;
  int max_concurrency = 4;
  int retry_limit = 3;
  int backoff_ms = 500;
  int timeout_s = 120;
};

/// Canonical JSON form of a request (the bytes hashed by cache_key).
Json canonical_request(const ChatRequest& req);

/// SHA-256 over the canonical serialization; 64 lowercase hex chars.
std::string cache_key(const ChatRequest& req);

/// ceil(byte_length / 4). A heuristic, used only when usage is unreported.
std::int64_t token_estimate(std::string_view text);

// ---------------------------------------------------------------------------
// Transport

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct MultipartField {
  std::string name;
  std::string content;
  std::string filename;
  std::string content_type;
};

/// Minimal HTTP seam. The live implementation wraps cpp-httplib; tests
/// substitute fakes. Implementations throw TransportError on connection
/// failure and return non-2xx statuses as values.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post_json(const std::string& path, const std::string& body) = 0;
  virtual HttpResponse post_multipart(const std::string& path, const std::vector<MultipartField>& fields) = 0;
  virtual HttpResponse get(const std::string& path) = 0;
};

/// Transport over cpp-httplib. `base_url` may carry a path prefix
/// (e.g. https://api.openai.com/v1); request paths are appended to it.
std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url, std::string api_key, int timeout_s);

/// Builds the live transport for `cfg`, reading the API key from the
/// configured environment variable. Throws ConfigError if it is unset.
std::shared_ptr<HttpTransport> make_live_transport(const BackendConfig& cfg);

// ---------------------------------------------------------------------------
// Cache and script

/// Content-addressed response store: {dir}/{key[0:2]}/{key}.json.
/// Concurrent reads, serialized writes.
class ResponseCache {
 public:
  explicit ResponseCache(std::string dir) : dir_(std::move(dir)) {}

  std::optional<ChatResponse> load(const ChatRequest& req) const;
  void store(const ChatRequest& req, const ChatResponse& resp);
  std::string path_for(const std::string& key) const;
  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  mutable std::shared_mutex mu_;
};

struct ScriptRule {
  std::string match;
  std::string content;
  std::optional<std::string> model;
};

/// First rule whose `match` is a literal substring of the last user message
/// (and whose `model`, if given, equals the request model) wins. Content may
/// use {{seed}} and {{model}} placeholders.
class ScriptTable {
 public:
  ScriptTable() = default;
  explicit ScriptTable(std::vector<ScriptRule> rules) : rules_(std::move(rules)) {}
  static ScriptTable load(const std::string& path);
  static ScriptTable from_json(const Json& doc);

  /// Throws ScriptNoMatch.
  std::string reply(const ChatRequest& req) const;
  const std::vector<ScriptRule>& rules() const { return rules_; }

 private:
  std::vector<ScriptRule> rules_;
};

// ---------------------------------------------------------------------------
// Gateway

struct UsageRecord {
  std::string key;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  std::int64_t prompt_bytes = 0;
  std::int64_t completion_bytes = 0;

  /// Reported counts, or token_estimate over the byte lengths when the
  /// backend reported none.
  std::int64_t effective_prompt_tokens() const;
  std::int64_t effective_completion_tokens() const;
};

class Gateway {
 public:
  /// `transport` is used only in live and record modes; when null it is
  /// created lazily from cfg on first use.
  explicit Gateway(BackendConfig cfg, std::shared_ptr<HttpTransport> transport = nullptr);
  Gateway(BackendConfig cfg, ScriptTable script, std::shared_ptr<HttpTransport> transport = nullptr);

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Thread-safe. At most cfg.max_concurrency calls are in flight.
  ChatResponse complete(const ChatRequest& req);

  const BackendConfig& config() const { return cfg_; }
  HttpTransport& transport();

  /// Every completed call in completion order.
  std::vector<UsageRecord> usage_log() const;
  /// Cache keys of every completed call, sorted and deduplicated.
  std::vector<std::string> keys_used() const;
  void clear_usage();

 private:
  ChatResponse call_live(const ChatRequest& req);
  void note_usage(const std::string& key, const ChatRequest& req, const ChatResponse& resp);

  BackendConfig cfg_;
  ScriptTable script_;
  ResponseCache cache_;
  std::shared_ptr<HttpTransport> transport_;
  std::mutex transport_mu_;
  std::counting_semaphore<1024> slots_;
  mutable std::mutex usage_mu_;
  std::vector<UsageRecord> usage_;
};

/// Parses an OpenAI-compatible chat-completions response body.
ChatResponse parse_completion_body(const std::string& body);

/// The request body sent to POST {endpoint}/chat/completions.
Json completion_body(const ChatRequest& req);

}  // namespace ideoaudit::gateway
