#include "ideoaudit/llm_gateway.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <thread>

#include "ideoaudit/errors.hpp"

namespace ideoaudit::gateway {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "user";
}

Role role_from_string(std::string_view s) {
  if (s == "system") return Role::system;
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  throw ConfigError("unknown chat role '" + std::string(s) + "'");
}

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::live: return "live";
    case Backend::replay: return "replay";
    case Backend::scripted: return "scripted";
  }
  return "scripted";
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::live: return "live";
    case Mode::record: return "record";
    case Mode::replay: return "replay";
    case Mode::scripted: return "scripted";
  }
  return "scripted";
}

Mode mode_from_string(std::string_view s) {
  if (s == "live") return Mode::live;
  if (s == "record") return Mode::record;
  if (s == "replay") return Mode::replay;
  if (s == "scripted") return Mode::scripted;
  throw ConfigError("unknown backend mode '" + std::string(s) + "'");
}

ChatRequest ChatRequest::user_prompt(std::string model, std::string prompt, double temperature, int max_tokens) {
  ChatRequest req;
  req.model = std::move(model);
  req.messages.push_back({Role::user, std::move(prompt)});
  req.temperature = temperature;
  req.max_tokens = max_tokens;
  return req;
}

void ChatRequest::validate() const {
  if (model.empty()) throw ConfigError("chat request has no model");
  if (messages.empty()) throw ConfigError("chat request has no messages");
  for (const auto& m : messages) {
    if (m.role != Role::system && m.content.empty()) throw ConfigError("empty user/assistant message");
  }
  if (!std::isfinite(temperature) || temperature < 0.0 || temperature > 2.0) {
    throw ConfigError("temperature must be within [0, 2]");
  }
  if (max_tokens < 1) throw ConfigError("max_tokens must be positive");
}

const std::string& ChatRequest::last_user_message() const {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == Role::user) return it->content;
  }
  static const std::string kEmpty;
  return kEmpty;
}

Json canonical_request(const ChatRequest& req) {
  Json messages = Json::array();
  for (const auto& m : req.messages) {
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  Json doc = {
      {"model", req.model},
      {"messages", std::move(messages)},
      {"temperature", req.temperature},
      {"max_tokens", req.max_tokens},
  };
  if (req.rng_seed) doc["rng_seed"] = *req.rng_seed;
  return doc;
}

std::string cache_key(const ChatRequest& req) { return canonical_digest(canonical_request(req)); }

std::int64_t token_estimate(std::string_view text) {
  return static_cast<std::int64_t>((text.size() + 3) / 4);
}

Json completion_body(const ChatRequest& req) {
  Json messages = Json::array();
  for (const auto& m : req.messages) {
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  }
  Json body = {
      {"model", req.model},
      {"messages", std::move(messages)},
      {"temperature", req.temperature},
      {"max_tokens", req.max_tokens},
  };
  if (req.rng_seed) body["seed"] = *req.rng_seed;
  return body;
}

ChatResponse parse_completion_body(const std::string& body) {
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::exception& e) {
    throw TransportError(std::string("malformed completion body: ") + e.what());
  }
  ChatResponse resp;
  resp.backend = Backend::live;
  try {
    resp.content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception&) {
    throw TransportError("completion body lacks choices[0].message.content");
  }
  if (auto usage = doc.find("usage"); usage != doc.end() && usage->is_object()) {
    resp.prompt_tokens = usage->value("prompt_tokens", std::int64_t{0});
    resp.completion_tokens = usage->value("completion_tokens", std::int64_t{0});
  }
  return resp;
}

// ---------------------------------------------------------------------------

std::string ResponseCache::path_for(const std::string& key) const {
  return (std::filesystem::path(dir_) / key.substr(0, 2) / (key + ".json")).string();
}

std::optional<ChatResponse> ResponseCache::load(const ChatRequest& req) const {
  const std::string key = cache_key(req);
  const std::string path = path_for(key);
  std::string bytes;
  {
    std::shared_lock lock(mu_);
    if (!std::filesystem::exists(path)) return std::nullopt;
    bytes = read_file(path);
  }
  const Json doc = Json::parse(bytes);
  const Json& r = doc.at("response");
  ChatResponse resp;
  resp.content = r.at("content").get<std::string>();
  resp.prompt_tokens = r.at("prompt_tokens").get<std::int64_t>();
  resp.completion_tokens = r.at("completion_tokens").get<std::int64_t>();
  resp.backend = Backend::replay;
  return resp;
}

void ResponseCache::store(const ChatRequest& req, const ChatResponse& resp) {
  const std::string key = cache_key(req);
  OrderedJson doc;
  doc["request"] = OrderedJson::parse(canonical_dump(canonical_request(req)));
  doc["response"] = {
      {"content", resp.content},
      {"prompt_tokens", resp.prompt_tokens},
      {"completion_tokens", resp.completion_tokens},
  };
  std::unique_lock lock(mu_);
  write_file(path_for(key), doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

ScriptTable ScriptTable::from_json(const Json& doc) {
  if (!doc.is_array()) throw ConfigError("script file must be a JSON array");
  std::vector<ScriptRule> rules;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const Json& r = doc[i];
    if (!r.is_object() || !r.contains("match") || !r.contains("content") || !r["match"].is_string() ||
        !r["content"].is_string()) {
      throw ConfigError("script rule " + std::to_string(i) + " needs string fields \"match\" and \"content\"");
    }
    ScriptRule rule{r["match"].get<std::string>(), r["content"].get<std::string>(), std::nullopt};
    if (r.contains("model")) rule.model = r["model"].get<std::string>();
    rules.push_back(std::move(rule));
  }
  return ScriptTable(std::move(rules));
}

ScriptTable ScriptTable::load(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("script file not found: " + path);
  try {
    return from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw ConfigError("script file " + path + " is not valid JSON: " + e.what());
  }
}

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string ScriptTable::reply(const ChatRequest& req) const {
  const std::string& prompt = req.last_user_message();
  for (const auto& rule : rules_) {
    if (rule.model && *rule.model != req.model) continue;
    if (prompt.find(rule.match) == std::string::npos) continue;
    std::string content = rule.content;
    replace_all(content, "{{seed}}", std::to_string(req.rng_seed.value_or(0)));
    replace_all(content, "{{model}}", req.model);
    return content;
  }
  throw ScriptNoMatch("no script rule matches prompt: " + prompt.substr(0, 80));
}

// ---------------------------------------------------------------------------

std::int64_t UsageRecord::effective_prompt_tokens() const {
  return prompt_tokens > 0 || completion_tokens > 0 ? prompt_tokens : (prompt_bytes + 3) / 4;
}

std::int64_t UsageRecord::effective_completion_tokens() const {
  return prompt_tokens > 0 || completion_tokens > 0 ? completion_tokens : (completion_bytes + 3) / 4;
}

Gateway::Gateway(BackendConfig cfg, std::shared_ptr<HttpTransport> transport)
    : Gateway(cfg, cfg.mode == Mode::scripted
                       ? (cfg.script_path ? ScriptTable::load(*cfg.script_path)
                                          : throw ConfigError("scripted mode requires script_path"))
                       : ScriptTable{},
              std::move(transport)) {}

Gateway::Gateway(BackendConfig cfg, ScriptTable script, std::shared_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)),
      script_(std::move(script)),
      cache_(cfg_.cache_dir),
      transport_(std::move(transport)),
      slots_(std::clamp(cfg_.max_concurrency, 1, 1024)) {
  if (cfg_.max_concurrency < 1) throw ConfigError("max_concurrency must be positive");
  if (cfg_.retry_limit < 0) throw ConfigError("retry_limit must be non-negative");
}

HttpTransport& Gateway::transport() {
  std::lock_guard lock(transport_mu_);
  if (!transport_) transport_ = make_live_transport(cfg_);
  return *transport_;
}

ChatResponse Gateway::call_live(const ChatRequest& req) {
  const std::string body = completion_body(req).dump();
  const int attempts = std::max(1, cfg_.retry_limit);
  std::string last_error;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      const auto delay = std::chrono::milliseconds(static_cast<long long>(cfg_.backoff_ms) << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    try {
      const HttpResponse r = transport().post_json("/chat/completions", body);
      if (r.status >= 200 && r.status < 300) return parse_completion_body(r.body);
      last_error = "HTTP " + std::to_string(r.status) + ": " + r.body.substr(0, 200);
      if (r.status != 429 && r.status < 500) break;
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  throw TransportError("chat completion failed after " + std::to_string(attempts) + " attempt(s): " + last_error);
}

void Gateway::note_usage(const std::string& key, const ChatRequest& req, const ChatResponse& resp) {
  UsageRecord rec;
  rec.key = key;
  rec.prompt_tokens = resp.prompt_tokens;
  rec.completion_tokens = resp.completion_tokens;
  for (const auto& m : req.messages) rec.prompt_bytes += static_cast<std::int64_t>(m.content.size());
  rec.completion_bytes = static_cast<std::int64_t>(resp.content.size());
  std::lock_guard lock(usage_mu_);
  usage_.push_back(std::move(rec));
}

ChatResponse Gateway::complete(const ChatRequest& req) {
  req.validate();
  const std::string key = cache_key(req);

  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};

  ChatResponse resp;
  switch (cfg_.mode) {
    case Mode::scripted:
      resp.content = script_.reply(req);
      resp.backend = Backend::scripted;
      break;
    case Mode::replay: {
      auto cached = cache_.load(req);
      if (!cached) throw ReplayMiss(key);
      resp = std::move(*cached);
      break;
    }
    case Mode::record: {
      if (auto cached = cache_.load(req)) {
        resp = std::move(*cached);
        break;
      }
      resp = call_live(req);
      cache_.store(req, resp);
      break;
    }
    case Mode::live:
      resp = call_live(req);
      break;
  }
  note_usage(key, req, resp);
  return resp;
}

std::vector<UsageRecord> Gateway::usage_log() const {
  std::lock_guard lock(usage_mu_);
  return usage_;
}

std::vector<std::string> Gateway::keys_used() const {
  std::set<std::string> keys;
  {
    std::lock_guard lock(usage_mu_);
    for (const auto& u : usage_) keys.insert(u.key);
  }
  return {keys.begin(), keys.end()};
}

void Gateway::clear_usage() {
  std::lock_guard lock(usage_mu_);
  usage_.clear();
}

}  // namespace ideoaudit::gateway
