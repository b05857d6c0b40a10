#include "ideoaudit/app/config.hpp"

#include <filesystem>
#include <set>

#include "ideoaudit/errors.hpp"

#ifndef IDEOAUDIT_DATA_DIR
#define IDEOAUDIT_DATA_DIR "data"
#endif

namespace ideoaudit::app {

namespace fs = std::filesystem;

namespace {

enum class Kind { string, integer, number, boolean, model_map, size_list };

struct Field {
  const char* section;
  const char* key;
  Kind kind;
  Json fallback;  // null: optional with no default
  const char* description;
  std::vector<std::string> choices = {};
};

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      {"backend", "mode", Kind::string, "scripted", "live | record | replay | scripted",
       {"live", "record", "replay", "scripted"}},
      {"backend", "endpoint_url", Kind::string, "https://api.openai.com/v1", "OpenAI-compatible base URL"},
      {"backend", "api_key_env_var", Kind::string, "OPENAI_API_KEY", "environment variable holding the API key"},
      {"backend", "cache_dir", Kind::string, "cache", "record/replay cache, relative to the workspace"},
      {"backend", "script_path", Kind::string, nullptr, "scripted-mode rule file, relative to this config"},
      {"backend", "max_concurrency", Kind::integer, 4, "requests in flight"},
      {"backend", "retry_limit", Kind::integer, 3, "transport attempts before giving up"},
      {"backend", "backoff_ms", Kind::integer, 500, "base of the exponential retry backoff"},
      {"backend", "timeout_s", Kind::integer, 120, "HTTP connect/read timeout"},

      {"tree", "categories", Kind::integer, 5, "root categories requested ([X])"},
      {"tree", "topics_per_expansion", Kind::integer, 5, "topics per expansion ([Y])"},
      {"tree", "max_depth", Kind::integer, 4, "maximum depth"},
      {"tree", "retry_limit", Kind::integer, 3, "re-asks when a reply does not parse"},
      {"tree", "model", Kind::string, "gpt-3.5-turbo", "model used to grow the tree"},
      {"tree", "temperature", Kind::number, 1.0, "sampling temperature for tree requests"},
      {"tree", "max_tokens", Kind::integer, 1024, "completion budget per request"},

      {"synth", "mode", Kind::string, "softmax", "importance to probability transform", {"softmax", "clamp_linear"}},
      {"synth", "tau", Kind::number, 1.0, "softmax temperature"},
      {"synth", "K", Kind::integer, 5, "QA pairs requested per prompt"},
      {"synth", "target_size", Kind::integer, 100, "QA pairs per dataset"},
      {"synth", "rng_seed", Kind::integer, 42, "seed of the topic sampler"},
      {"synth", "system_prompt", Kind::string, std::string(synth::kDefaultSystemPrompt), "system message in JSONL"},
      {"synth", "model", Kind::string, "gpt-3.5-turbo", "model used to write QA pairs"},
      {"synth", "temperature", Kind::number, 1.0, "sampling temperature for QA requests"},
      {"synth", "max_tokens", Kind::integer, 2048, "completion budget per request"},
      {"synth", "retry_limit", Kind::integer, 3, "re-asks when a reply does not parse"},

      {"eval", "probe_file", Kind::string, nullptr, "probe set, probe_id<TAB>question per line"},
      {"eval", "lexicon_file", Kind::string, nullptr, "lexicon, term<TAB>W<TAB>S per line (bundled if unset)"},
      {"eval", "scorer", Kind::string, "lexicon", "lexicon | llm", {"lexicon", "llm"}},
      {"eval", "models", Kind::model_map, Json::object(), "model ids keyed by base/champion/challenger"},
      {"eval", "scorer_model", Kind::string, "gpt-3.5-turbo", "model used by the llm scorer"},
      {"eval", "max_tokens", Kind::integer, 512, "completion budget per probe answer"},

      {"pricing", "training_per_1k_tokens", Kind::number, 0.0, "fine-tune training price"},
      {"pricing", "input_per_1k_tokens", Kind::number, 0.0, "prompt token price"},
      {"pricing", "output_per_1k_tokens", Kind::number, 0.0, "completion token price"},
      {"pricing", "epochs", Kind::integer, 3, "training epochs"},

      {"finetune", "base_model", Kind::string, "gpt-3.5-turbo", "model to fine-tune"},
      {"finetune", "poll_interval_s", Kind::integer, 30, "seconds between job polls (live)"},
      {"finetune", "poll_limit", Kind::integer, 2880, "polls before giving up"},

      {"sweep", "sizes", Kind::size_list, Json::array({100, 200, 300, 400, 500}), "dataset sizes"},
      {"sweep", "side", Kind::string, "positive", "tree side to sample", {"positive", "negative"}},
      {"sweep", "champion_template", Kind::string, "{model}", "champion id; {model} and {size} are substituted"},
  };
  return kFields;
}

const std::vector<std::string>& sections() {
  static const std::vector<std::string> kSections{"backend", "tree", "synth", "eval", "pricing", "finetune", "sweep"};
  return kSections;
}

bool kind_matches(Kind kind, const Json& v) {
  switch (kind) {
    case Kind::string: return v.is_string();
    case Kind::integer: return v.is_number_integer();
    case Kind::number: return v.is_number();
    case Kind::boolean: return v.is_boolean();
    case Kind::model_map: return v.is_object();
    case Kind::size_list: return v.is_array();
  }
  return false;
}

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::string: return "string";
    case Kind::integer: return "integer";
    case Kind::number: return "number";
    case Kind::boolean: return "boolean";
    case Kind::model_map: return "object";
    case Kind::size_list: return "array";
  }
  return "?";
}

Json validate_and_fill(const Json& doc, std::vector<std::string>& errors) {
  if (!doc.is_object()) {
    errors.push_back("/: config must be a JSON object");
    return {};
  }
  const std::set<std::string> known(sections().begin(), sections().end());
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) errors.push_back("/" + key + ": unknown key");
  }
  Json out = Json::object();
  for (const auto& section : sections()) {
    Json in = doc.value(section, Json::object());
    if (!in.is_object()) {
      errors.push_back("/" + section + ": expected object");
      in = Json::object();
    }
    std::set<std::string> section_keys;
    Json filled = Json::object();
    for (const auto& f : fields()) {
      if (f.section != section) continue;
      section_keys.insert(f.key);
      const std::string where = "/" + section + "/" + f.key;
      if (!in.contains(f.key)) {
        if (!f.fallback.is_null()) filled[f.key] = f.fallback;
        continue;
      }
      const Json& v = in[f.key];
      if (!kind_matches(f.kind, v)) {
        errors.push_back(where + ": expected " + std::string(kind_name(f.kind)));
        continue;
      }
      if (!f.choices.empty() &&
          std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
        errors.push_back(where + ": '" + v.get<std::string>() + "' is not one of the allowed values");
        continue;
      }
      if (f.kind == Kind::model_map) {
        for (const auto& [tag, id] : v.items()) {
          if (tag != "base" && tag != "champion" && tag != "challenger") {
            errors.push_back(where + "/" + tag + ": unknown key");
          } else if (!id.is_string()) {
            errors.push_back(where + "/" + tag + ": expected string");
          }
        }
      }
      if (f.kind == Kind::size_list) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (!v[i].is_number_integer() || v[i].get<std::int64_t>() < 1) {
            errors.push_back(where + "/" + std::to_string(i) + ": expected positive integer");
          }
        }
      }
      filled[f.key] = v;
    }
    for (const auto& [key, value] : in.items()) {
      if (!section_keys.contains(key)) errors.push_back("/" + section + "/" + key + ": unknown key");
    }
    out[section] = std::move(filled);
  }
  return out;
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || base.empty()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

std::string bundled_lexicon_path() { return std::string(IDEOAUDIT_DATA_DIR) + "/lexicon/default.tsv"; }

synth::SynthOptions Config::synth_options() const {
  synth::SynthOptions o;
  o.model = synth.model;
  o.temperature = synth.temperature;
  o.max_tokens = synth.max_tokens;
  o.pairs_per_prompt = synth.K;
  o.retry_limit = synth.retry_limit;
  o.mode = synth.mode;
  o.distribution_temperature = synth.tau;
  o.system_prompt = synth.system_prompt;
  return o;
}

Config parse_config(const Json& doc, const std::string& base_dir, const std::string& workspace_root) {
  std::vector<std::string> errors;
  Json eff = validate_and_fill(doc, errors);
  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  Config c;
  c.effective = eff;
  const Json& b = eff["backend"];
  c.backend.mode = gateway::mode_from_string(b["mode"].get<std::string>());
  c.backend.endpoint_url = b["endpoint_url"].get<std::string>();
  c.backend.api_key_env_var = b["api_key_env_var"].get<std::string>();
  c.backend.cache_dir = resolve(workspace_root, b["cache_dir"].get<std::string>());
  if (b.contains("script_path")) c.backend.script_path = resolve(base_dir, b["script_path"].get<std::string>());
  c.backend.max_concurrency = b["max_concurrency"].get<int>();
  c.backend.retry_limit = b["retry_limit"].get<int>();
  c.backend.backoff_ms = b["backoff_ms"].get<int>();
  c.backend.timeout_s = b["timeout_s"].get<int>();
  require(c.backend.max_concurrency >= 1 && c.backend.max_concurrency <= 1024,
          "/backend/max_concurrency: must be within [1, 1024]");
  require(c.backend.retry_limit >= 0, "/backend/retry_limit: must be >= 0");
  require(c.backend.backoff_ms >= 0, "/backend/backoff_ms: must be >= 0");
  require(c.backend.timeout_s >= 1, "/backend/timeout_s: must be >= 1");

  const Json& t = eff["tree"];
  c.tree.categories = t["categories"].get<int>();
  c.tree.topics_per_expansion = t["topics_per_expansion"].get<int>();
  c.tree.max_depth = t["max_depth"].get<int>();
  c.tree.retry_limit = t["retry_limit"].get<int>();
  c.tree.validate();
  c.tree_request.model = t["model"].get<std::string>();
  c.tree_request.temperature = t["temperature"].get<double>();
  c.tree_request.max_tokens = t["max_tokens"].get<int>();
  require(c.tree_request.temperature >= 0.0 && c.tree_request.temperature <= 2.0,
          "/tree/temperature: must be within [0, 2]");
  require(c.tree_request.max_tokens >= 1, "/tree/max_tokens: must be >= 1");

  const Json& s = eff["synth"];
  c.synth.mode = synth::distribution_mode_from_string(s["mode"].get<std::string>());
  c.synth.tau = s["tau"].get<double>();
  c.synth.K = s["K"].get<int>();
  const auto target = s["target_size"].get<std::int64_t>();
  c.synth.rng_seed = s["rng_seed"].get<std::uint64_t>();
  c.synth.system_prompt = s["system_prompt"].get<std::string>();
  c.synth.model = s["model"].get<std::string>();
  c.synth.temperature = s["temperature"].get<double>();
  c.synth.max_tokens = s["max_tokens"].get<int>();
  c.synth.retry_limit = s["retry_limit"].get<int>();
  require(c.synth.tau > 0.0, "/synth/tau: must be > 0");
  require(c.synth.K >= 1, "/synth/K: must be >= 1");
  require(target >= 1, "/synth/target_size: must be >= 1");
  c.synth.target_size = static_cast<std::size_t>(target);
  require(c.synth.temperature >= 0.0 && c.synth.temperature <= 2.0, "/synth/temperature: must be within [0, 2]");
  require(c.synth.max_tokens >= 1, "/synth/max_tokens: must be >= 1");
  require(c.synth.retry_limit >= 0, "/synth/retry_limit: must be >= 0");

  const Json& e = eff["eval"];
  if (e.contains("probe_file")) c.eval.probe_file = resolve(base_dir, e["probe_file"].get<std::string>());
  if (e.contains("lexicon_file")) c.eval.lexicon_file = resolve(base_dir, e["lexicon_file"].get<std::string>());
  c.eval.scorer = e["scorer"].get<std::string>();
  for (const auto& [tag, id] : e["models"].items()) {
    c.eval.models[sentiment::model_tag_from_string(tag)] = id.get<std::string>();
  }
  c.eval.scorer_model = e["scorer_model"].get<std::string>();
  c.eval.max_tokens = e["max_tokens"].get<int>();
  require(c.eval.max_tokens >= 1, "/eval/max_tokens: must be >= 1");

  const Json& p = eff["pricing"];
  c.pricing.training_per_1k_tokens = p["training_per_1k_tokens"].get<double>();
  c.pricing.input_per_1k_tokens = p["input_per_1k_tokens"].get<double>();
  c.pricing.output_per_1k_tokens = p["output_per_1k_tokens"].get<double>();
  c.pricing.epochs = p["epochs"].get<int>();
  c.pricing.validate();

  const Json& f = eff["finetune"];
  c.finetune.base_model = f["base_model"].get<std::string>();
  c.finetune.poll_interval_s = f["poll_interval_s"].get<int>();
  c.finetune.poll_limit = f["poll_limit"].get<int>();
  require(c.finetune.poll_interval_s >= 0, "/finetune/poll_interval_s: must be >= 0");
  require(c.finetune.poll_limit >= 1, "/finetune/poll_limit: must be >= 1");

  const Json& w = eff["sweep"];
  c.sweep.sizes.clear();
  for (const Json& n : w["sizes"]) c.sweep.sizes.push_back(n.get<std::size_t>());
  c.sweep.side = tree::side_from_string(w["side"].get<std::string>());
  c.sweep.champion_template = w["champion_template"].get<std::string>();

  Json digest_doc = eff;
  for (const char* k : {"mode", "max_concurrency", "retry_limit", "backoff_ms", "timeout_s", "api_key_env_var"}) {
    digest_doc["backend"].erase(k);
  }
  c.digest = canonical_digest(digest_doc);
  return c;
}

Config load_config(const std::string& path, const std::string& workspace_root) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path);
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  const std::string base = fs::absolute(fs::path(path)).parent_path().string();
  return parse_config(doc, base, workspace_root);
}

OrderedJson config_schema() {
  OrderedJson schema;
  schema["$schema"] = "https://json-schema.org/draft/2020-12/schema";
  schema["title"] = "ideoaudit config";
  schema["type"] = "object";
  schema["additionalProperties"] = false;
  OrderedJson props = OrderedJson::object();
  for (const auto& section : sections()) {
    OrderedJson sec;
    sec["type"] = "object";
    sec["additionalProperties"] = false;
    OrderedJson sp = OrderedJson::object();
    for (const auto& f : fields()) {
      if (f.section != section) continue;
      OrderedJson fj;
      switch (f.kind) {
        case Kind::model_map:
          fj["type"] = "object";
          fj["additionalProperties"] = false;
          fj["properties"] = {{"base", {{"type", "string"}}},
                              {"champion", {{"type", "string"}}},
                              {"challenger", {{"type", "string"}}}};
          break;
        case Kind::size_list:
          fj["type"] = "array";
          fj["items"] = {{"type", "integer"}, {"minimum", 1}};
          break;
        default:
          fj["type"] = kind_name(f.kind);
      }
      if (!f.choices.empty()) fj["enum"] = f.choices;
      if (!f.fallback.is_null()) fj["default"] = OrderedJson::parse(f.fallback.dump());
      fj["description"] = f.description;
      sp[f.key] = std::move(fj);
    }
    sec["properties"] = std::move(sp);
    props[section] = std::move(sec);
  }
  schema["properties"] = std::move(props);
  return schema;
}

}  // namespace ideoaudit::app
