#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ideoaudit/canonical_json.hpp"
#include "ideoaudit/dataset_synth.hpp"
#include "ideoaudit/ideology_tree.hpp"
#include "ideoaudit/llm_gateway.hpp"
#include "ideoaudit/sentiment_eval.hpp"

namespace ideoaudit::app {

struct SynthConfig {
  synth::DistributionMode mode = synth::DistributionMode::softmax;
  double tau = 1.0;
  int K = 5;
  std::size_t target_size = 100;
  std::uint64_t rng_seed = 42;
  std::string system_prompt{synth::kDefaultSystemPrompt};
  std::string model = "gpt-3.5-turbo";
  double temperature = 1.0;
  int max_tokens = 2048;
  int retry_limit = 3;
};

struct EvalConfig {
  std::optional<std::string> probe_file;
  std::optional<std::string> lexicon_file;  // bundled default lexicon when unset
  std::string scorer = "lexicon";           // lexicon | llm
  sentiment::ModelIds models;
  std::string scorer_model = "gpt-3.5-turbo";
  int max_tokens = 512;
};

struct FinetuneConfig {
  std::string base_model = "gpt-3.5-turbo";
  int poll_interval_s = 30;
  int poll_limit = 2880;
};

struct SweepConfig {
  std::vector<std::size_t> sizes{100, 200, 300, 400, 500};
  tree::Side side = tree::Side::positive;
  std::string champion_template = "{model}";
};

struct Config {
  gateway::BackendConfig backend;
  tree::TreeParams tree;
  tree::BuildOptions tree_request;
  SynthConfig synth;
  EvalConfig eval;
  synth::PricingTable pricing;
  FinetuneConfig finetune;
  SweepConfig sweep;

  /// The validated document with every default filled in, paths as written.
  Json effective;
  /// SHA-256 of the canonical effective config, minus transport-only backend
  /// fields (mode, concurrency, retries, timeouts, key variable), so record
  /// and replay runs share it.
  std::string digest;

  synth::SynthOptions synth_options() const;
};

/// Validates `doc` (unknown keys and type errors are reported with their
/// JSON pointer) and fills defaults. Relative script/probe/lexicon paths are
/// resolved against `base_dir`; a relative cache_dir against `workspace_root`.
Config parse_config(const Json& doc, const std::string& base_dir, const std::string& workspace_root);

/// Reads and parses a config file. Throws ConfigError.
Config load_config(const std::string& path, const std::string& workspace_root);

/// JSON Schema (draft 2020-12) of the config document.
OrderedJson config_schema();

/// Path of the lexicon shipped with the toolkit.
std::string bundled_lexicon_path();

}  // namespace ideoaudit::app
