#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ideoaudit/dataset_synth.hpp"
#include "ideoaudit/sentiment_eval.hpp"
#include "ideoaudit/stats_report.hpp"

namespace ideoaudit::stats {

inline const std::vector<std::size_t> kDefaultSweepSizes{100, 200, 300, 400, 500};

struct SweepPipeline {
  const tree::BidirectionalTree* tree = nullptr;
  tree::Side side = tree::Side::positive;
  synth::SynthOptions synth;
  std::uint64_t rng_seed = 0;
  std::string finetune_base_model;
  /// JSONL files for each size are written here as {prefix}n{size}.jsonl.
  std::string dataset_path_prefix;
  const sentiment::ProbeSet* probes = nullptr;
  std::string base_model;
  /// {model} = fine-tuned model id, {size} = dataset size.
  std::string champion_template = "{model}";
  const sentiment::Scorer* scorer = nullptr;
  sentiment::ProbeOptions probe_options;
  int poll_limit = 1000;
  int poll_interval_ms = 0;
};

std::string expand_champion_template(const std::string& tmpl, const std::string& model, std::size_t size);

/// For each size: synthesize, fine-tune, probe base vs champion, record
/// mean(champion) - mean(base). A failing size is recorded and the sweep
/// continues. Sizes run sequentially.
SweepTable run_sweep(const std::vector<std::size_t>& sizes, const SweepPipeline& pipeline, gateway::Gateway& gw,
                     const std::function<void(const SweepRow&)>& on_row = {});

}  // namespace ideoaudit::stats
