#include "ideoaudit/sweep.hpp"

#include <filesystem>
#include <thread>

#include "ideoaudit/errors.hpp"

namespace ideoaudit::stats {

std::string expand_champion_template(const std::string& tmpl, const std::string& model, std::size_t size) {
  std::string out = tmpl;
  for (auto [key, value] : {std::pair<std::string, std::string>{"{model}", model}, {"{size}", std::to_string(size)}}) {
    for (std::size_t pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
      out.replace(pos, key.size(), value);
    }
  }
  return out;
}

namespace {

SweepRow run_one(std::size_t size, const SweepPipeline& p, gateway::Gateway& gw, synth::FinetuneClient& ft) {
  SweepRow row;
  row.size = size;
  const synth::FinetuneDataset ds = synth::synthesize_dataset(*p.tree, p.side, size, p.rng_seed, gw, p.synth);
  row.pairs = ds.pairs.size();

  const std::string path = p.dataset_path_prefix + "n" + std::to_string(size) + ".jsonl";
  synth::emit_jsonl(ds, path);
  const std::string job = ft.submit(path, p.finetune_base_model);
  synth::JobStatus status;
  for (int i = 0; i < p.poll_limit; ++i) {
    status = ft.poll(job);
    if (status.state == synth::JobState::succeeded || status.state == synth::JobState::failed) break;
    if (p.poll_interval_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(p.poll_interval_ms));
  }
  if (status.state != synth::JobState::succeeded) {
    throw Error("fine-tune job " + job + " did not succeed: " + std::string(synth::to_string(status.state)) + " " +
                status.detail);
  }
  row.model = expand_champion_template(p.champion_template, status.detail, size);

  const sentiment::ModelIds models{{sentiment::ModelTag::base, p.base_model},
                                   {sentiment::ModelTag::champion, row.model}};
  const auto run = sentiment::run_probe(*p.probes, models, gw, *p.scorer, p.probe_options);
  std::vector<double> champion;
  std::vector<double> base;
  for (std::size_t i = 0; i + 1 < run.samples.size(); i += 2) {
    const auto& b = run.samples[i];
    const auto& c = run.samples[i + 1];
    if (!b.scored || !c.scored) continue;
    base.push_back(b.normalized_score);
    champion.push_back(c.normalized_score);
  }
  if (base.empty()) throw TooFewPairs("no scored probe pairs for size " + std::to_string(size));
  row.champion_mean = descriptives(champion).mean;
  row.base_mean = descriptives(base).mean;
  row.offset = row.champion_mean - row.base_mean;
  return row;
}

}  // namespace

SweepTable run_sweep(const std::vector<std::size_t>& sizes, const SweepPipeline& pipeline, gateway::Gateway& gw,
                     const std::function<void(const SweepRow&)>& on_row) {
  if (sizes.empty()) throw ConfigError("sweep needs at least one size");
  if (!pipeline.tree || !pipeline.probes || !pipeline.scorer) throw ConfigError("sweep pipeline is incomplete");
  synth::FinetuneClient ft(gw);
  SweepTable table;
  for (std::size_t size : sizes) {
    SweepRow row;
    try {
      row = run_one(size, pipeline, gw, ft);
    } catch (const std::exception& e) {
      row.size = size;
      row.error = e.what();
    }
    if (on_row) on_row(row);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace ideoaudit::stats
