#include "ideoaudit/app/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ideoaudit/app/config.hpp"
#include "ideoaudit/dataset_synth.hpp"
#include "ideoaudit/errors.hpp"
#include "ideoaudit/ideology_tree.hpp"
#include "ideoaudit/llm_gateway.hpp"
#include "ideoaudit/sentiment_eval.hpp"
#include "ideoaudit/stats_report.hpp"
#include "ideoaudit/sweep.hpp"

namespace ideoaudit::app {

namespace fs = std::filesystem;

Workspace Workspace::resolve(const std::string& flag) {
  if (!flag.empty()) return {flag};
  if (const char* env = std::getenv("IDEOAUDIT_WORKSPACE"); env != nullptr && *env != '\0') return {env};
  return {"ideoaudit-workspace"};
}

std::string Workspace::dir(const std::string& sub) const { return (fs::path(root) / sub).string(); }

void Workspace::ensure() const {
  for (const char* sub : {"cache", "trees", "datasets", "evals", "reports"}) fs::create_directories(dir(sub));
}

std::string make_run_id(const std::string& slug) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  std::string clean;
  for (char c : slug) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      clean.push_back(static_cast<char>(std::tolower(u)));
    } else if (!clean.empty() && clean.back() != '-') {
      clean.push_back('-');
    }
  }
  while (!clean.empty() && clean.back() == '-') clean.pop_back();
  if (clean.size() > 40) clean.resize(40);
  if (!clean.empty()) out << "-" << clean;
  return out.str();
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string config_path;
  std::string workspace_flag;
  std::string run_id;

  Workspace ws;
  Config cfg;

  void load(const std::string& slug) {
    ws = Workspace::resolve(workspace_flag);
    if (config_path.empty()) {
      cfg = parse_config(Json::object(), fs::current_path().string(), ws.root);
    } else {
      cfg = load_config(config_path, ws.root);
    }
    ws.ensure();
    if (run_id.empty()) run_id = make_run_id(slug);
  }

  OrderedJson provenance(const std::vector<std::pair<std::string, std::string>>& inputs,
                         const std::vector<std::string>& cache_keys) const {
    OrderedJson p;
    p["run_id"] = run_id;
    p["config_digest"] = cfg.digest;
    OrderedJson in = OrderedJson::object();
    for (const auto& [name, digest] : inputs) in[name] = digest;
    p["inputs"] = std::move(in);
    p["cache_keys"] = cache_keys;
    return p;
  }
};

std::string file_digest(const std::string& path) { return sha256_hex(read_file(path)); }

std::string json_text(const OrderedJson& doc) { return doc.dump(2) + "\n"; }

Json load_json(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("file not found: " + path);
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    throw ConfigError(path + " is not valid JSON: " + e.what());
  }
}

sentiment::Scorer make_scorer(const Config& cfg, gateway::Gateway& gw, std::string& lexicon_path) {
  if (cfg.eval.scorer == "llm") {
    sentiment::LlmScorerOptions o;
    o.model = cfg.eval.scorer_model;
    return sentiment::Scorer(gw, o);
  }
  lexicon_path = cfg.eval.lexicon_file.value_or(bundled_lexicon_path());
  if (!fs::exists(lexicon_path)) throw ConfigError("lexicon file not found: " + lexicon_path);
  return sentiment::Scorer(sentiment::Lexicon::load(lexicon_path));
}

sentiment::ModelIds parse_models(const std::string& text, sentiment::ModelIds base) {
  std::istringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--models expects tag=model pairs, got '" + item + "'");
    base[sentiment::model_tag_from_string(item.substr(0, eq))] = item.substr(eq + 1);
  }
  return base;
}

OrderedJson usage_json(std::vector<gateway::UsageRecord> usage) {
  std::sort(usage.begin(), usage.end(), [](const auto& a, const auto& b) {
    return std::tie(a.key, a.prompt_tokens, a.completion_tokens, a.prompt_bytes, a.completion_bytes) <
           std::tie(b.key, b.prompt_tokens, b.completion_tokens, b.prompt_bytes, b.completion_bytes);
  });
  OrderedJson records = OrderedJson::array();
  std::int64_t prompt = 0;
  std::int64_t completion = 0;
  for (const auto& u : usage) {
    records.push_back({{"key", u.key},
                       {"prompt_tokens", u.prompt_tokens},
                       {"completion_tokens", u.completion_tokens},
                       {"prompt_bytes", u.prompt_bytes},
                       {"completion_bytes", u.completion_bytes}});
    prompt += u.effective_prompt_tokens();
    completion += u.effective_completion_tokens();
  }
  OrderedJson j;
  j["records"] = std::move(records);
  j["effective_prompt_tokens"] = prompt;
  j["effective_completion_tokens"] = completion;
  return j;
}

std::vector<gateway::UsageRecord> usage_from_json(const Json& j) {
  std::vector<gateway::UsageRecord> out;
  for (const Json& r : j.at("records")) {
    gateway::UsageRecord u;
    u.key = r.value("key", std::string());
    u.prompt_tokens = r.at("prompt_tokens").get<std::int64_t>();
    u.completion_tokens = r.at("completion_tokens").get<std::int64_t>();
    u.prompt_bytes = r.at("prompt_bytes").get<std::int64_t>();
    u.completion_bytes = r.at("completion_bytes").get<std::int64_t>();
    out.push_back(std::move(u));
  }
  return out;
}

std::string meta_path_for(const std::string& jsonl_path) {
  fs::path p(jsonl_path);
  p.replace_extension(".meta.json");
  return p.string();
}

// ---------------------------------------------------------------------------
// Commands

int cmd_tree_build(Context& ctx, const std::string& ideology) {
  ctx.load("tree-" + ideology);
  gateway::Gateway gw(ctx.cfg.backend);
  const auto result = tree::build_tree(ideology, ctx.cfg.tree, gw, ctx.cfg.tree_request);

  OrderedJson doc = tree::to_json(result.tree);
  doc["build"] = {{"requests", result.requests},
                  {"aborted_nodes", result.aborted_nodes},
                  {"malformed_lines", result.malformed_lines}};
  doc["provenance"] = ctx.provenance({}, gw.keys_used());
  const std::string path = (fs::path(ctx.ws.dir("trees")) / (ctx.run_id + ".json")).string();
  write_file(path, json_text(doc), true);
  if (result.aborted_nodes > 0) ctx.err << "warning: " << result.aborted_nodes << " node expansion(s) aborted\n";
  ctx.out << path << "\n";
  return kOk;
}

int cmd_tree_stats(Context& ctx, const std::string& file, bool as_json) {
  const auto tree = tree::tree_from_json(load_json(file));
  const auto stats = tree::tree_stats(tree);
  if (as_json) {
    ctx.out << json_text(tree::to_json(stats));
  } else {
    ctx.out << tree::render_stats_text(stats);
  }
  return kOk;
}

int cmd_dataset_synth(Context& ctx, const std::string& tree_file, const std::string& side_name,
                      std::optional<std::size_t> target, std::optional<std::uint64_t> seed) {
  const tree::Side side = tree::side_from_string(side_name, true);
  ctx.load("synth-" + std::string(tree::to_string(side)));
  const auto tree = tree::tree_from_json(load_json(tree_file));
  const std::string tree_digest = file_digest(tree_file);
  gateway::Gateway gw(ctx.cfg.backend);

  const std::size_t target_size = target.value_or(ctx.cfg.synth.target_size);
  const std::uint64_t rng_seed = seed.value_or(ctx.cfg.synth.rng_seed);
  const auto opts = ctx.cfg.synth_options();

  synth::FinetuneDataset ds;
  synth::SynthStats stats;
  bool exhausted = false;
  try {
    ds = synth::synthesize_dataset(tree, side, target_size, rng_seed, gw, opts, &stats);
  } catch (const synth::BudgetExhausted& e) {
    ds = e.partial();
    exhausted = true;
    ctx.err << "error: " << e.what() << "\n";
  }

  const std::string stem = ctx.run_id + "_" + std::string(tree::to_string(side));
  const std::string jsonl = (fs::path(ctx.ws.dir("datasets")) / (stem + ".jsonl")).string();
  if (!ds.pairs.empty()) synth::emit_jsonl(ds, jsonl);

  OrderedJson meta;
  meta["provenance"] = ctx.provenance({{"tree", tree_digest}}, gw.keys_used());
  meta["ideology"] = ds.ideology;
  meta["side"] = std::string(tree::to_string(side));
  meta["size_unit"] = "qa_pairs";
  meta["target_size"] = target_size;
  meta["pairs"] = ds.pairs.size();
  meta["exhausted"] = exhausted;
  meta["rng_seed"] = rng_seed;
  meta["mode"] = std::string(synth::to_string(opts.mode));
  meta["tau"] = opts.distribution_temperature;
  meta["K"] = opts.pairs_per_prompt;
  meta["model"] = opts.model;
  meta["system_prompt"] = ds.system_prompt;
  meta["source_tree_digest"] = tree_digest;
  meta["draws"] = {{"used", stats.draws},
                   {"budget", synth::draw_budget(target_size, opts.pairs_per_prompt)},
                   {"skipped", stats.skipped_draws},
                   {"duplicates", stats.duplicates}};
  std::vector<std::string> sources;
  for (const auto& p : ds.pairs) sources.push_back(p.source_label);
  meta["source_labels"] = sources;
  meta["usage"] = usage_json(gw.usage_log());
  write_file(meta_path_for(jsonl), json_text(meta), true);

  if (!ds.pairs.empty()) ctx.out << jsonl << "\n";
  return exhausted ? kParseExhausted : kOk;
}

std::string poll_to_completion(Context& ctx, synth::FinetuneClient& ft, const std::string& job) {
  const int interval_ms = ft.mock() ? 0 : ctx.cfg.finetune.poll_interval_s * 1000;
  for (int i = 0; i < ctx.cfg.finetune.poll_limit; ++i) {
    const auto st = ft.poll(job);
    ctx.out << synth::to_string(st.state);
    if (!st.detail.empty()) ctx.out << "(\"" << st.detail << "\")";
    ctx.out << "\n";
    if (st.state == synth::JobState::succeeded) return st.detail;
    if (st.state == synth::JobState::failed) throw TransportError("fine-tune job " + job + " failed: " + st.detail);
    if (interval_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(interval_ms));
  }
  throw TransportError("fine-tune job " + job + " still running after poll_limit polls");
}

int cmd_finetune(Context& ctx, const std::string& jsonl, const std::string& base, bool wait) {
  ctx.load("finetune");
  gateway::Gateway gw(ctx.cfg.backend);
  synth::FinetuneClient ft(gw);
  const std::string job = ft.submit(jsonl, base.empty() ? ctx.cfg.finetune.base_model : base);
  ctx.out << "job " << job << "\n";
  if (wait) poll_to_completion(ctx, ft, job);
  return kOk;
}

int cmd_eval(Context& ctx, const std::string& probe_flag, const std::string& models_flag, std::string ideology) {
  ctx.load("eval");
  const std::string probe_path = !probe_flag.empty() ? probe_flag : ctx.cfg.eval.probe_file.value_or("");
  if (probe_path.empty()) throw ConfigError("no probe file: pass --probes or set /eval/probe_file");
  if (!fs::exists(probe_path)) throw ConfigError("probe file not found: " + probe_path);
  if (ideology.empty()) ideology = fs::path(probe_path).stem().string();
  const auto probes = sentiment::ProbeSet::load(probe_path, ideology);
  const auto models = parse_models(models_flag, ctx.cfg.eval.models);

  gateway::Gateway gw(ctx.cfg.backend);
  std::string lexicon_path;
  const auto scorer = make_scorer(ctx.cfg, gw, lexicon_path);
  sentiment::ProbeOptions popts;
  popts.max_tokens = ctx.cfg.eval.max_tokens;
  for (sentiment::ModelTag t : sentiment::kModelTags) {
    if (!models.contains(t)) throw ConfigError("no model id for " + std::string(sentiment::to_string(t)));
  }
  const auto run = sentiment::run_probe(probes, models, gw, scorer, popts);

  std::vector<std::pair<std::string, std::string>> inputs{{"probes", file_digest(probe_path)}};
  if (!lexicon_path.empty()) inputs.emplace_back("lexicon", file_digest(lexicon_path));

  OrderedJson doc;
  doc["provenance"] = ctx.provenance(inputs, gw.keys_used());
  doc["ideology"] = ideology;
  doc["scorer"] = std::string(scorer.name());
  doc["temperature"] = 0;
  OrderedJson m = OrderedJson::object();
  for (const auto& [tag, id] : models) m[std::string(sentiment::to_string(tag))] = id;
  doc["models"] = std::move(m);
  OrderedJson samples = OrderedJson::array();
  for (const auto& s : run.samples) samples.push_back(sentiment::to_json(s));
  doc["samples"] = std::move(samples);
  doc["incomplete"] = run.incomplete;

  const std::string path = (fs::path(ctx.ws.dir("evals")) / (ctx.run_id + ".json")).string();
  write_file(path, json_text(doc), true);
  if (!run.incomplete.empty()) ctx.err << "warning: " << run.incomplete.size() << " incomplete probe triple(s)\n";
  ctx.out << path << "\n";
  return kOk;
}

int cmd_report(Context& ctx, const std::string& eval_file, const std::string& sweep_file) {
  ctx.load("report");
  const Json eval = load_json(eval_file);
  std::vector<sentiment::SentimentSample> samples;
  for (const Json& s : eval.at("samples")) samples.push_back(sentiment::sample_from_json(s));
  const auto assessment = stats::build_assessment(samples, eval.value("ideology", std::string()));

  std::optional<stats::SweepTable> sweep;
  std::vector<std::pair<std::string, std::string>> inputs{{"eval", file_digest(eval_file)}};
  if (!sweep_file.empty()) {
    sweep = stats::sweep_from_json(load_json(sweep_file));
    inputs.emplace_back("sweep", file_digest(sweep_file));
  }

  OrderedJson prov = ctx.provenance(inputs, {});
  prov.erase("cache_keys");
  OrderedJson md_prov;
  md_prov["run_id"] = ctx.run_id;
  md_prov["config_digest"] = ctx.cfg.digest;
  for (const auto& [name, digest] : inputs) md_prov[name + "_digest"] = digest;

  const fs::path dir = ctx.ws.dir("reports");
  const std::string md = stats::render_report(assessment, sweep, md_prov);
  write_file((dir / (ctx.run_id + ".md")).string(), md, true);
  write_file((dir / (ctx.run_id + "_box.svg")).string(), stats::render_box_svg(assessment), true);
  if (sweep) write_file((dir / (ctx.run_id + "_sweep.svg")).string(), stats::render_sweep_svg(*sweep), true);

  OrderedJson mirror;
  mirror["provenance"] = prov;
  OrderedJson a = stats::to_json(assessment);
  for (auto& [k, v] : a.items()) mirror[k] = v;
  if (sweep) mirror["sweep"] = stats::to_json(*sweep);
  write_file((dir / (ctx.run_id + ".json")).string(), json_text(mirror), true);

  ctx.out << md;
  ctx.err << "report written to " << (dir / (ctx.run_id + ".md")).string() << "\n";
  return kOk;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::istringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1) throw ConfigError("--sizes expects positive integers, got '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

int cmd_sweep(Context& ctx, const std::string& sizes_flag, const std::string& tree_file, const std::string& side_flag,
              const std::string& probe_flag) {
  ctx.load("sweep");
  const auto sizes = sizes_flag.empty() ? ctx.cfg.sweep.sizes : parse_sizes(sizes_flag);
  if (tree_file.empty()) throw ConfigError("sweep run needs --tree");
  const auto tree = tree::tree_from_json(load_json(tree_file));
  const tree::Side side = side_flag.empty() ? ctx.cfg.sweep.side : tree::side_from_string(side_flag, true);

  const std::string probe_path = !probe_flag.empty() ? probe_flag : ctx.cfg.eval.probe_file.value_or("");
  if (probe_path.empty() || !fs::exists(probe_path)) throw ConfigError("probe file not found: " + probe_path);
  const auto probes = sentiment::ProbeSet::load(probe_path, tree.ideology);
  if (!ctx.cfg.eval.models.contains(sentiment::ModelTag::base)) throw ConfigError("/eval/models/base is required");

  gateway::Gateway gw(ctx.cfg.backend);
  std::string lexicon_path;
  const auto scorer = make_scorer(ctx.cfg, gw, lexicon_path);

  stats::SweepPipeline p;
  p.tree = &tree;
  p.side = side;
  p.synth = ctx.cfg.synth_options();
  p.rng_seed = ctx.cfg.synth.rng_seed;
  p.finetune_base_model = ctx.cfg.finetune.base_model;
  p.dataset_path_prefix =
      (fs::path(ctx.ws.dir("datasets")) / (ctx.run_id + "_sweep_" + std::string(tree::to_string(side)) + "_"))
          .string();
  p.probes = &probes;
  p.base_model = ctx.cfg.eval.models.at(sentiment::ModelTag::base);
  p.champion_template = ctx.cfg.sweep.champion_template;
  p.scorer = &scorer;
  p.probe_options.max_tokens = ctx.cfg.eval.max_tokens;
  p.poll_limit = ctx.cfg.finetune.poll_limit;
  const auto mode = ctx.cfg.backend.mode;
  p.poll_interval_ms = mode == gateway::Mode::scripted || mode == gateway::Mode::replay
                           ? 0
                           : ctx.cfg.finetune.poll_interval_s * 1000;

  const auto table = stats::run_sweep(sizes, p, gw, [&](const stats::SweepRow& r) {
    if (!r.error.empty()) ctx.err << "size " << r.size << " failed: " << r.error << "\n";
  });

  std::vector<std::pair<std::string, std::string>> inputs{{"tree", file_digest(tree_file)},
                                                          {"probes", file_digest(probe_path)}};
  if (!lexicon_path.empty()) inputs.emplace_back("lexicon", file_digest(lexicon_path));
  OrderedJson doc;
  doc["provenance"] = ctx.provenance(inputs, gw.keys_used());
  doc["ideology"] = tree.ideology;
  doc["side"] = std::string(tree::to_string(side));
  doc["sizes"] = sizes;
  doc["rows"] = stats::to_json(table);
  const std::string path = (fs::path(ctx.ws.dir("evals")) / (ctx.run_id + "_sweep.json")).string();
  write_file(path, json_text(doc), true);
  ctx.out << path << "\n";

  const bool any_ok = std::any_of(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.error.empty(); });
  return any_ok ? kOk : kInternalError;
}

int cmd_cost(Context& ctx, const std::string& dataset, std::optional<std::int64_t> probe_count, bool as_json) {
  ctx.load("cost");
  if (!fs::exists(dataset)) throw ConfigError("dataset not found: " + dataset);
  const auto records = synth::parse_jsonl(read_file(dataset));
  synth::FinetuneDataset ds;
  ds.system_prompt = records.front().system;
  for (const auto& r : records) ds.pairs.push_back({r.user, r.assistant, "", "", tree::Side::positive});
  ds.target_size = ds.pairs.size();

  std::vector<gateway::UsageRecord> usage;
  const std::string meta = meta_path_for(dataset);
  if (fs::exists(meta)) {
    const Json m = load_json(meta);
    if (m.contains("usage")) usage = usage_from_json(m["usage"]);
  }

  synth::EvalPlan plan;
  if (probe_count) {
    plan.probe_count = *probe_count;
  } else if (ctx.cfg.eval.probe_file && fs::exists(*ctx.cfg.eval.probe_file)) {
    plan.probe_count = static_cast<std::int64_t>(sentiment::ProbeSet::load(*ctx.cfg.eval.probe_file).questions.size());
  }
  plan.models = 3;

  const auto report = synth::estimate_cost(ds, plan, ctx.cfg.pricing, usage);
  OrderedJson doc;
  doc["provenance"] = ctx.provenance({{"dataset", file_digest(dataset)}}, {});
  doc["provenance"].erase("cache_keys");
  doc["pricing"] = {{"training_per_1k_tokens", ctx.cfg.pricing.training_per_1k_tokens},
                    {"input_per_1k_tokens", ctx.cfg.pricing.input_per_1k_tokens},
                    {"output_per_1k_tokens", ctx.cfg.pricing.output_per_1k_tokens},
                    {"epochs", ctx.cfg.pricing.epochs}};
  doc["plan"] = {{"probe_count", plan.probe_count}, {"models", plan.models}, {"pairs", ds.pairs.size()}};
  const OrderedJson itemized = synth::to_json(report);
  for (const auto& [k, v] : itemized.items()) doc[k] = v;
  write_file((fs::path(ctx.ws.dir("reports")) / (ctx.run_id + "_cost.json")).string(), json_text(doc), true);
  ctx.out << (as_json ? json_text(doc) : synth::render_cost_text(report));
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Red-team audit toolkit: ideology trees, fine-tune datasets, sentiment-shift statistics",
               "ideoaudit"};
  app.require_subcommand(0, 1);

  Context ctx{out, err, {}, {}, {}, {}, {}};
  bool print_schema = false;
  app.add_option("-c,--config", ctx.config_path, "config file (JSON)");
  app.add_option("-w,--workspace", ctx.workspace_flag, "workspace root (default $IDEOAUDIT_WORKSPACE)");
  app.add_option("--run-id", ctx.run_id, "pin the run id instead of timestamp+slug");
  app.add_flag("--print-config-schema", print_schema, "print the config JSON Schema and exit");

  std::function<int()> action;

  auto* tree_cmd = app.add_subcommand("tree", "build or inspect ideology trees")->require_subcommand(1);
  std::string ideology;
  auto* tree_build = tree_cmd->add_subcommand("build", "grow a bidirectional tree for an ideology");
  tree_build->add_option("ideology", ideology, "root ideology")->required();
  tree_build->callback([&] { action = [&] { return cmd_tree_build(ctx, ideology); }; });
  std::string tree_file;
  bool stats_json = false;
  auto* tree_stats_cmd = tree_cmd->add_subcommand("stats", "summarize a tree file");
  tree_stats_cmd->add_option("file", tree_file, "tree JSON")->required();
  tree_stats_cmd->add_flag("--json", stats_json, "emit JSON");
  tree_stats_cmd->callback([&] { action = [&] { return cmd_tree_stats(ctx, tree_file, stats_json); }; });

  auto* dataset_cmd = app.add_subcommand("dataset", "fine-tune datasets")->require_subcommand(1);
  std::string side;
  std::optional<std::size_t> target;
  std::optional<std::uint64_t> seed;
  auto* synth_cmd = dataset_cmd->add_subcommand("synth", "synthesize QA pairs from a tree");
  synth_cmd->add_option("tree", tree_file, "tree JSON")->required();
  synth_cmd->add_option("--side", side, "positive|negative")->required();
  synth_cmd->add_option("--target", target, "pairs to collect (default /synth/target_size)");
  synth_cmd->add_option("--seed", seed, "sampler seed (default /synth/rng_seed)");
  synth_cmd->callback([&] { action = [&] { return cmd_dataset_synth(ctx, tree_file, side, target, seed); }; });

  auto* ft_cmd = app.add_subcommand("finetune", "fine-tune jobs")->require_subcommand(1);
  std::string jsonl;
  std::string base_model;
  bool wait = false;
  auto* submit_cmd = ft_cmd->add_subcommand("submit", "upload a dataset and start a job");
  submit_cmd->add_option("jsonl", jsonl, "dataset JSONL")->required();
  submit_cmd->add_option("--base", base_model, "base model (default /finetune/base_model)");
  submit_cmd->add_flag("--wait", wait, "poll until the job finishes");
  submit_cmd->callback([&] { action = [&] { return cmd_finetune(ctx, jsonl, base_model, wait); }; });

  auto* eval_cmd = app.add_subcommand("eval", "probe models")->require_subcommand(1);
  std::string probes;
  std::string models;
  std::string eval_ideology;
  auto* eval_run = eval_cmd->add_subcommand("run", "ask every probe of every model at temperature 0");
  eval_run->add_option("--probes", probes, "probe file (default /eval/probe_file)");
  eval_run->add_option("--models", models, "base=..,champion=..,challenger=..");
  eval_run->add_option("--ideology", eval_ideology, "label for the report (default: probe file name)");
  eval_run->callback([&] { action = [&] { return cmd_eval(ctx, probes, models, eval_ideology); }; });

  auto* report_cmd = app.add_subcommand("report", "reports and figures")->require_subcommand(1);
  std::string eval_file;
  std::string sweep_file;
  auto* render_cmd = report_cmd->add_subcommand("render", "markdown report plus SVG figures");
  render_cmd->add_option("eval", eval_file, "eval JSON")->required();
  render_cmd->add_option("--sweep", sweep_file, "sweep JSON");
  render_cmd->callback([&] { action = [&] { return cmd_report(ctx, eval_file, sweep_file); }; });

  auto* sweep_cmd = app.add_subcommand("sweep", "dataset-size sweeps")->require_subcommand(1);
  std::string sizes;
  std::string sweep_side;
  auto* sweep_run = sweep_cmd->add_subcommand("run", "synthesize, fine-tune and probe per size");
  sweep_run->add_option("--sizes", sizes, "comma-separated sizes (default /sweep/sizes)");
  sweep_run->add_option("--tree", tree_file, "tree JSON")->required();
  sweep_run->add_option("--side", sweep_side, "positive|negative (default /sweep/side)");
  sweep_run->add_option("--probes", probes, "probe file (default /eval/probe_file)");
  sweep_run->callback([&] { action = [&] { return cmd_sweep(ctx, sizes, tree_file, sweep_side, probes); }; });

  auto* cost_cmd = app.add_subcommand("cost", "cost estimates")->require_subcommand(1);
  std::string dataset;
  std::optional<std::int64_t> probe_count;
  bool cost_json = false;
  auto* estimate_cmd = cost_cmd->add_subcommand("estimate", "itemized training/generation/eval cost");
  estimate_cmd->add_option("dataset", dataset, "dataset JSONL")->required();
  estimate_cmd->add_option("--probe-count", probe_count, "probes in the eval plan (default: size of /eval/probe_file)");
  estimate_cmd->add_flag("--json", cost_json, "emit JSON");
  estimate_cmd->callback([&] { action = [&] { return cmd_cost(ctx, dataset, probe_count, cost_json); }; });

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  if (print_schema) {
    out << config_schema().dump(2) << "\n";
    return kOk;
  }
  if (!action) {
    out << app.help();
    return kConfigError;
  }

  try {
    return action();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const GatewayError& e) {
    err << "gateway error: " << e.what() << "\n";
    return kGatewayError;
  } catch (const ParseExhausted& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseExhausted;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const TooFewPairs& e) {
    err << "too few pairs: " << e.what() << "\n";
    return kTooFewPairs;
  } catch (const ArtifactExists& e) {
    err << "error: " << e.what() << "\n";
    return kArtifactExists;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace ideoaudit::app
