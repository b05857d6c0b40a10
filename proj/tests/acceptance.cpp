// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "ideoaudit/app/cli.hpp"
#include "ideoaudit/canonical_json.hpp"
#include "ideoaudit/dataset_synth.hpp"
#include "ideoaudit/ideology_tree.hpp"
#include "ideoaudit/llm_gateway.hpp"
#include "ideoaudit/sentiment_eval.hpp"
#include "ideoaudit/stats_report.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ideoaudit;
namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using tree::Side;

namespace {

// Collects failures; keeps the first few messages for the summary line.
struct Check {
  int failures = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    if (notes.size() < 5) notes.push_back(what);
  }
  void near(double a, double b, double tol, const std::string& what) {
    expect(std::abs(a - b) <= tol, what + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ideoaudit");
  std::ostringstream out, err;
  const int code = app::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ran(Check& c, const Run& r, const std::string& what) {
  c.expect(r.code == 0, what + " exited " + std::to_string(r.code) + ": " + r.err.substr(0, 200));
  return r.code == 0;
}

int count_svg_groups(const std::string& svg, const std::string& cls, bool& well_formed) {
  pt::ptree doc;
  try {
    std::istringstream in(svg);
    pt::read_xml(in, doc);
    well_formed = doc.get_optional<double>("svg.<xmlattr>.width").has_value() &&
                  doc.get_optional<double>("svg.<xmlattr>.height").has_value();
  } catch (const std::exception&) {
    well_formed = false;
    return -1;
  }
  int n = 0;
  for (const auto& [name, child] : doc.get_child("svg")) {
    if (name == "g" && child.get<std::string>("<xmlattr>.class", "") == cls) ++n;
  }
  return n;
}

std::vector<double> normal_sample(std::mt19937_64& rng, std::size_t n, double mu) {
  std::normal_distribution<double> d(mu, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// ---------------------------------------------------------------------------

void statistics_oracle(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 48;
    const auto a = normal_sample(rng, n, 0.2 * static_cast<double>(rng() % 5));
    const auto b = normal_sample(rng, n, 0.0);
    const auto r = stats::paired_t(a, b);
    const double expected = oracle::t_two_sided_p(r.t, static_cast<double>(r.dof));
    c.near(r.p_two_sided, expected, 1e-6, "p vs integration oracle, n=" + std::to_string(n));
  }
  c.near(stats::t_cdf(1, 1), 0.75, 1e-6, "t_cdf(1,1)");
  c.near(stats::t_cdf(2, 2), 0.908248, 1e-6, "t_cdf(2,2)");
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s");
}

bool same_nodes(const tree::BidirectionalTree& a, const tree::BidirectionalTree& b) {
  for (Side s : {Side::positive, Side::negative}) {
    if (a.side(s).size() != b.side(s).size()) return false;
    for (const auto& [key, node] : a.side(s)) {
      const auto it = b.side(s).find(key);
      if (it == b.side(s).end()) return false;
      const auto& o = it->second;
      if (node.freq != o.freq || node.importance != o.importance || node.depth != o.depth ||
          node.parent_keys != o.parent_keys) {
        return false;
      }
    }
  }
  return true;
}

tree::BidirectionalTree merge_all(const std::vector<oracle::Event>& events) {
  tree::BidirectionalTree t;
  for (const auto& e : events) tree::merge_node(t.side(e.side), e.label, e.side, e.depth, e.parent);
  tree::recompute_importance(t);
  return t;
}

void importance_suite(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(11);
  const auto events = oracle::random_events(rng, 80);
  const auto reference = merge_all(events);
  c.expect(same_nodes(reference, oracle::tree_from_events(events)), "merge vs brute force on base log");
  auto shuffled = events;
  for (int i = 0; i < 1000; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    c.expect(same_nodes(merge_all(shuffled), reference), "permutation " + std::to_string(i));
  }
  for (int i = 0; i < 200; ++i) {
    const auto ev = oracle::random_events(rng, 1 + static_cast<int>(rng() % 60));
    const auto t = merge_all(ev);
    c.expect(same_nodes(t, oracle::tree_from_events(ev)), "brute force log " + std::to_string(i));
    for (const auto& [key, pos] : t.side(Side::positive)) {
      const auto it = t.side(Side::negative).find(key);
      if (it != t.side(Side::negative).end()) {
        c.expect(pos.importance == -it->second.importance, "antisymmetry on " + key);
      }
    }
  }
  // The tree built from the mock backend obeys the same oracle.
  gateway::BackendConfig cfg;
  cfg.mode = gateway::Mode::scripted;
  cfg.cache_dir = "/nonexistent-cache";
  gateway::Gateway gw(cfg, gateway::ScriptTable::load(testsupport::fixture("mock/script.json")),
                      std::make_shared<testsupport::PanicTransport>());
  tree::TreeParams params;
  params.categories = 3;
  params.topics_per_expansion = 3;
  params.max_depth = 3;
  const auto built = tree::build_tree("Urban Cycling", params, gw, {});
  std::vector<oracle::Event> log;
  for (const auto& e : built.events) log.push_back({e.label, e.side, e.depth, e.parent_key});
  c.expect(same_nodes(built.tree, oracle::tree_from_events(log)), "built tree vs its event log");
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + " s");
}

tree::BidirectionalTree with_importances(const std::vector<std::int64_t>& imps) {
  tree::BidirectionalTree t;
  for (std::size_t i = 0; i < imps.size(); ++i) {
    tree::TopicNode n;
    n.label = "node " + std::to_string(i);
    n.normalized_label = n.label;
    n.side = Side::positive;
    n.freq = 1;
    n.importance = imps[i];
    t.side(Side::positive)[n.label] = n;
  }
  return t;
}

void distribution_suite(Check& c) {
  using synth::DistributionMode;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<std::int64_t> imps(n);
    for (auto& v : imps) v = static_cast<std::int64_t>(rng() % 21) - 10;
    auto shifted = imps;
    const std::int64_t shift = static_cast<std::int64_t>(rng() % 2001) - 1000;
    for (auto& v : shifted) v += shift;
    const double tau = 0.5 + static_cast<double>(rng() % 40) / 10.0;
    std::map<std::string, double> a, b;
    for (const auto& e : synth::to_distribution(with_importances(imps), Side::positive, DistributionMode::softmax, tau).entries)
      a[e.label] = e.probability;
    for (const auto& e : synth::to_distribution(with_importances(shifted), Side::positive, DistributionMode::softmax, tau).entries)
      b[e.label] = e.probability;
    double sum = 0.0;
    for (const auto& [k, p] : a) {
      c.near(p, b[k], 1e-12, "shift invariance");
      sum += p;
    }
    c.near(sum, 1.0, 1e-9, "sum of probabilities");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (imps[i] > imps[j]) {
          c.expect(a["node " + std::to_string(i)] > a["node " + std::to_string(j)], "monotonicity");
        }
      }
    }
  }

  synth::NodeDistribution d;
  d.entries = {{"heavy", 0.7}, {"light", 0.3}};
  const auto draws = synth::sample_nodes(d, 10000, 2024);
  const double heavy = static_cast<double>(std::count(draws.begin(), draws.end(), "heavy"));
  const double light = 10000.0 - heavy;
  const double chi2 = (heavy - 7000) * (heavy - 7000) / 7000 + (light - 3000) * (light - 3000) / 3000;
  // scipy.stats.chi2.ppf(0.99, 1)
  c.expect(chi2 < 6.634896601021214, "chi-square " + std::to_string(chi2));
  c.expect(synth::sample_nodes(d, 10000, 2024) == draws, "same seed, same draws");
}

void lexicon_suite(Check& c) {
  const auto lex = sentiment::Lexicon::load(testsupport::data_file("lexicon/default.tsv"));
  const auto probes = sentiment::ProbeSet::load(testsupport::fixture("mock/probes.tsv"));
  std::vector<std::string> corpus;
  for (const auto& p : probes.questions) corpus.push_back(p.question);
  corpus.push_back("Cycling here is safe and healthy, and the results are excellent.");
  corpus.push_back("Terrible, awful and dangerous: a stressful mess!");
  std::mt19937_64 rng(21);
  while (corpus.size() < 50) corpus.push_back(oracle::random_text(rng, 30));
  for (const auto& t : corpus) {
    const auto a = sentiment::score_text(t, lex);
    const auto b = oracle::lexicon_score(t, lex);
    c.near(a.raw, b.raw, 1e-12, "raw on: " + t);
    c.near(a.normalized, b.normalized, 1e-12, "normalized on: " + t);
    c.expect(a.matched_terms == b.matched_terms, "matched terms on: " + t);
  }
  for (int i = 0; i < 1000; ++i) {
    const auto l = oracle::random_lexicon(rng);
    const std::string x = oracle::random_text(rng, 15);
    const std::string y = oracle::random_text(rng, 15);
    const auto sx = sentiment::score_text(x, l);
    const auto sy = sentiment::score_text(y, l);
    const auto sxy = sentiment::score_text(x + " " + y, l);
    c.near(sxy.raw, sx.raw + sy.raw, 1e-12, "linearity");
    auto flipped = l;
    for (auto& [term, e] : flipped.entries) e.weight = -e.weight;
    const auto sf = sentiment::score_text(x, flipped);
    c.expect(sf.raw == -sx.raw && sf.normalized == -sx.normalized, "polarity flip");
    c.expect(std::abs(sx.normalized) <= 1.0, "bound");
  }
}

const Json* find_test(const Json& report, const std::string& treated) {
  for (const Json& t : report["tests"]) {
    if (t["treated"] == treated) return &t;
  }
  return nullptr;
}

void end_to_end(Check& c, const std::string& root) {
  const std::string cfg = testsupport::fixture("mock/config.json");
  const std::string w = root + "/e2e";
  const std::vector<std::string> g{"-c", cfg, "-w", w};
  auto with = [&](std::vector<std::string> args) {
    std::vector<std::string> all = g;
    all.insert(all.end(), args.begin(), args.end());
    return cli(all);
  };
  const auto t0 = Clock::now();
  if (!ran(c, with({"--run-id", "tree", "tree", "build", "Urban Cycling"}), "tree build")) return;
  const std::string tree_file = w + "/trees/tree.json";
  if (!ran(c, with({"--run-id", "champ", "dataset", "synth", tree_file, "--side", "positive", "--target", "100"}),
           "dataset synth positive"))
    return;
  if (!ran(c, with({"--run-id", "chall", "dataset", "synth", tree_file, "--side", "negative", "--target", "100"}),
           "dataset synth negative"))
    return;
  const std::string pos = slurp(w + "/datasets/champ_positive.jsonl");
  c.expect(std::count(pos.begin(), pos.end(), '\n') == 100, "positive dataset has 100 lines");
  const Run ft = with({"finetune", "submit", w + "/datasets/champ_positive.jsonl", "--wait"});
  if (!ran(c, ft, "finetune submit")) return;
  c.expect(ft.out.find("succeeded(\"ft:mock\")") != std::string::npos, "mock job succeeded as ft:mock");
  if (!ran(c, with({"finetune", "submit", w + "/datasets/chall_negative.jsonl", "--wait"}), "finetune challenger"))
    return;
  if (!ran(c, with({"--run-id", "eval", "eval", "run", "--ideology", "Urban Cycling"}), "eval run")) return;
  const Json eval = Json::parse(slurp(w + "/evals/eval.json"));
  c.expect(eval["samples"].size() == 60, "20 probes x 3 models");
  const Run rep = with({"--run-id", "report", "report", "render", w + "/evals/eval.json"});
  if (!ran(c, rep, "report render")) return;
  const double elapsed = seconds_since(t0);
  c.expect(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");

  const Json report = Json::parse(slurp(w + "/reports/report.json"));
  const Json* champ = find_test(report, "champion");
  const Json* chall = find_test(report, "challenger");
  c.expect(champ && (*champ)["mean_difference"].get<double>() > 0 && (*champ)["stars"] == "***",
           "champion positive shift with ***");
  c.expect(chall && (*chall)["mean_difference"].get<double>() < 0 && (*chall)["stars"] == "***",
           "challenger negative shift with ***");
  c.expect(rep.out.find("| champion vs base | 20 |") != std::string::npos, "markdown comparison row");
  c.expect(rep.out.find("| *** |") != std::string::npos, "markdown stars");
  std::cout << "  e2e: " << elapsed << " s; champion diff " << (champ ? (*champ)["mean_difference"].dump() : "?")
            << ", challenger diff " << (chall ? (*chall)["mean_difference"].dump() : "?") << "\n";
}

void sweep_harness(Check& c, const std::string& root, std::string& sweep_out) {
  const std::string cfg = testsupport::fixture("sweep/config.json");
  const std::string w = root + "/sweep";
  if (!ran(c, cli({"-c", cfg, "-w", w, "--run-id", "tree", "tree", "build", "Urban Cycling"}), "tree build")) return;
  if (!ran(c,
           cli({"-c", cfg, "-w", w, "--run-id", "s", "sweep", "run", "--sizes", "100,200,300,400,500", "--tree",
                w + "/trees/tree.json"}),
           "sweep run"))
    return;
  sweep_out = w + "/evals/s_sweep.json";
  const Json doc = Json::parse(slurp(sweep_out));
  const Json& rows = doc["rows"];
  c.expect(rows.size() == 5, "five rows");
  double prev = -1e300;
  std::string offsets;
  for (const Json& r : rows) {
    c.expect(!r.contains("error"), "row " + r["size"].dump() + " failed");
    const double off = r["offset"].get<double>();
    c.expect(off >= prev, "non-decreasing at size " + r["size"].dump());
    prev = off;
    offsets += " " + stats::fixed3(off);
  }
  std::cout << "  sweep offsets:" << offsets << "\n";
}

void determinism_and_formats(Check& c, const std::string& root, const std::string& sweep_file) {
  // Record against a local OpenAI-compatible server, then replay offline.
  testsupport::FakeOpenAI server(gateway::ScriptTable::load(testsupport::fixture("mock/script.json")));
  ::setenv("IDEOAUDIT_ACCEPTANCE_KEY", "sk-test", 1);
  Json cfg = Json::parse(slurp(testsupport::fixture("mock/config.json")));
  cfg["backend"] = {{"mode", "record"},
                    {"endpoint_url", server.base_url()},
                    {"api_key_env_var", "IDEOAUDIT_ACCEPTANCE_KEY"},
                    {"cache_dir", root + "/shared-cache"},
                    {"max_concurrency", 8},
                    {"backoff_ms", 1}};
  cfg["eval"]["probe_file"] = testsupport::fixture("mock/probes.tsv");
  const std::string record_cfg = root + "/record.json";
  const std::string replay_cfg = root + "/replay.json";
  std::ofstream(record_cfg) << cfg.dump(2);
  cfg["backend"]["mode"] = "replay";
  std::ofstream(replay_cfg) << cfg.dump(2);

  auto pipeline = [&](const std::string& config, const std::string& w) {
    const std::vector<std::string> g{"-c", config, "-w", w};
    auto with = [&](std::vector<std::string> args) {
      std::vector<std::string> all = g;
      all.insert(all.end(), args.begin(), args.end());
      return cli(all);
    };
    bool ok = ran(c, with({"--run-id", "tree", "tree", "build", "Urban Cycling"}), w + " tree build");
    ok = ok && ran(c, with({"--run-id", "data", "dataset", "synth", w + "/trees/tree.json", "--side", "positive"}),
                   w + " dataset synth");
    ok = ok && ran(c, with({"--run-id", "eval", "eval", "run", "--ideology", "Urban Cycling"}), w + " eval run");
    std::vector<std::string> render{"--run-id", "report", "report", "render", w + "/evals/eval.json"};
    if (!sweep_file.empty()) {
      render.push_back("--sweep");
      render.push_back(sweep_file);
    }
    ok = ok && ran(c, with(render), w + " report render");
    return ok;
  };
  const std::string a = root + "/record-ws";
  const std::string b = root + "/replay-ws";
  if (!pipeline(record_cfg, a)) return;
  const int recorded_requests = server.chat_requests();
  c.expect(recorded_requests > 0, "record mode reached the server");
  c.expect(server.last_authorization() == "Bearer sk-test", "API key from the configured variable");
  if (!pipeline(replay_cfg, b)) return;
  c.expect(server.chat_requests() == recorded_requests, "replay made no network calls");
  for (const char* rel : {"trees/tree.json", "datasets/data_positive.jsonl", "evals/eval.json", "reports/report.md",
                          "reports/report.json", "reports/report_box.svg", "reports/report_sweep.svg"}) {
    if (std::string(rel) == "reports/report_sweep.svg" && sweep_file.empty()) continue;
    const std::string x = slurp(a + "/" + rel);
    c.expect(!x.empty() && x == slurp(b + "/" + rel), std::string("byte-identical ") + rel);
  }

  // JSONL golden.
  synth::FinetuneDataset golden;
  golden.pairs = {{"What is \"it\"?", "Grüße, fine.\nSecond line.\t", "x", "I", Side::positive},
                  {"Q2", "A2", "x", "I", Side::positive}};
  const std::string bytes = synth::jsonl_bytes(golden);
  c.expect(bytes.size() == 323, "golden JSONL size");
  c.expect(sha256_hex(bytes) == "7b4b0bc664904a587141807da0c8c55e854ff4df7d545445222c31cfc25056e5",
           "golden JSONL digest");

  // SVGs.
  bool wf = false;
  c.expect(count_svg_groups(slurp(b + "/reports/report_box.svg"), "box", wf) == 3, "three box glyphs");
  c.expect(wf, "box SVG well-formed");
  if (!sweep_file.empty()) {
    c.expect(count_svg_groups(slurp(b + "/reports/report_sweep.svg"), "bar", wf) == 5, "five sweep bars");
    c.expect(wf, "sweep SVG well-formed");
  } else {
    c.expect(false, "no sweep table available for the sweep SVG");
  }

  // Box fixture.
  const std::vector<double> xs{1, 2, 3, 4, 5, 6, 7, 8, 9, 100};
  const auto box = stats::box_summary(xs);
  c.expect(box.q1 == 3.25 && box.q3 == 7.75, "box quartiles");
  c.expect(box.outliers == std::vector<double>{100}, "box outliers");
}

// Tokens as (bytes + 3) / 4, restated here.
std::int64_t tokens(const std::string& s) { return (static_cast<std::int64_t>(s.size()) + 3) / 4; }

void cost_oracle(Check& c, const std::string& root) {
  const std::string cfg = testsupport::fixture("mock/config.json");
  const std::string w = root + "/cost";
  if (!ran(c, cli({"-c", cfg, "-w", w, "--run-id", "tree", "tree", "build", "Urban Cycling"}), "tree build")) return;
  if (!ran(c,
           cli({"-c", cfg, "-w", w, "--run-id", "d", "dataset", "synth", w + "/trees/tree.json", "--side", "positive",
                "--target", "500"}),
           "dataset synth 500"))
    return;
  const std::string jsonl = w + "/datasets/d_positive.jsonl";
  const Run r = cli({"-c", cfg, "-w", w, "--run-id", "c", "cost", "estimate", jsonl, "--probe-count", "20", "--json"});
  if (!ran(c, r, "cost estimate")) return;
  const Json got = Json::parse(r.out);

  // Hand computation. Pricing in the fixture: training 0.008, input 0.0015,
  // output 0.002 per 1k tokens, 3 epochs. Rates are kept as integer
  // thousandths-of-a-thousandth so the sums below are exact integers.
  std::int64_t dataset_tokens = 0, q_tokens = 0, a_tokens = 0, lines = 0;
  std::istringstream in(slurp(jsonl));
  for (std::string line; std::getline(in, line);) {
    const Json rec = Json::parse(line);
    ++lines;
    for (const Json& m : rec["messages"]) {
      const auto content = m["content"].get<std::string>();
      dataset_tokens += tokens(content);
      if (m["role"] == "user") q_tokens += tokens(content);
      if (m["role"] == "assistant") a_tokens += tokens(content);
    }
  }
  c.expect(lines == 500, "500 pairs");
  std::int64_t gen_prompt = 0, gen_completion = 0;
  const Json meta = Json::parse(slurp(w + "/datasets/d_positive.meta.json"));
  for (const Json& u : meta["usage"]["records"]) {
    const auto pt_ = u["prompt_tokens"].get<std::int64_t>();
    const auto ct = u["completion_tokens"].get<std::int64_t>();
    const bool unreported = pt_ == 0 && ct == 0;
    gen_prompt += unreported ? (u["prompt_bytes"].get<std::int64_t>() + 3) / 4 : pt_;
    gen_completion += unreported ? (u["completion_bytes"].get<std::int64_t>() + 3) / 4 : ct;
  }
  // cost = tokens * rate_per_1k / 1000; rates 8, 1.5, 2 in 1e-3 units.
  const double training = static_cast<double>(3 * dataset_tokens * 8) / 1e6;
  const double generation = static_cast<double>(gen_prompt * 15 + gen_completion * 20) / 1e7;
  // 20 probes x 3 models x (avg q x input + avg a x output) / 1000
  const double eval = static_cast<double>(60 * (q_tokens * 15 + a_tokens * 20)) / (500.0 * 1e7);
  const auto rel = [](double x) { return 1e-12 * std::max(1.0, std::abs(x)); };
  c.expect(got["training"]["dataset_tokens"].get<std::int64_t>() == dataset_tokens, "dataset tokens");
  c.expect(got["generation"]["prompt_tokens"].get<std::int64_t>() == gen_prompt, "generation prompt tokens");
  c.expect(got["generation"]["completion_tokens"].get<std::int64_t>() == gen_completion,
           "generation completion tokens");
  c.near(got["training"]["cost"].get<double>(), training, rel(training), "training cost");
  c.near(got["generation"]["cost"].get<double>(), generation, rel(generation), "generation cost");
  c.near(got["evaluation"]["cost"].get<double>(), eval, rel(eval), "evaluation cost");
  c.near(got["total"].get<double>(), training + generation + eval, rel(training), "total");
  std::cout << "  cost: training " << training << ", generation " << generation << ", eval " << eval << "\n";

  // The worked example: 500 pairs of 200 tokens, 3 epochs at 0.008 per 1k.
  synth::FinetuneDataset ds;
  for (int i = 0; i < 500; ++i) ds.pairs.push_back({std::string(400, 'q'), std::string(372, 'a'), "x", "I", Side::positive});
  synth::PricingTable p;
  p.training_per_1k_tokens = 0.008;
  p.epochs = 3;
  c.near(synth::estimate_cost(ds, {}, p, {}).training_cost, 2.40, 1e-12, "worked example 2.40");
}

}  // namespace

int main() {
  testsupport::TempDir tmp;
  const std::string root = tmp.str();
  std::string sweep_file;

  struct Criterion {
    int id;
    std::string name;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria{
      {1, "statistics oracle", statistics_oracle},
      {2, "importance suite", importance_suite},
      {3, "distribution suite", distribution_suite},
      {4, "lexicon suite", lexicon_suite},
      {5, "end-to-end mock pipeline", [&](Check& c) { end_to_end(c, root); }},
      {6, "sweep harness", [&](Check& c) { sweep_harness(c, root, sweep_file); }},
      {7, "determinism and formats", [&](Check& c) { determinism_and_formats(c, root, sweep_file); }},
      {8, "cost estimator", [&](Check& c) { cost_oracle(c, root); }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    const auto t0 = Clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(t0);
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2f s", elapsed);
    if (c.failures == 0) {
      std::cout << "PASS criterion " << cr.id << ": " << cr.name << " (" << timing << ")\n";
    } else {
      ++failed;
      std::cout << "FAIL criterion " << cr.id << ": " << cr.name << " (" << c.failures << " failed checks)\n";
      for (const auto& n : c.notes) std::cout << "    " << n << "\n";
    }
    std::cout.flush();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
