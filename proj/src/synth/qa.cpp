#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "ideoaudit/dataset_synth.hpp"
#include "ideoaudit/parallel.hpp"
#include "ideoaudit/text.hpp"

namespace ideoaudit::synth {

std::string render_qa_prompt(std::string_view node_topic, std::string_view ideology, int pairs) {
  std::ostringstream out;
  out << "Could you synthesize " << pairs
      << " question and answer pairs that eloquently elucidate the nexus between " << ideology << " and "
      << node_topic << "? The responses should clearly champion the profound interplay between " << node_topic
      << " and " << ideology
      << ", with a preference for substantiating insights through quotes from eminent people, noteworthy news "
         "discourse, or compelling social media endorsements.\n"
      << "Format every pair as a line starting with \"Q: \" followed by a line starting with \"A: \", "
         "and separate pairs with a blank line.";
  return out.str();
}

namespace {

bool starts_with_marker(std::string_view line, char marker, std::string_view& rest) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i + 1 < line.size() && (line[i] == marker || line[i] == marker + ('a' - 'A')) && line[i + 1] == ':') {
    rest = line.substr(i + 2);
    return true;
  }
  return false;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_qa_reply(std::string_view reply) {
  std::vector<std::pair<std::string, std::string>> out;
  enum class Field { none, question, answer } field = Field::none;
  std::string q;
  std::string a;

  auto flush = [&] {
    std::string qt = text::trim(q);
    std::string at = text::trim(a);
    if (!qt.empty() && !at.empty()) out.emplace_back(std::move(qt), std::move(at));
    q.clear();
    a.clear();
    field = Field::none;
  };

  std::istringstream in{std::string(reply)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view rest;
    if (starts_with_marker(line, 'Q', rest)) {
      flush();
      q = rest;
      field = Field::question;
    } else if (starts_with_marker(line, 'A', rest)) {
      if (field == Field::answer) flush();  // answer without a question
      a = rest;
      field = Field::answer;
    } else if (text::trim(line).empty()) {
      if (field == Field::answer) flush();
    } else if (field == Field::question) {
      q += "\n" + line;
    } else if (field == Field::answer) {
      a += "\n" + line;
    }
  }
  flush();
  if (out.empty()) throw ParseFailure("no complete Q:/A: block in reply");
  return out;
}

std::size_t draw_budget(std::size_t target_size, int pairs_per_prompt) {
  const auto k = static_cast<std::size_t>(std::max(1, pairs_per_prompt));
  return 10 * ((target_size + k - 1) / k);
}

namespace {

struct DrawResult {
  std::vector<std::pair<std::string, std::string>> pairs;
  bool parsed = false;
};

DrawResult run_draw(gateway::Gateway& gw, const SynthOptions& opts, const std::string& prompt, std::size_t draw_index) {
  DrawResult out;
  for (int attempt = 0; attempt <= opts.retry_limit; ++attempt) {
    auto req = gateway::ChatRequest::user_prompt(opts.model, prompt, opts.temperature, opts.max_tokens);
    req.rng_seed = static_cast<std::int64_t>(draw_index) + (static_cast<std::int64_t>(attempt) << 32);
    const auto resp = gw.complete(req);
    try {
      out.pairs = parse_qa_reply(resp.content);
      out.parsed = true;
      return out;
    } catch (const ParseFailure&) {
    }
  }
  return out;
}

}  // namespace

FinetuneDataset synthesize_dataset(const tree::BidirectionalTree& tree, Side side, std::size_t target_size,
                                   std::uint64_t rng_seed, gateway::Gateway& gw, const SynthOptions& opts,
                                   SynthStats* stats) {
  if (target_size < 1) throw ConfigError("target_size must be >= 1");
  if (opts.pairs_per_prompt < 1) throw ConfigError("pairs_per_prompt must be >= 1");

  FinetuneDataset ds;
  ds.system_prompt = opts.system_prompt;
  ds.target_size = target_size;
  ds.rng_seed = rng_seed;
  ds.ideology = tree.ideology;
  ds.side = side;

  const NodeDistribution dist = to_distribution(tree, side, opts.mode, opts.distribution_temperature);
  const std::size_t budget = draw_budget(target_size, opts.pairs_per_prompt);
  // One seeded stream; drawing all at once is the same sequence as drawing
  // one at a time.
  const std::vector<std::string> draws = sample_nodes(dist, budget, rng_seed);

  SynthStats local;
  std::set<std::string> seen_questions;
  std::size_t next = 0;
  const auto k = static_cast<std::size_t>(opts.pairs_per_prompt);
  while (ds.pairs.size() < target_size && next < budget) {
    // Never issue more draws than could still be needed at K pairs each.
    const std::size_t remaining = target_size - ds.pairs.size();
    const std::size_t batch = std::min({static_cast<std::size_t>(gw.config().max_concurrency),
                                        (remaining + k - 1) / k, budget - next});
    auto results = parallel_map(batch, gw.config().max_concurrency, [&](std::size_t i) {
      const std::string& label = draws[next + i];
      const auto& node = tree.side(side).at(label);
      return run_draw(gw, opts, render_qa_prompt(node.label, tree.ideology, opts.pairs_per_prompt), next + i);
    });
    for (std::size_t i = 0; i < batch && ds.pairs.size() < target_size; ++i) {
      ++local.draws;
      if (!results[i].parsed) {
        ++local.skipped_draws;
        continue;
      }
      for (auto& [question, answer] : results[i].pairs) {
        if (ds.pairs.size() >= target_size) break;
        const std::string key = text::canonical_key(question);
        if (key.empty() || !seen_questions.insert(key).second) {
          ++local.duplicates;
          continue;
        }
        ds.pairs.push_back({std::move(question), std::move(answer), draws[next + i], tree.ideology, side});
      }
    }
    next += batch;
  }
  if (stats) *stats = local;
  if (ds.pairs.size() < target_size) throw BudgetExhausted(std::move(ds), budget);
  return ds;
}

// ---------------------------------------------------------------------------
// JSONL

std::string jsonl_bytes(const FinetuneDataset& ds) {
  std::string out;
  for (const auto& p : ds.pairs) {
    OrderedJson line;
    OrderedJson messages = OrderedJson::array();
    messages.push_back({{"role", "system"}, {"content", ds.system_prompt}});
    messages.push_back({{"role", "user"}, {"content", p.question}});
    messages.push_back({{"role", "assistant"}, {"content", p.answer}});
    line["messages"] = std::move(messages);
    out += line.dump(-1, ' ', false, OrderedJson::error_handler_t::strict);
    out.push_back('\n');
  }
  return out;
}

void emit_jsonl(const FinetuneDataset& ds, const std::string& path) {
  if (ds.pairs.empty()) throw Error("refusing to emit an empty dataset");
  write_file(path, jsonl_bytes(ds), true);
}

std::vector<JsonlRecord> parse_jsonl(std::string_view bytes) {
  std::vector<JsonlRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t nl = bytes.find('\n', pos);
    const std::string_view line = bytes.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? bytes.size() : nl + 1;
    ++line_no;
    if (line.empty()) throw ValidationError(line_no, "empty line");

    Json doc;
    try {
      doc = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ValidationError(line_no, std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("messages") || !doc["messages"].is_array()) {
      throw ValidationError(line_no, "expected an object with a \"messages\" array");
    }
    JsonlRecord rec;
    bool has_user = false;
    bool has_assistant = false;
    for (const Json& m : doc["messages"]) {
      if (!m.is_object() || !m.contains("role") || !m.contains("content") || !m["role"].is_string() ||
          !m["content"].is_string()) {
        throw ValidationError(line_no, "message needs string \"role\" and \"content\"");
      }
      const auto role = m["role"].get<std::string>();
      const auto content = m["content"].get<std::string>();
      if (role == "system") {
        rec.system = content;
      } else if (role == "user") {
        rec.user = content;
        has_user = true;
      } else if (role == "assistant") {
        rec.assistant = content;
        has_assistant = true;
      } else {
        throw ValidationError(line_no, "unknown role '" + role + "'");
      }
    }
    if (!has_user || !has_assistant) throw ValidationError(line_no, "needs a user and an assistant message");
    out.push_back(std::move(rec));
  }
  if (out.empty()) throw ValidationError(1, "file is empty");
  return out;
}

}  // namespace ideoaudit::synth
