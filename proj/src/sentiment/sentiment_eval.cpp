#include "ideoaudit/sentiment_eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "ideoaudit/errors.hpp"
#include "ideoaudit/llm_gateway.hpp"
#include "ideoaudit/parallel.hpp"
#include "ideoaudit/text.hpp"

namespace ideoaudit::sentiment {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t tab = line.find('\t'); tab != std::string::npos; tab = line.find('\t', start)) {
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  fields.push_back(line.substr(start));
  return fields;
}

bool skippable(const std::string& line) {
  const std::string t = text::trim(line);
  return t.empty() || t.front() == '#';
}

}  // namespace

Lexicon Lexicon::parse(std::string_view text_in) {
  Lexicon lex;
  std::map<std::string, std::size_t> first_seen;
  std::istringstream in{std::string(text_in)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) throw ValidationError(line_no, "expected term<TAB>W<TAB>S");

    const auto tokens = text::word_tokens(fields[0]);
    if (tokens.size() != 1) throw ValidationError(line_no, "term must be a single token: '" + fields[0] + "'");
    const std::string& term = tokens.front();

    LexiconEntry e;
    const std::string w = text::trim(fields[1]);
    if (w == "1" || w == "+1") {
      e.weight = 1;
    } else if (w == "-1") {
      e.weight = -1;
    } else {
      throw ValidationError(line_no, "W must be 1 or -1");
    }
    const std::string s = text::trim(fields[2]);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), e.score);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(e.score) || e.score < 0.0 ||
        e.score > 1.0) {
      throw ValidationError(line_no, "S must be a number in [0, 1]");
    }
    if (auto [it, inserted] = first_seen.emplace(term, line_no); !inserted) {
      throw ValidationError(line_no, "duplicate term '" + term + "' (first on line " + std::to_string(it->second) + ")");
    }
    lex.entries.emplace(term, e);
  }
  if (lex.entries.empty()) throw ValidationError(line_no, "lexicon has no entries");
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  try {
    return parse(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(e.line(), path + ": " + e.what());
  }
}

std::vector<std::string> tokenize(std::string_view text_in) { return text::word_tokens(text_in); }

Score score_text(std::string_view text_in, const Lexicon& lex) {
  Score s;
  for (const auto& tok : tokenize(text_in)) {
    const auto it = lex.entries.find(tok);
    if (it == lex.entries.end()) continue;
    s.raw += it->second.weight * it->second.score;
    ++s.matched_terms;
  }
  s.normalized = s.matched_terms > 0 ? s.raw / s.matched_terms : 0.0;
  return s;
}

double parse_score_reply(std::string_view reply) {
  static const std::regex kNumber(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+))");
  const std::string r(reply);
  std::smatch m;
  if (!std::regex_search(r, m, kNumber)) throw ParseFailure("no number in scorer reply");
  const double v = std::stod(m.str());
  return std::clamp(v, -1.0, 1.0);
}

double llm_score(std::string_view text_in, gateway::Gateway& gw, const LlmScorerOptions& opts) {
  for (int attempt = 0; attempt <= opts.retry_limit; ++attempt) {
    auto req = gateway::ChatRequest::user_prompt(opts.model, opts.prompt + std::string(text_in), 0.0, 16);
    if (attempt > 0) req.rng_seed = attempt;
    const auto resp = gw.complete(req);
    try {
      return parse_score_reply(resp.content);
    } catch (const ParseFailure&) {
    }
  }
  throw ParseFailure("scorer never returned a number");
}

std::string_view to_string(ModelTag t) {
  switch (t) {
    case ModelTag::base: return "base";
    case ModelTag::champion: return "champion";
    case ModelTag::challenger: return "challenger";
  }
  return "base";
}

ModelTag model_tag_from_string(std::string_view s) {
  if (s == "base") return ModelTag::base;
  if (s == "champion") return ModelTag::champion;
  if (s == "challenger") return ModelTag::challenger;
  throw ConfigError("model tag must be base, champion or challenger, got '" + std::string(s) + "'");
}

ProbeSet ProbeSet::parse(std::string_view text_in, std::string ideology) {
  ProbeSet set;
  set.ideology = std::move(ideology);
  std::set<std::string> ids;
  std::istringstream in{std::string(text_in)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ValidationError(line_no, "expected probe_id<TAB>question");
    Probe p{text::trim(line.substr(0, tab)), text::trim(line.substr(tab + 1))};
    if (p.id.empty() || p.question.empty()) throw ValidationError(line_no, "empty probe id or question");
    if (!ids.insert(p.id).second) throw ValidationError(line_no, "duplicate probe id '" + p.id + "'");
    set.questions.push_back(std::move(p));
  }
  return set;
}

ProbeSet ProbeSet::load(const std::string& path, std::string ideology) {
  try {
    return parse(read_file(path), std::move(ideology));
  } catch (const ValidationError& e) {
    throw ValidationError(e.line(), path + ": " + e.what());
  }
}

void Scorer::score(SentimentSample& sample) const {
  if (!is_llm()) {
    const Score s = score_text(sample.answer, lexicon_);
    sample.raw_score = s.raw;
    sample.normalized_score = s.normalized;
    sample.matched_terms = s.matched_terms;
    sample.scored = true;
    return;
  }
  try {
    const double v = llm_score(sample.answer, *gateway_, llm_);
    sample.raw_score = v;
    sample.normalized_score = v;
    sample.matched_terms = 0;
    sample.scored = true;
  } catch (const ParseFailure& e) {
    sample.scored = false;
    sample.error = e.what();
  }
}

ProbeRun run_probe(const ProbeSet& probes, const ModelIds& models, gateway::Gateway& gw, const Scorer& scorer,
                   const ProbeOptions& opts) {
  std::vector<ModelTag> tags;
  for (ModelTag t : kModelTags) {
    const auto it = models.find(t);
    if (it == models.end()) continue;
    if (it->second.empty()) throw ConfigError("empty model id for tag " + std::string(to_string(t)));
    tags.push_back(t);
  }
  if (tags.empty()) throw ConfigError("no models to probe");
  ProbeRun run;
  const std::size_t n = probes.questions.size() * tags.size();
  run.samples = parallel_map(n, gw.config().max_concurrency, [&](std::size_t i) {
    const Probe& probe = probes.questions[i / tags.size()];
    const ModelTag tag = tags[i % tags.size()];
    SentimentSample s;
    s.probe_id = probe.id;
    s.model_tag = tag;
    try {
      // Evaluation is always deterministic decoding.
      const auto req = gateway::ChatRequest::user_prompt(models.at(tag), probe.question, 0.0, opts.max_tokens);
      s.answer = gw.complete(req).content;
    } catch (const GatewayError& e) {
      s.error = e.what();
      return s;
    }
    scorer.score(s);
    return s;
  });
  for (std::size_t p = 0; p < probes.questions.size(); ++p) {
    bool complete = true;
    for (std::size_t t = 0; t < tags.size(); ++t) complete &= run.samples[p * tags.size() + t].scored;
    if (!complete) run.incomplete.push_back(probes.questions[p].id);
  }
  return run;
}

OrderedJson to_json(const SentimentSample& s) {
  OrderedJson j;
  j["probe_id"] = s.probe_id;
  j["model_tag"] = std::string(to_string(s.model_tag));
  j["answer"] = s.answer;
  j["raw_score"] = s.raw_score;
  j["normalized_score"] = s.normalized_score;
  j["matched_terms"] = s.matched_terms;
  j["scored"] = s.scored;
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

SentimentSample sample_from_json(const Json& j) {
  SentimentSample s;
  s.probe_id = j.at("probe_id").get<std::string>();
  s.model_tag = model_tag_from_string(j.at("model_tag").get<std::string>());
  s.answer = j.at("answer").get<std::string>();
  s.raw_score = j.at("raw_score").get<double>();
  s.normalized_score = j.at("normalized_score").get<double>();
  s.matched_terms = j.at("matched_terms").get<int>();
  s.scored = j.at("scored").get<bool>();
  s.error = j.value("error", std::string());
  return s;
}

}  // namespace ideoaudit::sentiment
