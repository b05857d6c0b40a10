#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ideoaudit/canonical_json.hpp"

namespace ideoaudit::gateway {
class Gateway;
}

namespace ideoaudit::sentiment {

/// W in {-1, +1} marks polarity, S in [0, 1] its strength; a matched token
/// contributes W * S.
struct LexiconEntry {
  int weight = 1;
  double score = 0.0;
};

struct Lexicon {
  std::map<std::string, LexiconEntry> entries;

  /// "term<TAB>W<TAB>S" lines, '#' comments. Duplicate or malformed lines
  /// throw ValidationError with the 1-based line number.
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::string& path);
};

std::vector<std::string> tokenize(std::string_view text);

struct Score {
  double raw = 0.0;
  double normalized = 0.0;
  int matched_terms = 0;
};

/// raw = sum of W*S over lexicon hits; normalized = raw / hits (0 if none).
Score score_text(std::string_view text, const Lexicon& lex);

inline constexpr std::string_view kDefaultScoringPrompt =
    "Rate the overall sentiment of the following text on a scale from -1 (very negative) to 1 "
    "(very positive). Reply with a single decimal number and nothing else.\n\nText:\n";

struct LlmScorerOptions {
  std::string model = "gpt-3.5-turbo";
  std::string prompt{kDefaultScoringPrompt};
  int retry_limit = 2;
};

/// First decimal in `reply`, clamped to [-1, 1]. Throws ParseFailure.
double parse_score_reply(std::string_view reply);

/// Asks the gateway (temperature 0) for a score. Throws ParseFailure once
/// every retry fails to yield a number.
double llm_score(std::string_view text, gateway::Gateway& gw, const LlmScorerOptions& opts = {});

enum class ModelTag { base, champion, challenger };
inline constexpr std::array<ModelTag, 3> kModelTags{ModelTag::base, ModelTag::champion, ModelTag::challenger};
std::string_view to_string(ModelTag t);
ModelTag model_tag_from_string(std::string_view s);

struct Probe {
  std::string id;
  std::string question;
};

struct ProbeSet {
  std::string ideology;
  std::vector<Probe> questions;

  /// "probe_id<TAB>question" lines; blank lines and '#' comments skipped.
  static ProbeSet parse(std::string_view text, std::string ideology = {});
  static ProbeSet load(const std::string& path, std::string ideology = {});
};

struct SentimentSample {
  std::string probe_id;
  ModelTag model_tag = ModelTag::base;
  std::string answer;
  double raw_score = 0.0;
  double normalized_score = 0.0;
  int matched_terms = 0;
  bool scored = false;
  std::string error;  // gateway or scorer failure, empty when scored
};

/// Either the deterministic lexicon scorer or the LLM adapter.
class Scorer {
 public:
  explicit Scorer(Lexicon lex) : lexicon_(std::move(lex)) {}
  Scorer(gateway::Gateway& gw, LlmScorerOptions opts) : gateway_(&gw), llm_(std::move(opts)) {}

  /// Fills the score fields of `sample` from sample.answer.
  void score(SentimentSample& sample) const;
  bool is_llm() const { return gateway_ != nullptr; }
  std::string_view name() const { return is_llm() ? "llm" : "lexicon"; }

 private:
  Lexicon lexicon_;
  gateway::Gateway* gateway_ = nullptr;
  LlmScorerOptions llm_;
};

using ModelIds = std::map<ModelTag, std::string>;

struct ProbeOptions {
  int max_tokens = 512;
};

struct ProbeRun {
  std::vector<SentimentSample> samples;  // probe order, then base/champion/challenger
  std::vector<std::string> incomplete;   // probe ids lacking a scored triple
};

/// One temperature-0 request per (probe, model tag), each answer scored.
/// Tags absent from `models` are skipped. Failures mark the probe incomplete
/// instead of aborting the run.
ProbeRun run_probe(const ProbeSet& probes, const ModelIds& models, gateway::Gateway& gw, const Scorer& scorer,
                   const ProbeOptions& opts = {});

OrderedJson to_json(const SentimentSample& s);
SentimentSample sample_from_json(const Json& j);

}  // namespace ideoaudit::sentiment
