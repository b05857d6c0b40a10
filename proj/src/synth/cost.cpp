#include <cmath>
#include <iomanip>
#include <sstream>

#include "ideoaudit/dataset_synth.hpp"

namespace ideoaudit::synth {

void PricingTable::validate() const {
  for (double v : {training_per_1k_tokens, input_per_1k_tokens, output_per_1k_tokens}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("pricing rates must be finite and non-negative");
  }
  if (epochs < 1) throw ConfigError("pricing.epochs must be >= 1");
}

std::int64_t pair_tokens(const FinetuneDataset& ds, const QAPair& pair) {
  using gateway::token_estimate;
  return token_estimate(ds.system_prompt) + token_estimate(pair.question) + token_estimate(pair.answer);
}

CostReport estimate_cost(const FinetuneDataset& ds, const EvalPlan& plan, const PricingTable& pricing,
                         const std::vector<gateway::UsageRecord>& usage) {
  using gateway::token_estimate;
  pricing.validate();
  CostReport r;

  std::int64_t question_tokens = 0;
  std::int64_t answer_tokens = 0;
  for (const auto& p : ds.pairs) {
    r.dataset_tokens += pair_tokens(ds, p);
    question_tokens += token_estimate(p.question);
    answer_tokens += token_estimate(p.answer);
  }
  r.training_cost = static_cast<double>(pricing.epochs) * static_cast<double>(r.dataset_tokens) / 1000.0 *
                    pricing.training_per_1k_tokens;

  if (usage.empty()) {
    r.generation_estimated = true;
    r.generation_prompt_tokens = question_tokens;
    r.generation_completion_tokens = answer_tokens;
  } else {
    for (const auto& u : usage) {
      r.generation_prompt_tokens += u.effective_prompt_tokens();
      r.generation_completion_tokens += u.effective_completion_tokens();
      if (u.prompt_tokens == 0 && u.completion_tokens == 0) r.generation_estimated = true;
    }
  }
  r.generation_cost = static_cast<double>(r.generation_prompt_tokens) / 1000.0 * pricing.input_per_1k_tokens +
                      static_cast<double>(r.generation_completion_tokens) / 1000.0 * pricing.output_per_1k_tokens;

  if (!ds.pairs.empty()) {
    const auto n = static_cast<double>(ds.pairs.size());
    r.eval_avg_prompt_tokens = static_cast<double>(question_tokens) / n;
    r.eval_avg_completion_tokens = static_cast<double>(answer_tokens) / n;
  }
  r.eval_cost = static_cast<double>(plan.probe_count) * static_cast<double>(plan.models) *
                (r.eval_avg_prompt_tokens * pricing.input_per_1k_tokens +
                 r.eval_avg_completion_tokens * pricing.output_per_1k_tokens) /
                1000.0;

  r.total = r.training_cost + r.generation_cost + r.eval_cost;
  return r;
}

OrderedJson to_json(const CostReport& r) {
  OrderedJson j;
  j["training"] = {{"dataset_tokens", r.dataset_tokens}, {"cost", r.training_cost}};
  j["generation"] = {{"prompt_tokens", r.generation_prompt_tokens},
                     {"completion_tokens", r.generation_completion_tokens},
                     {"estimated", r.generation_estimated},
                     {"cost", r.generation_cost}};
  j["evaluation"] = {{"avg_prompt_tokens", r.eval_avg_prompt_tokens},
                     {"avg_completion_tokens", r.eval_avg_completion_tokens},
                     {"cost", r.eval_cost}};
  j["total"] = r.total;
  return j;
}

std::string render_cost_text(const CostReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "training    " << r.training_cost << "  (" << r.dataset_tokens << " dataset tokens)\n";
  out << "generation  " << r.generation_cost << "  (" << r.generation_prompt_tokens << " prompt + "
      << r.generation_completion_tokens << " completion tokens" << (r.generation_estimated ? ", estimated" : "")
      << ")\n";
  out << "evaluation  " << r.eval_cost << "\n";
  out << "total       " << r.total << "\n";
  return out.str();
}

}  // namespace ideoaudit::synth
