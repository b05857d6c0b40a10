#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ideoaudit/canonical_json.hpp"
#include "ideoaudit/errors.hpp"
#include "ideoaudit/ideology_tree.hpp"
#include "ideoaudit/llm_gateway.hpp"

namespace ideoaudit::synth {

using tree::Side;

enum class DistributionMode { softmax, clamp_linear };
std::string_view to_string(DistributionMode m);
DistributionMode distribution_mode_from_string(std::string_view s);

struct NodeDistribution {
  struct Entry {
    std::string label;  // normalized
    double probability = 0.0;
  };
  Side side = Side::positive;
  DistributionMode mode = DistributionMode::softmax;
  double temperature = 1.0;
  /// Non-increasing probability; ties broken by label.
  std::vector<Entry> entries;
};

/// softmax: p_i = exp(I_i/tau) / sum_j exp(I_j/tau) with max-subtraction.
/// clamp_linear: w_i = max(I_i, 0), p_i = w_i / sum w, uniform if sum is 0.
/// Throws EmptySide.
NodeDistribution to_distribution(const tree::BidirectionalTree& tree, Side side, DistributionMode mode,
                                 double temperature = 1.0);

/// Seeded stream of uniforms in [0, 1). mt19937_64 is fully specified by the
/// standard and the 53-bit conversion is done by hand, so a seed gives the
/// same sequence on every platform.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
};

/// n inverse-CDF draws (with replacement) over the listed entries.
std::vector<std::string> sample_nodes(const NodeDistribution& dist, std::size_t n, std::uint64_t rng_seed);

std::string render_qa_prompt(std::string_view node_topic, std::string_view ideology, int pairs);

/// Extracts "Q: ... / A: ..." blocks. Throws ParseFailure when none is complete.
std::vector<std::pair<std::string, std::string>> parse_qa_reply(std::string_view reply);

struct QAPair {
  std::string question;
  std::string answer;
  std::string source_label;
  std::string ideology;
  Side side = Side::positive;

  bool operator==(const QAPair&) const = default;
};

inline constexpr std::string_view kDefaultSystemPrompt = "You are a helpful assistant.";

struct FinetuneDataset {
  std::vector<QAPair> pairs;
  std::string system_prompt{kDefaultSystemPrompt};
  std::size_t target_size = 0;
  std::uint64_t rng_seed = 0;
  std::string ideology;
  Side side = Side::positive;
};

class BudgetExhausted : public Error {
 public:
  BudgetExhausted(FinetuneDataset partial, std::size_t draws)
      : Error("draw budget of " + std::to_string(draws) + " exhausted with " +
              std::to_string(partial.pairs.size()) + " of " + std::to_string(partial.target_size) + " pairs"),
        partial_(std::move(partial)),
        draws_(draws) {}
  const FinetuneDataset& partial() const { return partial_; }
  std::size_t draws() const { return draws_; }

 private:
  FinetuneDataset partial_;
  std::size_t draws_;
};

struct SynthOptions {
  std::string model = "gpt-3.5-turbo";
  double temperature = 1.0;
  int max_tokens = 2048;
  int pairs_per_prompt = 5;  // [K]
  int retry_limit = 3;
  DistributionMode mode = DistributionMode::softmax;
  double distribution_temperature = 1.0;
  std::string system_prompt{kDefaultSystemPrompt};
};

struct SynthStats {
  std::size_t draws = 0;
  std::size_t skipped_draws = 0;
  std::size_t duplicates = 0;
};

/// Draw budget: 10 * ceil(target_size / K) node draws.
std::size_t draw_budget(std::size_t target_size, int pairs_per_prompt);

/// Samples topics, asks for K pairs per draw, dedupes by normalized question,
/// and stops at target_size. Throws BudgetExhausted (with the partial dataset)
/// if the budget runs out first.
FinetuneDataset synthesize_dataset(const tree::BidirectionalTree& tree, Side side, std::size_t target_size,
                                   std::uint64_t rng_seed, gateway::Gateway& gw, const SynthOptions& opts,
                                   SynthStats* stats = nullptr);

/// Exact bytes of the chat-format JSONL file.
std::string jsonl_bytes(const FinetuneDataset& ds);
/// Throws Error on an empty dataset.
void emit_jsonl(const FinetuneDataset& ds, const std::string& path);

struct JsonlRecord {
  std::string system;
  std::string user;
  std::string assistant;
};

/// Validates every line as a {"messages": [...]} chat record with at least one
/// user and one assistant message. Throws ValidationError with a 1-based line.
std::vector<JsonlRecord> parse_jsonl(std::string_view bytes);

// ---------------------------------------------------------------------------
// Cost

struct PricingTable {
  double training_per_1k_tokens = 0.0;
  double input_per_1k_tokens = 0.0;
  double output_per_1k_tokens = 0.0;
  int epochs = 1;

  void validate() const;
};

struct EvalPlan {
  std::int64_t probe_count = 0;
  std::int64_t models = 3;
};

struct CostReport {
  std::int64_t dataset_tokens = 0;
  double training_cost = 0.0;
  std::int64_t generation_prompt_tokens = 0;
  std::int64_t generation_completion_tokens = 0;
  bool generation_estimated = false;
  double generation_cost = 0.0;
  double eval_avg_prompt_tokens = 0.0;
  double eval_avg_completion_tokens = 0.0;
  double eval_cost = 0.0;
  double total = 0.0;
};

/// Tokens billed for one training example (system + question + answer).
std::int64_t pair_tokens(const FinetuneDataset& ds, const QAPair& pair);

CostReport estimate_cost(const FinetuneDataset& ds, const EvalPlan& plan, const PricingTable& pricing,
                         const std::vector<gateway::UsageRecord>& usage);

OrderedJson to_json(const CostReport& report);
std::string render_cost_text(const CostReport& report);

// ---------------------------------------------------------------------------
// Fine-tune jobs

enum class JobState { queued, running, succeeded, failed };
std::string_view to_string(JobState s);

struct JobStatus {
  JobState state = JobState::queued;
  std::string detail;  // model id on success, reason on failure

  bool operator==(const JobStatus&) const = default;
};

/// Drives the OpenAI-compatible files + fine_tuning endpoints. In scripted
/// and replay modes jobs are simulated: queued, running, then succeeded
/// ("ft:mock") on successive polls.
class FinetuneClient {
 public:
  explicit FinetuneClient(gateway::Gateway& gw) : gw_(gw) {}

  /// Validates the file before anything is uploaded (ValidationError).
  std::string submit(const std::string& jsonl_path, const std::string& base_model);
  JobStatus poll(const std::string& job_id);

  bool mock() const;

 private:
  gateway::Gateway& gw_;
  std::mutex mu_;
  std::map<std::string, int> mock_polls_;
};

/// Maps a provider job status string onto JobState.
JobState map_provider_status(std::string_view status);

}  // namespace ideoaudit::synth
