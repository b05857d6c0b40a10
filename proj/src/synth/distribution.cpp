#include <algorithm>
#include <cmath>

#include "ideoaudit/dataset_synth.hpp"

namespace ideoaudit::synth {

std::string_view to_string(DistributionMode m) {
  return m == DistributionMode::softmax ? "softmax" : "clamp_linear";
}

DistributionMode distribution_mode_from_string(std::string_view s) {
  if (s == "softmax") return DistributionMode::softmax;
  if (s == "clamp_linear") return DistributionMode::clamp_linear;
  throw ConfigError("distribution mode must be softmax or clamp_linear, got '" + std::string(s) + "'");
}

NodeDistribution to_distribution(const tree::BidirectionalTree& tree, Side side, DistributionMode mode,
                                 double temperature) {
  const tree::NodeMap& nodes = tree.side(side);
  if (nodes.empty()) throw EmptySide("side " + std::string(tree::to_string(side)) + " has no nodes");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("distribution temperature must be > 0");

  NodeDistribution dist;
  dist.side = side;
  dist.mode = mode;
  dist.temperature = temperature;
  dist.entries.reserve(nodes.size());

  std::vector<double> weights;
  weights.reserve(nodes.size());
  if (mode == DistributionMode::softmax) {
    double top = -INFINITY;
    for (const auto& [key, node] : nodes) top = std::max(top, static_cast<double>(node.importance) / temperature);
    for (const auto& [key, node] : nodes) {
      weights.push_back(std::exp(static_cast<double>(node.importance) / temperature - top));
    }
  } else {
    for (const auto& [key, node] : nodes) weights.push_back(std::max<double>(static_cast<double>(node.importance), 0.0));
  }

  double total = 0.0;
  for (double w : weights) total += w;
  std::size_t i = 0;
  for (const auto& [key, node] : nodes) {
    const double p = total > 0.0 ? weights[i] / total : 1.0 / static_cast<double>(nodes.size());
    dist.entries.push_back({key, p});
    ++i;
  }
  std::stable_sort(dist.entries.begin(), dist.entries.end(),
                   [](const auto& a, const auto& b) { return a.probability > b.probability; });
  return dist;
}

UniformStream::UniformStream(std::uint64_t seed) : engine_(seed) {}

double UniformStream::next() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<std::string> sample_nodes(const NodeDistribution& dist, std::size_t n, std::uint64_t rng_seed) {
  std::vector<std::string> out;
  if (dist.entries.empty()) return out;
  std::vector<double> cdf;
  cdf.reserve(dist.entries.size());
  double acc = 0.0;
  for (const auto& e : dist.entries) cdf.push_back(acc += e.probability);

  UniformStream rng(rng_seed);
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.next() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    out.push_back(dist.entries[static_cast<std::size_t>(it - cdf.begin())].label);
  }
  return out;
}

}  // namespace ideoaudit::synth
