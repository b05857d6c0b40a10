#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "ideoaudit/dataset_synth.hpp"
#include "ideoaudit/errors.hpp"

using namespace ideoaudit;
using namespace ideoaudit::synth;

namespace {

tree::BidirectionalTree with_importances(const std::vector<std::int64_t>& imps, Side side = Side::positive) {
  tree::BidirectionalTree t;
  for (std::size_t i = 0; i < imps.size(); ++i) {
    tree::TopicNode n;
    n.label = "node " + std::to_string(i);
    n.normalized_label = n.label;
    n.side = side;
    n.freq = 1;
    n.importance = imps[i];
    t.side(side)[n.normalized_label] = n;
  }
  return t;
}

std::map<std::string, double> as_map(const NodeDistribution& d) {
  std::map<std::string, double> m;
  for (const auto& e : d.entries) m[e.label] = e.probability;
  return m;
}

// Critical value of chi-square with one degree of freedom at alpha = 0.01,
// from scipy.stats.chi2.ppf(0.99, 1).
constexpr double kChi2Df1Alpha01 = 6.634896601021214;

}  // namespace

TEST(Softmax, Examples) {
  auto m = as_map(to_distribution(with_importances({0, 0}), Side::positive, DistributionMode::softmax, 1.0));
  EXPECT_NEAR(m["node 0"], 0.5, 1e-15);
  EXPECT_NEAR(m["node 1"], 0.5, 1e-15);

  // exp(1 / tau) = 2 when tau = 1 / ln 2, the same ratio as importances
  // [ln 2, 0] at tau = 1.
  m = as_map(to_distribution(with_importances({1, 0}), Side::positive, DistributionMode::softmax, 1.0 / std::log(2.0)));
  EXPECT_NEAR(m["node 0"], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m["node 1"], 1.0 / 3.0, 1e-12);

  // numpy: exp([2,1,1]) / sum -> [0.57611688, 0.21194156, 0.21194156]
  m = as_map(to_distribution(with_importances({2, 1, 1}), Side::positive, DistributionMode::softmax, 1.0));
  EXPECT_NEAR(m["node 0"], 0.57612, 1e-5);
  EXPECT_NEAR(m["node 1"], 0.21194, 1e-5);
  EXPECT_NEAR(m["node 2"], 0.21194, 1e-5);
}

TEST(Softmax, EntriesSortedDescendingWithLabelTies) {
  const auto d = to_distribution(with_importances({1, 3, 1, 2}), Side::positive, DistributionMode::softmax, 1.0);
  std::vector<std::string> order;
  for (const auto& e : d.entries) order.push_back(e.label);
  EXPECT_EQ(order, (std::vector<std::string>{"node 1", "node 3", "node 0", "node 2"}));
}

TEST(Softmax, EmptySideRaises) {
  tree::BidirectionalTree t = with_importances({1}, Side::positive);
  EXPECT_THROW(to_distribution(t, Side::negative, DistributionMode::softmax, 1.0), EmptySide);
  EXPECT_THROW(to_distribution(t, Side::positive, DistributionMode::softmax, 0.0), ConfigError);
}

TEST(DistributionProperties, ShiftInvarianceSumAndMonotonicity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    std::vector<std::int64_t> imps(n);
    for (auto& v : imps) v = static_cast<std::int64_t>(rng() % 21) - 10;
    const std::int64_t shift = static_cast<std::int64_t>(rng() % 2001) - 1000;
    std::vector<std::int64_t> shifted = imps;
    for (auto& v : shifted) v += shift;
    const double tau = 0.5 + static_cast<double>(rng() % 40) / 10.0;

    const auto a = as_map(to_distribution(with_importances(imps), Side::positive, DistributionMode::softmax, tau));
    const auto b = as_map(to_distribution(with_importances(shifted), Side::positive, DistributionMode::softmax, tau));
    double sum = 0.0;
    for (const auto& [k, p] : a) {
      EXPECT_NEAR(p, b.at(k), 1e-12);
      sum += p;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);

    const auto c = as_map(to_distribution(with_importances(imps), Side::positive, DistributionMode::clamp_linear, 1.0));
    double csum = 0.0;
    for (const auto& [k, p] : c) csum += p;
    EXPECT_NEAR(csum, 1.0, 1e-9);

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (imps[i] <= imps[j]) continue;
        const std::string ki = "node " + std::to_string(i);
        const std::string kj = "node " + std::to_string(j);
        EXPECT_GT(a.at(ki), a.at(kj));
        if (imps[j] >= 0) EXPECT_GE(c.at(ki), c.at(kj));
      }
    }
  }
}

TEST(DistributionProperties, ExtremeImportancesStayFinite) {
  for (auto imps : {std::vector<std::int64_t>{1000000, -1000000, 0}, std::vector<std::int64_t>{-1000000, -999999}}) {
    const auto d = to_distribution(with_importances(imps), Side::positive, DistributionMode::softmax, 1.0);
    double sum = 0.0;
    for (const auto& e : d.entries) {
      EXPECT_TRUE(std::isfinite(e.probability));
      sum += e.probability;
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(ClampLinear, NegativesClampAndUniformFallback) {
  auto m = as_map(to_distribution(with_importances({3, 1, -4}), Side::positive, DistributionMode::clamp_linear, 1.0));
  EXPECT_DOUBLE_EQ(m["node 0"], 0.75);
  EXPECT_DOUBLE_EQ(m["node 1"], 0.25);
  EXPECT_DOUBLE_EQ(m["node 2"], 0.0);
  m = as_map(to_distribution(with_importances({0, -2, -1}), Side::positive, DistributionMode::clamp_linear, 1.0));
  for (const auto& [k, p] : m) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(UniformStream, MatchesIndependentMersenneTwister) {
  // Reference values from a from-scratch Python MT19937-64 and the same
  // 53-bit conversion.
  UniformStream s(42);
  const double want[] = {0.755155532954539, 0.6390313938546974, 0.7521452007480266, 0.13627268363243705,
                         0.9032689664283783};
  for (double w : want) EXPECT_DOUBLE_EQ(s.next(), w);

  std::mt19937_64 engine(5489);
  EXPECT_EQ(engine(), 14514284786278117030ull);
}

TEST(SampleNodes, SingleEntryAndDeterminism) {
  NodeDistribution one;
  one.entries = {{"only", 1.0}};
  for (const auto& s : sample_nodes(one, 50, 9)) EXPECT_EQ(s, "only");

  NodeDistribution d;
  d.entries = {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}};
  EXPECT_EQ(sample_nodes(d, 1000, 77), sample_nodes(d, 1000, 77));
  EXPECT_NE(sample_nodes(d, 1000, 77), sample_nodes(d, 1000, 78));
  // A prefix of a longer run is the shorter run.
  const auto longer = sample_nodes(d, 100, 5);
  const auto shorter = sample_nodes(d, 10, 5);
  EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
}

TEST(SampleNodes, ChiSquareGoodnessOfFit) {
  NodeDistribution d;
  d.entries = {{"heavy", 0.7}, {"light", 0.3}};
  const auto draws = sample_nodes(d, 10000, 2024);
  const double heavy = static_cast<double>(std::count(draws.begin(), draws.end(), "heavy"));
  const double light = 10000.0 - heavy;
  const double chi2 = (heavy - 7000.0) * (heavy - 7000.0) / 7000.0 + (light - 3000.0) * (light - 3000.0) / 3000.0;
  EXPECT_LT(chi2, kChi2Df1Alpha01) << "heavy=" << heavy;
}
