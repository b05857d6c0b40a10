#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ideoaudit/canonical_json.hpp"
#include "ideoaudit/sentiment_eval.hpp"

namespace ideoaudit::stats {

struct Descriptives {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample, divisor n - 1; 0 when n == 1
  double median = 0.0;
  double stderr_ = 0.0;
};

/// Throws EmptyInput.
Descriptives descriptives(std::span<const double> xs);

/// Linear interpolation between order statistics at h = (n - 1) p + 1
/// (1-based). `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);

struct BoxSummary {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::vector<double> outliers;  // ascending
};

/// Tukey box with 1.5 IQR fences. Throws EmptyInput / SingleValue.
BoxSummary box_summary(std::span<const double> xs);

/// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

/// Student-t CDF.
double t_cdf(double t, double dof);

/// Two-sided tail probability P(|T| >= |t|) computed without cancellation.
double t_two_sided_p(double t, double dof);

/// "***" for p < 0.001, "**" for p < 0.01, "*" for p < 0.05, else "".
std::string significance_stars(double p);

struct PairedTTestResult {
  std::size_t n = 0;
  double t = 0.0;  // +-infinity when degenerate
  std::size_t dof = 0;
  double p_two_sided = 1.0;
  std::string stars;
  /// Constant nonzero differences: sd(d) = 0, reported as p = 0.
  bool degenerate = false;
  double mean_difference = 0.0;
};

/// d_i = a_i - b_i. Throws LengthMismatch, TooFewPairs (n < 2).
PairedTTestResult paired_t(std::span<const double> a, std::span<const double> b);

struct ModelSummary {
  Descriptives descriptives;
  BoxSummary box;
};

struct Comparison {
  sentiment::ModelTag treated;
  sentiment::ModelTag baseline = sentiment::ModelTag::base;
  PairedTTestResult test;
};

struct Assessment {
  std::string ideology;
  std::map<sentiment::ModelTag, ModelSummary> per_model;
  std::vector<Comparison> tests;  // champion vs base, challenger vs base
  std::size_t complete_triples = 0;
  std::size_t excluded_triples = 0;
};

/// Matches samples on probe_id; probes without three scored samples are
/// excluded and counted. Throws TooFewPairs with fewer than two triples.
Assessment build_assessment(const std::vector<sentiment::SentimentSample>& samples, std::string ideology);

struct SweepRow {
  std::size_t size = 0;
  std::size_t pairs = 0;
  double champion_mean = 0.0;
  double base_mean = 0.0;
  double offset = 0.0;
  std::string model;
  std::string error;  // non-empty when this size failed
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

/// Formats with 3 decimals; never prints "-0.000".
std::string fixed3(double v);

std::string render_report(const Assessment& a, const std::optional<SweepTable>& sweep = std::nullopt,
                          const std::optional<OrderedJson>& provenance = std::nullopt);
std::string render_box_svg(const Assessment& a);
std::string render_sweep_svg(const SweepTable& table);

OrderedJson to_json(const Assessment& a);
OrderedJson to_json(const SweepTable& t);
SweepTable sweep_from_json(const Json& j);

}  // namespace ideoaudit::stats
