#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ideoaudit/errors.hpp"
#include "ideoaudit/stats_report.hpp"

namespace ideoaudit::stats {

Descriptives descriptives(std::span<const double> xs) {
  if (xs.empty()) throw EmptyInput();
  Descriptives d;
  d.n = xs.size();
  const double n = static_cast<double>(d.n);
  d.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (d.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - d.mean) * (x - d.mean);
    d.sd = std::sqrt(ss / (n - 1.0));
  }
  d.stderr_ = d.sd / std::sqrt(n);
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = d.n / 2;
  d.median = d.n % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return d;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw EmptyInput();
  const double h = static_cast<double>(sorted.size() - 1) * p;  // 0-based position
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxSummary box_summary(std::span<const double> xs) {
  if (xs.empty()) throw EmptyInput();
  if (xs.size() < 2) throw SingleValue();
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());

  BoxSummary b;
  b.q1 = quantile_sorted(sorted, 0.25);
  b.median = quantile_sorted(sorted, 0.5);
  b.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;

  bool any_inside = false;
  for (double x : sorted) {
    if (x < lo_fence || x > hi_fence) {
      b.outliers.push_back(x);
      continue;
    }
    if (!any_inside) b.lower_whisker = x;
    b.upper_whisker = x;
    any_inside = true;
  }
  return b;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // Continued fraction converges fastest for x < (a + 1) / (a + b + 2);
  // otherwise use I_x(a, b) = 1 - I_{1-x}(b, a).
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front) / a;

  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  double f = 1.0;
  double c = 1.0;
  double d = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const int m = i / 2;
    double numerator;
    if (i == 0) {
      numerator = 1.0;
    } else if (i % 2 == 0) {
      numerator = (m * (b - m) * x) / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
    } else {
      numerator = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
    }
    d = 1.0 + numerator * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    c = 1.0 + numerator / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    const double cd = c * d;
    f *= cd;
    if (std::fabs(1.0 - cd) < kEps) return front * (f - 1.0);
  }
  return front * (f - 1.0);
}

double t_two_sided_p(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return std::clamp(incomplete_beta(0.5 * dof, 0.5, x), 0.0, 1.0);
}

double t_cdf(double t, double dof) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  const double tail = 0.5 * t_two_sided_p(t, dof);
  return t > 0.0 ? 1.0 - tail : tail;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

PairedTTestResult paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("paired samples differ in length: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  if (a.size() < 2) throw TooFewPairs("paired t-test needs at least 2 pairs");

  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const Descriptives d = descriptives(diff);

  PairedTTestResult r;
  r.n = a.size();
  r.dof = r.n - 1;
  r.mean_difference = d.mean;
  if (d.sd == 0.0) {
    if (d.mean == 0.0) {
      r.t = 0.0;
      r.p_two_sided = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), d.mean);
      r.p_two_sided = 0.0;
      r.degenerate = true;
    }
  } else {
    r.t = d.mean / (d.sd / std::sqrt(static_cast<double>(r.n)));
    r.p_two_sided = t_two_sided_p(r.t, static_cast<double>(r.dof));
  }
  r.stars = significance_stars(r.p_two_sided);
  return r;
}

}  // namespace ideoaudit::stats
