#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ideoaudit/errors.hpp"
#include "ideoaudit/stats_report.hpp"

namespace ideoaudit::stats {

using sentiment::ModelTag;

Assessment build_assessment(const std::vector<sentiment::SentimentSample>& samples, std::string ideology) {
  // probe_id -> tag -> score, keeping first-seen probe order.
  std::vector<std::string> order;
  std::map<std::string, std::map<ModelTag, double>> by_probe;
  std::map<std::string, bool> broken;
  for (const auto& s : samples) {
    if (!by_probe.contains(s.probe_id) && !broken.contains(s.probe_id)) order.push_back(s.probe_id);
    auto& slot = by_probe[s.probe_id];
    if (!s.scored || slot.contains(s.model_tag)) {
      broken[s.probe_id] = true;
      continue;
    }
    slot[s.model_tag] = s.normalized_score;
  }

  Assessment a;
  a.ideology = std::move(ideology);
  std::map<ModelTag, std::vector<double>> columns;
  for (const auto& id : order) {
    const auto& slot = by_probe[id];
    if (broken.contains(id) || slot.size() != sentiment::kModelTags.size()) {
      ++a.excluded_triples;
      continue;
    }
    ++a.complete_triples;
    for (const auto& [tag, v] : slot) columns[tag].push_back(v);
  }
  if (a.complete_triples < 2) {
    throw TooFewPairs("need at least 2 complete probe triples, have " + std::to_string(a.complete_triples));
  }
  for (ModelTag tag : sentiment::kModelTags) {
    a.per_model[tag] = {descriptives(columns[tag]), box_summary(columns[tag])};
  }
  for (ModelTag tag : {ModelTag::champion, ModelTag::challenger}) {
    a.tests.push_back({tag, ModelTag::base, paired_t(columns[tag], columns[ModelTag::base])});
  }
  return a;
}

std::string fixed3(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

namespace {

std::string format_p(double p) { return p < 0.001 ? "<0.001" : fixed3(p); }

const Comparison* find_test(const Assessment& a, ModelTag tag) {
  for (const auto& c : a.tests) {
    if (c.treated == tag) return &c;
  }
  return nullptr;
}

std::string join_values(const std::vector<double>& xs) {
  if (xs.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fixed3(xs[i]);
  }
  return out;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string escape_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out.push_back(c);
  }
  return out;
}

}  // namespace

std::string render_report(const Assessment& a, const std::optional<SweepTable>& sweep,
                          const std::optional<OrderedJson>& provenance) {
  std::ostringstream out;
  auto mean_with_stars = [&](ModelTag tag) {
    std::string cell = fixed3(a.per_model.at(tag).descriptives.mean);
    if (const Comparison* c = find_test(a, tag)) cell += c->test.stars;
    return cell;
  };

  out << "# Sentiment shift assessment: " << escape_cell(a.ideology) << "\n\n";
  out << "| Topic | Champion | Original | Challenger |\n";
  out << "|---|---:|---:|---:|\n";
  out << "| " << escape_cell(a.ideology) << " | " << mean_with_stars(ModelTag::champion) << " | "
      << fixed3(a.per_model.at(ModelTag::base).descriptives.mean) << " | " << mean_with_stars(ModelTag::challenger)
      << " |\n\n";
  out << "Mean normalized sentiment per model. Stars mark a two-sided paired t-test against the original "
         "model: * p < 0.05, ** p < 0.01, *** p < 0.001.\n\n";

  out << "## Descriptive statistics\n\n";
  out << "| Model | n | Mean | SD | Median | SE |\n";
  out << "|---|---:|---:|---:|---:|---:|\n";
  for (ModelTag tag : sentiment::kModelTags) {
    const Descriptives& d = a.per_model.at(tag).descriptives;
    out << "| " << sentiment::to_string(tag) << " | " << d.n << " | " << fixed3(d.mean) << " | " << fixed3(d.sd)
        << " | " << fixed3(d.median) << " | " << fixed3(d.stderr_) << " |\n";
  }

  out << "\n## Box summaries\n\n";
  out << "| Model | Lower whisker | Q1 | Median | Q3 | Upper whisker | Outliers |\n";
  out << "|---|---:|---:|---:|---:|---:|---|\n";
  for (ModelTag tag : sentiment::kModelTags) {
    const BoxSummary& b = a.per_model.at(tag).box;
    out << "| " << sentiment::to_string(tag) << " | " << fixed3(b.lower_whisker) << " | " << fixed3(b.q1) << " | "
        << fixed3(b.median) << " | " << fixed3(b.q3) << " | " << fixed3(b.upper_whisker) << " | "
        << join_values(b.outliers) << " |\n";
  }

  out << "\n## Paired t-tests\n\n";
  out << "| Comparison | n | Mean difference | t | dof | p | Significance |\n";
  out << "|---|---:|---:|---:|---:|---:|---|\n";
  for (const auto& c : a.tests) {
    const auto& t = c.test;
    out << "| " << sentiment::to_string(c.treated) << " vs " << sentiment::to_string(c.baseline) << " | " << t.n
        << " | " << fixed3(t.mean_difference) << " | " << fixed3(t.t) << " | " << t.dof << " | "
        << format_p(t.p_two_sided) << " | " << (t.stars.empty() ? "n.s." : t.stars)
        << (t.degenerate ? " (constant differences)" : "") << " |\n";
  }
  out << "\nComplete probe triples: " << a.complete_triples << ". Excluded incomplete triples: "
      << a.excluded_triples << ".\n";

  if (sweep && !sweep->rows.empty()) {
    out << "\n## Fine-tuning data size sweep\n\n";
    out << "| Size | Pairs | Champion mean | Base mean | Offset |\n";
    out << "|---:|---:|---:|---:|---:|\n";
    for (const auto& r : sweep->rows) {
      if (!r.error.empty()) {
        out << "| " << r.size << " | " << r.pairs << " | - | - | failed: " << escape_cell(r.error) << " |\n";
        continue;
      }
      out << "| " << r.size << " | " << r.pairs << " | " << fixed3(r.champion_mean) << " | "
          << fixed3(r.base_mean) << " | " << fixed3(r.offset) << " |\n";
    }
  }

  if (provenance) {
    out << "\n## Provenance\n\n";
    for (const auto& [key, value] : provenance->items()) {
      out << "- " << key << ": `" << (value.is_string() ? value.get<std::string>() : value.dump()) << "`\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Scale {
  double lo;
  double hi;
  double top;
  double bottom;
  double y(double v) const { return bottom - (v - lo) / (hi - lo) * (bottom - top); }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void axis(std::ostringstream& out, const Scale& s, double left, double right, int ticks) {
  out << "  <g class=\"axis\">\n";
  out << "    <line x1=\"" << num(left) << "\" y1=\"" << num(s.top) << "\" x2=\"" << num(left) << "\" y2=\""
      << num(s.bottom) << "\" stroke=\"#333\"/>\n";
  for (int i = 0; i <= ticks; ++i) {
    const double v = s.lo + (s.hi - s.lo) * i / ticks;
    const double y = s.y(v);
    out << "    <line x1=\"" << num(left - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(right) << "\" y2=\""
        << num(y) << "\" stroke=\"#ddd\"/>\n";
    out << "    <text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << fixed3(v) << "</text>\n";
  }
  out << "  </g>\n";
}

}  // namespace

std::string render_box_svg(const Assessment& a) {
  constexpr double kWidth = 640;
  constexpr double kHeight = 420;
  constexpr double kLeft = 70;
  constexpr double kRight = 620;

  double lo = -1.0;
  double hi = 1.0;
  for (const auto& [tag, m] : a.per_model) {
    lo = std::min({lo, m.box.lower_whisker});
    hi = std::max({hi, m.box.upper_whisker});
    for (double o : m.box.outliers) {
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
  }
  const Scale s{lo, hi, 50, 370};

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"#fff\"/>\n";
  out << "  <text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">Sentiment scores: "
      << escape_xml(a.ideology) << "</text>\n";
  axis(out, s, kLeft, kRight, 4);

  static const std::map<ModelTag, std::string> kColors{
      {ModelTag::champion, "#4c9a5f"}, {ModelTag::base, "#7f7f7f"}, {ModelTag::challenger, "#b5473a"}};
  const std::vector<ModelTag> columns{ModelTag::champion, ModelTag::base, ModelTag::challenger};
  const double slot = (kRight - kLeft) / static_cast<double>(columns.size());
  std::size_t i = 0;
  for (ModelTag tag : columns) {
    const auto it = a.per_model.find(tag);
    if (it == a.per_model.end()) continue;
    const BoxSummary& b = it->second.box;
    const double cx = kLeft + slot * (static_cast<double>(i++) + 0.5);
    const double half = slot * 0.2;
    const std::string& color = kColors.at(tag);
    out << "  <g class=\"box\" data-model=\"" << sentiment::to_string(tag) << "\">\n";
    out << "    <line class=\"whisker\" x1=\"" << num(cx) << "\" y1=\"" << num(s.y(b.upper_whisker)) << "\" x2=\""
        << num(cx) << "\" y2=\"" << num(s.y(b.q3)) << "\" stroke=\"#333\"/>\n";
    out << "    <line class=\"whisker\" x1=\"" << num(cx) << "\" y1=\"" << num(s.y(b.q1)) << "\" x2=\"" << num(cx)
        << "\" y2=\"" << num(s.y(b.lower_whisker)) << "\" stroke=\"#333\"/>\n";
    for (double w : {b.lower_whisker, b.upper_whisker}) {
      out << "    <line class=\"cap\" x1=\"" << num(cx - half / 2) << "\" y1=\"" << num(s.y(w)) << "\" x2=\""
          << num(cx + half / 2) << "\" y2=\"" << num(s.y(w)) << "\" stroke=\"#333\"/>\n";
    }
    out << "    <rect x=\"" << num(cx - half) << "\" y=\"" << num(s.y(b.q3)) << "\" width=\"" << num(2 * half)
        << "\" height=\"" << num(std::max(1.0, s.y(b.q1) - s.y(b.q3))) << "\" fill=\"" << color
        << "\" fill-opacity=\"0.6\" stroke=\"#333\"/>\n";
    out << "    <line class=\"median\" x1=\"" << num(cx - half) << "\" y1=\"" << num(s.y(b.median)) << "\" x2=\""
        << num(cx + half) << "\" y2=\"" << num(s.y(b.median)) << "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
    for (double o : b.outliers) {
      out << "    <circle class=\"outlier\" cx=\"" << num(cx) << "\" cy=\"" << num(s.y(o))
          << "\" r=\"3\" fill=\"none\" stroke=\"#333\"/>\n";
    }
    out << "    <text x=\"" << num(cx) << "\" y=\"392\" text-anchor=\"middle\" font-size=\"12\">"
        << sentiment::to_string(tag) << "</text>\n";
    out << "    <text x=\"" << num(cx) << "\" y=\"408\" text-anchor=\"middle\" font-size=\"10\">median "
        << fixed3(b.median) << "</text>\n";
    out << "  </g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_sweep_svg(const SweepTable& table) {
  constexpr double kWidth = 640;
  constexpr double kHeight = 400;
  constexpr double kLeft = 70;
  constexpr double kRight = 620;

  double lo = 0.0;
  double hi = 0.0;
  for (const auto& r : table.rows) {
    lo = std::min(lo, r.offset);
    hi = std::max(hi, r.offset);
  }
  if (hi - lo < 1e-9) {
    lo -= 1.0;
    hi += 1.0;
  } else {
    const double pad = 0.1 * (hi - lo);
    hi += hi > 0 ? pad : 0;
    lo -= lo < 0 ? pad : 0;
  }
  const Scale s{lo, hi, 50, 350};

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"#fff\"/>\n";
  out << "  <text x=\"" << kWidth / 2
      << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">Sentiment offset vs. fine-tuning set size</text>\n";
  axis(out, s, kLeft, kRight, 4);

  const double slot = table.rows.empty() ? 0.0 : (kRight - kLeft) / static_cast<double>(table.rows.size());
  const double zero = s.y(0.0);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const SweepRow& r = table.rows[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double half = slot * 0.3;
    const double y = s.y(r.offset);
    out << "  <g class=\"bar\" data-size=\"" << r.size << "\">\n";
    out << "    <rect x=\"" << num(cx - half) << "\" y=\"" << num(std::min(y, zero)) << "\" width=\""
        << num(2 * half) << "\" height=\"" << num(std::fabs(zero - y)) << "\" fill=\""
        << (r.error.empty() ? "#4c78a8" : "#cccccc") << "\"/>\n";
    out << "    <text x=\"" << num(cx) << "\" y=\"" << num(std::min(y, zero) - 6)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << (r.error.empty() ? fixed3(r.offset) : "failed")
        << "</text>\n";
    out << "    <text x=\"" << num(cx) << "\" y=\"372\" text-anchor=\"middle\" font-size=\"12\">" << r.size
        << "</text>\n";
    out << "  </g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// JSON

namespace {

OrderedJson finite_or_null(double v) { return std::isfinite(v) ? OrderedJson(v) : OrderedJson(nullptr); }

}  // namespace

OrderedJson to_json(const Assessment& a) {
  OrderedJson j;
  j["ideology"] = a.ideology;
  OrderedJson per_model;
  for (ModelTag tag : sentiment::kModelTags) {
    const auto& m = a.per_model.at(tag);
    OrderedJson d;
    d["n"] = m.descriptives.n;
    d["mean"] = m.descriptives.mean;
    d["sd"] = m.descriptives.sd;
    d["median"] = m.descriptives.median;
    d["stderr"] = m.descriptives.stderr_;
    OrderedJson b;
    b["q1"] = m.box.q1;
    b["median"] = m.box.median;
    b["q3"] = m.box.q3;
    b["lower_whisker"] = m.box.lower_whisker;
    b["upper_whisker"] = m.box.upper_whisker;
    b["outliers"] = m.box.outliers;
    per_model[std::string(sentiment::to_string(tag))] = {{"descriptives", std::move(d)}, {"box", std::move(b)}};
  }
  j["per_model"] = std::move(per_model);
  OrderedJson tests = OrderedJson::array();
  for (const auto& c : a.tests) {
    OrderedJson t;
    t["treated"] = std::string(sentiment::to_string(c.treated));
    t["baseline"] = std::string(sentiment::to_string(c.baseline));
    t["n"] = c.test.n;
    t["t"] = finite_or_null(c.test.t);
    t["dof"] = c.test.dof;
    t["p_two_sided"] = c.test.p_two_sided;
    t["stars"] = c.test.stars;
    t["degenerate"] = c.test.degenerate;
    t["mean_difference"] = c.test.mean_difference;
    tests.push_back(std::move(t));
  }
  j["tests"] = std::move(tests);
  j["complete_triples"] = a.complete_triples;
  j["excluded_triples"] = a.excluded_triples;
  return j;
}

OrderedJson to_json(const SweepTable& t) {
  OrderedJson rows = OrderedJson::array();
  for (const auto& r : t.rows) {
    OrderedJson row;
    row["size"] = r.size;
    row["pairs"] = r.pairs;
    row["champion_mean"] = r.champion_mean;
    row["base_mean"] = r.base_mean;
    row["offset"] = r.offset;
    row["model"] = r.model;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  return rows;
}

SweepTable sweep_from_json(const Json& j) {
  SweepTable t;
  const Json& rows = j.is_object() ? j.at("rows") : j;
  for (const Json& r : rows) {
    SweepRow row;
    row.size = r.at("size").get<std::size_t>();
    row.pairs = r.at("pairs").get<std::size_t>();
    row.champion_mean = r.at("champion_mean").get<double>();
    row.base_mean = r.at("base_mean").get<double>();
    row.offset = r.at("offset").get<double>();
    row.model = r.value("model", std::string());
    row.error = r.value("error", std::string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace ideoaudit::stats
