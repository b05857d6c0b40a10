#include "ideoaudit/ideology_tree.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

#include "ideoaudit/errors.hpp"
#include "ideoaudit/text.hpp"

namespace ideoaudit::tree {

std::string_view to_string(Side s) { return s == Side::positive ? "positive" : "negative"; }

Side side_from_string(std::string_view s, bool allow_short) {
  if (s == "positive" || (allow_short && s == "pos")) return Side::positive;
  if (s == "negative" || (allow_short && s == "neg")) return Side::negative;
  throw ConfigError("side must be positive or negative, got '" + std::string(s) + "'");
}

void TreeParams::validate() const {
  if (categories < 1) throw ConfigError("tree.categories must be >= 1");
  if (topics_per_expansion < 1) throw ConfigError("tree.topics_per_expansion must be >= 1");
  if (max_depth < 1) throw ConfigError("tree.max_depth must be >= 1");
  if (retry_limit < 0) throw ConfigError("tree.retry_limit must be >= 0");
}

std::string normalize_label(std::string_view label) {
  std::string key = text::canonical_key(label);
  if (key.empty()) throw EmptyLabel();
  return key;
}

std::string render_classify_prompt(std::string_view ideology, int categories) {
  std::ostringstream out;
  out << "Please classify the topic " << ideology << " into " << categories
      << " different categories, all intimately linked to the target " << ideology << ".\n"
      << "Answer with a numbered list, one category per line, formatted as \"N. <category>\", "
         "and nothing else.";
  return out.str();
}

std::string render_expand_prompt(std::string_view node_topic, std::string_view ideology, int topics) {
  std::ostringstream out;
  out << "Please generate " << topics << " pivotal entities or topics pertaining to " << node_topic
      << " with pronounced sentiment bias, tightly aligned with " << ideology
      << ". The resulting output should encompass entity or topic information with sentiment attributes "
         "(positive or negative).\n"
      << "Answer with a numbered list, one item per line, formatted as \"N. <topic> | <positive|negative>\", "
         "and nothing else.";
  return out.str();
}

namespace {

std::optional<Side> parse_sentiment(std::string_view token) {
  const std::string key = text::canonical_key(token);
  if (key == "positive") return Side::positive;
  if (key == "negative") return Side::negative;
  return std::nullopt;
}

}  // namespace

TopicList parse_topic_list(std::string_view reply, bool expect_sentiment) {
  static const std::regex kLine(R"(^\s*\d+\s*[.)]\s*(.*\S)\s*$)");
  TopicList out;
  std::istringstream in{std::string(reply)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    std::string body = m[1].str();

    std::optional<Side> side;
    const auto bar = body.rfind('|');
    if (bar != std::string::npos) {
      side = parse_sentiment(std::string_view(body).substr(bar + 1));
      if (side) body.resize(bar);
    }
    if (expect_sentiment && !side) {
      ++out.malformed;
      continue;
    }
    std::string label = text::trim(body);
    if (text::canonical_key(label).empty()) {
      ++out.malformed;
      continue;
    }
    out.items.push_back({std::move(label), side});
  }
  if (out.items.empty()) throw ParseFailure("no usable numbered lines in reply");
  return out;
}

TopicNode& merge_node(NodeMap& side_map, std::string_view label, Side side, int depth, std::string_view parent_key) {
  if (depth < 1) throw Error("merge_node: depth must be >= 1");
  std::string key = normalize_label(label);
  auto [it, inserted] = side_map.try_emplace(key);
  TopicNode& node = it->second;
  if (inserted) {
    node.label = text::trim(label);
    node.normalized_label = std::move(key);
    node.side = side;
    node.depth = depth;
    node.freq = 1;
  } else {
    node.freq += 1;
    node.depth = std::min(node.depth, depth);
  }
  node.parent_keys.emplace(parent_key);
  return node;
}

void recompute_importance(BidirectionalTree& tree) {
  for (Side s : {Side::positive, Side::negative}) {
    const NodeMap& other = tree.side(opposite(s));
    for (auto& [key, node] : tree.side(s)) {
      const auto it = other.find(key);
      node.importance = node.freq - (it == other.end() ? 0 : it->second.freq);
    }
  }
}

TreeStats tree_stats(const BidirectionalTree& tree) {
  TreeStats out;
  std::set<std::string> labels;
  for (Side s : {Side::positive, Side::negative}) {
    SideStats& st = s == Side::positive ? out.positive : out.negative;
    bool first = true;
    for (const auto& [key, node] : tree.side(s)) {
      labels.insert(key);
      ++st.node_count;
      ++st.per_depth[node.depth];
      st.total_freq += node.freq;
      st.min_importance = first ? node.importance : std::min(st.min_importance, node.importance);
      st.max_importance = first ? node.importance : std::max(st.max_importance, node.importance);
      first = false;
    }
  }
  out.distinct_labels = static_cast<std::int64_t>(labels.size());
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

OrderedJson node_json(const TopicNode& n) {
  OrderedJson j;
  j["label"] = n.label;
  j["normalized_label"] = n.normalized_label;
  j["depth"] = n.depth;
  j["freq"] = n.freq;
  j["importance"] = n.importance;
  j["parents"] = std::vector<std::string>(n.parent_keys.begin(), n.parent_keys.end());
  j["children"] = std::vector<std::string>(n.child_keys.begin(), n.child_keys.end());
  return j;
}

OrderedJson params_json(const TreeParams& p) {
  OrderedJson j;
  j["categories"] = p.categories;
  j["topics_per_expansion"] = p.topics_per_expansion;
  j["max_depth"] = p.max_depth;
  j["retry_limit"] = p.retry_limit;
  return j;
}

OrderedJson side_stats_json(const SideStats& s) {
  OrderedJson j;
  j["node_count"] = s.node_count;
  OrderedJson depths = OrderedJson::object();
  for (const auto& [d, c] : s.per_depth) depths[std::to_string(d)] = c;
  j["per_depth"] = std::move(depths);
  j["total_freq"] = s.total_freq;
  j["min_importance"] = s.min_importance;
  j["max_importance"] = s.max_importance;
  return j;
}

}  // namespace

OrderedJson to_json(const BidirectionalTree& tree) {
  OrderedJson j;
  j["ideology"] = tree.ideology;
  j["params"] = params_json(tree.params);
  OrderedJson sides;
  for (Side s : {Side::positive, Side::negative}) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& [key, node] : tree.side(s)) arr.push_back(node_json(node));
    sides[std::string(to_string(s))] = std::move(arr);
  }
  j["sides"] = std::move(sides);
  return j;
}

BidirectionalTree tree_from_json(const Json& doc) {
  try {
    BidirectionalTree tree;
    tree.ideology = doc.at("ideology").get<std::string>();
    const Json& p = doc.at("params");
    tree.params.categories = p.at("categories").get<int>();
    tree.params.topics_per_expansion = p.at("topics_per_expansion").get<int>();
    tree.params.max_depth = p.at("max_depth").get<int>();
    tree.params.retry_limit = p.at("retry_limit").get<int>();
    for (Side s : {Side::positive, Side::negative}) {
      for (const Json& n : doc.at("sides").at(std::string(to_string(s)))) {
        TopicNode node;
        node.label = n.at("label").get<std::string>();
        node.normalized_label = n.at("normalized_label").get<std::string>();
        node.side = s;
        node.depth = n.at("depth").get<int>();
        node.freq = n.at("freq").get<std::int64_t>();
        node.importance = n.at("importance").get<std::int64_t>();
        for (const Json& k : n.at("parents")) node.parent_keys.insert(k.get<std::string>());
        for (const Json& k : n.at("children")) node.child_keys.insert(k.get<std::string>());
        tree.side(s).emplace(node.normalized_label, std::move(node));
      }
    }
    return tree;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed tree document: ") + e.what());
  }
}

OrderedJson to_json(const TreeStats& stats) {
  OrderedJson j;
  j["positive"] = side_stats_json(stats.positive);
  j["negative"] = side_stats_json(stats.negative);
  j["distinct_labels"] = stats.distinct_labels;
  j["merged_nodes"] = stats.positive.node_count + stats.negative.node_count;
  j["pre_merge_events"] = stats.positive.total_freq + stats.negative.total_freq;
  return j;
}

std::string render_stats_text(const TreeStats& stats) {
  std::ostringstream out;
  for (Side s : {Side::positive, Side::negative}) {
    const SideStats& st = s == Side::positive ? stats.positive : stats.negative;
    out << to_string(s) << ": nodes=" << st.node_count << " events=" << st.total_freq
        << " importance=[" << st.min_importance << ", " << st.max_importance << "]\n";
    for (const auto& [d, c] : st.per_depth) out << "  depth " << d << ": " << c << "\n";
  }
  out << "merged nodes (both sides): " << stats.positive.node_count + stats.negative.node_count << "\n"
      << "pre-merge events (both sides): " << stats.positive.total_freq + stats.negative.total_freq << "\n"
      << "distinct labels: " << stats.distinct_labels << "\n";
  return out.str();
}

}  // namespace ideoaudit::tree
