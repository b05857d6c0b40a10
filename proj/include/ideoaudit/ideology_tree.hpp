#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ideoaudit/canonical_json.hpp"

namespace ideoaudit::gateway {
class Gateway;
}

namespace ideoaudit::tree {

enum class Side { positive, negative };

constexpr Side opposite(Side s) { return s == Side::positive ? Side::negative : Side::positive; }
std::string_view to_string(Side s);
/// Accepts "positive"/"negative" (and "pos"/"neg" when `allow_short`).
Side side_from_string(std::string_view s, bool allow_short = false);

/// parent_keys entry for depth-1 categories.
inline constexpr std::string_view kRootKey = "<root>";

struct TopicNode {
  std::string label;
  std::string normalized_label;
  Side side = Side::positive;
  int depth = 1;
  std::int64_t freq = 0;
  std::int64_t importance = 0;
  std::set<std::string> parent_keys;
  std::set<std::string> child_keys;

  bool operator==(const TopicNode&) const = default;
};

/// One side of the tree keyed by normalized label (sorted, so iteration and
/// serialization are byte-stable).
using NodeMap = std::map<std::string, TopicNode>;

struct TreeParams {
  int categories = 5;            // [X] in the classification prompt
  int topics_per_expansion = 5;  // [Y] in the expansion prompt
  int max_depth = 4;
  int retry_limit = 3;

  void validate() const;
};

struct BidirectionalTree {
  std::string ideology;
  TreeParams params;
  std::array<NodeMap, 2> sides;

  NodeMap& side(Side s) { return sides[static_cast<std::size_t>(s)]; }
  const NodeMap& side(Side s) const { return sides[static_cast<std::size_t>(s)]; }
};

/// Casefold, trim, collapse whitespace, strip edge punctuation.
/// Throws EmptyLabel when nothing remains.
std::string normalize_label(std::string_view label);

std::string render_classify_prompt(std::string_view ideology, int categories);
std::string render_expand_prompt(std::string_view node_topic, std::string_view ideology, int topics);

struct ParsedTopic {
  std::string label;
  std::optional<Side> side;

  bool operator==(const ParsedTopic&) const = default;
};

struct TopicList {
  std::vector<ParsedTopic> items;
  int malformed = 0;
};

/// Reads "N. <label>" / "N. <label> | <positive|negative>" lines.
/// Throws ParseFailure when no line is usable.
TopicList parse_topic_list(std::string_view reply, bool expect_sentiment);

/// Records one generation event. Existing (normalized label, side) entries
/// get freq += 1, the parent added and depth lowered to the minimum; new ones
/// are inserted with freq 1. Returns the affected node.
TopicNode& merge_node(NodeMap& side_map, std::string_view label, Side side, int depth, std::string_view parent_key);

/// importance = freq(own side) - freq(opposite side), missing entries count 0.
void recompute_importance(BidirectionalTree& tree);

/// One attachment, as logged by build_tree.
struct AttachEvent {
  std::string label;
  Side side;
  int depth;
  std::string parent_key;
};

struct BuildOptions {
  std::string model = "gpt-3.5-turbo";
  double temperature = 1.0;
  int max_tokens = 1024;
};

struct BuildResult {
  BidirectionalTree tree;
  std::vector<AttachEvent> events;
  int aborted_nodes = 0;
  int malformed_lines = 0;
  int requests = 0;
};

/// Classifies the root, then expands breadth-first to params.max_depth.
/// Throws ParseExhausted if the root classification never parses; a node
/// whose expansion never parses is skipped and counted in aborted_nodes.
BuildResult build_tree(std::string_view ideology, const TreeParams& params, gateway::Gateway& gw,
                       const BuildOptions& opts = {});

struct SideStats {
  std::int64_t node_count = 0;
  std::map<int, std::int64_t> per_depth;
  std::int64_t total_freq = 0;  // pre-merge event count
  std::int64_t min_importance = 0;
  std::int64_t max_importance = 0;

  bool operator==(const SideStats&) const = default;
};

struct TreeStats {
  SideStats positive;
  SideStats negative;
  /// Distinct normalized labels over both sides.
  std::int64_t distinct_labels = 0;
};

TreeStats tree_stats(const BidirectionalTree& tree);

OrderedJson to_json(const BidirectionalTree& tree);
BidirectionalTree tree_from_json(const Json& doc);
OrderedJson to_json(const TreeStats& stats);
std::string render_stats_text(const TreeStats& stats);

}  // namespace ideoaudit::tree
