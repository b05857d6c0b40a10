#include <set>

#include "ideoaudit/errors.hpp"
#include "ideoaudit/ideology_tree.hpp"
#include "ideoaudit/llm_gateway.hpp"
#include "ideoaudit/parallel.hpp"

namespace ideoaudit::tree {

namespace {

struct Attempt {
  std::optional<TopicList> list;
  int requests = 0;
};

// Retries vary rng_seed so each attempt is a distinct cache entry.
Attempt ask_with_retries(gateway::Gateway& gw, const BuildOptions& opts, const std::string& prompt,
                         bool expect_sentiment, int retry_limit) {
  Attempt out;
  for (int attempt = 0; attempt <= retry_limit; ++attempt) {
    auto req = gateway::ChatRequest::user_prompt(opts.model, prompt, opts.temperature, opts.max_tokens);
    if (attempt > 0) req.rng_seed = attempt;
    ++out.requests;
    const auto resp = gw.complete(req);
    try {
      out.list = parse_topic_list(resp.content, expect_sentiment);
      return out;
    } catch (const ParseFailure&) {
    }
  }
  return out;
}

void add_child(BidirectionalTree& tree, const std::string& parent_key, const std::string& child_key) {
  for (Side s : {Side::positive, Side::negative}) {
    auto it = tree.side(s).find(parent_key);
    if (it != tree.side(s).end()) it->second.child_keys.insert(child_key);
  }
}

}  // namespace

BuildResult build_tree(std::string_view ideology, const TreeParams& params, gateway::Gateway& gw,
                       const BuildOptions& opts) {
  params.validate();
  BuildResult result;
  BidirectionalTree& tree = result.tree;
  tree.ideology = std::string(ideology);
  tree.params = params;

  auto attach = [&](const std::string& label, Side side, int depth, const std::string& parent_key) {
    merge_node(tree.side(side), label, side, depth, parent_key);
    result.events.push_back({label, side, depth, parent_key});
  };

  Attempt root = ask_with_retries(gw, opts, render_classify_prompt(ideology, params.categories), false,
                                  params.retry_limit);
  result.requests += root.requests;
  if (!root.list) throw ParseExhausted("root classification reply never parsed for '" + tree.ideology + "'");
  result.malformed_lines += root.list->malformed;
  const std::string root_key(kRootKey);
  for (const auto& item : root.list->items) {
    for (Side s : {Side::positive, Side::negative}) attach(item.label, s, 1, root_key);
  }

  std::set<std::string> expanded;
  for (int depth = 1; depth < params.max_depth; ++depth) {
    // Distinct labels first reached at this depth on either side; the prompt
    // has no side, so each is expanded once.
    std::vector<std::pair<std::string, std::string>> frontier;  // (key, label)
    std::set<std::string> seen;
    for (Side s : {Side::positive, Side::negative}) {
      for (const auto& [key, node] : tree.side(s)) {
        if (node.depth == depth && !expanded.contains(key) && seen.insert(key).second) {
          frontier.emplace_back(key, node.label);
        }
      }
    }
    std::sort(frontier.begin(), frontier.end());
    if (frontier.empty()) break;

    auto replies = parallel_map(frontier.size(), gw.config().max_concurrency, [&](std::size_t i) {
      return ask_with_retries(gw, opts,
                              render_expand_prompt(frontier[i].second, ideology, params.topics_per_expansion),
                              true, params.retry_limit);
    });

    // Single-writer fold in frontier order.
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const std::string& parent_key = frontier[i].first;
      expanded.insert(parent_key);
      result.requests += replies[i].requests;
      if (!replies[i].list) {
        ++result.aborted_nodes;
        continue;
      }
      result.malformed_lines += replies[i].list->malformed;
      for (const auto& item : replies[i].list->items) {
        const std::string child_key = normalize_label(item.label);
        if (child_key == parent_key) {
          ++result.malformed_lines;
          continue;
        }
        attach(item.label, *item.side, depth + 1, parent_key);
        add_child(tree, parent_key, child_key);
      }
    }
  }

  recompute_importance(tree);
  return result;
}

}  // namespace ideoaudit::tree
