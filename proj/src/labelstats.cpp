#include "relgraph/labelstats.hpp"

#include <stdexcept>

#include "relgraph/parallel.hpp"

namespace relgraph {

namespace {

double same_label_fraction(const LabeledGraph& g, NodeId anchor,
                           const std::vector<NodeId>& set) {
  std::int64_t same = 0;
  for (NodeId v : set) {
    if (g.label(v) == g.label(anchor)) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(set.size());
}

}  // namespace

DecayCurve lc_emp(const LabeledGraph& g, int max_hop, int threads) {
  if (max_hop < 1) throw std::invalid_argument("lc_emp: max_hop must be >= 1");
  const int n = g.num_nodes();

  // Per-anchor fractions first (parallel, disjoint slots), ordered reduce after.
  std::vector<std::vector<double>> frac(n);
  parallel_for(n, resolve_threads(threads), [&](std::int64_t a) {
    const HopSets h = hop_sets(g, static_cast<NodeId>(a), max_hop);
    auto& row = frac[a];
    row.assign(max_hop, -1.0);
    for (int hop = 1; hop <= max_hop; ++hop) {
      const auto& set = h.hop(hop);
      if (!set.empty()) row[hop - 1] = same_label_fraction(g, static_cast<NodeId>(a), set);
    }
  });

  DecayCurve curve;
  for (int hop = 1; hop <= max_hop; ++hop) {
    double sum = 0.0;
    int count = 0;
    for (int a = 0; a < n; ++a) {
      if (frac[a][hop - 1] >= 0.0) {
        sum += frac[a][hop - 1];
        ++count;
      }
    }
    curve.hops.push_back(hop);
    curve.lc_values.push_back(count > 0 ? sum / count : 0.0);
    curve.per_node_counts.push_back(count);
  }
  return curve;
}

double sim_stat(const LabeledGraph& g, NodeId anchor, int n) {
  const HopSets h = hop_sets(g, anchor, n);
  const auto& set = h.hop(n);
  if (set.empty()) {
    throw std::domain_error("sim_stat: hop-" + std::to_string(n) +
                            " set of node " + std::to_string(anchor) + " is empty");
  }
  return same_label_fraction(g, anchor, set);
}

double sim_stat_beyond(const LabeledGraph& g, NodeId anchor, int n, int k,
                       UnreachablePolicy policy) {
  if (k < n) throw std::invalid_argument("sim_stat_beyond: k must be >= n");
  const std::vector<int> dist = bfs_distances(g, anchor);
  std::int64_t same = 0, total = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (v == anchor) continue;
    const int d = dist[v];
    const bool in_union =
        d > n || (d < 0 && policy == UnreachablePolicy::IncludeInBeyond);
    if (!in_union) continue;
    ++total;
    if (g.label(v) == g.label(anchor)) ++same;
  }
  if (total == 0) {
    throw std::domain_error("sim_stat_beyond: no nodes beyond hop " +
                            std::to_string(n) + " of node " + std::to_string(anchor));
  }
  return static_cast<double>(same) / static_cast<double>(total);
}

RelativeGap relative_gap(const LabeledGraph& g, int n, int k, UnreachablePolicy policy) {
  RelativeGap out;
  double sum = 0.0;
  for (NodeId a = 0; a < g.num_nodes(); ++a) {
    double near, far;
    try {
      near = sim_stat(g, a, n);
      far = sim_stat_beyond(g, a, n, k, policy);
    } catch (const std::domain_error&) {
      continue;  // one side undefined: anchor excluded
    }
    sum += near - far;
    ++out.anchors;
  }
  out.gap = out.anchors > 0 ? sum / out.anchors : 0.0;
  return out;
}

}  // namespace relgraph
