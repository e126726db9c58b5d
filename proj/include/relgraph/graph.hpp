#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace relgraph {

using NodeId = int;
using LabelId = int;
using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

/// Immutable undirected labeled graph in compressed sparse form.
///
/// Each undirected edge is stored in both endpoint lists; a self-loop is
/// stored once. deg(u) is the stored-neighbor count, so a self-loop adds 1.
/// Construction happens through build_graph(); after that the structure is
/// read-only and safe to share across threads.
class LabeledGraph {
 public:
  int num_nodes() const { return static_cast<int>(offsets_.size()) - 1; }
  int num_labels() const { return num_labels_; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {adjacency_.data() + offsets_[u], adjacency_.data() + offsets_[u + 1]};
  }
  int degree(NodeId u) const { return static_cast<int>(offsets_[u + 1] - offsets_[u]); }
  LabelId label(NodeId u) const { return labels_[u]; }
  const std::vector<LabelId>& labels() const { return labels_; }

  bool has_self_loops() const { return has_self_loops_; }
  bool has_edge(NodeId u, NodeId v) const;

  /// Undirected non-loop edge count.
  std::int64_t num_edges() const { return num_edges_; }
  std::int64_t num_loops() const { return num_loops_; }
  std::int64_t total_degree() const {
    return static_cast<std::int64_t>(adjacency_.size());
  }

  bool has_features() const { return feature_dim_ > 0; }
  int feature_dim() const { return feature_dim_; }
  std::span<const double> feature_row(NodeId u) const {
    return {features_.data() + static_cast<std::size_t>(u) * feature_dim_,
            static_cast<std::size_t>(feature_dim_)};
  }
  const std::vector<double>& feature_matrix() const { return features_; }

 private:
  friend LabeledGraph build_graph(const EdgeList&, const std::vector<LabelId>&,
                                  std::optional<std::vector<double>>, bool);

  std::vector<std::int64_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<LabelId> labels_;
  std::vector<double> features_;  // row-major N x feature_dim_, empty if absent
  int num_labels_ = 0;
  int feature_dim_ = 0;
  std::int64_t num_edges_ = 0;
  std::int64_t num_loops_ = 0;
  bool has_self_loops_ = false;
};

/// Exact-distance neighborhoods of one anchor node.
///
/// per_hop[n-1] holds the nodes at shortest-path distance exactly n
/// (self-loops ignored for distance); beyond holds everything at distance
/// greater than the requested range, including unreachable nodes when the
/// policy asks for them. All sets are sorted, pairwise disjoint, and
/// exclude the anchor.
struct HopSets {
  NodeId anchor = 0;
  std::vector<std::vector<NodeId>> per_hop;
  std::vector<NodeId> beyond;

  int range() const { return static_cast<int>(per_hop.size()); }
  const std::vector<NodeId>& hop(int n) const { return per_hop[n - 1]; }
};

enum class UnreachablePolicy {
  IncludeInBeyond,  // unreachable nodes count as distance > k (default)
  Exclude,
};

/// Builds the graph: symmetric closure, dedup, optional self-loops on every
/// node. Labels must be dense in [0, c) with every class non-empty.
/// Throws std::invalid_argument on malformed input.
LabeledGraph build_graph(const EdgeList& edges, const std::vector<LabelId>& labels,
                         std::optional<std::vector<double>> features = std::nullopt,
                         bool add_self_loops = false);

/// BFS from the anchor out to distance k.
HopSets hop_sets(const LabeledGraph& g, NodeId anchor, int k,
                 UnreachablePolicy policy = UnreachablePolicy::IncludeInBeyond);

/// Shortest-path distances from anchor; -1 marks unreachable nodes.
/// Self-loops do not contribute to distance.
std::vector<int> bfs_distances(const LabeledGraph& g, NodeId anchor);

/// Per-label sums of deg(u). Length c, sums to total_degree().
std::vector<std::int64_t> degree_by_label(const LabeledGraph& g);

struct ComponentInfo {
  int count = 0;
  std::vector<int> component_of;     // node -> component id
  std::vector<int> component_sizes;  // indexed by component id
};

ComponentInfo connected_components(const LabeledGraph& g);

struct ComponentExtraction {
  LabeledGraph graph;
  std::vector<NodeId> node_map;    // new id -> original id
  std::vector<LabelId> label_map;  // new label id -> original label id
};

/// Copies the largest connected component (ties broken by lowest component
/// id) into a fresh graph with compacted node and label ids.
ComponentExtraction extract_largest_component(const LabeledGraph& g);

}  // namespace relgraph
