#include "relgraph/graph.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace relgraph {

bool LabeledGraph::has_edge(NodeId u, NodeId v) const {
  auto ns = neighbors(u);
  return std::binary_search(ns.begin(), ns.end(), v);
}

LabeledGraph build_graph(const EdgeList& edges, const std::vector<LabelId>& labels,
                         std::optional<std::vector<double>> features,
                         bool add_self_loops) {
  const int n = static_cast<int>(labels.size());
  if (n == 0) {
    throw std::invalid_argument("build_graph: empty graph (no labels)");
  }

  int max_label = -1;
  for (int u = 0; u < n; ++u) {
    if (labels[u] < 0) {
      throw std::invalid_argument("build_graph: negative label at node " +
                                  std::to_string(u));
    }
    max_label = std::max(max_label, labels[u]);
  }
  const int c = max_label + 1;
  std::vector<std::int64_t> class_sizes(c, 0);
  for (LabelId l : labels) ++class_sizes[l];
  for (int l = 0; l < c; ++l) {
    if (class_sizes[l] == 0) {
      throw std::invalid_argument("build_graph: label class " + std::to_string(l) +
                                  " is empty (labels must be dense in [0, c))");
    }
  }

  std::vector<std::vector<NodeId>> adj(n);
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= n || v < 0 || v >= n) {
      throw std::invalid_argument("build_graph: edge endpoint (" + std::to_string(u) +
                                  ", " + std::to_string(v) + ") out of range [0, " +
                                  std::to_string(n) + ")");
    }
    adj[u].push_back(v);
    if (u != v) adj[v].push_back(u);
  }
  if (add_self_loops) {
    for (int u = 0; u < n; ++u) adj[u].push_back(u);
  }

  LabeledGraph g;
  g.offsets_.assign(n + 1, 0);
  for (int u = 0; u < n; ++u) {
    auto& ns = adj[u];
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    g.offsets_[u + 1] = g.offsets_[u] + static_cast<std::int64_t>(ns.size());
  }
  g.adjacency_.reserve(g.offsets_[n]);
  std::int64_t loops = 0;
  for (int u = 0; u < n; ++u) {
    for (NodeId v : adj[u]) {
      g.adjacency_.push_back(v);
      if (v == u) ++loops;
    }
  }
  g.labels_ = labels;
  g.num_labels_ = c;
  g.num_loops_ = loops;
  g.num_edges_ = (g.offsets_[n] - loops) / 2;
  g.has_self_loops_ = loops == n;

  if (features.has_value()) {
    if (features->size() % n != 0 || features->empty()) {
      throw std::invalid_argument("build_graph: feature matrix size " +
                                  std::to_string(features->size()) +
                                  " is not a positive multiple of N=" +
                                  std::to_string(n));
    }
    g.feature_dim_ = static_cast<int>(features->size() / n);
    g.features_ = std::move(*features);
  }
  return g;
}

std::vector<int> bfs_distances(const LabeledGraph& g, NodeId anchor) {
  const int n = g.num_nodes();
  if (anchor < 0 || anchor >= n) {
    throw std::invalid_argument("bfs_distances: anchor " + std::to_string(anchor) +
                                " out of range");
  }
  std::vector<int> dist(n, -1);
  std::queue<NodeId> q;
  dist[anchor] = 0;
  q.push(anchor);
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop();
    for (NodeId v : g.neighbors(u)) {
      if (v == u) continue;  // self-loops carry no distance
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

HopSets hop_sets(const LabeledGraph& g, NodeId anchor, int k, UnreachablePolicy policy) {
  if (k < 1) {
    throw std::invalid_argument("hop_sets: range k must be >= 1, got " +
                                std::to_string(k));
  }
  const std::vector<int> dist = bfs_distances(g, anchor);
  HopSets h;
  h.anchor = anchor;
  h.per_hop.assign(k, {});
  for (int v = 0; v < g.num_nodes(); ++v) {
    if (v == anchor) continue;
    const int d = dist[v];
    if (d < 0) {
      if (policy == UnreachablePolicy::IncludeInBeyond) h.beyond.push_back(v);
    } else if (d <= k) {
      h.per_hop[d - 1].push_back(v);
    } else {
      h.beyond.push_back(v);
    }
  }
  return h;  // node ids ascend within each set by construction
}

std::vector<std::int64_t> degree_by_label(const LabeledGraph& g) {
  std::vector<std::int64_t> sums(g.num_labels(), 0);
  for (int u = 0; u < g.num_nodes(); ++u) {
    sums[g.label(u)] += g.degree(u);
  }
  return sums;
}

ComponentInfo connected_components(const LabeledGraph& g) {
  const int n = g.num_nodes();
  ComponentInfo info;
  info.component_of.assign(n, -1);
  for (int start = 0; start < n; ++start) {
    if (info.component_of[start] >= 0) continue;
    const int id = info.count++;
    int size = 0;
    std::queue<NodeId> q;
    info.component_of[start] = id;
    q.push(start);
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      ++size;
      for (NodeId v : g.neighbors(u)) {
        if (info.component_of[v] < 0) {
          info.component_of[v] = id;
          q.push(v);
        }
      }
    }
    info.component_sizes.push_back(size);
  }
  return info;
}

ComponentExtraction extract_largest_component(const LabeledGraph& g) {
  const ComponentInfo info = connected_components(g);
  int best = 0;
  for (int c = 1; c < info.count; ++c) {
    if (info.component_sizes[c] > info.component_sizes[best]) best = c;
  }

  ComponentExtraction out;
  std::vector<NodeId> new_id(g.num_nodes(), -1);
  for (int u = 0; u < g.num_nodes(); ++u) {
    if (info.component_of[u] == best) {
      new_id[u] = static_cast<NodeId>(out.node_map.size());
      out.node_map.push_back(u);
    }
  }

  std::vector<LabelId> new_label(g.num_labels(), -1);
  std::vector<LabelId> labels;
  labels.reserve(out.node_map.size());
  for (NodeId old : out.node_map) {
    LabelId l = g.label(old);
    if (new_label[l] < 0) {
      new_label[l] = static_cast<LabelId>(out.label_map.size());
      out.label_map.push_back(l);
    }
    labels.push_back(new_label[l]);
  }

  EdgeList edges;
  for (NodeId old : out.node_map) {
    for (NodeId v : g.neighbors(old)) {
      if (v >= old && new_id[v] >= 0) edges.emplace_back(new_id[old], new_id[v]);
    }
  }

  std::optional<std::vector<double>> features;
  if (g.has_features()) {
    std::vector<double> rows;
    rows.reserve(out.node_map.size() * g.feature_dim());
    for (NodeId old : out.node_map) {
      auto row = g.feature_row(old);
      rows.insert(rows.end(), row.begin(), row.end());
    }
    features = std::move(rows);
  }
  out.graph = build_graph(edges, labels, std::move(features), false);
  return out;
}

}  // namespace relgraph
