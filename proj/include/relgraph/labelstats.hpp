#pragma once

#include <vector>

#include "relgraph/graph.hpp"

namespace relgraph {

/// Per-hop label-consistency curve. lc_values[n-1] averages, over every
/// anchor whose hop-n set is non-empty, the fraction of hop-n neighbors
/// sharing the anchor's label; per_node_counts[n-1] is the number of
/// anchors that entered that average.
struct DecayCurve {
  std::vector<int> hops;
  std::vector<double> lc_values;
  std::vector<int> per_node_counts;
};

DecayCurve lc_emp(const LabeledGraph& g, int max_hop, int threads = 0);

/// Fraction of the anchor's exact hop-n neighbors sharing its label.
/// Throws std::domain_error when the hop-n set is empty.
double sim_stat(const LabeledGraph& g, NodeId anchor, int n);

/// Same-label fraction over all nodes strictly beyond hop n (the union of
/// every farther hop). k must be >= n and only bounds the enumeration
/// context; the union itself covers all distances > n. Unreachable nodes
/// join the set under UnreachablePolicy::IncludeInBeyond.
/// Throws std::domain_error when the union is empty.
double sim_stat_beyond(const LabeledGraph& g, NodeId anchor, int n, int k,
                       UnreachablePolicy policy = UnreachablePolicy::IncludeInBeyond);

struct RelativeGap {
  double gap = 0.0;   // mean of sim_stat(v, n) - sim_stat(v, >n)
  int anchors = 0;    // anchors where both terms are defined
};

RelativeGap relative_gap(const LabeledGraph& g, int n, int k,
                         UnreachablePolicy policy = UnreachablePolicy::IncludeInBeyond);

}  // namespace relgraph
