#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "relgraph/dataio.hpp"
#include "relgraph/graph.hpp"

namespace relgraph {

struct ProbeConfig {
  int iterations = 500;
  double lr = 0.5;
  double l2 = 1e-4;  // fixed rather than tuned, for determinism
};

/// Multinomial logistic regression on frozen embeddings: full-batch gradient
/// descent with L2, trained on the train split, scored on the test split.
/// Features are centered with train-split column means internally, so
/// centering the inputs externally cannot change the result.
/// Throws when the train split holds a single class.
double linear_probe(const Matrix& h, const std::vector<LabelId>& labels,
                    const Splits& splits, const ProbeConfig& cfg = {});

/// Seeded k-means (k-means++ init, 10 restarts, best inertia) followed by
/// normalized mutual information against the labels (arithmetic-mean
/// normalization, natural log).
double cluster_nmi(const Matrix& h, const std::vector<LabelId>& labels, int c,
                   std::uint64_t seed);

/// NMI between two hard partitions.
double nmi(const std::vector<int>& a, const std::vector<int>& b);

/// Mean same-label fraction among each node's top-5 cosine neighbors
/// (self excluded; cosine ties broken by ascending node id). Needs N >= 6.
double sim_at_5(const Matrix& h, const std::vector<LabelId>& labels);

struct HopSimilarity {
  std::vector<int> hops;  // 1..k then k+1 for the beyond set
  std::vector<double> mean;
  std::vector<double> q1;
  std::vector<double> median;
  std::vector<double> q3;
  std::vector<double> min;
  std::vector<double> max;
  std::vector<std::int64_t> pair_counts;
};

/// Raw cosine similarity (no projection head, no temperature) between each
/// anchor and its hop-n neighbors, summarized per hop n = 1..k+1.
HopSimilarity hop_similarity(const Matrix& h, const LabeledGraph& g, int k);

struct EvalReport {
  std::optional<double> accuracy;  // absent without usable splits
  double nmi = 0.0;
  double sim_at_5 = 0.0;
};

EvalReport evaluate(const Matrix& h, const std::vector<LabelId>& labels,
                    const Splits& splits, std::uint64_t seed,
                    const ProbeConfig& probe_cfg = {});

}  // namespace relgraph
