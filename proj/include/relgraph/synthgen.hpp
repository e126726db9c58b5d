#pragma once

#include <cstdint>
#include <vector>

#include "relgraph/graph.hpp"

namespace relgraph {

/// Stochastic block model specification. Block b holds block_sizes[b] nodes,
/// all labeled b; each unordered node pair draws an edge independently with
/// p_intra (same block) or p_inter (different blocks).
struct SbmSpec {
  std::vector<int> block_sizes;
  double p_intra = 0.0;
  double p_inter = 0.0;
  std::uint64_t seed = 0;
  bool ensure_connected = false;
  bool add_self_loops = false;
  // When connectivity retries run out, chain consecutive nodes inside each
  // block (never across blocks, so the homophily balance is untouched).
  bool allow_augmentation = true;
  int retry_cap = 20;

  int num_nodes() const;
  int num_blocks() const { return static_cast<int>(block_sizes.size()); }
  void validate() const;
};

/// Defaults used throughout the analysis flows: 2 blocks of 200 with a 10:1
/// intra/inter edge-probability ratio in one orientation or the other.
SbmSpec homophilic_default(std::uint64_t seed);
SbmSpec heterophilic_default(std::uint64_t seed);

/// Deterministic given spec.seed.
LabeledGraph generate_sbm(const SbmSpec& spec);

/// Closed-form expected label transition matrix of the spec (the block
/// probabilities collapse the degree weighting): row b is proportional to
/// [p_intra*(n_b - 1) + self_loop, p_inter*n_other, ...].
std::vector<double> expected_transition(const SbmSpec& spec);

/// Label-conditioned Gaussian feature rows: row u = mean[label(u)] + noise,
/// with per-label means drawn from N(0, mean_scale^2) and unit noise.
std::vector<double> generate_label_features(const std::vector<LabelId>& labels,
                                            int dim, double mean_scale,
                                            std::uint64_t seed);

}  // namespace relgraph
