#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relgraph/encoder.hpp"
#include "relgraph/graph.hpp"
#include "relgraph/tensor.hpp"

namespace relgraph {

enum class LossVariant { Pair, List, In, Out };

LossVariant loss_variant_from_string(const std::string& name);
std::string loss_variant_name(LossVariant v);

struct LossConfig {
  LossVariant variant = LossVariant::Pair;
  int k = 2;            // neighborhood range
  double alpha = 1.0;   // ratio clamp in (0, 1]; ignored by In/Out
  int beyond_sample = 0;  // d' cap per hop per anchor per epoch; 0 disables
  std::uint64_t seed = 0;
  std::vector<NodeId> anchors;  // empty = every node
  int threads = 0;

  void validate() const;
};

/// Hop sets of one anchor laid out for the losses: sets[0..k-1] are hops
/// 1..k, sets[k] is the beyond-k set.
struct AnchorHops {
  NodeId anchor = 0;
  std::vector<std::vector<NodeId>> sets;
};

using HopStructure = std::vector<AnchorHops>;

std::shared_ptr<const HopStructure> build_hop_structure(
    const LabeledGraph& g, int k, const std::vector<NodeId>& anchors = {},
    UnreachablePolicy policy = UnreachablePolicy::IncludeInBeyond);

/// Per-anchor per-hop subsampling without replacement (the d-prime
/// neighbor sampling); deterministic in (seed, epoch).
std::shared_ptr<const HopStructure> sample_hop_structure(
    const HopStructure& base, int d_prime, std::uint64_t seed, std::int64_t epoch);

/// Anchor minibatch: a without-replacement sample of batch entries from the
/// base structure, in ascending anchor order; deterministic in (seed, epoch).
std::shared_ptr<const HopStructure> sample_anchor_batch(const HopStructure& base,
                                                        int batch,
                                                        std::uint64_t seed,
                                                        std::int64_t epoch);

struct LossReport {
  double loss = 0.0;
  std::vector<double> per_anchor_terms;  // one entry per evaluated anchor
  double clamp_fraction = 0.0;           // ratio terms hitting min(r, alpha) = alpha
  std::int64_t sim_op_count = 0;         // theta evaluations, no caching
  std::int64_t sim_op_count_cached = 0;  // distinct theta pairs per anchor
  std::int64_t ratio_terms = 0;
  std::int64_t clamped_terms = 0;
  std::int64_t skipped_terms = 0;  // terms dropped because a hop set was empty
};

struct LossResult {
  Tensor loss;  // differentiable 1x1 node on the caller's tape
  LossReport report;
};

/// Pairwise similarity ratio r_{n,m}: hop-n mass against hop-(n+m) mass at
/// the numerator hop's temperature. Empty participating set -> nullopt
/// (term-skip semantics).
std::optional<double> pairwise_ratio(const EncoderState& state, const Matrix& h,
                                     const HopSets& hops, int n, int m);

/// Listwise similarity ratio r_n: hop-n mass over the mass of hops n..k+1.
std::optional<double> listwise_ratio(const EncoderState& state, const Matrix& h,
                                     const HopSets& hops, int n, int k);

/// The collective relative-similarity losses over a precomputed theta
/// matrix (theta_matrix[i][j] = theta(h_i, h_j), an N x N tape tensor).
/// Per-anchor terms accumulate in fixed anchor order, so the result is
/// identical for any worker count. Gradients are exactly zero through
/// clamped terms.
LossResult relative_similarity_loss(Tape& tape, Tensor theta_matrix,
                                    std::shared_ptr<const HopStructure> hops,
                                    const LossConfig& cfg, const EncoderHyper& hyper);

/// Convenience wrapper: encoder forward, projection, cosine matrix, loss.
struct GraphLoss {
  EncoderForward forward;
  LossResult loss;
};
GraphLoss graph_loss(Tape& tape, const EncoderState& state, const Matrix& x,
                     std::shared_ptr<const HopStructure> hops, const LossConfig& cfg);

struct SimOpCount {
  std::int64_t uncached = 0;
  std::int64_t cached = 0;
};

/// Closed-form theta-evaluation counts for one anchor whose hop sizes are
/// given (sizes[0..k-1] = hops 1..k, sizes[k] = beyond set). Matches the
/// instrumented counters exactly, including empty-set skips.
SimOpCount count_sim_ops(LossVariant variant, int k,
                         const std::vector<std::int64_t>& hop_sizes);

}  // namespace relgraph
