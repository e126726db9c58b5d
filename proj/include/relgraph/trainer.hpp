#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relgraph/dataio.hpp"
#include "relgraph/encoder.hpp"
#include "relgraph/graph.hpp"
#include "relgraph/relloss.hpp"
#include "relgraph/tensor.hpp"

namespace relgraph {

struct TrainConfig {
  int epochs = 200;
  AdamConfig adam;
  LossConfig loss;
  EncoderHyper encoder;
  std::uint64_t seed = 0;
  int anchor_batch = 0;               // anchors per epoch; 0 = full batch
  int checkpoint_every = 0;           // 0 = no checkpoints
  std::string checkpoint_prefix;      // "<prefix>.epochN.ckpt"
  std::string log_path;               // loss-history CSV, empty = skip

  /// epochs >= 1 and lr > 0 are hard errors; lr or weight_decay outside
  /// [1e-8, 1e-2] only warns.
  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double clamp_fraction = 0.0;
  std::int64_t sim_op_count = 0;
  std::int64_t skipped_terms = 0;
};

struct TrainResult {
  EncoderState state;
  std::vector<EpochStats> history;  // executed epochs, in order
};

/// Full-batch training: forward, chosen loss, backward, Adam, one epoch at
/// a time. Hop sets are computed once and cached; per-epoch subsampling
/// (beyond_sample) reseeds from (loss.seed, epoch) so runs and resumed runs
/// are bit-identical. Aborts with epoch index and parameter norms when the
/// loss turns non-finite.
TrainResult train(const LabeledGraph& g, const TrainConfig& cfg);

struct Checkpoint {
  int epoch = 0;
  EncoderState state;
};

/// Continues a checkpointed run up to cfg.epochs; cfg must match the
/// checkpoint's encoder shape.
TrainResult train_resume(const LabeledGraph& g, const TrainConfig& cfg,
                         const Checkpoint& ckpt);

/// Text checkpoint with hexfloat payloads (exact round-trip). norm_adj is
/// rebuilt from the graph on load rather than stored.
void save_checkpoint(const std::string& path, const EncoderState& state, int epoch);
Checkpoint load_checkpoint(const std::string& path, const LabeledGraph& g);

/// One forward pass of the frozen encoder; embeddings are the
/// pre-projection H (the projection head only lives inside theta).
Matrix embed(const EncoderState& state, const LabeledGraph& g);

}  // namespace relgraph
