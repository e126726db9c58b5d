#pragma once

#include <cstdint>
#include <vector>

#include "relgraph/dataio.hpp"
#include "relgraph/graph.hpp"
#include "relgraph/tensor.hpp"

namespace relgraph {

struct EncoderHyper {
  int embed_dim = 16;
  int layers = 2;  // 1 or 2
  Activation activation = Activation::Prelu;
  double tau_base = 0.5;
  double tau_spacing = 0.1;  // additive spacing between adjoining hops
};

/// Graph convolutional encoder plus nonlinear projection head. The
/// symmetric-normalized adjacency (self-loops forced onto the diagonal) is
/// cached densely at build time; forward passes are pure given the state.
struct EncoderState {
  EncoderHyper hyper;
  int num_nodes = 0;
  int feature_dim = 0;
  std::uint64_t seed = 0;
  std::vector<Parameter> layer_weights;  // [D x d] then optionally [d x d]
  Parameter proj_hidden;                 // d x d
  Parameter proj_out;                    // d x d
  std::vector<double> norm_adj;          // dense N x N, D^{-1/2}(A+I)D^{-1/2}

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
};

EncoderState build_encoder(const LabeledGraph& g, const EncoderHyper& hyper,
                           std::uint64_t seed);

/// Tape handles produced by one forward binding; gradients of the weight
/// leaves line up with EncoderState::parameters() order.
struct EncoderForward {
  std::vector<Tensor> weight_leaves;
  Tensor h;       // N x d pre-projection embeddings
  Tensor z_norm;  // N x d row-normalized projected embeddings (if requested)
};

/// Builds the forward graph on the tape: H = act(A_hat X W1) [act(A_hat . W2)],
/// then optionally the projection z = act(H Wp1) Wp2 normalized row-wise.
EncoderForward bind_forward(Tape& tape, const EncoderState& state, const Matrix& x,
                            bool with_projection);

/// Plain forward pass, no gradients.
Matrix forward(const EncoderState& state, const Matrix& x);

/// theta(h_i, h_j) = cosine of the projected vectors, in [-1, 1].
double theta(const EncoderState& state, std::span<const double> h_i,
             std::span<const double> h_j);

/// tau_n = tau_base + (n-1) * tau_spacing, clamped to >= 0.01.
double hop_temperature(const EncoderHyper& hyper, int n);

/// Norm regularizer shared by theta and the training path.
inline constexpr double kCosineEps = 1e-12;

}  // namespace relgraph
