#include "relgraph/encoder.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace relgraph {

std::vector<Parameter*> EncoderState::parameters() {
  std::vector<Parameter*> ps;
  for (auto& w : layer_weights) ps.push_back(&w);
  ps.push_back(&proj_hidden);
  ps.push_back(&proj_out);
  return ps;
}

std::vector<const Parameter*> EncoderState::parameters() const {
  std::vector<const Parameter*> ps;
  for (const auto& w : layer_weights) ps.push_back(&w);
  ps.push_back(&proj_hidden);
  ps.push_back(&proj_out);
  return ps;
}

EncoderState build_encoder(const LabeledGraph& g, const EncoderHyper& hyper,
                           std::uint64_t seed) {
  if (!g.has_features()) {
    throw std::invalid_argument("build_encoder: graph has no features");
  }
  if (hyper.embed_dim <= 0) {
    throw std::invalid_argument("build_encoder: embed_dim must be > 0");
  }
  if (hyper.layers != 1 && hyper.layers != 2) {
    throw std::invalid_argument("build_encoder: layers must be 1 or 2");
  }
  if (hyper.embed_dim >= g.feature_dim()) {
    std::cerr << "warning: embed_dim " << hyper.embed_dim
              << " is not smaller than feature dim " << g.feature_dim() << "\n";
  }

  EncoderState s;
  s.hyper = hyper;
  s.num_nodes = g.num_nodes();
  s.feature_dim = g.feature_dim();
  s.seed = seed;

  std::mt19937_64 rng(seed);
  const int d = hyper.embed_dim;
  s.layer_weights.push_back(Parameter::glorot("W1", g.feature_dim(), d, rng));
  if (hyper.layers == 2) {
    s.layer_weights.push_back(Parameter::glorot("W2", d, d, rng));
  }
  s.proj_hidden = Parameter::glorot("Wp1", d, d, rng);
  s.proj_out = Parameter::glorot("Wp2", d, d, rng);

  // A with the diagonal forced to 1, then symmetric degree normalization.
  const int n = g.num_nodes();
  s.norm_adj.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<double> degree(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    auto* row = s.norm_adj.data() + static_cast<std::size_t>(u) * n;
    for (NodeId v : g.neighbors(u)) row[v] = 1.0;
    row[u] = 1.0;
    for (int v = 0; v < n; ++v) degree[u] += row[v];
  }
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      s.norm_adj[static_cast<std::size_t>(u) * n + v] /=
          std::sqrt(degree[u]) * std::sqrt(degree[v]);
    }
  }
  return s;
}

EncoderForward bind_forward(Tape& tape, const EncoderState& state, const Matrix& x,
                            bool with_projection) {
  if (x.rows != state.num_nodes || x.cols != state.feature_dim) {
    throw std::invalid_argument("bind_forward: feature matrix is " +
                                std::to_string(x.rows) + "x" + std::to_string(x.cols) +
                                ", encoder expects " + std::to_string(state.num_nodes) +
                                "x" + std::to_string(state.feature_dim));
  }
  EncoderForward f;
  const Tensor a_hat =
      tape.leaf(state.num_nodes, state.num_nodes, state.norm_adj, false, "A_hat");
  const Tensor xt = tape.leaf(x.rows, x.cols, x.values, false, "X");

  Tensor w1 = tape.leaf(state.layer_weights[0].rows, state.layer_weights[0].cols,
                        state.layer_weights[0].value, true, "W1");
  f.weight_leaves.push_back(w1);
  Tensor h = tape.activation(tape.matmul(tape.matmul(a_hat, xt), w1),
                             state.hyper.activation);
  if (state.layer_weights.size() == 2) {
    Tensor w2 = tape.leaf(state.layer_weights[1].rows, state.layer_weights[1].cols,
                          state.layer_weights[1].value, true, "W2");
    f.weight_leaves.push_back(w2);
    h = tape.activation(tape.matmul(tape.matmul(a_hat, h), w2),
                        state.hyper.activation);
  }
  f.h = h;

  if (with_projection) {
    Tensor wp1 = tape.leaf(state.proj_hidden.rows, state.proj_hidden.cols,
                           state.proj_hidden.value, true, "Wp1");
    Tensor wp2 = tape.leaf(state.proj_out.rows, state.proj_out.cols,
                           state.proj_out.value, true, "Wp2");
    f.weight_leaves.push_back(wp1);
    f.weight_leaves.push_back(wp2);
    const Tensor z =
        tape.matmul(tape.activation(tape.matmul(h, wp1), state.hyper.activation), wp2);
    f.z_norm = tape.row_normalize(z, kCosineEps);
  }
  return f;
}

Matrix forward(const EncoderState& state, const Matrix& x) {
  Tape tape;
  const EncoderForward f = bind_forward(tape, state, x, false);
  Matrix h;
  h.rows = f.h.rows();
  h.cols = f.h.cols();
  h.values = f.h.values();
  return h;
}

double theta(const EncoderState& state, std::span<const double> h_i,
             std::span<const double> h_j) {
  const int d = state.hyper.embed_dim;
  if (static_cast<int>(h_i.size()) != d || static_cast<int>(h_j.size()) != d) {
    throw std::invalid_argument("theta: vectors must have length embed_dim");
  }
  Tape tape;
  const Tensor a = tape.leaf(1, d, {h_i.begin(), h_i.end()}, false);
  const Tensor b = tape.leaf(1, d, {h_j.begin(), h_j.end()}, false);
  const Tensor wp1 =
      tape.leaf(state.proj_hidden.rows, state.proj_hidden.cols, state.proj_hidden.value,
                false);
  const Tensor wp2 =
      tape.leaf(state.proj_out.rows, state.proj_out.cols, state.proj_out.value, false);
  auto project = [&](Tensor v) {
    return tape.matmul(tape.activation(tape.matmul(v, wp1), state.hyper.activation),
                       wp2);
  };
  return tape.cosine(project(a), project(b), kCosineEps).scalar();
}

double hop_temperature(const EncoderHyper& hyper, int n) {
  if (n < 1) throw std::invalid_argument("hop_temperature: hop must be >= 1");
  return std::max(hyper.tau_base + (n - 1) * hyper.tau_spacing, 0.01);
}

}  // namespace relgraph
