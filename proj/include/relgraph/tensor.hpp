#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace relgraph {

enum class Activation { Relu, Prelu, RreluEval };

/// Negative-side slope: relu 0, prelu 0.25, rrelu in evaluation form with
/// the fixed midpoint slope (1/8 + 1/3) / 2.
double activation_slope(Activation a);
Activation activation_from_string(const std::string& name);
std::string activation_name(Activation a);

class Tape;

/// Lightweight handle into a Tape; valid while the tape lives.
class Tensor {
 public:
  Tensor() = default;
  bool valid() const { return tape_ != nullptr; }
  int rows() const;
  int cols() const;
  const std::vector<double>& values() const;
  const std::vector<double>& grad() const;
  double scalar() const;  // value of a 1x1 tensor

 private:
  friend class Tape;
  Tensor(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

struct TapeNode {
  int rows = 0;
  int cols = 0;
  std::vector<double> val;
  std::vector<double> grad;
  bool requires_grad = false;
  bool is_leaf = false;
  bool reached = false;
  std::string name;
  std::vector<int> parents;
  // Adds this node's grad contribution into the parents' grad buffers.
  std::function<void(const TapeNode& self, const std::vector<TapeNode*>& parents)>
      backward;
};

/// Single-use computation record: build the graph forward, call backward()
/// once on a scalar loss, read gradients, discard. Rebuilding the tape each
/// step keeps values and gradients trivially consistent.
class Tape {
 public:
  Tensor leaf(int rows, int cols, std::vector<double> values, bool requires_grad,
              std::string name = "");

  Tensor matmul(Tensor a, Tensor b);
  /// a * b^T without materializing the transpose.
  Tensor matmul_nt(Tensor a, Tensor b);
  Tensor add(Tensor a, Tensor b);
  Tensor sub(Tensor a, Tensor b);
  Tensor scale(Tensor a, double factor);
  Tensor activation(Tensor a, Activation act);
  /// Rows rescaled to unit length with the eps-regularized norm
  /// sqrt(|x|^2 + eps^2).
  Tensor row_normalize(Tensor a, double eps);
  /// Cosine similarity of two equal-shape vectors (1x1 result), with
  /// eps-regularized norms so zero vectors stay differentiable.
  Tensor cosine(Tensor a, Tensor b, double eps);
  /// Row-wise log(sum(exp(x))), max-shifted; RxC -> Rx1.
  Tensor logsumexp_rows(Tensor a);
  Tensor sum(Tensor a);

  /// Multi-positive InfoNCE with the positive sum inside the log:
  /// -log( sum_P e^{x/tau} / (sum_P e^{x/tau} + sum_N e^{x/tau}) ).
  /// negatives may be an invalid handle (empty set), in which case the
  /// result is exactly 0.
  Tensor loss_in(Tensor positives, Tensor negatives, double tau);
  /// Per-positive InfoNCE terms summed outside the log.
  Tensor loss_out(Tensor positives, Tensor negatives, double tau);

  /// Escape hatch for fused ops: the caller supplies forward values and a
  /// backward closure over the parent nodes.
  Tensor custom(const std::vector<Tensor>& parents, int rows, int cols,
                std::vector<double> values,
                std::function<void(const TapeNode&, const std::vector<TapeNode*>&)>
                    backward);

  /// Reverse sweep from a 1x1 root. Throws if the root is not scalar, if
  /// called twice without reset(), or if a grad-requiring leaf is not
  /// connected to the root.
  void backward(Tensor root);
  void reset_gradients();

  int size() const { return static_cast<int>(nodes_.size()); }
  const TapeNode& node(int id) const { return *nodes_[id]; }
  TapeNode& node(int id) { return *nodes_[id]; }

 private:
  friend class Tensor;
  Tensor emplace(TapeNode node);
  const TapeNode& resolve(Tensor t, const char* op) const;

  std::vector<std::unique_ptr<TapeNode>> nodes_;
  bool backward_done_ = false;
};

/// Named trainable matrix with its Adam moments.
struct Parameter {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<double> value;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  static Parameter glorot(std::string name, int rows, int cols, std::mt19937_64& rng);
  static Parameter zeros(std::string name, int rows, int cols);
};

struct AdamConfig {
  double lr = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  bool decoupled = false;  // default: plain L2 added to the gradient
};

/// One bias-corrected Adam update. Throws on non-finite gradient entries,
/// naming the parameter.
void adam_step(Parameter& p, const std::vector<double>& grad, const AdamConfig& cfg);

}  // namespace relgraph
