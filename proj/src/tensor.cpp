#include "relgraph/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relgraph {

double activation_slope(Activation a) {
  switch (a) {
    case Activation::Relu:
      return 0.0;
    case Activation::Prelu:
      return 0.25;
    case Activation::RreluEval:
      return (1.0 / 8.0 + 1.0 / 3.0) / 2.0;
  }
  throw std::logic_error("unknown activation");
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "prelu") return Activation::Prelu;
  if (name == "rrelu") return Activation::RreluEval;
  throw std::invalid_argument("unknown activation '" + name +
                              "' (want relu|prelu|rrelu)");
}

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Relu:
      return "relu";
    case Activation::Prelu:
      return "prelu";
    case Activation::RreluEval:
      return "rrelu";
  }
  throw std::logic_error("unknown activation");
}

int Tensor::rows() const { return tape_->node(id_).rows; }
int Tensor::cols() const { return tape_->node(id_).cols; }

const std::vector<double>& Tensor::values() const { return tape_->node(id_).val; }
const std::vector<double>& Tensor::grad() const { return tape_->node(id_).grad; }

double Tensor::scalar() const {
  const TapeNode& n = tape_->node(id_);
  if (n.rows != 1 || n.cols != 1) throw std::logic_error("scalar() on non-1x1 tensor");
  return n.val[0];
}

Tensor Tape::emplace(TapeNode node) {
  node.grad.assign(node.val.size(), 0.0);
  nodes_.push_back(std::make_unique<TapeNode>(std::move(node)));
  return Tensor(this, static_cast<int>(nodes_.size()) - 1);
}

const TapeNode& Tape::resolve(Tensor t, const char* op) const {
  if (!t.valid() || t.tape_ != this) {
    throw std::invalid_argument(std::string(op) + ": tensor from another tape");
  }
  return *nodes_[t.id_];
}

Tensor Tape::leaf(int rows, int cols, std::vector<double> values, bool requires_grad,
                  std::string name) {
  if (rows < 1 || cols < 1 ||
      values.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("leaf '" + name + "': shape/value size mismatch");
  }
  TapeNode n;
  n.rows = rows;
  n.cols = cols;
  n.val = std::move(values);
  n.requires_grad = requires_grad;
  n.is_leaf = true;
  n.name = std::move(name);
  return emplace(std::move(n));
}

Tensor Tape::matmul(Tensor a, Tensor b) {
  const TapeNode& na = resolve(a, "matmul");
  const TapeNode& nb = resolve(b, "matmul");
  if (na.cols != nb.rows) {
    throw std::invalid_argument("matmul: inner dimensions " + std::to_string(na.cols) +
                                " and " + std::to_string(nb.rows) + " differ");
  }
  const int r = na.rows, k = na.cols, c = nb.cols;
  TapeNode n;
  n.rows = r;
  n.cols = c;
  n.val.assign(static_cast<std::size_t>(r) * c, 0.0);
  for (int i = 0; i < r; ++i) {
    for (int m = 0; m < k; ++m) {
      const double av = na.val[static_cast<std::size_t>(i) * k + m];
      if (av == 0.0) continue;
      const double* brow = nb.val.data() + static_cast<std::size_t>(m) * c;
      double* out = n.val.data() + static_cast<std::size_t>(i) * c;
      for (int j = 0; j < c; ++j) out[j] += av * brow[j];
    }
  }
  n.parents = {a.id_, b.id_};
  n.backward = [r, k, c](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    TapeNode& pa = *ps[0];
    TapeNode& pb = *ps[1];
    // dA += dC * B^T
    for (int i = 0; i < r; ++i) {
      for (int m = 0; m < k; ++m) {
        double s = 0.0;
        const double* grow = self.grad.data() + static_cast<std::size_t>(i) * c;
        const double* brow = pb.val.data() + static_cast<std::size_t>(m) * c;
        for (int j = 0; j < c; ++j) s += grow[j] * brow[j];
        pa.grad[static_cast<std::size_t>(i) * k + m] += s;
      }
    }
    // dB += A^T * dC
    for (int m = 0; m < k; ++m) {
      for (int i = 0; i < r; ++i) {
        const double av = pa.val[static_cast<std::size_t>(i) * k + m];
        if (av == 0.0) continue;
        const double* grow = self.grad.data() + static_cast<std::size_t>(i) * c;
        double* out = pb.grad.data() + static_cast<std::size_t>(m) * c;
        for (int j = 0; j < c; ++j) out[j] += av * grow[j];
      }
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::matmul_nt(Tensor a, Tensor b) {
  const TapeNode& na = resolve(a, "matmul_nt");
  const TapeNode& nb = resolve(b, "matmul_nt");
  if (na.cols != nb.cols) {
    throw std::invalid_argument("matmul_nt: inner dimensions differ");
  }
  const int r = na.rows, k = na.cols, c = nb.rows;
  TapeNode n;
  n.rows = r;
  n.cols = c;
  n.val.assign(static_cast<std::size_t>(r) * c, 0.0);
  for (int i = 0; i < r; ++i) {
    const double* arow = na.val.data() + static_cast<std::size_t>(i) * k;
    for (int j = 0; j < c; ++j) {
      const double* brow = nb.val.data() + static_cast<std::size_t>(j) * k;
      double s = 0.0;
      for (int m = 0; m < k; ++m) s += arow[m] * brow[m];
      n.val[static_cast<std::size_t>(i) * c + j] = s;
    }
  }
  n.parents = {a.id_, b.id_};
  n.backward = [r, k, c](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    TapeNode& pa = *ps[0];
    TapeNode& pb = *ps[1];
    // C = A B^T: dA += dC * B, dB += dC^T * A.
    for (int i = 0; i < r; ++i) {
      const double* grow = self.grad.data() + static_cast<std::size_t>(i) * c;
      for (int j = 0; j < c; ++j) {
        const double gv = grow[j];
        if (gv == 0.0) continue;
        const double* brow = pb.val.data() + static_cast<std::size_t>(j) * k;
        double* out = pa.grad.data() + static_cast<std::size_t>(i) * k;
        for (int m = 0; m < k; ++m) out[m] += gv * brow[m];
      }
    }
    for (int j = 0; j < c; ++j) {
      double* out = pb.grad.data() + static_cast<std::size_t>(j) * k;
      for (int i = 0; i < r; ++i) {
        const double gv = self.grad[static_cast<std::size_t>(i) * c + j];
        if (gv == 0.0) continue;
        const double* arow = pa.val.data() + static_cast<std::size_t>(i) * k;
        for (int m = 0; m < k; ++m) out[m] += gv * arow[m];
      }
    }
  };
  return emplace(std::move(n));
}

namespace {

void check_same_shape(const TapeNode& a, const TapeNode& b, const char* op) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw std::invalid_argument(std::string(op) + ": shapes " +
                                std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                                " and " + std::to_string(b.rows) + "x" +
                                std::to_string(b.cols) + " differ");
  }
}

}  // namespace

Tensor Tape::add(Tensor a, Tensor b) {
  const TapeNode& na = resolve(a, "add");
  const TapeNode& nb = resolve(b, "add");
  check_same_shape(na, nb, "add");
  TapeNode n;
  n.rows = na.rows;
  n.cols = na.cols;
  n.val.resize(na.val.size());
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] = na.val[i] + nb.val[i];
  n.parents = {a.id_, b.id_};
  n.backward = [](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      ps[0]->grad[i] += self.grad[i];
      ps[1]->grad[i] += self.grad[i];
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::sub(Tensor a, Tensor b) {
  const TapeNode& na = resolve(a, "sub");
  const TapeNode& nb = resolve(b, "sub");
  check_same_shape(na, nb, "sub");
  TapeNode n;
  n.rows = na.rows;
  n.cols = na.cols;
  n.val.resize(na.val.size());
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] = na.val[i] - nb.val[i];
  n.parents = {a.id_, b.id_};
  n.backward = [](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      ps[0]->grad[i] += self.grad[i];
      ps[1]->grad[i] -= self.grad[i];
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::scale(Tensor a, double factor) {
  const TapeNode& na = resolve(a, "scale");
  TapeNode n;
  n.rows = na.rows;
  n.cols = na.cols;
  n.val.resize(na.val.size());
  for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] = factor * na.val[i];
  n.parents = {a.id_};
  n.backward = [factor](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      ps[0]->grad[i] += factor * self.grad[i];
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::activation(Tensor a, Activation act) {
  const TapeNode& na = resolve(a, "activation");
  const double slope = activation_slope(act);
  TapeNode n;
  n.rows = na.rows;
  n.cols = na.cols;
  n.val.resize(na.val.size());
  for (std::size_t i = 0; i < n.val.size(); ++i) {
    const double x = na.val[i];
    n.val[i] = x > 0.0 ? x : slope * x;
  }
  n.parents = {a.id_};
  n.backward = [slope](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      ps[0]->grad[i] += self.grad[i] * (ps[0]->val[i] > 0.0 ? 1.0 : slope);
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::row_normalize(Tensor a, double eps) {
  const TapeNode& na = resolve(a, "row_normalize");
  if (eps <= 0.0) throw std::invalid_argument("row_normalize: eps must be > 0");
  const int r = na.rows, c = na.cols;
  TapeNode n;
  n.rows = r;
  n.cols = c;
  n.val.resize(na.val.size());
  std::vector<double> norms(r);
  for (int i = 0; i < r; ++i) {
    const double* x = na.val.data() + static_cast<std::size_t>(i) * c;
    double sq = 0.0;
    for (int j = 0; j < c; ++j) sq += x[j] * x[j];
    norms[i] = std::sqrt(sq + eps * eps);
    double* y = n.val.data() + static_cast<std::size_t>(i) * c;
    for (int j = 0; j < c; ++j) y[j] = x[j] / norms[i];
  }
  n.parents = {a.id_};
  n.backward = [r, c, norms](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    for (int i = 0; i < r; ++i) {
      const double* x = ps[0]->val.data() + static_cast<std::size_t>(i) * c;
      const double* dy = self.grad.data() + static_cast<std::size_t>(i) * c;
      double* dx = ps[0]->grad.data() + static_cast<std::size_t>(i) * c;
      double xdy = 0.0;
      for (int j = 0; j < c; ++j) xdy += x[j] * dy[j];
      const double rn = norms[i];
      const double r3 = rn * rn * rn;
      for (int j = 0; j < c; ++j) dx[j] += dy[j] / rn - x[j] * xdy / r3;
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::cosine(Tensor a, Tensor b, double eps) {
  const TapeNode& na = resolve(a, "cosine");
  const TapeNode& nb = resolve(b, "cosine");
  check_same_shape(na, nb, "cosine");
  if (eps <= 0.0) throw std::invalid_argument("cosine: eps must be > 0");
  double dot = 0.0, qa = 0.0, qb = 0.0;
  for (std::size_t i = 0; i < na.val.size(); ++i) {
    dot += na.val[i] * nb.val[i];
    qa += na.val[i] * na.val[i];
    qb += nb.val[i] * nb.val[i];
  }
  const double ra = std::sqrt(qa + eps * eps);
  const double rb = std::sqrt(qb + eps * eps);
  TapeNode n;
  n.rows = 1;
  n.cols = 1;
  n.val = {dot / (ra * rb)};
  n.parents = {a.id_, b.id_};
  n.backward = [dot, ra, rb](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    const double g = self.grad[0];
    const auto& av = ps[0]->val;
    const auto& bv = ps[1]->val;
    for (std::size_t i = 0; i < av.size(); ++i) {
      ps[0]->grad[i] += g * (bv[i] / (ra * rb) - dot * av[i] / (ra * ra * ra * rb));
      ps[1]->grad[i] += g * (av[i] / (ra * rb) - dot * bv[i] / (rb * rb * rb * ra));
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::logsumexp_rows(Tensor a) {
  const TapeNode& na = resolve(a, "logsumexp_rows");
  const int r = na.rows, c = na.cols;
  TapeNode n;
  n.rows = r;
  n.cols = 1;
  n.val.resize(r);
  for (int i = 0; i < r; ++i) {
    const double* x = na.val.data() + static_cast<std::size_t>(i) * c;
    double m = x[0];
    for (int j = 1; j < c; ++j) m = std::max(m, x[j]);
    double s = 0.0;
    for (int j = 0; j < c; ++j) s += std::exp(x[j] - m);
    n.val[i] = m + std::log(s);
  }
  n.parents = {a.id_};
  n.backward = [r, c](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    for (int i = 0; i < r; ++i) {
      const double* x = ps[0]->val.data() + static_cast<std::size_t>(i) * c;
      double* dx = ps[0]->grad.data() + static_cast<std::size_t>(i) * c;
      const double lse = self.val[i];
      const double g = self.grad[i];
      for (int j = 0; j < c; ++j) dx[j] += g * std::exp(x[j] - lse);
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::sum(Tensor a) {
  const TapeNode& na = resolve(a, "sum");
  double s = 0.0;
  for (double v : na.val) s += v;
  TapeNode n;
  n.rows = 1;
  n.cols = 1;
  n.val = {s};
  n.parents = {a.id_};
  n.backward = [](const TapeNode& self, const std::vector<TapeNode*>& ps) {
    for (double& g : ps[0]->grad) g += self.grad[0];
  };
  return emplace(std::move(n));
}

namespace {

// Shifted exp-sum over a scaled span; returns log(sum exp(x/tau)).
double lse_scaled(const std::vector<double>& xs, double tau, double shift) {
  double s = 0.0;
  for (double x : xs) s += std::exp(x / tau - shift);
  return shift + std::log(s);
}

double max_scaled(const std::vector<double>& xs, double tau, double init) {
  double m = init;
  for (double x : xs) m = std::max(m, x / tau);
  return m;
}

}  // namespace

Tensor Tape::loss_in(Tensor positives, Tensor negatives, double tau) {
  const TapeNode& np = resolve(positives, "loss_in");
  if (np.val.empty()) throw std::invalid_argument("loss_in: positive set is empty");
  if (tau <= 0.0) throw std::invalid_argument("loss_in: tau must be > 0");
  const bool has_neg = negatives.valid();
  const TapeNode* nn = has_neg ? &resolve(negatives, "loss_in") : nullptr;

  std::vector<int> parents{positives.id_};
  double value = 0.0;
  double lse_p = 0.0, lse_all = 0.0;
  {
    double shift = max_scaled(np.val, tau, -1e308);
    lse_p = lse_scaled(np.val, tau, shift);
    if (has_neg && !nn->val.empty()) {
      shift = max_scaled(nn->val, tau, shift);
      lse_p = lse_scaled(np.val, tau, shift);  // recompute under the common shift
      double s = std::exp(lse_p - shift);
      for (double x : nn->val) s += std::exp(x / tau - shift);
      lse_all = shift + std::log(s);
    } else {
      lse_all = lse_p;
    }
    value = lse_all - lse_p;  // == -log(sum_P / sum_all)
  }
  if (has_neg) parents.push_back(negatives.id_);

  TapeNode n;
  n.rows = 1;
  n.cols = 1;
  n.val = {value};
  n.parents = std::move(parents);
  n.backward = [tau, lse_p, lse_all, has_neg](const TapeNode& self,
                                              const std::vector<TapeNode*>& ps) {
    const double g = self.grad[0];
    for (std::size_t i = 0; i < ps[0]->val.size(); ++i) {
      const double x = ps[0]->val[i] / tau;
      ps[0]->grad[i] += g / tau * (std::exp(x - lse_all) - std::exp(x - lse_p));
    }
    if (has_neg && ps.size() > 1) {
      for (std::size_t i = 0; i < ps[1]->val.size(); ++i) {
        const double x = ps[1]->val[i] / tau;
        ps[1]->grad[i] += g / tau * std::exp(x - lse_all);
      }
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::loss_out(Tensor positives, Tensor negatives, double tau) {
  const TapeNode& np = resolve(positives, "loss_out");
  if (np.val.empty()) throw std::invalid_argument("loss_out: positive set is empty");
  if (tau <= 0.0) throw std::invalid_argument("loss_out: tau must be > 0");
  const bool has_neg = negatives.valid();
  const TapeNode* nn = has_neg ? &resolve(negatives, "loss_out") : nullptr;

  // Per positive p: -log( e^{p/tau} / (e^{p/tau} + sum_N e^{x/tau}) ).
  std::vector<double> lse_terms(np.val.size());
  double value = 0.0;
  for (std::size_t p = 0; p < np.val.size(); ++p) {
    double shift = np.val[p] / tau;
    if (has_neg) shift = max_scaled(nn->val, tau, shift);
    double s = std::exp(np.val[p] / tau - shift);
    if (has_neg) {
      for (double x : nn->val) s += std::exp(x / tau - shift);
    }
    lse_terms[p] = shift + std::log(s);
    value += lse_terms[p] - np.val[p] / tau;
  }

  std::vector<int> parents{positives.id_};
  if (has_neg) parents.push_back(negatives.id_);
  TapeNode n;
  n.rows = 1;
  n.cols = 1;
  n.val = {value};
  n.parents = std::move(parents);
  n.backward = [tau, lse_terms, has_neg](const TapeNode& self,
                                         const std::vector<TapeNode*>& ps) {
    const double g = self.grad[0];
    for (std::size_t p = 0; p < ps[0]->val.size(); ++p) {
      const double xp = ps[0]->val[p] / tau;
      ps[0]->grad[p] += g / tau * (std::exp(xp - lse_terms[p]) - 1.0);
      if (has_neg && ps.size() > 1) {
        for (std::size_t i = 0; i < ps[1]->val.size(); ++i) {
          const double xn = ps[1]->val[i] / tau;
          ps[1]->grad[i] += g / tau * std::exp(xn - lse_terms[p]);
        }
      }
    }
  };
  return emplace(std::move(n));
}

Tensor Tape::custom(const std::vector<Tensor>& parents, int rows, int cols,
                    std::vector<double> values,
                    std::function<void(const TapeNode&, const std::vector<TapeNode*>&)>
                        backward) {
  TapeNode n;
  n.rows = rows;
  n.cols = cols;
  n.val = std::move(values);
  for (Tensor p : parents) {
    resolve(p, "custom");
    n.parents.push_back(p.id_);
  }
  n.backward = std::move(backward);
  return emplace(std::move(n));
}

void Tape::backward(Tensor root) {
  const TapeNode& rootNode = resolve(root, "backward");
  if (rootNode.rows != 1 || rootNode.cols != 1) {
    throw std::invalid_argument("backward: root must be a 1x1 scalar");
  }
  if (backward_done_) {
    throw std::logic_error("backward: called twice without reset_gradients()");
  }

  for (auto& n : nodes_) {
    std::fill(n->grad.begin(), n->grad.end(), 0.0);
    n->reached = false;
  }

  // Mark the subgraph feeding the root.
  std::vector<int> stack{root.id_};
  nodes_[root.id_]->reached = true;
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    for (int p : nodes_[id]->parents) {
      if (!nodes_[p]->reached) {
        nodes_[p]->reached = true;
        stack.push_back(p);
      }
    }
  }
  for (const auto& n : nodes_) {
    if (n->is_leaf && n->requires_grad && !n->reached) {
      throw std::runtime_error("backward: parameter '" + n->name +
                               "' is not connected to the loss");
    }
  }

  nodes_[root.id_]->grad[0] = 1.0;
  for (int id = root.id_; id >= 0; --id) {
    TapeNode& n = *nodes_[id];
    if (!n.reached || !n.backward) continue;
    std::vector<TapeNode*> ps;
    ps.reserve(n.parents.size());
    for (int p : n.parents) ps.push_back(nodes_[p].get());
    n.backward(n, ps);
  }
  backward_done_ = true;
}

void Tape::reset_gradients() {
  for (auto& n : nodes_) std::fill(n->grad.begin(), n->grad.end(), 0.0);
  backward_done_ = false;
}

Parameter Parameter::glorot(std::string name, int rows, int cols,
                            std::mt19937_64& rng) {
  Parameter p;
  p.name = std::move(name);
  p.rows = rows;
  p.cols = cols;
  const double bound = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  p.value.resize(static_cast<std::size_t>(rows) * cols);
  for (double& v : p.value) v = dist(rng);
  p.m.assign(p.value.size(), 0.0);
  p.v.assign(p.value.size(), 0.0);
  return p;
}

Parameter Parameter::zeros(std::string name, int rows, int cols) {
  Parameter p;
  p.name = std::move(name);
  p.rows = rows;
  p.cols = cols;
  p.value.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  p.m = p.value;
  p.v = p.value;
  return p;
}

void adam_step(Parameter& p, const std::vector<double>& grad, const AdamConfig& cfg) {
  if (grad.size() != p.value.size()) {
    throw std::invalid_argument("adam_step: gradient shape mismatch for '" + p.name +
                                "'");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) {
      throw std::runtime_error("adam_step: non-finite gradient in parameter '" +
                               p.name + "'");
    }
  }
  ++p.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p.step));
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    double g = grad[i];
    if (!cfg.decoupled) g += cfg.weight_decay * p.value[i];
    p.m[i] = cfg.beta1 * p.m[i] + (1.0 - cfg.beta1) * g;
    p.v[i] = cfg.beta2 * p.v[i] + (1.0 - cfg.beta2) * g * g;
    const double m_hat = p.m[i] / bc1;
    const double v_hat = p.v[i] / bc2;
    double update = m_hat / (std::sqrt(v_hat) + cfg.eps);
    if (cfg.decoupled) update += cfg.weight_decay * p.value[i];
    p.value[i] -= cfg.lr * update;
  }
}

}  // namespace relgraph
