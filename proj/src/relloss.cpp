#include "relgraph/relloss.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "relgraph/parallel.hpp"

namespace relgraph {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// log(sum over sets of exp(row[j]/tau)) with a shared max shift.
double lse_over_sets(const double* row, double tau,
                     const std::vector<const std::vector<NodeId>*>& sets) {
  double m = -1e308;
  for (const auto* s : sets) {
    for (NodeId j : *s) m = std::max(m, row[j] / tau);
  }
  double sum = 0.0;
  for (const auto* s : sets) {
    for (NodeId j : *s) sum += std::exp(row[j] / tau - m);
  }
  return m + std::log(sum);
}

}  // namespace

LossVariant loss_variant_from_string(const std::string& name) {
  if (name == "pair") return LossVariant::Pair;
  if (name == "list") return LossVariant::List;
  if (name == "in") return LossVariant::In;
  if (name == "out") return LossVariant::Out;
  throw std::invalid_argument("unknown loss variant '" + name +
                              "' (want pair|list|in|out)");
}

std::string loss_variant_name(LossVariant v) {
  switch (v) {
    case LossVariant::Pair:
      return "pair";
    case LossVariant::List:
      return "list";
    case LossVariant::In:
      return "in";
    case LossVariant::Out:
      return "out";
  }
  throw std::logic_error("unknown loss variant");
}

void LossConfig::validate() const {
  if (k < 1) throw std::invalid_argument("LossConfig: k must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("LossConfig: alpha must lie in (0, 1]");
  }
  if (beyond_sample < 0) {
    throw std::invalid_argument("LossConfig: beyond_sample must be >= 1 when set");
  }
}

std::shared_ptr<const HopStructure> build_hop_structure(
    const LabeledGraph& g, int k, const std::vector<NodeId>& anchors,
    UnreachablePolicy policy) {
  std::vector<NodeId> list = anchors;
  if (list.empty()) {
    list.resize(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) list[i] = i;
  } else {
    for (NodeId a : list) {
      if (a < 0 || a >= g.num_nodes()) {
        throw std::invalid_argument("build_hop_structure: anchor " +
                                    std::to_string(a) + " out of range");
      }
    }
  }
  auto structure = std::make_shared<HopStructure>(list.size());
  parallel_for(static_cast<std::int64_t>(list.size()), resolve_threads(0),
               [&](std::int64_t i) {
                 HopSets h = hop_sets(g, list[i], k, policy);
                 AnchorHops& a = (*structure)[i];
                 a.anchor = list[i];
                 a.sets = std::move(h.per_hop);
                 a.sets.push_back(std::move(h.beyond));
               });
  return structure;
}

std::shared_ptr<const HopStructure> sample_hop_structure(const HopStructure& base,
                                                         int d_prime,
                                                         std::uint64_t seed,
                                                         std::int64_t epoch) {
  if (d_prime < 1) throw std::invalid_argument("sample_hop_structure: d' must be >= 1");
  auto sampled = std::make_shared<HopStructure>(base.size());
  for (std::size_t ai = 0; ai < base.size(); ++ai) {
    AnchorHops& out = (*sampled)[ai];
    out.anchor = base[ai].anchor;
    out.sets.resize(base[ai].sets.size());
    for (std::size_t si = 0; si < base[ai].sets.size(); ++si) {
      const auto& full = base[ai].sets[si];
      if (static_cast<int>(full.size()) <= d_prime) {
        out.sets[si] = full;
        continue;
      }
      std::mt19937_64 rng(splitmix64(
          splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(epoch))) ^
          splitmix64((static_cast<std::uint64_t>(ai) << 8) | si)));
      std::vector<NodeId> pool = full;
      for (int t = 0; t < d_prime; ++t) {  // partial Fisher-Yates
        std::uniform_int_distribution<int> pick(t, static_cast<int>(pool.size()) - 1);
        std::swap(pool[t], pool[pick(rng)]);
      }
      pool.resize(d_prime);
      std::sort(pool.begin(), pool.end());
      out.sets[si] = std::move(pool);
    }
  }
  return sampled;
}

std::shared_ptr<const HopStructure> sample_anchor_batch(const HopStructure& base,
                                                        int batch,
                                                        std::uint64_t seed,
                                                        std::int64_t epoch) {
  if (batch < 1) throw std::invalid_argument("sample_anchor_batch: batch must be >= 1");
  if (batch >= static_cast<int>(base.size())) {
    return std::make_shared<HopStructure>(base);
  }
  std::vector<int> indices(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) indices[i] = static_cast<int>(i);
  std::mt19937_64 rng(splitmix64(
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(epoch))) ^ 0xA11C4085ULL));
  for (int t = 0; t < batch; ++t) {  // partial Fisher-Yates
    std::uniform_int_distribution<int> pick(t, static_cast<int>(indices.size()) - 1);
    std::swap(indices[t], indices[pick(rng)]);
  }
  indices.resize(batch);
  std::sort(indices.begin(), indices.end());
  auto sampled = std::make_shared<HopStructure>();
  sampled->reserve(batch);
  for (int i : indices) sampled->push_back(base[i]);
  return sampled;
}

namespace {

// Ratio term with stable log-space evaluation; gradients flow only when the
// ratio sits at or below the clamp.
struct TermStats {
  double value_sum = 0.0;
  std::int64_t ratio_terms = 0;
  std::int64_t clamped = 0;
  std::int64_t skipped = 0;
  std::int64_t ops = 0;
  std::vector<char> used;  // sets touched by a non-skipped term
};

// One anchor's forward contribution (before the 1/k scale for pair/list).
TermStats anchor_forward(const double* row, const AnchorHops& a,
                         const LossConfig& cfg, const EncoderHyper& hyper) {
  const int k = cfg.k;
  TermStats st;
  st.used.assign(a.sets.size(), 0);

  auto ratio_term = [&](int near_idx, const std::vector<const std::vector<NodeId>*>& den,
                        double tau, std::int64_t op_count) {
    const auto& near = a.sets[near_idx];
    const double lse_near = lse_over_sets(row, tau, {&near});
    const double lse_den = lse_over_sets(row, tau, den);
    const double log_r = lse_near - lse_den;
    const double r = std::exp(log_r);
    ++st.ratio_terms;
    st.ops += op_count;
    if (cfg.variant == LossVariant::In) {
      st.value_sum += -log_r;  // sum-inside form, no clamp
    } else {
      if (r >= cfg.alpha) ++st.clamped;
      st.value_sum += r > cfg.alpha ? -std::log(cfg.alpha) : -log_r;
    }
  };

  switch (cfg.variant) {
    case LossVariant::Pair: {
      for (int n = 1; n <= k; ++n) {
        const auto& near = a.sets[n - 1];
        for (int m = 1; m <= k - n + 1; ++m) {
          const auto& far = a.sets[n + m - 1];
          if (near.empty() || far.empty()) {
            ++st.skipped;
            continue;
          }
          st.used[n - 1] = st.used[n + m - 1] = 1;
          ratio_term(n - 1, {&near, &far}, hop_temperature(hyper, n),
                     static_cast<std::int64_t>(near.size() + far.size()));
        }
      }
      break;
    }
    case LossVariant::List: {
      for (int n = 1; n <= k; ++n) {
        const auto& near = a.sets[n - 1];
        if (near.empty()) {
          ++st.skipped;
          continue;
        }
        std::vector<const std::vector<NodeId>*> den;
        std::int64_t ops = 0;
        for (int j = n - 1; j <= k; ++j) {
          den.push_back(&a.sets[j]);
          ops += static_cast<std::int64_t>(a.sets[j].size());
          st.used[j] = 1;
        }
        ratio_term(n - 1, den, hop_temperature(hyper, n), ops);
      }
      break;
    }
    case LossVariant::In:
    case LossVariant::Out: {
      const auto& near = a.sets[0];
      if (near.empty()) {
        ++st.skipped;
        break;
      }
      std::vector<const std::vector<NodeId>*> far;
      std::int64_t far_size = 0;
      for (int j = 1; j <= k; ++j) {
        far.push_back(&a.sets[j]);
        far_size += static_cast<std::int64_t>(a.sets[j].size());
      }
      for (std::size_t j = 0; j < st.used.size(); ++j) st.used[j] = 1;
      const double tau = hop_temperature(hyper, 1);
      if (cfg.variant == LossVariant::In) {
        std::vector<const std::vector<NodeId>*> den = far;
        den.insert(den.begin(), &near);
        ratio_term(0, den, tau,
                   static_cast<std::int64_t>(near.size()) + far_size);
      } else {
        // per-positive form: one InfoNCE term per positive.
        for (NodeId p : near) {
          double m = row[p] / tau;
          for (const auto* s : far) {
            for (NodeId j : *s) m = std::max(m, row[j] / tau);
          }
          double sum = std::exp(row[p] / tau - m);
          for (const auto* s : far) {
            for (NodeId j : *s) sum += std::exp(row[j] / tau - m);
          }
          st.value_sum += m + std::log(sum) - row[p] / tau;
          ++st.ratio_terms;
          st.ops += 1 + far_size;
        }
      }
      break;
    }
  }
  return st;
}

// Accumulates d(anchor contribution)/dS into the anchor's row gradient.
void anchor_backward(const double* row, double* grad_row, double upstream,
                     const AnchorHops& a, const LossConfig& cfg,
                     const EncoderHyper& hyper) {
  const int k = cfg.k;

  auto ratio_grad = [&](const std::vector<NodeId>& near,
                        const std::vector<const std::vector<NodeId>*>& den,
                        double tau) {
    const double lse_near = lse_over_sets(row, tau, {&near});
    const double lse_den = lse_over_sets(row, tau, den);
    const double r = std::exp(lse_near - lse_den);
    const bool clamped = cfg.variant != LossVariant::In && r > cfg.alpha;
    if (clamped) return;  // min() plateau: exactly zero gradient
    // d(-log r)/dS_j = (softmax_den(j) - softmax_near(j)) / tau.
    for (const auto* s : den) {
      for (NodeId j : *s) {
        grad_row[j] += upstream / tau * std::exp(row[j] / tau - lse_den);
      }
    }
    for (NodeId j : near) {
      grad_row[j] -= upstream / tau * std::exp(row[j] / tau - lse_near);
    }
  };

  switch (cfg.variant) {
    case LossVariant::Pair: {
      for (int n = 1; n <= k; ++n) {
        const auto& near = a.sets[n - 1];
        for (int m = 1; m <= k - n + 1; ++m) {
          const auto& far = a.sets[n + m - 1];
          if (near.empty() || far.empty()) continue;
          ratio_grad(near, {&near, &far}, hop_temperature(hyper, n));
        }
      }
      break;
    }
    case LossVariant::List: {
      for (int n = 1; n <= k; ++n) {
        const auto& near = a.sets[n - 1];
        if (near.empty()) continue;
        std::vector<const std::vector<NodeId>*> den;
        for (int j = n - 1; j <= k; ++j) den.push_back(&a.sets[j]);
        ratio_grad(near, den, hop_temperature(hyper, n));
      }
      break;
    }
    case LossVariant::In:
    case LossVariant::Out: {
      const auto& near = a.sets[0];
      if (near.empty()) break;
      std::vector<const std::vector<NodeId>*> far;
      for (int j = 1; j <= k; ++j) far.push_back(&a.sets[j]);
      const double tau = hop_temperature(hyper, 1);
      if (cfg.variant == LossVariant::In) {
        std::vector<const std::vector<NodeId>*> den = far;
        den.insert(den.begin(), &near);
        ratio_grad(near, den, tau);
      } else {
        for (NodeId p : near) {
          double m = row[p] / tau;
          for (const auto* s : far) {
            for (NodeId j : *s) m = std::max(m, row[j] / tau);
          }
          double sum = std::exp(row[p] / tau - m);
          for (const auto* s : far) {
            for (NodeId j : *s) sum += std::exp(row[j] / tau - m);
          }
          const double lse = m + std::log(sum);
          grad_row[p] += upstream / tau * (std::exp(row[p] / tau - lse) - 1.0);
          for (const auto* s : far) {
            for (NodeId j : *s) {
              grad_row[j] += upstream / tau * std::exp(row[j] / tau - lse);
            }
          }
        }
      }
      break;
    }
  }
}

}  // namespace

std::optional<double> pairwise_ratio(const EncoderState& state, const Matrix& h,
                                     const HopSets& hops, int n, int m) {
  if (n < 1 || m < 1 || n + m > hops.range() + 1) {
    throw std::invalid_argument("pairwise_ratio: need 1 <= n, 1 <= m, n+m <= k+1");
  }
  const auto& near = hops.hop(n);
  const auto& far = n + m == hops.range() + 1 ? hops.beyond : hops.hop(n + m);
  if (near.empty() || far.empty()) return std::nullopt;

  const double tau = hop_temperature(state.hyper, n);
  auto row = [&](NodeId j) {
    return theta(state,
                 std::span<const double>(h.values.data() +
                                             static_cast<std::size_t>(hops.anchor) * h.cols,
                                         h.cols),
                 std::span<const double>(h.values.data() + static_cast<std::size_t>(j) * h.cols,
                                         h.cols));
  };
  double mx = -1e308;
  std::vector<double> near_vals, far_vals;
  for (NodeId j : near) near_vals.push_back(row(j) / tau);
  for (NodeId j : far) far_vals.push_back(row(j) / tau);
  for (double v : near_vals) mx = std::max(mx, v);
  for (double v : far_vals) mx = std::max(mx, v);
  double num = 0.0, den = 0.0;
  for (double v : near_vals) num += std::exp(v - mx);
  den = num;
  for (double v : far_vals) den += std::exp(v - mx);
  return num / den;
}

std::optional<double> listwise_ratio(const EncoderState& state, const Matrix& h,
                                     const HopSets& hops, int n, int k) {
  if (n < 1 || n > k || k != hops.range()) {
    throw std::invalid_argument("listwise_ratio: need 1 <= n <= k = hops.range()");
  }
  const auto& near = hops.hop(n);
  if (near.empty()) return std::nullopt;

  const double tau = hop_temperature(state.hyper, n);
  auto theta_of = [&](NodeId j) {
    return theta(state,
                 std::span<const double>(h.values.data() +
                                             static_cast<std::size_t>(hops.anchor) * h.cols,
                                         h.cols),
                 std::span<const double>(h.values.data() + static_cast<std::size_t>(j) * h.cols,
                                         h.cols));
  };
  std::vector<double> near_vals, den_vals;
  for (NodeId j : near) near_vals.push_back(theta_of(j) / tau);
  for (int hop = n; hop <= k + 1; ++hop) {
    const auto& set = hop == k + 1 ? hops.beyond : hops.hop(hop);
    for (NodeId j : set) den_vals.push_back(theta_of(j) / tau);
  }
  double mx = -1e308;
  for (double v : den_vals) mx = std::max(mx, v);
  double num = 0.0;
  for (double v : near_vals) num += std::exp(v - mx);
  double den = 0.0;
  for (double v : den_vals) den += std::exp(v - mx);
  return num / den;
}

LossResult relative_similarity_loss(Tape& tape, Tensor theta_matrix,
                                    std::shared_ptr<const HopStructure> hops,
                                    const LossConfig& cfg, const EncoderHyper& hyper) {
  cfg.validate();
  if (!hops || hops->empty()) {
    throw std::invalid_argument("relative_similarity_loss: empty hop structure");
  }
  const int n_cols = theta_matrix.cols();
  if (theta_matrix.rows() != n_cols) {
    throw std::invalid_argument("relative_similarity_loss: theta matrix must be square");
  }
  for (const AnchorHops& a : *hops) {
    if (static_cast<int>(a.sets.size()) != cfg.k + 1) {
      throw std::invalid_argument(
          "relative_similarity_loss: hop structure built for a different k");
    }
  }

  const double scale =
      cfg.variant == LossVariant::Pair || cfg.variant == LossVariant::List
          ? 1.0 / cfg.k
          : 1.0;
  const auto& s_vals = theta_matrix.values();
  const std::size_t n_anchors = hops->size();

  std::vector<TermStats> stats(n_anchors);
  parallel_for(static_cast<std::int64_t>(n_anchors), resolve_threads(cfg.threads),
               [&](std::int64_t i) {
                 const AnchorHops& a = (*hops)[i];
                 stats[i] = anchor_forward(
                     s_vals.data() + static_cast<std::size_t>(a.anchor) * n_cols, a,
                     cfg, hyper);
               });

  LossResult out;
  out.report.per_anchor_terms.reserve(n_anchors);
  double total = 0.0;
  for (std::size_t i = 0; i < n_anchors; ++i) {
    const TermStats& st = stats[i];
    const double anchor_loss = scale * st.value_sum;
    out.report.per_anchor_terms.push_back(anchor_loss);
    total += anchor_loss;
    out.report.ratio_terms += st.ratio_terms;
    out.report.clamped_terms += st.clamped;
    out.report.skipped_terms += st.skipped;
    out.report.sim_op_count += st.ops;
    for (std::size_t si = 0; si < st.used.size(); ++si) {
      if (st.used[si]) {
        out.report.sim_op_count_cached +=
            static_cast<std::int64_t>((*hops)[i].sets[si].size());
      }
    }
  }
  out.report.loss = total;
  out.report.clamp_fraction =
      out.report.ratio_terms > 0
          ? static_cast<double>(out.report.clamped_terms) / out.report.ratio_terms
          : 0.0;

  const LossConfig cfg_copy = cfg;
  const EncoderHyper hyper_copy = hyper;
  const int threads = resolve_threads(cfg.threads);
  out.loss = tape.custom(
      {theta_matrix}, 1, 1, {total},
      [hops, cfg_copy, hyper_copy, scale, n_cols, threads](
          const TapeNode& self, const std::vector<TapeNode*>& parents) {
        TapeNode& s_node = *parents[0];
        const double upstream = self.grad[0] * scale;
        // Anchors own disjoint rows of dS, so parallel writes never collide.
        parallel_for(static_cast<std::int64_t>(hops->size()), threads,
                     [&](std::int64_t i) {
                       const AnchorHops& a = (*hops)[i];
                       const std::size_t off =
                           static_cast<std::size_t>(a.anchor) * n_cols;
                       anchor_backward(s_node.val.data() + off,
                                       s_node.grad.data() + off, upstream, a,
                                       cfg_copy, hyper_copy);
                     });
      });
  return out;
}

GraphLoss graph_loss(Tape& tape, const EncoderState& state, const Matrix& x,
                     std::shared_ptr<const HopStructure> hops, const LossConfig& cfg) {
  GraphLoss out;
  out.forward = bind_forward(tape, state, x, true);
  const Tensor s = tape.matmul_nt(out.forward.z_norm, out.forward.z_norm);
  out.loss = relative_similarity_loss(tape, s, std::move(hops), cfg, state.hyper);
  return out;
}

SimOpCount count_sim_ops(LossVariant variant, int k,
                         const std::vector<std::int64_t>& hop_sizes) {
  if (static_cast<int>(hop_sizes.size()) != k + 1) {
    throw std::invalid_argument("count_sim_ops: need k+1 hop sizes (hops 1..k, beyond)");
  }
  for (std::int64_t s : hop_sizes) {
    if (s < 0) throw std::invalid_argument("count_sim_ops: negative hop size");
  }
  SimOpCount out;
  std::vector<char> used(hop_sizes.size(), 0);
  switch (variant) {
    case LossVariant::Pair: {
      for (int n = 1; n <= k; ++n) {
        for (int m = 1; m <= k - n + 1; ++m) {
          if (hop_sizes[n - 1] == 0 || hop_sizes[n + m - 1] == 0) continue;
          out.uncached += hop_sizes[n - 1] + hop_sizes[n + m - 1];
          used[n - 1] = used[n + m - 1] = 1;
        }
      }
      break;
    }
    case LossVariant::List: {
      for (int n = 1; n <= k; ++n) {
        if (hop_sizes[n - 1] == 0) continue;
        for (int j = n - 1; j <= k; ++j) {
          out.uncached += hop_sizes[j];
          used[j] = 1;
        }
      }
      break;
    }
    case LossVariant::In:
    case LossVariant::Out: {
      if (hop_sizes[0] == 0) break;
      std::int64_t far = 0;
      for (int j = 1; j <= k; ++j) far += hop_sizes[j];
      out.uncached = variant == LossVariant::In ? hop_sizes[0] + far
                                                : hop_sizes[0] * (1 + far);
      for (auto& u : used) u = 1;
      break;
    }
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (used[i]) out.cached += hop_sizes[i];
  }
  return out;
}

}  // namespace relgraph
