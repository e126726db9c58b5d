#include "relgraph/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace relgraph {

namespace {

constexpr double kNormEps = 1e-12;

std::vector<double> unit_rows(const Matrix& h) {
  std::vector<double> out(h.values.size());
  for (int i = 0; i < h.rows; ++i) {
    const double* x = h.values.data() + static_cast<std::size_t>(i) * h.cols;
    double sq = 0.0;
    for (int j = 0; j < h.cols; ++j) sq += x[j] * x[j];
    const double r = std::sqrt(sq + kNormEps * kNormEps);
    double* y = out.data() + static_cast<std::size_t>(i) * h.cols;
    for (int j = 0; j < h.cols; ++j) y[j] = x[j] / r;
  }
  return out;
}

double dot(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += a[j] * b[j];
  return s;
}

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double entropy(const std::vector<std::int64_t>& counts, std::int64_t total) {
  double h = 0.0;
  for (std::int64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace

double linear_probe(const Matrix& h, const std::vector<LabelId>& labels,
                    const Splits& splits, const ProbeConfig& cfg) {
  if (static_cast<int>(labels.size()) != h.rows) {
    throw std::invalid_argument("linear_probe: label count does not match rows");
  }
  if (splits.train.empty() || splits.test.empty()) {
    throw std::invalid_argument("linear_probe: need non-empty train and test splits");
  }
  int c = 0;
  for (LabelId l : labels) c = std::max(c, l + 1);
  {
    std::set<LabelId> train_classes;
    for (NodeId u : splits.train) train_classes.insert(labels[u]);
    if (train_classes.size() < 2) {
      throw std::invalid_argument("linear_probe: train split holds a single class");
    }
  }

  const int d = h.cols;
  std::vector<double> mean(d, 0.0);
  for (NodeId u : splits.train) {
    const double* row = h.values.data() + static_cast<std::size_t>(u) * d;
    for (int j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(splits.train.size());

  // Softmax regression, zero init, full-batch GD. W is c x (d+1), last
  // column is the bias (excluded from L2).
  std::vector<double> w(static_cast<std::size_t>(c) * (d + 1), 0.0);
  std::vector<double> logits(c), probs(c), grad(w.size());
  const double inv_n = 1.0 / static_cast<double>(splits.train.size());

  for (int it = 0; it < cfg.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (NodeId u : splits.train) {
      const double* row = h.values.data() + static_cast<std::size_t>(u) * d;
      double mx = -1e308;
      for (int k = 0; k < c; ++k) {
        const double* wk = w.data() + static_cast<std::size_t>(k) * (d + 1);
        double z = wk[d];
        for (int j = 0; j < d; ++j) z += wk[j] * (row[j] - mean[j]);
        logits[k] = z;
        mx = std::max(mx, z);
      }
      double sum = 0.0;
      for (int k = 0; k < c; ++k) {
        probs[k] = std::exp(logits[k] - mx);
        sum += probs[k];
      }
      for (int k = 0; k < c; ++k) {
        const double delta = probs[k] / sum - (labels[u] == k ? 1.0 : 0.0);
        double* gk = grad.data() + static_cast<std::size_t>(k) * (d + 1);
        for (int j = 0; j < d; ++j) gk[j] += delta * (row[j] - mean[j]);
        gk[d] += delta;
      }
    }
    for (int k = 0; k < c; ++k) {
      double* wk = w.data() + static_cast<std::size_t>(k) * (d + 1);
      double* gk = grad.data() + static_cast<std::size_t>(k) * (d + 1);
      for (int j = 0; j <= d; ++j) {
        double g = gk[j] * inv_n;
        if (j < d) g += cfg.l2 * wk[j];
        wk[j] -= cfg.lr * g;
      }
    }
  }

  std::int64_t correct = 0;
  for (NodeId u : splits.test) {
    const double* row = h.values.data() + static_cast<std::size_t>(u) * d;
    int best = 0;
    double best_z = -1e308;
    for (int k = 0; k < c; ++k) {
      const double* wk = w.data() + static_cast<std::size_t>(k) * (d + 1);
      double z = wk[d];
      for (int j = 0; j < d; ++j) z += wk[j] * (row[j] - mean[j]);
      if (z > best_z) {
        best_z = z;
        best = k;
      }
    }
    if (best == labels[u]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(splits.test.size());
}

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("nmi: partitions must be non-empty and equal length");
  }
  int ca = 0, cb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca = std::max(ca, a[i] + 1);
    cb = std::max(cb, b[i] + 1);
  }
  const std::int64_t n = static_cast<std::int64_t>(a.size());
  std::vector<std::int64_t> na(ca, 0), nb(cb, 0);
  std::vector<std::int64_t> joint(static_cast<std::size_t>(ca) * cb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++na[a[i]];
    ++nb[b[i]];
    ++joint[static_cast<std::size_t>(a[i]) * cb + b[i]];
  }
  double mi = 0.0;
  for (int i = 0; i < ca; ++i) {
    for (int j = 0; j < cb; ++j) {
      const std::int64_t nij = joint[static_cast<std::size_t>(i) * cb + j];
      if (nij == 0) continue;
      const double pij = static_cast<double>(nij) / n;
      mi += pij * std::log(static_cast<double>(nij) * n /
                           (static_cast<double>(na[i]) * nb[j]));
    }
  }
  const double denom = 0.5 * (entropy(na, n) + entropy(nb, n));
  if (mi <= 0.0 || denom <= 0.0) return 0.0;
  return mi / denom;
}

double cluster_nmi(const Matrix& h, const std::vector<LabelId>& labels, int c,
                   std::uint64_t seed) {
  if (c < 2) throw std::invalid_argument("cluster_nmi: need c >= 2");
  if (h.rows < c) throw std::invalid_argument("cluster_nmi: fewer points than clusters");
  const int n = h.rows, d = h.cols;

  std::mt19937_64 rng(seed);
  std::vector<int> best_assign;
  double best_inertia = 1e308;

  auto dist2 = [&](const double* x, const double* y) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) {
      const double t = x[j] - y[j];
      s += t * t;
    }
    return s;
  };

  for (int restart = 0; restart < 10; ++restart) {
    // k-means++ seeding.
    std::vector<double> centers(static_cast<std::size_t>(c) * d);
    std::vector<double> d2(n, 1e308);
    {
      std::uniform_int_distribution<int> pick(0, n - 1);
      int first = pick(rng);
      std::copy_n(h.values.data() + static_cast<std::size_t>(first) * d, d,
                  centers.data());
      for (int k = 1; k < c; ++k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
          const double dd = dist2(h.values.data() + static_cast<std::size_t>(i) * d,
                                  centers.data() + static_cast<std::size_t>(k - 1) * d);
          d2[i] = std::min(d2[i], dd);
          total += d2[i];
        }
        int chosen;
        if (total <= 0.0) {
          chosen = pick(rng);  // all points coincide with a center
        } else {
          std::uniform_real_distribution<double> unit(0.0, total);
          double target = unit(rng), acc = 0.0;
          chosen = n - 1;
          for (int i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= target) {
              chosen = i;
              break;
            }
          }
        }
        std::copy_n(h.values.data() + static_cast<std::size_t>(chosen) * d, d,
                    centers.data() + static_cast<std::size_t>(k) * d);
      }
    }

    std::vector<int> assign(n, 0);
    std::vector<std::int64_t> sizes(c, 0);
    for (int iter = 0; iter < 100; ++iter) {
      bool changed = false;
      std::fill(sizes.begin(), sizes.end(), 0);
      for (int i = 0; i < n; ++i) {
        int best_k = 0;
        double best_d = 1e308;
        for (int k = 0; k < c; ++k) {
          const double dd = dist2(h.values.data() + static_cast<std::size_t>(i) * d,
                                  centers.data() + static_cast<std::size_t>(k) * d);
          if (dd < best_d) {
            best_d = dd;
            best_k = k;  // ties keep the lowest index
          }
        }
        if (assign[i] != best_k) {
          assign[i] = best_k;
          changed = true;
        }
        ++sizes[best_k];
      }
      // Empty cluster: seize the point farthest from its center. Zero
      // distances never qualify, so coincident points stay together.
      for (int k = 0; k < c; ++k) {
        if (sizes[k] > 0) continue;
        int worst = -1;
        double worst_d = 0.0;
        for (int i = 0; i < n; ++i) {
          if (sizes[assign[i]] <= 1) continue;
          const double dd =
              dist2(h.values.data() + static_cast<std::size_t>(i) * d,
                    centers.data() + static_cast<std::size_t>(assign[i]) * d);
          if (dd > worst_d) {
            worst_d = dd;
            worst = i;
          }
        }
        if (worst >= 0) {
          --sizes[assign[worst]];
          assign[worst] = k;
          ++sizes[k];
          changed = true;
        }
      }
      std::fill(centers.begin(), centers.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        const double* row = h.values.data() + static_cast<std::size_t>(i) * d;
        double* ck = centers.data() + static_cast<std::size_t>(assign[i]) * d;
        for (int j = 0; j < d; ++j) ck[j] += row[j];
      }
      for (int k = 0; k < c; ++k) {
        if (sizes[k] == 0) continue;
        double* ck = centers.data() + static_cast<std::size_t>(k) * d;
        for (int j = 0; j < d; ++j) ck[j] /= static_cast<double>(sizes[k]);
      }
      if (!changed) break;
    }

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      inertia += dist2(h.values.data() + static_cast<std::size_t>(i) * d,
                       centers.data() + static_cast<std::size_t>(assign[i]) * d);
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_assign = assign;
    }
  }

  std::vector<int> truth(labels.begin(), labels.end());
  return nmi(best_assign, truth);
}

double sim_at_5(const Matrix& h, const std::vector<LabelId>& labels) {
  const int n = h.rows;
  if (n < 6) throw std::invalid_argument("sim_at_5: need at least 6 nodes");
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("sim_at_5: label count does not match rows");
  }
  const std::vector<double> z = unit_rows(h);
  double total = 0.0;
  std::vector<std::pair<double, int>> scored(n);
  for (int i = 0; i < n; ++i) {
    const double* zi = z.data() + static_cast<std::size_t>(i) * h.cols;
    for (int j = 0; j < n; ++j) {
      scored[j] = {j == i ? -2.0 : dot(zi, z.data() + static_cast<std::size_t>(j) * h.cols,
                                       h.cols),
                   j};
    }
    std::partial_sort(scored.begin(), scored.begin() + 5, scored.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;  // cosine ties: lowest id
                      });
    int same = 0;
    for (int t = 0; t < 5; ++t) {
      if (labels[scored[t].second] == labels[i]) ++same;
    }
    total += same / 5.0;
  }
  return total / n;
}

HopSimilarity hop_similarity(const Matrix& h, const LabeledGraph& g, int k) {
  if (h.rows != g.num_nodes()) {
    throw std::invalid_argument("hop_similarity: embedding rows do not match graph");
  }
  const std::vector<double> z = unit_rows(h);
  std::vector<std::vector<double>> values(k + 1);
  for (NodeId a = 0; a < g.num_nodes(); ++a) {
    const HopSets sets = hop_sets(g, a, k);
    const double* za = z.data() + static_cast<std::size_t>(a) * h.cols;
    for (int hop = 1; hop <= k + 1; ++hop) {
      const auto& set = hop == k + 1 ? sets.beyond : sets.hop(hop);
      for (NodeId j : set) {
        values[hop - 1].push_back(
            dot(za, z.data() + static_cast<std::size_t>(j) * h.cols, h.cols));
      }
    }
  }

  HopSimilarity out;
  for (int hop = 1; hop <= k + 1; ++hop) {
    auto& vs = values[hop - 1];
    std::sort(vs.begin(), vs.end());
    out.hops.push_back(hop);
    out.pair_counts.push_back(static_cast<std::int64_t>(vs.size()));
    if (vs.empty()) {
      out.mean.push_back(0.0);
      out.q1.push_back(0.0);
      out.median.push_back(0.0);
      out.q3.push_back(0.0);
      out.min.push_back(0.0);
      out.max.push_back(0.0);
      continue;
    }
    double sum = 0.0;
    for (double v : vs) sum += v;
    out.mean.push_back(sum / static_cast<double>(vs.size()));
    out.q1.push_back(quantile(vs, 0.25));
    out.median.push_back(quantile(vs, 0.5));
    out.q3.push_back(quantile(vs, 0.75));
    out.min.push_back(vs.front());
    out.max.push_back(vs.back());
  }
  return out;
}

EvalReport evaluate(const Matrix& h, const std::vector<LabelId>& labels,
                    const Splits& splits, std::uint64_t seed,
                    const ProbeConfig& probe_cfg) {
  EvalReport report;
  if (!splits.train.empty() && !splits.test.empty()) {
    report.accuracy = linear_probe(h, labels, splits, probe_cfg);
  }
  int c = 0;
  for (LabelId l : labels) c = std::max(c, l + 1);
  if (c >= 2 && h.rows >= c) {
    report.nmi = cluster_nmi(h, labels, c, seed);
  }
  if (h.rows >= 6) {
    report.sim_at_5 = sim_at_5(h, labels);
  }
  return report;
}

}  // namespace relgraph
