#include "relgraph/markov.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
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

void sort_by_modulus(std::vector<std::complex<double>>& vals) {
  std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

void fill_spectrum(LabelTransition& lt) {
  const int c = lt.c;
  if (c == 1) {
    lt.eigvals = {std::complex<double>(1.0, 0.0)};
    lt.lambda2.reset();
    return;
  }
  Eigen::MatrixXd m(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = lt.at(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  lt.eigvals.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + c);
  sort_by_modulus(lt.eigvals);
  const auto l2 = lt.eigvals[1];
  lt.lambda2 = Lambda2{std::abs(l2), l2.real(), std::abs(l2.imag()) > 1e-12};
}

void check_row_stochastic(const std::vector<double>& t, int c) {
  if (c <= 0 || t.size() != static_cast<std::size_t>(c) * c) {
    throw std::invalid_argument("transition matrix must be c x c with c >= 1");
  }
  for (int i = 0; i < c; ++i) {
    double sum = 0.0;
    for (int j = 0; j < c; ++j) {
      const double v = t[static_cast<std::size_t>(i) * c + j];
      if (v < 0.0) throw std::invalid_argument("transition entry < 0");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("transition row " + std::to_string(i) +
                                  " sums to " + std::to_string(sum));
    }
  }
}

std::vector<double> left_fixed_point(const std::vector<double>& t, int c) {
  Eigen::MatrixXd m(c, c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = t[static_cast<std::size_t>(i) * c + j];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m.transpose(), true);
  int best = 0;
  double best_dist = std::abs(solver.eigenvalues()(0) - std::complex<double>(1.0, 0.0));
  for (int i = 1; i < c; ++i) {
    const double d = std::abs(solver.eigenvalues()(i) - std::complex<double>(1.0, 0.0));
    if (d < best_dist) {
      best = i;
      best_dist = d;
    }
  }
  Eigen::VectorXcd v = solver.eigenvectors().col(best);
  std::vector<double> pi(c);
  double sum = 0.0;
  for (int i = 0; i < c; ++i) sum += v(i).real();
  if (std::abs(sum) < 1e-300) throw std::runtime_error("degenerate left eigenvector");
  for (int i = 0; i < c; ++i) pi[i] = v(i).real() / sum;
  return pi;
}

}  // namespace

LabelTransition build_transition(const LabeledGraph& g) {
  const ComponentInfo comps = connected_components(g);
  if (comps.count != 1) {
    std::ostringstream msg;
    msg << "build_transition: graph is disconnected (" << comps.count
        << " components, sizes [";
    for (int i = 0; i < comps.count; ++i) {
      if (i) msg << ", ";
      if (i == 8) {
        msg << "...";
        break;
      }
      msg << comps.component_sizes[i];
    }
    msg << "]); extract_largest_component() isolates the giant component";
    throw std::runtime_error(msg.str());
  }

  const int c = g.num_labels();
  const std::vector<std::int64_t> class_degree = degree_by_label(g);
  for (int l = 0; l < c; ++l) {
    if (class_degree[l] == 0) {
      throw std::runtime_error("build_transition: label class " + std::to_string(l) +
                               " has zero total degree");
    }
  }

  LabelTransition lt;
  lt.c = c;
  std::vector<std::int64_t> cross(static_cast<std::size_t>(c) * c, 0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const LabelId lu = g.label(u);
    for (NodeId v : g.neighbors(u)) {
      ++cross[static_cast<std::size_t>(lu) * c + g.label(v)];
    }
  }
  lt.t.resize(cross.size());
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < c; ++j) {
      lt.t[static_cast<std::size_t>(i) * c + j] =
          static_cast<double>(cross[static_cast<std::size_t>(i) * c + j]) /
          static_cast<double>(class_degree[i]);
    }
  }

  const double total = static_cast<double>(g.total_degree());
  lt.pi.resize(c);
  for (int l = 0; l < c; ++l) lt.pi[l] = static_cast<double>(class_degree[l]) / total;

  // Theorem check: the degree fractions must be a left fixed point of T.
  for (int j = 0; j < c; ++j) {
    double pt = 0.0;
    for (int i = 0; i < c; ++i) pt += lt.pi[i] * lt.at(i, j);
    if (std::abs(pt - lt.pi[j]) > 1e-8) {
      throw std::runtime_error("build_transition: pi*T deviates from pi by " +
                               std::to_string(std::abs(pt - lt.pi[j])));
    }
  }

  fill_spectrum(lt);
  return lt;
}

LabelTransition transition_from_matrix(const std::vector<double>& t, int c) {
  check_row_stochastic(t, c);
  LabelTransition lt;
  lt.c = c;
  lt.t = t;
  lt.pi = c == 1 ? std::vector<double>{1.0} : left_fixed_point(t, c);
  fill_spectrum(lt);
  return lt;
}

LabelTransition two_label_model(double p, TwoLabelOrientation orientation) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("two_label_model: p must lie in (0, 1), got " +
                                std::to_string(p));
  }
  LabelTransition lt;
  lt.c = 2;
  double lambda2;
  if (orientation == TwoLabelOrientation::Homophilic) {
    lt.t = {p, 1.0 - p, 1.0 - p, p};
    lambda2 = 2.0 * p - 1.0;
  } else {
    lt.t = {1.0 - p, p, p, 1.0 - p};
    lambda2 = 1.0 - 2.0 * p;
  }
  lt.pi = {0.5, 0.5};
  lt.eigvals = {{1.0, 0.0}, {lambda2, 0.0}};
  sort_by_modulus(lt.eigvals);
  lt.lambda2 = Lambda2{std::abs(lambda2), lambda2, false};
  return lt;
}

std::vector<double> transition_power(const LabelTransition& t, int k) {
  const int c = t.c;
  std::vector<double> acc(static_cast<std::size_t>(c) * c, 0.0);
  for (int i = 0; i < c; ++i) acc[static_cast<std::size_t>(i) * c + i] = 1.0;
  std::vector<double> next(acc.size());
  for (int step = 0; step < k; ++step) {
    for (int i = 0; i < c; ++i) {
      for (int j = 0; j < c; ++j) {
        double s = 0.0;
        for (int m = 0; m < c; ++m) {
          s += acc[static_cast<std::size_t>(i) * c + m] * t.at(m, j);
        }
        next[static_cast<std::size_t>(i) * c + j] = s;
      }
    }
    acc.swap(next);
  }
  return acc;
}

DecayReport lc_prob(const LabelTransition& t, LabelId label, int max_k) {
  if (label < 0 || label >= t.c) {
    throw std::invalid_argument("lc_prob: label out of range");
  }
  if (max_k < 0) throw std::invalid_argument("lc_prob: max_k must be >= 0");

  DecayReport r;
  r.start_label = label;
  r.pi_target = t.pi[label];
  r.bound_lambda = t.lambda2 ? t.lambda2->modulus : 0.0;

  const int c = t.c;
  std::vector<double> power(static_cast<std::size_t>(c) * c, 0.0);
  for (int i = 0; i < c; ++i) power[static_cast<std::size_t>(i) * c + i] = 1.0;
  std::vector<double> next(power.size());
  r.lc_prob.reserve(max_k + 1);
  for (int k = 0; k <= max_k; ++k) {
    if (k > 0) {
      for (int i = 0; i < c; ++i) {
        for (int j = 0; j < c; ++j) {
          double s = 0.0;
          for (int m = 0; m < c; ++m) {
            s += power[static_cast<std::size_t>(i) * c + m] * t.at(m, j);
          }
          next[static_cast<std::size_t>(i) * c + j] = s;
        }
      }
      power.swap(next);
    }
    r.lc_prob.push_back(power[static_cast<std::size_t>(label) * c + label]);
  }

  // Empirical envelope fit; C has no closed form and is reported, not asserted.
  double best = 0.0;
  for (int k = 0; k <= max_k; ++k) {
    const double lk = std::pow(r.bound_lambda, k);
    if (lk < 1e-300) break;
    best = std::max(best, std::abs(r.lc_prob[k] - r.pi_target) / lk);
  }
  r.bound_c = best;
  if (!std::isfinite(r.bound_c)) {
    throw std::runtime_error("lc_prob: envelope constant is not finite");
  }
  return r;
}

MarkovProperties markov_properties(const LabelTransition& t) {
  MarkovProperties props;
  const int c = t.c;

  props.row_stochastic = true;
  for (int i = 0; i < c && props.row_stochastic; ++i) {
    double sum = 0.0;
    for (int j = 0; j < c; ++j) {
      const double v = t.at(i, j);
      if (v < 0.0) props.row_stochastic = false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) props.row_stochastic = false;
  }

  // Support digraph reachability in both directions from state 0.
  auto reach = [&](bool transpose) {
    std::vector<char> seen(c, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < c; ++v) {
        const double w = transpose ? t.at(v, u) : t.at(u, v);
        if (w > 0.0 && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  const auto fwd = reach(false);
  const auto bwd = reach(true);
  props.irreducible = true;
  for (int i = 0; i < c; ++i) {
    if (!fwd[i] || !bwd[i]) props.irreducible = false;
  }

  bool all_diag = true;
  for (int i = 0; i < c; ++i) {
    if (!(t.at(i, i) > 0.0)) all_diag = false;
  }
  if (all_diag) {
    props.aperiodic = true;
    return props;
  }

  // gcd of cycle lengths, SCC by SCC (cycles never leave an SCC).
  std::vector<int> scc(c, -1);
  int scc_count = 0;
  {
    // Kosaraju on <= ~40 states.
    std::vector<char> seen(c, 0);
    std::vector<int> order;
    std::function<void(int)> dfs1 = [&](int u) {
      seen[u] = 1;
      for (int v = 0; v < c; ++v) {
        if (t.at(u, v) > 0.0 && !seen[v]) dfs1(v);
      }
      order.push_back(u);
    };
    for (int u = 0; u < c; ++u) {
      if (!seen[u]) dfs1(u);
    }
    std::function<void(int, int)> dfs2 = [&](int u, int id) {
      scc[u] = id;
      for (int v = 0; v < c; ++v) {
        if (t.at(v, u) > 0.0 && scc[v] < 0) dfs2(v, id);
      }
    };
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (scc[*it] < 0) dfs2(*it, scc_count++);
    }
  }

  std::int64_t overall = 0;
  for (int comp = 0; comp < scc_count; ++comp) {
    int root = -1;
    for (int u = 0; u < c; ++u) {
      if (scc[u] == comp) {
        root = u;
        break;
      }
    }
    // BFS levels inside the SCC; every internal edge contributes
    // gcd(level(u) + 1 - level(v)).
    std::vector<int> level(c, -1);
    level[root] = 0;
    std::vector<int> queue{root};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const int u = queue[qi];
      for (int v = 0; v < c; ++v) {
        if (t.at(u, v) > 0.0 && scc[v] == comp && level[v] < 0) {
          level[v] = level[u] + 1;
          queue.push_back(v);
        }
      }
    }
    std::int64_t g = 0;
    for (int u = 0; u < c; ++u) {
      if (scc[u] != comp) continue;
      for (int v = 0; v < c; ++v) {
        if (t.at(u, v) > 0.0 && scc[v] == comp) {
          g = std::gcd(g, static_cast<std::int64_t>(level[u] + 1 - level[v]));
        }
      }
    }
    if (g != 0) overall = std::gcd(overall, g);
  }
  props.aperiodic = overall == 1;
  return props;
}

WalkSimResult monte_carlo_lc(const LabeledGraph& g, LabelId start_label, int max_k,
                             std::int64_t walks, std::uint64_t seed,
                             WalkStartMode start_mode, WalkSemantics semantics,
                             int threads) {
  if (walks < 1) throw std::invalid_argument("monte_carlo_lc: walks must be >= 1");
  if (max_k < 0) throw std::invalid_argument("monte_carlo_lc: max_k must be >= 0");
  const ComponentInfo comps = connected_components(g);
  if (comps.count != 1) {
    throw std::runtime_error("monte_carlo_lc: graph is disconnected");
  }

  const int c = g.num_labels();
  // Per-class degree-weighted samplers.
  std::vector<std::vector<NodeId>> class_nodes(c);
  std::vector<std::vector<std::int64_t>> class_prefix(c);
  std::vector<std::int64_t> class_total(c, 0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const LabelId l = g.label(u);
    class_nodes[l].push_back(u);
    class_total[l] += g.degree(u);
    class_prefix[l].push_back(class_total[l]);
  }
  if (start_label < 0 || start_label >= c || class_nodes[start_label].empty()) {
    throw std::runtime_error("monte_carlo_lc: no nodes with label " +
                             std::to_string(start_label));
  }
  for (int l = 0; l < c; ++l) {
    if (!class_nodes[l].empty() && class_total[l] == 0) {
      throw std::runtime_error("monte_carlo_lc: label class " + std::to_string(l) +
                               " has zero total degree");
    }
  }

  const int rows = max_k + 1;

  auto degree_weighted_pick = [&](LabelId l, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int64_t> pick(0, class_total[l] - 1);
    const auto& prefix = class_prefix[l];
    const auto it = std::upper_bound(prefix.begin(), prefix.end(), pick(rng));
    return class_nodes[l][static_cast<std::size_t>(it - prefix.begin())];
  };

  // Fixed chunk decomposition (independent of thread count); integer counts
  // reduced in chunk order, so any worker count yields identical output.
  const int chunks = static_cast<int>(std::min<std::int64_t>(walks, 64));
  std::vector<std::vector<std::int64_t>> chunk_counts(
      chunks, std::vector<std::int64_t>(static_cast<std::size_t>(rows) * c, 0));
  const std::int64_t per_chunk = (walks + chunks - 1) / chunks;

  parallel_for(chunks, resolve_threads(threads), [&](std::int64_t ci) {
    auto& counts = chunk_counts[ci];
    const std::int64_t lo = ci * per_chunk;
    const std::int64_t hi = std::min(walks, lo + per_chunk);
    for (std::int64_t w = lo; w < hi; ++w) {
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(w))));
      NodeId cur;
      if (start_mode == WalkStartMode::DegreeWeighted) {
        cur = degree_weighted_pick(start_label, rng);
      } else {
        const auto& nodes = class_nodes[start_label];
        std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
        cur = nodes[pick(rng)];
      }
      ++counts[static_cast<std::size_t>(0) * c + g.label(cur)];
      for (int k = 1; k <= max_k; ++k) {
        if (semantics == WalkSemantics::LabelChain && k > 1) {
          // The label chain forgets the node: re-enter the current class
          // degree-weighted before stepping.
          cur = degree_weighted_pick(g.label(cur), rng);
        }
        const auto ns = g.neighbors(cur);
        std::uniform_int_distribution<int> step(0, static_cast<int>(ns.size()) - 1);
        cur = ns[step(rng)];
        ++counts[static_cast<std::size_t>(k) * c + g.label(cur)];
      }
    }
  });

  WalkSimResult result;
  result.max_k = max_k;
  result.c = c;
  result.walks = walks;
  result.seed = seed;
  result.p_hat.assign(static_cast<std::size_t>(rows) * c, 0.0);
  for (int ci = 0; ci < chunks; ++ci) {
    for (std::size_t idx = 0; idx < result.p_hat.size(); ++idx) {
      result.p_hat[idx] += static_cast<double>(chunk_counts[ci][idx]);
    }
  }
  for (double& v : result.p_hat) v /= static_cast<double>(walks);
  return result;
}

}  // namespace relgraph
