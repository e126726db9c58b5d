#include "relgraph/synthgen.hpp"

#include <numeric>
#include <random>
#include <stdexcept>

namespace relgraph {

int SbmSpec::num_nodes() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), 0);
}

void SbmSpec::validate() const {
  if (block_sizes.empty()) throw std::invalid_argument("SbmSpec: no blocks");
  for (int s : block_sizes) {
    if (s < 1) throw std::invalid_argument("SbmSpec: block sizes must be >= 1");
  }
  if (p_intra < 0.0 || p_intra > 1.0 || p_inter < 0.0 || p_inter > 1.0) {
    throw std::invalid_argument("SbmSpec: probabilities must lie in [0, 1]");
  }
  if (retry_cap < 1) throw std::invalid_argument("SbmSpec: retry_cap must be >= 1");
}

SbmSpec homophilic_default(std::uint64_t seed) {
  SbmSpec spec;
  spec.block_sizes = {200, 200};
  spec.p_intra = 0.05;
  spec.p_inter = 0.005;
  spec.seed = seed;
  spec.ensure_connected = true;
  spec.add_self_loops = true;
  return spec;
}

SbmSpec heterophilic_default(std::uint64_t seed) {
  SbmSpec spec = homophilic_default(seed);
  std::swap(spec.p_intra, spec.p_inter);
  return spec;
}

namespace {

std::vector<LabelId> block_labels(const SbmSpec& spec) {
  std::vector<LabelId> labels;
  labels.reserve(spec.num_nodes());
  for (int b = 0; b < spec.num_blocks(); ++b) {
    labels.insert(labels.end(), spec.block_sizes[b], b);
  }
  return labels;
}

EdgeList sample_edges(const SbmSpec& spec, const std::vector<LabelId>& labels,
                      std::mt19937_64& rng) {
  const int n = spec.num_nodes();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EdgeList edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? spec.p_intra : spec.p_inter;
      if (unit(rng) < p) edges.emplace_back(u, v);
    }
  }
  return edges;
}

bool is_connected(const EdgeList& edges, const std::vector<LabelId>& labels) {
  const LabeledGraph g = build_graph(edges, labels, std::nullopt, false);
  return connected_components(g).count == 1;
}

void augment_intra_block_chains(const SbmSpec& spec, EdgeList& edges) {
  int base = 0;
  for (int b = 0; b < spec.num_blocks(); ++b) {
    for (int i = 1; i < spec.block_sizes[b]; ++i) {
      edges.emplace_back(base + i - 1, base + i);
    }
    base += spec.block_sizes[b];
  }
}

}  // namespace

LabeledGraph generate_sbm(const SbmSpec& spec) {
  spec.validate();
  const std::vector<LabelId> labels = block_labels(spec);
  std::mt19937_64 rng(spec.seed);

  EdgeList edges = sample_edges(spec, labels, rng);
  if (spec.ensure_connected) {
    int attempt = 1;
    while (!is_connected(edges, labels) && attempt < spec.retry_cap) {
      edges = sample_edges(spec, labels, rng);
      ++attempt;
    }
    if (!is_connected(edges, labels)) {
      if (!spec.allow_augmentation) {
        throw std::runtime_error("generate_sbm: still disconnected after " +
                                 std::to_string(spec.retry_cap) +
                                 " attempts and augmentation is disabled");
      }
      augment_intra_block_chains(spec, edges);
      if (!is_connected(edges, labels)) {
        throw std::runtime_error(
            "generate_sbm: intra-block augmentation cannot connect the blocks "
            "(no cross-block edges were sampled)");
      }
    }
  }
  return build_graph(edges, labels, std::nullopt, spec.add_self_loops);
}

std::vector<double> expected_transition(const SbmSpec& spec) {
  spec.validate();
  const int c = spec.num_blocks();
  const double self_mass = spec.add_self_loops ? 1.0 : 0.0;
  std::vector<double> t(static_cast<std::size_t>(c) * c, 0.0);
  for (int i = 0; i < c; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < c; ++j) {
      const double mass = i == j
                              ? spec.p_intra * (spec.block_sizes[i] - 1) + self_mass
                              : spec.p_inter * spec.block_sizes[j];
      t[static_cast<std::size_t>(i) * c + j] = mass;
      row_sum += mass;
    }
    if (row_sum <= 0.0) {
      throw std::runtime_error("expected_transition: block " + std::to_string(i) +
                               " has zero expected degree");
    }
    for (int j = 0; j < c; ++j) t[static_cast<std::size_t>(i) * c + j] /= row_sum;
  }
  return t;
}

std::vector<double> generate_label_features(const std::vector<LabelId>& labels,
                                            int dim, double mean_scale,
                                            std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("generate_label_features: dim must be >= 1");
  int c = 0;
  for (LabelId l : labels) c = std::max(c, l + 1);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> means(static_cast<std::size_t>(c) * dim);
  for (double& m : means) m = mean_scale * gauss(rng);

  std::vector<double> rows(labels.size() * static_cast<std::size_t>(dim));
  for (std::size_t u = 0; u < labels.size(); ++u) {
    const double* mu = means.data() + static_cast<std::size_t>(labels[u]) * dim;
    double* row = rows.data() + u * dim;
    for (int j = 0; j < dim; ++j) row[j] = mu[j] + gauss(rng);
  }
  return rows;
}

}  // namespace relgraph
