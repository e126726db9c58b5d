#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "relgraph/graph.hpp"

namespace relgraph {

/// Second-largest-modulus eigenvalue summary.
struct Lambda2 {
  double modulus = 0.0;
  double real = 0.0;  // real part; decay-sign analysis only applies when !is_complex
  bool is_complex = false;
};

/// Label-level random-walk transition matrix with its stationary
/// distribution and eigen-summary. T is c x c row-stochastic; entry (i, j)
/// is the degree-weighted probability that a walker standing on a label-i
/// node steps to a label-j node.
struct LabelTransition {
  int c = 0;
  std::vector<double> t;   // row-major c x c
  std::vector<double> pi;  // stationary distribution, sums to 1
  std::vector<std::complex<double>> eigvals;  // sorted by modulus descending
  std::optional<Lambda2> lambda2;             // absent when c == 1

  double at(int i, int j) const { return t[static_cast<std::size_t>(i) * c + j]; }
};

/// Per-step return-probability curve for one starting label, with the
/// fitted exponential envelope |lc_prob[k] - pi_target| <= C * lambda^k.
struct DecayReport {
  LabelId start_label = 0;
  std::vector<double> lc_prob;  // index k = 0..max_k; lc_prob[0] == 1 exactly
  double pi_target = 0.0;
  double bound_c = 0.0;       // empirical fit, never a theoretical constant
  double bound_lambda = 0.0;  // |lambda2|, 0 when c == 1
};

struct MarkovProperties {
  bool row_stochastic = false;
  bool irreducible = false;
  bool aperiodic = false;
};

enum class WalkStartMode {
  DegreeWeighted,  // matches the label-level aggregation weighting
  Uniform,         // exploration only
};

enum class WalkSemantics {
  // Simulates the label-level chain: every step re-samples a node within the
  // walker's current label class (degree-weighted, matching the aggregation)
  // before taking one node-level step. Unbiased estimator of (T^k)_{ij}.
  LabelChain,
  // Plain node-level walk. The label sequence it induces is generally NOT
  // Markov (lumping is exact only for structured graphs), so its k-step
  // label distribution can deviate from T^k; exploration only.
  NodeWalk,
};

struct WalkSimResult {
  int max_k = 0;
  int c = 0;
  std::vector<double> p_hat;  // (max_k + 1) x c row-major; row k = empirical p_k(.|i)
  std::int64_t walks = 0;
  std::uint64_t seed = 0;

  double at(int k, int j) const { return p_hat[static_cast<std::size_t>(k) * c + j]; }
};

/// Aggregates node-level transitions into the label transition matrix:
/// T_ij = sum of adjacency between class i and class j over the total
/// degree of class i. pi comes from the closed-form degree fractions and is
/// verified as a left fixed point of T.
/// Throws on disconnected graphs (message names the components) and on a
/// label class with zero total degree.
LabelTransition build_transition(const LabeledGraph& g);

/// Wraps an explicit row-stochastic matrix (for constructed models); pi is
/// recovered as the left eigenvector of the eigenvalue nearest 1 and is
/// only meaningful when the chain is irreducible.
LabelTransition transition_from_matrix(const std::vector<double>& t, int c);

/// Prop.-1 family: homophilic [[p, 1-p], [1-p, p]] (eigenvalues {1, 2p-1})
/// or heterophilic [[1-p, p], [p, 1-p]] (eigenvalues {1, 1-2p}); pi is
/// [0.5, 0.5] either way. Requires 0 < p < 1.
enum class TwoLabelOrientation { Homophilic, Heterophilic };
LabelTransition two_label_model(double p, TwoLabelOrientation orientation);

/// lc_prob[k] = (T^k)_{ii} via repeated matrix multiply.
DecayReport lc_prob(const LabelTransition& t, LabelId label, int max_k);

/// Row sums checked to 1e-12; irreducibility via strong connectivity of the
/// support digraph; aperiodicity via positive diagonal or the gcd of cycle
/// lengths.
MarkovProperties markov_properties(const LabelTransition& t);

/// Monte-Carlo check on the label-level aggregation. Walkers start on label
/// start_label (degree-weighted by default); each step follows the
/// node-level kernel (uniform over stored neighbors). Result is identical
/// for any worker count given the same seed.
WalkSimResult monte_carlo_lc(const LabeledGraph& g, LabelId start_label, int max_k,
                             std::int64_t walks, std::uint64_t seed,
                             WalkStartMode start_mode = WalkStartMode::DegreeWeighted,
                             WalkSemantics semantics = WalkSemantics::LabelChain,
                             int threads = 0);

/// Dense power of the transition matrix (row-major c x c).
std::vector<double> transition_power(const LabelTransition& t, int k);

}  // namespace relgraph
