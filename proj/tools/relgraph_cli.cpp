// relgraph: label-consistency decay analysis and relative-similarity
// contrastive training on labeled graphs. CSV is the canonical output
// format; SVG charts are a convenience.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "relgraph/dataio.hpp"
#include "relgraph/evalsuite.hpp"
#include "relgraph/graph.hpp"
#include "relgraph/labelstats.hpp"
#include "relgraph/manifest.hpp"
#include "relgraph/markov.hpp"
#include "relgraph/parallel.hpp"
#include "relgraph/relloss.hpp"
#include "relgraph/svgplot.hpp"
#include "relgraph/synthgen.hpp"
#include "relgraph/trainer.hpp"

namespace rg = relgraph;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_ = clock::now();
};

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw std::runtime_error(std::string(what) + ": bad integer '" + tok + "'");
    }
  }
  if (out.empty()) throw std::runtime_error(std::string(what) + ": empty list");
  return out;
}

struct GraphArgs {
  std::string graph_path;
  std::string labels_path;
  std::string features_path;
  std::string split_path;
  bool self_loops = false;

  void attach(CLI::App* cmd, bool with_features = false, bool with_splits = false) {
    cmd->add_option("--graph", graph_path, "edge-list file")->required();
    cmd->add_option("--labels", labels_path, "per-node label file")->required();
    if (with_features) cmd->add_option("--features", features_path, "feature file");
    if (with_splits) cmd->add_option("--splits", split_path, "split file");
  }

  rg::LoadedDataset load() const {
    return rg::load_bundle({graph_path, labels_path, features_path, split_path},
                           self_loops);
  }

  std::vector<std::string> inputs() const {
    std::vector<std::string> in{graph_path, labels_path};
    if (!features_path.empty()) in.push_back(features_path);
    if (!split_path.empty()) in.push_back(split_path);
    return in;
  }
};

std::string manifest_path(const std::string& next_to) {
  return next_to + ".manifest.json";
}

void finish_manifest(rg::RunManifest m, const Stopwatch& watch) {
  m.duration_seconds = watch.seconds();
  if (m.outputs.empty()) return;  // nothing written, nothing to describe
  rg::write_manifest(m, manifest_path(m.outputs.front()));
}

// ---------------------------------------------------------------- gen-sbm

int run_gen_sbm(const std::string& sizes_csv, double p_intra, double p_inter,
                std::uint64_t seed, bool ensure_connected, bool self_loops,
                int feature_dim, double feature_scale, const std::string& split_csv,
                const std::string& out_prefix) {
  Stopwatch watch;
  rg::SbmSpec spec;
  spec.block_sizes = parse_int_list(sizes_csv, "--sizes");
  spec.p_intra = p_intra;
  spec.p_inter = p_inter;
  spec.seed = seed;
  spec.ensure_connected = ensure_connected;
  spec.add_self_loops = self_loops;
  const rg::LabeledGraph g = rg::generate_sbm(spec);

  rg::RunManifest m;
  m.subcommand = "gen-sbm";
  m.seed = seed;
  m.seeded = true;
  m.config = {{"sizes", sizes_csv},
              {"p_intra", std::to_string(p_intra)},
              {"p_inter", std::to_string(p_inter)},
              {"ensure_connected", ensure_connected ? "true" : "false"},
              {"self_loops", self_loops ? "true" : "false"}};

  rg::write_edge_list(g, out_prefix + ".edges", /*include_loops=*/self_loops);
  rg::write_labels(g.labels(), out_prefix + ".labels");
  m.outputs = {out_prefix + ".edges", out_prefix + ".labels"};

  if (feature_dim > 0) {
    const auto rows =
        rg::generate_label_features(g.labels(), feature_dim, feature_scale, seed + 1);
    rg::write_features(rows, g.num_nodes(), feature_dim, out_prefix + ".features");
    m.outputs.push_back(out_prefix + ".features");
    m.config["feature_dim"] = std::to_string(feature_dim);
    m.config["feature_scale"] = std::to_string(feature_scale);
  }

  if (!split_csv.empty()) {
    std::stringstream ss(split_csv);
    std::string tok;
    std::vector<double> fracs;
    while (std::getline(ss, tok, ',')) fracs.push_back(std::stod(tok));
    if (fracs.size() != 3) {
      throw std::runtime_error("--split-fractions wants three comma-separated values");
    }
    std::vector<rg::NodeId> order(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) order[i] = i;
    std::mt19937_64 rng(seed + 2);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(fracs[0] * g.num_nodes());
    const auto n_valid = static_cast<std::size_t>(fracs[1] * g.num_nodes());
    std::ofstream out(out_prefix + ".splits");
    if (!out) throw std::runtime_error("cannot open " + out_prefix + ".splits");
    for (std::size_t i = 0; i < order.size(); ++i) {
      const char* name = i < n_train             ? "train"
                         : i < n_train + n_valid ? "valid"
                                                 : "test";
      out << name << ' ' << order[i] << '\n';
    }
    m.outputs.push_back(out_prefix + ".splits");
    m.config["split_fractions"] = split_csv;
  }

  std::cout << "wrote " << out_prefix << ".{edges,labels"
            << (feature_dim > 0 ? ",features" : "")
            << (!split_csv.empty() ? ",splits" : "") << "}: " << g.num_nodes()
            << " nodes, " << g.num_edges() << " edges\n";
  finish_manifest(std::move(m), watch);
  return 0;
}

// --------------------------------------------------------------------- lc

int run_lc(const GraphArgs& args, int k, const std::string& out_csv,
           const std::string& out_svg, int threads) {
  Stopwatch watch;
  const rg::LabeledGraph g = args.load().graph;
  const rg::DecayCurve curve = rg::lc_emp(g, k, threads);

  std::vector<rg::CsvColumn> cols(3);
  cols[0].name = "hop";
  cols[1].name = "lc_emp";
  cols[2].name = "anchors";
  for (std::size_t i = 0; i < curve.hops.size(); ++i) {
    cols[0].values.push_back(curve.hops[i]);
    cols[1].values.push_back(curve.lc_values[i]);
    cols[2].values.push_back(curve.per_node_counts[i]);
  }
  rg::write_csv_report(cols, out_csv);

  rg::RunManifest m;
  m.subcommand = "lc";
  m.inputs = args.inputs();
  m.outputs = {out_csv};
  m.config = {{"k", std::to_string(k)}};

  if (!out_svg.empty()) {
    rg::SvgSeries series{"LC_emp", {}, {}};
    for (std::size_t i = 0; i < curve.hops.size(); ++i) {
      series.x.push_back(curve.hops[i]);
      series.y.push_back(curve.lc_values[i]);
    }
    rg::write_svg_line_chart(out_svg, "Empirical label consistency by hop", "hop",
                             "LC_emp", {series});
    m.outputs.push_back(out_svg);
  }
  std::cout << "LC_emp(1) = " << curve.lc_values.front() << " over "
            << curve.per_node_counts.front() << " anchors\n";
  finish_manifest(std::move(m), watch);
  return 0;
}

// ------------------------------------------------------- transition et al

int run_transition(const GraphArgs& args, const std::string& out_csv) {
  Stopwatch watch;
  const rg::LabelTransition t = rg::build_transition(args.load().graph);
  std::vector<rg::CsvColumn> cols;
  cols.push_back({"label", {}});
  for (int j = 0; j < t.c; ++j) cols.push_back({"t_" + std::to_string(j), {}});
  cols.push_back({"pi", {}});
  for (int i = 0; i < t.c; ++i) {
    cols[0].values.push_back(i);
    for (int j = 0; j < t.c; ++j) cols[1 + j].values.push_back(t.at(i, j));
    cols.back().values.push_back(t.pi[i]);
  }
  rg::write_csv_report(cols, out_csv);

  std::cout << "labels: " << t.c;
  if (t.lambda2) {
    std::cout << ", lambda2 = " << t.lambda2->real
              << (t.lambda2->is_complex ? " (complex, real part shown)" : "")
              << ", |lambda2| = " << t.lambda2->modulus;
  }
  std::cout << '\n';

  rg::RunManifest m;
  m.subcommand = "transition";
  m.inputs = args.inputs();
  m.outputs = {out_csv};
  finish_manifest(std::move(m), watch);
  return 0;
}

int run_spectrum(const GraphArgs& args, const std::string& out_csv) {
  Stopwatch watch;
  const rg::LabelTransition t = rg::build_transition(args.load().graph);
  std::vector<rg::CsvColumn> cols{{"rank", {}},
                                  {"modulus", {}},
                                  {"real", {}},
                                  {"imag", {}},
                                  {"is_complex", {}}};
  for (std::size_t i = 0; i < t.eigvals.size(); ++i) {
    cols[0].values.push_back(static_cast<double>(i));
    cols[1].values.push_back(std::abs(t.eigvals[i]));
    cols[2].values.push_back(t.eigvals[i].real());
    cols[3].values.push_back(t.eigvals[i].imag());
    cols[4].values.push_back(std::abs(t.eigvals[i].imag()) > 1e-12 ? 1.0 : 0.0);
  }
  rg::write_csv_report(cols, out_csv);
  std::cout << "eigenvalue moduli:";
  for (const auto& ev : t.eigvals) std::cout << ' ' << std::abs(ev);
  std::cout << '\n';

  rg::RunManifest m;
  m.subcommand = "spectrum";
  m.inputs = args.inputs();
  m.outputs = {out_csv};
  finish_manifest(std::move(m), watch);
  return 0;
}

int run_decay(const GraphArgs& args, int max_k, const std::string& out_csv,
              const std::string& out_svg) {
  Stopwatch watch;
  const rg::LabelTransition t = rg::build_transition(args.load().graph);

  std::vector<rg::CsvColumn> cols;
  cols.push_back({"k", {}});
  std::vector<rg::DecayReport> reports;
  for (int i = 0; i < t.c; ++i) {
    reports.push_back(rg::lc_prob(t, i, max_k));
    cols.push_back({"lc_prob_" + std::to_string(i), {}});
  }
  for (int k = 0; k <= max_k; ++k) {
    cols[0].values.push_back(k);
    for (int i = 0; i < t.c; ++i) cols[1 + i].values.push_back(reports[i].lc_prob[k]);
  }
  rg::write_csv_report(cols, out_csv);

  for (int i = 0; i < t.c; ++i) {
    std::cout << "label " << i << ": pi = " << reports[i].pi_target
              << ", fitted C = " << reports[i].bound_c
              << ", lambda = " << reports[i].bound_lambda << '\n';
  }

  rg::RunManifest m;
  m.subcommand = "decay";
  m.inputs = args.inputs();
  m.outputs = {out_csv};
  m.config = {{"max_k", std::to_string(max_k)}};
  if (!out_svg.empty()) {
    std::vector<rg::SvgSeries> series;
    for (int i = 0; i < t.c; ++i) {
      rg::SvgSeries s{"label " + std::to_string(i), {}, {}};
      for (int k = 0; k <= max_k; ++k) {
        s.x.push_back(k);
        s.y.push_back(reports[i].lc_prob[k]);
      }
      series.push_back(std::move(s));
    }
    rg::write_svg_line_chart(out_svg, "Label-consistency decay", "k", "LC_prob",
                             series);
    m.outputs.push_back(out_svg);
  }
  finish_manifest(std::move(m), watch);
  return 0;
}

int run_walk_sim(const GraphArgs& args, int start_label, int max_k,
                 std::int64_t walks, std::uint64_t seed, bool uniform_start,
                 bool node_walk, int threads, const std::string& out_csv) {
  Stopwatch watch;
  const rg::LabeledGraph g = args.load().graph;
  const rg::LabelTransition t = rg::build_transition(g);
  const rg::WalkSimResult sim = rg::monte_carlo_lc(
      g, start_label, max_k, walks, seed,
      uniform_start ? rg::WalkStartMode::Uniform : rg::WalkStartMode::DegreeWeighted,
      node_walk ? rg::WalkSemantics::NodeWalk : rg::WalkSemantics::LabelChain,
      threads);

  std::vector<rg::CsvColumn> cols;
  cols.push_back({"k", {}});
  for (int j = 0; j < t.c; ++j) cols.push_back({"p_hat_" + std::to_string(j), {}});
  cols.push_back({"max_abs_dev_vs_power", {}});
  double overall = 0.0;
  for (int k = 0; k <= max_k; ++k) {
    cols[0].values.push_back(k);
    const auto power = rg::transition_power(t, k);
    double dev = 0.0;
    for (int j = 0; j < t.c; ++j) {
      cols[1 + j].values.push_back(sim.at(k, j));
      dev = std::max(dev,
                     std::abs(sim.at(k, j) -
                              power[static_cast<std::size_t>(start_label) * t.c + j]));
    }
    cols.back().values.push_back(dev);
    overall = std::max(overall, dev);
  }
  rg::write_csv_report(cols, out_csv);
  std::cout << "max |p_hat - T^k| over k <= " << max_k << ": " << overall << '\n';

  rg::RunManifest m;
  m.subcommand = "walk-sim";
  m.seed = seed;
  m.seeded = true;
  m.inputs = args.inputs();
  m.outputs = {out_csv};
  m.config = {{"start_label", std::to_string(start_label)},
              {"max_k", std::to_string(max_k)},
              {"walks", std::to_string(walks)},
              {"uniform_start", uniform_start ? "true" : "false"},
              {"node_walk", node_walk ? "true" : "false"}};
  finish_manifest(std::move(m), watch);
  return 0;
}

// ------------------------------------------------------------------ train

rg::TrainConfig train_config_from_map(const std::map<std::string, std::string>& kv) {
  rg::TrainConfig cfg;
  auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("epochs")) cfg.epochs = std::stoi(*v);
  if (auto v = get("lr")) cfg.adam.lr = std::stod(*v);
  if (auto v = get("weight_decay")) cfg.adam.weight_decay = std::stod(*v);
  if (auto v = get("beta1")) cfg.adam.beta1 = std::stod(*v);
  if (auto v = get("beta2")) cfg.adam.beta2 = std::stod(*v);
  if (auto v = get("adam_eps")) cfg.adam.eps = std::stod(*v);
  if (auto v = get("decoupled_weight_decay")) cfg.adam.decoupled = *v == "true";
  if (auto v = get("variant")) cfg.loss.variant = rg::loss_variant_from_string(*v);
  if (auto v = get("k")) cfg.loss.k = std::stoi(*v);
  if (auto v = get("alpha")) cfg.loss.alpha = std::stod(*v);
  if (auto v = get("beyond_sample")) cfg.loss.beyond_sample = std::stoi(*v);
  if (auto v = get("threads")) cfg.loss.threads = std::stoi(*v);
  if (auto v = get("embed_dim")) cfg.encoder.embed_dim = std::stoi(*v);
  if (auto v = get("layers")) cfg.encoder.layers = std::stoi(*v);
  if (auto v = get("activation")) {
    cfg.encoder.activation = rg::activation_from_string(*v);
  }
  if (auto v = get("tau_base")) cfg.encoder.tau_base = std::stod(*v);
  if (auto v = get("tau_spacing")) cfg.encoder.tau_spacing = std::stod(*v);
  if (auto v = get("seed")) {
    cfg.seed = std::stoull(*v);
    cfg.loss.seed = cfg.seed;
  }
  if (auto v = get("checkpoint_every")) cfg.checkpoint_every = std::stoi(*v);
  if (auto v = get("anchor_batch")) cfg.anchor_batch = std::stoi(*v);

  static const std::set<std::string> known{
      "epochs",    "lr",        "weight_decay", "beta1",       "beta2",
      "adam_eps",  "decoupled_weight_decay",    "variant",     "k",
      "alpha",     "beyond_sample",             "threads",     "embed_dim",
      "layers",    "activation",                "tau_base",    "tau_spacing",
      "seed",      "checkpoint_every",          "anchor_batch"};
  for (const auto& [key, value] : kv) {
    if (!known.count(key)) throw std::runtime_error("unknown config key '" + key + "'");
  }
  return cfg;
}

int run_train(const GraphArgs& args, const std::string& config_path,
              std::optional<int> epochs, std::optional<std::uint64_t> seed,
              std::optional<std::string> variant, std::optional<double> alpha,
              std::optional<int> k, const std::string& resume_path,
              const std::string& out_prefix, int threads) {
  Stopwatch watch;
  std::map<std::string, std::string> kv;
  if (!config_path.empty()) kv = rg::read_key_value_config(config_path);
  if (!seed.has_value() && !kv.count("seed")) {
    throw std::runtime_error("train is stochastic: pass --seed or a seed= config key");
  }
  rg::TrainConfig cfg = train_config_from_map(kv);
  if (epochs) cfg.epochs = *epochs;
  if (seed) {
    cfg.seed = *seed;
    cfg.loss.seed = *seed;
  }
  if (variant) cfg.loss.variant = rg::loss_variant_from_string(*variant);
  if (alpha) cfg.loss.alpha = *alpha;
  if (k) cfg.loss.k = *k;
  if (threads > 0) cfg.loss.threads = threads;
  cfg.log_path = out_prefix + ".loss.csv";
  if (cfg.checkpoint_every > 0) cfg.checkpoint_prefix = out_prefix;

  const rg::LoadedDataset ds = args.load();
  rg::TrainResult result;
  if (resume_path.empty()) {
    result = rg::train(ds.graph, cfg);
  } else {
    result =
        rg::train_resume(ds.graph, cfg, rg::load_checkpoint(resume_path, ds.graph));
  }
  rg::save_checkpoint(out_prefix + ".ckpt", result.state, cfg.epochs);

  std::cout << "trained " << result.history.size() << " epochs ("
            << rg::loss_variant_name(cfg.loss.variant) << "): loss "
            << result.history.front().loss << " -> " << result.history.back().loss
            << ", clamp fraction " << result.history.back().clamp_fraction << '\n';

  rg::RunManifest m;
  m.subcommand = "train";
  m.seed = cfg.seed;
  m.seeded = true;
  m.inputs = args.inputs();
  if (!config_path.empty()) m.inputs.push_back(config_path);
  if (!resume_path.empty()) m.inputs.push_back(resume_path);
  m.outputs = {out_prefix + ".ckpt", out_prefix + ".loss.csv"};
  m.config = {{"epochs", std::to_string(cfg.epochs)},
              {"lr", std::to_string(cfg.adam.lr)},
              {"variant", rg::loss_variant_name(cfg.loss.variant)},
              {"k", std::to_string(cfg.loss.k)},
              {"alpha", std::to_string(cfg.loss.alpha)},
              {"embed_dim", std::to_string(cfg.encoder.embed_dim)},
              {"layers", std::to_string(cfg.encoder.layers)},
              {"activation", rg::activation_name(cfg.encoder.activation)},
              {"tau_base", std::to_string(cfg.encoder.tau_base)},
              {"tau_spacing", std::to_string(cfg.encoder.tau_spacing)}};
  finish_manifest(std::move(m), watch);
  return 0;
}

int run_embed(const GraphArgs& args, const std::string& checkpoint,
              const std::string& out_path) {
  Stopwatch watch;
  const rg::LoadedDataset ds = args.load();
  const rg::Checkpoint ckpt = rg::load_checkpoint(checkpoint, ds.graph);
  const rg::Matrix h = rg::embed(ckpt.state, ds.graph);
  rg::write_embeddings(h, out_path);
  std::cout << "wrote " << h.rows << "x" << h.cols << " embeddings\n";

  rg::RunManifest m;
  m.subcommand = "embed";
  m.inputs = args.inputs();
  m.inputs.push_back(checkpoint);
  m.outputs = {out_path};
  finish_manifest(std::move(m), watch);
  return 0;
}

int run_eval(const std::string& embeddings_path, const std::string& labels_path,
             const std::string& splits_path, std::uint64_t seed,
             const std::string& out_csv) {
  Stopwatch watch;
  const rg::Matrix h = rg::read_embeddings(embeddings_path);
  const std::vector<rg::LabelId> labels = rg::read_labels(labels_path);
  if (static_cast<int>(labels.size()) != h.rows) {
    throw std::runtime_error("embeddings have " + std::to_string(h.rows) +
                             " rows but labels file has " +
                             std::to_string(labels.size()));
  }
  rg::Splits splits;
  if (!splits_path.empty()) splits = rg::read_splits(splits_path, h.rows);
  const rg::EvalReport report = rg::evaluate(h, labels, splits, seed);

  rg::write_csv_report({{"accuracy", {report.accuracy.value_or(std::nan(""))}},
                        {"nmi", {report.nmi}},
                        {"sim_at_5", {report.sim_at_5}}},
                       out_csv);
  std::cout << "accuracy = "
            << (report.accuracy ? std::to_string(*report.accuracy)
                                : std::string("n/a (no splits)"))
            << ", nmi = " << report.nmi << ", sim@5 = " << report.sim_at_5 << '\n';

  rg::RunManifest m;
  m.subcommand = "eval";
  m.seed = seed;
  m.seeded = true;
  m.inputs = {embeddings_path, labels_path};
  if (!splits_path.empty()) m.inputs.push_back(splits_path);
  m.outputs = {out_csv};
  finish_manifest(std::move(m), watch);
  return 0;
}

int run_embed_sim(const GraphArgs& args, const std::string& embeddings_path, int k,
                  const std::string& out_csv, const std::string& out_svg) {
  Stopwatch watch;
  const rg::LabeledGraph g = args.load().graph;
  const rg::Matrix h = rg::read_embeddings(embeddings_path);
  const rg::HopSimilarity hs = rg::hop_similarity(h, g, k);

  std::vector<rg::CsvColumn> cols{{"hop", {}},    {"mean", {}}, {"q1", {}},
                                  {"median", {}}, {"q3", {}},   {"min", {}},
                                  {"max", {}},    {"pairs", {}}};
  for (std::size_t i = 0; i < hs.hops.size(); ++i) {
    cols[0].values.push_back(hs.hops[i]);
    cols[1].values.push_back(hs.mean[i]);
    cols[2].values.push_back(hs.q1[i]);
    cols[3].values.push_back(hs.median[i]);
    cols[4].values.push_back(hs.q3[i]);
    cols[5].values.push_back(hs.min[i]);
    cols[6].values.push_back(hs.max[i]);
    cols[7].values.push_back(static_cast<double>(hs.pair_counts[i]));
  }
  rg::write_csv_report(cols, out_csv);

  rg::RunManifest m;
  m.subcommand = "embed-sim";
  m.inputs = args.inputs();
  m.inputs.push_back(embeddings_path);
  m.outputs = {out_csv};
  if (!out_svg.empty()) {
    std::vector<rg::SvgBox> boxes;
    for (std::size_t i = 0; i < hs.hops.size(); ++i) {
      if (hs.pair_counts[i] == 0) continue;
      const std::string name = hs.hops[i] == k + 1
                                   ? ">" + std::to_string(k)
                                   : "hop " + std::to_string(hs.hops[i]);
      boxes.push_back({name, hs.min[i], hs.q1[i], hs.median[i], hs.q3[i], hs.max[i]});
    }
    rg::write_svg_box_chart(out_svg, "Embedding similarity by hop distance", "cosine",
                            boxes);
    m.outputs.push_back(out_svg);
  }
  std::cout << "hop-1 mean cosine = " << hs.mean.front()
            << ", beyond mean = " << hs.mean.back() << '\n';
  finish_manifest(std::move(m), watch);
  return 0;
}

int run_count_ops(int k, const std::string& sizes_csv, const std::string& variant,
                  bool cached) {
  const std::vector<int> sizes = parse_int_list(sizes_csv, "--hop-sizes");
  const std::vector<std::int64_t> hop_sizes(sizes.begin(), sizes.end());
  const rg::SimOpCount count =
      rg::count_sim_ops(rg::loss_variant_from_string(variant), k, hop_sizes);
  std::cout << (cached ? count.cached : count.uncached) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"label-consistency decay analysis and relative-similarity training"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads,
                 "worker cap (default: RELGRAPH_THREADS or hardware)");

  auto* gen = app.add_subcommand("gen-sbm", "generate a seeded SBM dataset bundle");
  std::string sizes = "200,200", split_fractions, out_prefix;
  double p_intra = 0.05, p_inter = 0.005, feature_scale = 3.0;
  std::uint64_t seed = 0;
  bool no_connect = false, no_loops = false;
  int feature_dim = 0;
  gen->add_option("--sizes", sizes, "comma-separated block sizes");
  gen->add_option("--p-intra", p_intra, "within-block edge probability");
  gen->add_option("--p-inter", p_inter, "cross-block edge probability");
  gen->add_option("--seed", seed, "generator seed")->required();
  gen->add_flag("--no-ensure-connected", no_connect, "skip connectivity handling");
  gen->add_flag("--no-self-loops", no_loops, "do not add self-loops");
  gen->add_option("--feature-dim", feature_dim,
                  "emit label-conditioned Gaussian features of this width");
  gen->add_option("--feature-scale", feature_scale, "class-mean scale");
  gen->add_option("--split-fractions", split_fractions,
                  "train,valid,test fractions (e.g. 0.1,0.1,0.8)");
  gen->add_option("--out", out_prefix, "output path prefix")->required();

  auto* lc = app.add_subcommand("lc", "empirical label-consistency curve");
  GraphArgs lc_args;
  int lc_k = 4;
  std::string lc_csv, lc_svg;
  lc_args.attach(lc);
  lc->add_option("--k", lc_k, "maximum hop");
  lc->add_option("--out", lc_csv, "CSV output")->required();
  lc->add_option("--svg", lc_svg, "optional SVG line chart");

  auto* tr = app.add_subcommand("transition", "label transition matrix and pi");
  GraphArgs tr_args;
  std::string tr_csv;
  bool tr_no_loops = false;
  tr_args.attach(tr);
  tr->add_flag("--no-self-loops", tr_no_loops, "do not force self-loops at load");
  tr->add_option("--out", tr_csv, "CSV output")->required();

  auto* sp = app.add_subcommand("spectrum", "eigenvalue table of T");
  GraphArgs sp_args;
  std::string sp_csv;
  bool sp_no_loops = false;
  sp_args.attach(sp);
  sp->add_flag("--no-self-loops", sp_no_loops, "do not force self-loops at load");
  sp->add_option("--out", sp_csv, "CSV output")->required();

  auto* de = app.add_subcommand("decay", "analytic LC_prob curves per label");
  GraphArgs de_args;
  std::string de_csv, de_svg;
  int de_max_k = 10;
  bool de_no_loops = false;
  de_args.attach(de);
  de->add_flag("--no-self-loops", de_no_loops, "do not force self-loops at load");
  de->add_option("--max-k", de_max_k, "largest step count");
  de->add_option("--out", de_csv, "CSV output")->required();
  de->add_option("--svg", de_svg, "optional SVG line chart");

  auto* ws = app.add_subcommand("walk-sim", "Monte-Carlo check of T^k");
  GraphArgs ws_args;
  std::string ws_csv;
  int ws_label = 0, ws_max_k = 6;
  std::int64_t ws_walks = 100000;
  std::uint64_t ws_seed = 0;
  bool ws_uniform = false, ws_node_walk = false, ws_no_loops = false;
  ws_args.attach(ws);
  ws->add_flag("--no-self-loops", ws_no_loops, "do not force self-loops at load");
  ws->add_option("--start-label", ws_label, "starting label class");
  ws->add_option("--max-k", ws_max_k, "largest step count");
  ws->add_option("--walks", ws_walks, "number of walkers");
  ws->add_option("--seed", ws_seed, "RNG seed")->required();
  ws->add_flag("--uniform-start", ws_uniform,
               "uniform instead of degree-weighted starts");
  ws->add_flag("--node-walk", ws_node_walk,
               "plain node-level walk (label sequence is generally non-Markov)");
  ws->add_option("--out", ws_csv, "CSV output")->required();

  auto* tn = app.add_subcommand("train", "self-supervised encoder training");
  GraphArgs tn_args;
  std::string tn_config, tn_resume, tn_out;
  std::optional<int> tn_epochs, tn_k;
  std::optional<std::uint64_t> tn_seed;
  std::optional<std::string> tn_variant;
  std::optional<double> tn_alpha;
  tn_args.attach(tn, /*with_features=*/true);
  tn->add_option("--config", tn_config, "key=value config file");
  tn->add_option("--epochs", tn_epochs, "override epochs");
  tn->add_option("--seed", tn_seed, "override seed");
  tn->add_option("--variant", tn_variant, "pair|list|in|out");
  tn->add_option("--alpha", tn_alpha, "ratio clamp");
  tn->add_option("--k", tn_k, "neighborhood range");
  tn->add_option("--resume", tn_resume, "checkpoint to continue from");
  tn->add_option("--out", tn_out, "output path prefix")->required();

  auto* em = app.add_subcommand("embed", "write frozen-encoder embeddings");
  GraphArgs em_args;
  std::string em_ckpt, em_out;
  em_args.attach(em, /*with_features=*/true);
  em->add_option("--checkpoint", em_ckpt, "trained checkpoint")->required();
  em->add_option("--out", em_out, "embedding file")->required();

  auto* ev = app.add_subcommand("eval", "linear probe, NMI, Sim@5");
  std::string ev_emb, ev_labels, ev_splits, ev_csv;
  std::uint64_t ev_seed = 0;
  ev->add_option("--embeddings", ev_emb, "embedding file")->required();
  ev->add_option("--labels", ev_labels, "per-node label file")->required();
  ev->add_option("--splits", ev_splits, "split file (enables the probe)");
  ev->add_option("--seed", ev_seed, "k-means seed")->required();
  ev->add_option("--out", ev_csv, "CSV output")->required();

  auto* es = app.add_subcommand("embed-sim", "hop-wise embedding similarity");
  GraphArgs es_args;
  std::string es_emb, es_csv, es_svg;
  int es_k = 4;
  es_args.attach(es);
  es->add_option("--embeddings", es_emb, "embedding file")->required();
  es->add_option("--k", es_k, "maximum exact hop");
  es->add_option("--out", es_csv, "CSV output")->required();
  es->add_option("--svg", es_svg, "optional SVG box chart");

  auto* co = app.add_subcommand("count-ops", "closed-form theta-evaluation counts");
  int co_k = 2;
  std::string co_sizes, co_variant = "pair";
  bool co_cached = false;
  co->add_option("--k", co_k, "neighborhood range");
  co->add_option("--hop-sizes", co_sizes, "per-hop sizes, hops 1..k then beyond")
      ->required();
  co->add_option("--variant", co_variant, "pair|list|in|out");
  co->add_flag("--cached", co_cached, "print the cached count instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      return run_gen_sbm(sizes, p_intra, p_inter, seed, !no_connect, !no_loops,
                         feature_dim, feature_scale, split_fractions, out_prefix);
    }
    if (lc->parsed()) return run_lc(lc_args, lc_k, lc_csv, lc_svg, threads);
    if (tr->parsed()) {
      tr_args.self_loops = !tr_no_loops;
      return run_transition(tr_args, tr_csv);
    }
    if (sp->parsed()) {
      sp_args.self_loops = !sp_no_loops;
      return run_spectrum(sp_args, sp_csv);
    }
    if (de->parsed()) {
      de_args.self_loops = !de_no_loops;
      return run_decay(de_args, de_max_k, de_csv, de_svg);
    }
    if (ws->parsed()) {
      ws_args.self_loops = !ws_no_loops;
      return run_walk_sim(ws_args, ws_label, ws_max_k, ws_walks, ws_seed, ws_uniform,
                          ws_node_walk, threads, ws_csv);
    }
    if (tn->parsed()) {
      return run_train(tn_args, tn_config, tn_epochs, tn_seed, tn_variant, tn_alpha,
                       tn_k, tn_resume, tn_out, threads);
    }
    if (em->parsed()) return run_embed(em_args, em_ckpt, em_out);
    if (ev->parsed()) return run_eval(ev_emb, ev_labels, ev_splits, ev_seed, ev_csv);
    if (es->parsed()) return run_embed_sim(es_args, es_emb, es_k, es_csv, es_svg);
    if (co->parsed()) return run_count_ops(co_k, co_sizes, co_variant, co_cached);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
