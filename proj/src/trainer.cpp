#include "relgraph/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace relgraph {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (adam.lr <= 0.0) throw std::invalid_argument("TrainConfig: lr must be > 0");
  if (anchor_batch < 0) {
    throw std::invalid_argument("TrainConfig: anchor_batch must be >= 1 when set");
  }
  loss.validate();
  if (adam.lr < 1e-8 || adam.lr > 1e-2) {
    std::cerr << "warning: lr " << adam.lr << " outside the usual [1e-8, 1e-2] band\n";
  }
  if (adam.weight_decay != 0.0 &&
      (adam.weight_decay < 1e-8 || adam.weight_decay > 1e-2)) {
    std::cerr << "warning: weight_decay " << adam.weight_decay
              << " outside the usual [1e-8, 1e-2] band\n";
  }
}

namespace {

Matrix feature_matrix(const LabeledGraph& g) {
  if (!g.has_features()) throw std::invalid_argument("train: graph has no features");
  Matrix x;
  x.rows = g.num_nodes();
  x.cols = g.feature_dim();
  x.values = g.feature_matrix();
  return x;
}

std::string param_norms(EncoderState& state) {
  std::ostringstream os;
  bool first = true;
  for (Parameter* p : state.parameters()) {
    double sq = 0.0;
    for (double v : p->value) sq += v * v;
    if (!first) os << ", ";
    os << p->name << "=" << std::sqrt(sq);
    first = false;
  }
  return os.str();
}

TrainResult run_epochs(const LabeledGraph& g, const TrainConfig& cfg,
                       EncoderState state, int first_epoch) {
  const Matrix x = feature_matrix(g);
  const auto base_hops = build_hop_structure(g, cfg.loss.k, cfg.loss.anchors);

  TrainResult result;
  for (int epoch = first_epoch; epoch <= cfg.epochs; ++epoch) {
    auto hops = base_hops;
    if (cfg.anchor_batch > 0) {
      hops = sample_anchor_batch(*hops, cfg.anchor_batch, cfg.loss.seed, epoch);
    }
    if (cfg.loss.beyond_sample > 0) {
      hops = sample_hop_structure(*hops, cfg.loss.beyond_sample, cfg.loss.seed, epoch);
    }
    Tape tape;
    GraphLoss gl = graph_loss(tape, state, x, hops, cfg.loss);
    const double loss_value = gl.loss.report.loss;
    if (!std::isfinite(loss_value)) {
      throw std::runtime_error("train: non-finite loss at epoch " +
                               std::to_string(epoch) + "; parameter norms: " +
                               param_norms(state));
    }
    tape.backward(gl.loss.loss);

    const auto params = state.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      adam_step(*params[i], gl.forward.weight_leaves[i].grad(), cfg.adam);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_value;
    stats.clamp_fraction = gl.loss.report.clamp_fraction;
    stats.sim_op_count = gl.loss.report.sim_op_count;
    stats.skipped_terms = gl.loss.report.skipped_terms;
    result.history.push_back(stats);

    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_prefix.empty() &&
        (epoch % cfg.checkpoint_every == 0 || epoch == cfg.epochs)) {
      save_checkpoint(cfg.checkpoint_prefix + ".epoch" + std::to_string(epoch) +
                          ".ckpt",
                      state, epoch);
    }
  }

  if (!cfg.log_path.empty()) {
    std::vector<CsvColumn> cols(3);
    cols[0].name = "epoch";
    cols[1].name = "loss";
    cols[2].name = "clamp_fraction";
    for (const EpochStats& s : result.history) {
      cols[0].values.push_back(s.epoch);
      cols[1].values.push_back(s.loss);
      cols[2].values.push_back(s.clamp_fraction);
    }
    write_csv_report(cols, cfg.log_path);
  }

  result.state = std::move(state);
  return result;
}

}  // namespace

TrainResult train(const LabeledGraph& g, const TrainConfig& cfg) {
  cfg.validate();
  return run_epochs(g, cfg, build_encoder(g, cfg.encoder, cfg.seed), 1);
}

TrainResult train_resume(const LabeledGraph& g, const TrainConfig& cfg,
                         const Checkpoint& ckpt) {
  cfg.validate();
  if (ckpt.epoch >= cfg.epochs) {
    throw std::invalid_argument("train_resume: checkpoint epoch " +
                                std::to_string(ckpt.epoch) +
                                " is not before cfg.epochs");
  }
  return run_epochs(g, cfg, ckpt.state, ckpt.epoch + 1);
}

namespace {

void write_param(std::ofstream& out, const Parameter& p) {
  out << "param " << p.name << ' ' << p.rows << ' ' << p.cols << ' ' << p.step << '\n';
  char buf[64];
  auto dump = [&](const std::vector<double>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%a", vs[i]);
      out << buf << (i + 1 == vs.size() ? '\n' : ' ');
    }
    if (vs.empty()) out << '\n';
  };
  dump(p.value);
  dump(p.m);
  dump(p.v);
}

void read_param_block(std::ifstream& in, const std::string& path, Parameter& p) {
  std::string tag, name;
  if (!(in >> tag >> name >> p.rows >> p.cols >> p.step) || tag != "param") {
    throw std::runtime_error(path + ": malformed checkpoint parameter header");
  }
  p.name = name;
  const std::size_t count = static_cast<std::size_t>(p.rows) * p.cols;
  auto slurp = [&](std::vector<double>& vs) {
    vs.resize(count);
    std::string tok;
    for (std::size_t i = 0; i < count; ++i) {
      if (!(in >> tok)) throw std::runtime_error(path + ": truncated checkpoint");
      char* end = nullptr;
      vs[i] = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str()) {
        throw std::runtime_error(path + ": bad float '" + tok + "'");
      }
    }
  };
  slurp(p.value);
  slurp(p.m);
  slurp(p.v);
}

}  // namespace

void save_checkpoint(const std::string& path, const EncoderState& state, int epoch) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "relgraph-checkpoint 1\n";
  out << "epoch " << epoch << '\n';
  out << "seed " << state.seed << '\n';
  out << "embed_dim " << state.hyper.embed_dim << '\n';
  out << "layers " << state.hyper.layers << '\n';
  out << "activation " << activation_name(state.hyper.activation) << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", state.hyper.tau_base);
  out << "tau_base " << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%a", state.hyper.tau_spacing);
  out << "tau_spacing " << buf << '\n';
  out << "num_nodes " << state.num_nodes << '\n';
  out << "feature_dim " << state.feature_dim << '\n';
  const auto params = state.parameters();
  out << "params " << params.size() << '\n';
  for (const Parameter* p : params) write_param(out, *p);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path, const LabeledGraph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "relgraph-checkpoint" || version != 1) {
    throw std::runtime_error(path + ": not a relgraph checkpoint");
  }

  Checkpoint ckpt;
  EncoderHyper hyper;
  std::uint64_t seed = 0;
  int num_nodes = 0, feature_dim = 0, params = 0;
  std::string key;
  while (in >> key) {
    if (key == "epoch") in >> ckpt.epoch;
    else if (key == "seed") in >> seed;
    else if (key == "embed_dim") in >> hyper.embed_dim;
    else if (key == "layers") in >> hyper.layers;
    else if (key == "activation") {
      std::string name;
      in >> name;
      hyper.activation = activation_from_string(name);
    } else if (key == "tau_base" || key == "tau_spacing") {
      std::string tok;
      in >> tok;
      const double v = std::strtod(tok.c_str(), nullptr);
      (key == "tau_base" ? hyper.tau_base : hyper.tau_spacing) = v;
    } else if (key == "num_nodes") in >> num_nodes;
    else if (key == "feature_dim") in >> feature_dim;
    else if (key == "params") {
      in >> params;
      break;
    } else {
      throw std::runtime_error(path + ": unknown checkpoint key '" + key + "'");
    }
  }
  if (num_nodes != g.num_nodes() || feature_dim != g.feature_dim()) {
    throw std::runtime_error(path + ": checkpoint was trained on a " +
                             std::to_string(num_nodes) + "-node graph with " +
                             std::to_string(feature_dim) +
                             "-dim features; the given graph does not match");
  }

  // Rebuild state (including norm_adj) from the graph, then overwrite the
  // learned tensors with the checkpointed ones.
  ckpt.state = build_encoder(g, hyper, seed);
  auto ps = ckpt.state.parameters();
  if (params != static_cast<int>(ps.size())) {
    throw std::runtime_error(path + ": parameter count mismatch");
  }
  for (Parameter* p : ps) {
    Parameter loaded;
    read_param_block(in, path, loaded);
    if (loaded.name != p->name || loaded.rows != p->rows || loaded.cols != p->cols) {
      throw std::runtime_error(path + ": parameter '" + loaded.name +
                               "' does not match encoder shape");
    }
    *p = std::move(loaded);
  }
  return ckpt;
}

Matrix embed(const EncoderState& state, const LabeledGraph& g) {
  if (g.num_nodes() != state.num_nodes || g.feature_dim() != state.feature_dim) {
    throw std::invalid_argument(
        "embed: graph does not match the encoder's cached norm_adj (" +
        std::to_string(state.num_nodes) + " nodes, " +
        std::to_string(state.feature_dim) + "-dim features)");
  }
  return forward(state, feature_matrix(g));
}

}  // namespace relgraph
