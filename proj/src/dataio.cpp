#include "relgraph/dataio.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace relgraph {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

// Strips a trailing '#' comment and surrounding whitespace.
std::string strip(const std::string& raw) {
  std::string s = raw.substr(0, raw.find('#'));
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_value(double v, int sig_digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig_digits, v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

EdgeList read_edge_list(const std::string& path, int num_nodes) {
  auto in = open_for_read(path);
  EdgeList edges;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long u = -1, v = -1;
    if (!(ls >> u >> v)) parse_fail(path, lineno, "expected 'u v' edge pair");
    std::string extra;
    if (ls >> extra) parse_fail(path, lineno, "trailing token '" + extra + "'");
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      parse_fail(path, lineno,
                 "edge endpoint out of range [0, " + std::to_string(num_nodes) + ")");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return edges;
}

std::vector<LabelId> read_labels(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<LabelId> labels;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long l = -1;
    if (!(ls >> l)) parse_fail(path, lineno, "expected one integer label");
    std::string extra;
    if (ls >> extra) parse_fail(path, lineno, "trailing token '" + extra + "'");
    labels.push_back(static_cast<LabelId>(l));
  }
  if (labels.empty()) throw std::runtime_error(path + ": no labels found");
  return labels;
}

std::vector<double> read_features(const std::string& path, int expected_rows,
                                  int* out_dim) {
  auto in = open_for_read(path);
  std::string raw;
  int lineno = 0;
  long long n = -1, d = -1;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (!(ls >> n >> d)) parse_fail(path, lineno, "expected 'N D' header");
    break;
  }
  if (n < 0) throw std::runtime_error(path + ": missing header");
  if (expected_rows >= 0 && n != expected_rows) {
    throw std::runtime_error(path + ": N mismatch, header says " + std::to_string(n) +
                             " but dataset has " + std::to_string(expected_rows) +
                             " nodes");
  }
  if (d <= 0) throw std::runtime_error(path + ": feature dimension must be positive");

  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(n) * d);
  long long seen = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    for (long long j = 0; j < d; ++j) {
      double v;
      if (!(ls >> v)) {
        parse_fail(path, lineno, "row has fewer than " + std::to_string(d) + " values");
      }
      rows.push_back(v);
    }
    std::string extra;
    if (ls >> extra) parse_fail(path, lineno, "row has more than " + std::to_string(d) + " values");
    ++seen;
  }
  if (seen != n) {
    throw std::runtime_error(path + ": header says " + std::to_string(n) +
                             " rows, file has " + std::to_string(seen));
  }
  if (out_dim) *out_dim = static_cast<int>(d);
  return rows;
}

Splits read_splits(const std::string& path, int num_nodes) {
  auto in = open_for_read(path);
  Splits s;
  std::string raw;
  int lineno = 0;
  std::set<NodeId> seen;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    std::vector<NodeId>* target = nullptr;
    if (name == "train") target = &s.train;
    else if (name == "valid") target = &s.valid;
    else if (name == "test") target = &s.test;
    else parse_fail(path, lineno, "unknown split '" + name + "' (want train|valid|test)");
    long long id;
    while (ls >> id) {
      if (id < 0 || id >= num_nodes) parse_fail(path, lineno, "node id out of range");
      if (!seen.insert(static_cast<NodeId>(id)).second) {
        parse_fail(path, lineno, "node " + std::to_string(id) + " appears in two splits");
      }
      target->push_back(static_cast<NodeId>(id));
    }
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.valid.begin(), s.valid.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

LoadedDataset load_bundle(const DatasetBundle& paths, bool add_self_loops) {
  const std::vector<LabelId> labels = read_labels(paths.labels_path);
  const int n = static_cast<int>(labels.size());
  EdgeList edges = read_edge_list(paths.graph_path, n);

  std::optional<std::vector<double>> features;
  if (!paths.features_path.empty()) {
    int dim = 0;
    features = read_features(paths.features_path, n, &dim);
  }

  LoadedDataset out{build_graph(edges, labels, std::move(features), add_self_loops), {}};
  if (!paths.split_path.empty()) {
    out.splits = read_splits(paths.split_path, n);
  }
  return out;
}

void write_edge_list(const LabeledGraph& g, const std::string& path, bool include_loops) {
  auto out = open_for_write(path);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (v > u || (v == u && include_loops)) {
        out << u << ' ' << v << '\n';
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_labels(const std::vector<LabelId>& labels, const std::string& path) {
  auto out = open_for_write(path);
  for (LabelId l : labels) out << l << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_features(const std::vector<double>& rows, int n, int dim,
                    const std::string& path) {
  if (static_cast<std::size_t>(n) * dim != rows.size()) {
    throw std::invalid_argument("write_features: size mismatch");
  }
  auto out = open_for_write(path);
  out << n << ' ' << dim << '\n';
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (j) out << ' ';
      out << format_value(rows[static_cast<std::size_t>(i) * dim + j], 17);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_csv_report(const std::vector<CsvColumn>& columns, const std::string& path) {
  std::size_t rows = columns.empty() ? 0 : columns.front().values.size();
  for (const auto& col : columns) {
    if (col.values.size() != rows) {
      throw std::invalid_argument("write_csv_report: column '" + col.name +
                                  "' length differs");
    }
  }
  auto out = open_for_write(path);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << csv_escape(columns[c].name);
  }
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ',';
      out << format_value(columns[c].values[r], 12);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

CsvTable read_csv_report(const std::string& path) {
  auto in = open_for_read(path);
  CsvTable t;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : raw) {
      if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    cells.push_back(cur);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        parse_fail(path, lineno, "non-numeric cell '" + cell + "'");
      }
    }
    if (row.size() != t.header.size()) parse_fail(path, lineno, "column count mismatch");
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw std::runtime_error(path + ": missing CSV header");
  return t;
}

void write_embeddings(const Matrix& h, const std::string& path) {
  if (static_cast<std::size_t>(h.rows) * h.cols != h.values.size()) {
    throw std::invalid_argument("write_embeddings: shape/value size mismatch");
  }
  auto out = open_for_write(path);
  out << h.rows << ' ' << h.cols << '\n';
  for (int i = 0; i < h.rows; ++i) {
    for (int j = 0; j < h.cols; ++j) {
      if (j) out << ' ';
      out << format_value(h.at(i, j), 17);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix read_embeddings(const std::string& path) {
  auto in = open_for_read(path);
  long long n = 0, d = 0;
  if (!(in >> n >> d) || n <= 0 || d <= 0) {
    throw std::runtime_error(path + ": bad embedding header, expected 'N d'");
  }
  Matrix m;
  m.rows = static_cast<int>(n);
  m.cols = static_cast<int>(d);
  m.values.reserve(static_cast<std::size_t>(n) * d);
  double v;
  while (in >> v) m.values.push_back(v);
  if (m.values.size() != static_cast<std::size_t>(n) * d) {
    throw std::runtime_error(path + ": header says " + std::to_string(n) + "x" +
                             std::to_string(d) + " values, file has " +
                             std::to_string(m.values.size()));
  }
  return m;
}

std::map<std::string, std::string> read_key_value_config(const std::string& path) {
  auto in = open_for_read(path);
  std::map<std::string, std::string> cfg;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = strip(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_fail(path, lineno, "expected key=value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) parse_fail(path, lineno, "empty key");
    cfg[key] = value;
  }
  return cfg;
}

}  // namespace relgraph
