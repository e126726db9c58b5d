#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relgraph/graph.hpp"

namespace relgraph {

/// Paths making up one dataset. Graph file holds one whitespace-separated
/// undirected edge per line ('#' starts a comment); the labels file holds
/// one integer per line, line i = node i; features file starts with a
/// "N D" header followed by N dense rows; the optional split file holds
/// lines of the form "train|valid|test <id> <id> ...".
struct DatasetBundle {
  std::string graph_path;
  std::string labels_path;
  std::string features_path;  // optional, empty = absent
  std::string split_path;     // optional, empty = absent
};

struct Splits {
  std::vector<NodeId> train;
  std::vector<NodeId> valid;
  std::vector<NodeId> test;

  bool empty() const { return train.empty() && valid.empty() && test.empty(); }
};

struct LoadedDataset {
  LabeledGraph graph;
  Splits splits;
};

LoadedDataset load_bundle(const DatasetBundle& paths, bool add_self_loops);

EdgeList read_edge_list(const std::string& path, int num_nodes);
std::vector<LabelId> read_labels(const std::string& path);
std::vector<double> read_features(const std::string& path, int expected_rows,
                                  int* out_dim);
Splits read_splits(const std::string& path, int num_nodes);

void write_edge_list(const LabeledGraph& g, const std::string& path,
                     bool include_loops = false);
void write_labels(const std::vector<LabelId>& labels, const std::string& path);
void write_features(const std::vector<double>& rows, int n, int dim,
                    const std::string& path);

/// One named numeric column of a report.
struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

/// RFC-4180-style CSV with a header row; columns appear in the given order
/// and all columns must share one length. Values print with 12 significant
/// digits.
void write_csv_report(const std::vector<CsvColumn>& columns, const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv_report(const std::string& path);

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;  // row-major

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/// Embedding file: first line "N d", then N whitespace-separated rows,
/// 17 significant digits (round-trip exact).
void write_embeddings(const Matrix& h, const std::string& path);
Matrix read_embeddings(const std::string& path);

/// Simple key=value configuration text; '#' starts a comment. Later keys
/// override earlier ones.
std::map<std::string, std::string> read_key_value_config(const std::string& path);

}  // namespace relgraph
