#include "relgraph/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace relgraph {

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["subcommand"] = m.subcommand;
  j["version"] = m.version;
  if (m.seeded) j["seed"] = m.seed;
  j["config"] = m.config;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["duration_seconds"] = m.duration_seconds;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace relgraph
