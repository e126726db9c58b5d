#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace relgraph {

inline constexpr const char* kVersion = "0.1.0";

/// Provenance record written next to every CLI run's outputs.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> config;  // resolved flag/config snapshot
  std::uint64_t seed = 0;
  bool seeded = false;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string version = kVersion;
  double duration_seconds = 0.0;
};

void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace relgraph
