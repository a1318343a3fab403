#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "klcell/affine.hpp"
#include "klcell/laurent.hpp"

namespace klcell {

struct TaskSpec {
  std::string name;
  nlohmann::json options;  // task-specific keys
};

struct RunConfig {
  CellDatum::Config cell;
  long radius = -1;       // KL table radius; -1 = 2 l(w0) + 2
  long ball_radius = -1;  // group ball radius; -1 = radius + 2 max|B0| + l(w0)
  int threads = 0;        // 0 = hardware concurrency (capped)
  std::string out_dir;
  std::string cache_dir;
  bool table_output = false;
  std::vector<TaskSpec> tasks;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;  // throws Error(Config) with the offending field path
};

// Deterministic JSON forms used by every report.
nlohmann::json laurent_to_json(const Laurent& a);
Laurent laurent_from_json(const nlohmann::json& j, int rank);
nlohmann::json elt_to_json(const CellDatum& d, const Elt& e);
Elt elt_from_json(const CellDatum& d, const nlohmann::json& j);
std::string elt_key(const CellDatum& d, const Elt& e);  // compact map key "o1.s0.s2"

// FNV-1a content hash of the canonical bytes, as fixed-width hex.
std::string content_hash(const std::string& bytes);

// Runs every task in the config; returns the process exit code
// (0 ok, 1 verification failure, 2 usage, 3 truncation/resource).
int run_config(const RunConfig& cfg, std::ostream& log);

}  // namespace klcell
