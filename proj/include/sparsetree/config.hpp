#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sparsetree/disorder.hpp"
#include "sparsetree/green.hpp"
#include "sparsetree/hamiltonian.hpp"
#include "sparsetree/tree.hpp"

namespace sparsetree {

/// Invalid configuration: unknown key, unparsable value, or a violated constraint.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using RawConfig = std::map<std::string, std::string>;

/// Every key accepted in a config file or as a --flag.
const std::vector<std::string>& config_keys();

/// Parses flat `key = value` lines. `#` starts a comment; blank lines are ignored.
RawConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");
RawConfig read_config_file(const std::filesystem::path& path);

/// One fully resolved experiment.
struct ExperimentConfig {
  TreeParams tree{2, 2.0, 14};
  LaplacianKind laplacian = LaplacianKind::adjacency;
  DisorderSpec disorder;
  double s = 0.5;
  SpectralPoint z{0.0, 1e-3};
  std::size_t samples = 1000;
  VertexId source = 0;
  bool ray_targets = true;               // targets = leftmost descending ray from source
  std::vector<VertexId> targets;         // when ray_targets is false
  VertexId target = 0;                   // single site: v for segment, x for spectrum
  std::uint64_t realization = 0;         // disorder realization for green/spectrum
  int L0 = 5;
  std::size_t length = 60;               // minami
  std::size_t region_size = 8;           // probe
  std::vector<double> etas{1e-1, 1e-2, 1e-3, 1e-4};
  std::size_t pairs = 4;                 // probe
  bool quick = false;                    // verify
  // Execution details; never embedded in result records.
  std::filesystem::path output;
  std::filesystem::path csv;
  unsigned workers = 0;

  /// Overlays `raw` on the defaults, validating every field. Throws ConfigError.
  static ExperimentConfig from_raw(const RawConfig& raw);

  /// Resolved configuration as embedded in result records (no output paths or worker count).
  nlohmann::json to_json() const;
};

}  // namespace sparsetree
