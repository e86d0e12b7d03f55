#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "emis/emis.hpp"

namespace emis::cli {

/// Invalid or incomplete configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataMode { BornExact, FullSolver };

struct QuadratureSpec {
  int n_polar = 8;
  int n_azimuth = 16;
};

struct NoiseSpec {
  double delta = 0.0;
  /// When set, delta is a fraction of the weighted norm of the clean data.
  bool relative = false;
  std::uint64_t seed = 0;
};

struct IncidenceSpec {
  Vec3 alpha = Vec3(0.0, 0.0, 1.0);
  /// Unset means the first vector of polarization_pair(alpha).
  std::optional<Vec3> polarization;
};

struct RunConfig {
  WaveParams wave;
  MediumSpec medium;
  /// Grid for forward solves and Born synthesis. Required for full-solver data.
  std::optional<int> forward_n;
  int reconstruction_n = 12;
  QuadratureSpec alpha;
  QuadratureSpec beta;
  DataMode mode = DataMode::BornExact;
  NoiseSpec noise;
  InversionConfig inversion;
  SolverConfig solver;
  IncidenceSpec incidence;
  std::string output_dir = "out";

  /// Forward grid size, falling back to the Born synthesis default.
  int synthesis_n() const { return forward_n.value_or(24); }

  nlohmann::json to_json() const;
};

const char* to_string(DataMode mode) noexcept;

/// Parses and validates. Throws ConfigError naming the field.
RunConfig parse_config(const nlohmann::json& j);

/// Reads a JSON file. Throws IoError when unreadable, ConfigError when invalid.
RunConfig load_config(const std::string& path);

}  // namespace emis::cli
