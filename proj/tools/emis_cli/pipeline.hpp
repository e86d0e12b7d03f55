#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

#include "emis_cli/config.hpp"

namespace emis::cli {

enum class Stage { Config, Synthesis, Noise, Forward, Inversion, Scoring, Validation, Output };

const char* to_string(Stage stage) noexcept;

inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::string> output;
  std::optional<std::uint64_t> seed;
  std::optional<int> N;
  bool quiet = false;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Runs one subcommand against a validated config. Artifacts go to config.output_dir.
/// Each method returns the manifest it wrote (validate writes nothing).
class Runner {
 public:
  Runner(RunConfig config, bool quiet);

  nlohmann::json synth();
  nlohmann::json forward();
  nlohmann::json invert(const std::string& data_path);
  nlohmann::json pipeline();
  /// Runs the invariant checks; returns false if any failed.
  bool validate();

  /// Stage that was executing when the last exception escaped.
  Stage stage() const noexcept { return stage_; }

 private:
  ScatteringDataSet make_data(nlohmann::json& results);
  ScatteringDataSet add_configured_noise(const ScatteringDataSet& clean, nlohmann::json& results);
  void reconstruct_and_write(const ScatteringDataSet& data, nlohmann::json& results,
                             nlohmann::json& artifacts);
  nlohmann::json finish(const char* command, nlohmann::json results, nlohmann::json artifacts);
  std::string path(const char* name) const;
  void log(const std::string& message) const;
  void enter(Stage stage);
  void leave();

  RunConfig config_;
  bool quiet_;
  Stage stage_ = Stage::Config;
  double stage_start_ = 0.0;
  nlohmann::json timings_ = nlohmann::json::object();
};

/// Loads the config, applies overrides, runs `command` and maps failures to exit codes
/// with a one-line diagnostic naming the stage on stderr.
int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                const std::optional<std::string>& data_path = std::nullopt);

}  // namespace emis::cli
