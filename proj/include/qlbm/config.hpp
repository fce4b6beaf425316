#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlbm {

/// Raised for invalid configuration or command-line input; the message names
/// the offending field. Mapped to the usage exit code by the CLI.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode {
  kStatevector,        ///< quantum circuit, exact amplitude readout
  kShots,              ///< quantum circuit, multinomial count readout
  kClassicalCarleman,  ///< second-order pair evolution by matrix arithmetic
  kClassicalLbm,       ///< plain collide-and-stream reference
};

std::string to_string(RunMode mode);
RunMode parse_mode(const std::string& text);

/// Flat experiment description. Serializes to "key=value" lines; every field
/// has a key of the same name (out_dir <-> out).
struct ExperimentConfig {
  std::string scenario;             ///< preset name, or empty for custom
  int lx = 2;
  int ly = 2;
  double tau = 5.0;
  std::string init = "random";      ///< random | taylor-green
  double u_max = 0.15;              ///< vortex amplitude (taylor-green)
  std::string k_mode = "full";      ///< full (2*pi/L) | half (pi/L)
  double amplitude = 0.2;           ///< perturbation size (random init)
  int steps = 5;
  RunMode mode = RunMode::kStatevector;
  long long shots = 0;
  std::uint64_t seed = 12345;
  std::string out_dir;
};

/// Names of the built-in presets, in documentation order.
std::vector<std::string> scenario_names();

/// Preset by name; throws usage_error on an unknown name.
ExperimentConfig scenario_preset(const std::string& name);

/// Applies one "key=value" assignment; throws usage_error on unknown keys or
/// unparsable values.
void set_config_field(ExperimentConfig& config, const std::string& key,
                      const std::string& value);

/// Parses a flat key=value file ('#' comments and blank lines ignored).
ExperimentConfig load_config_file(const std::string& path);

/// Checks cross-field consistency (power-of-two lattice, shots present in
/// shot mode, known init/k_mode, ...). Throws usage_error naming the field.
void validate(const ExperimentConfig& config);

/// Canonical serialization, one field per line, fixed order.
std::string to_key_values(const ExperimentConfig& config);

}  // namespace qlbm
