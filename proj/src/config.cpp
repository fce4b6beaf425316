#include "qlbm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qlbm {

namespace {

bool is_power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw usage_error("config field '" + key + "': expected integer, got '" +
                      value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw usage_error("config field '" + key + "': expected number, got '" +
                      value + "'");
  }
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kStatevector:
      return "statevector";
    case RunMode::kShots:
      return "shots";
    case RunMode::kClassicalCarleman:
      return "classical-carleman";
    case RunMode::kClassicalLbm:
      return "classical-lbm";
  }
  return "unknown";
}

RunMode parse_mode(const std::string& text) {
  if (text == "statevector") return RunMode::kStatevector;
  if (text == "shots") return RunMode::kShots;
  if (text == "classical-carleman") return RunMode::kClassicalCarleman;
  if (text == "classical-lbm") return RunMode::kClassicalLbm;
  throw usage_error(
      "config field 'mode': expected statevector | shots | "
      "classical-carleman | classical-lbm, got '" +
      text + "'");
}

std::vector<std::string> scenario_names() {
  return {"random-l2-statevector", "random-l4-statevector",
          "random-l2-shots",       "random-l4-shots",
          "tgv-l32-classical",     "tgv-l8-statevector"};
}

ExperimentConfig scenario_preset(const std::string& name) {
  ExperimentConfig c;
  c.scenario = name;
  if (name == "random-l2-statevector") {
    // Small-lattice exact validation of the quantum pipeline.
    c.lx = c.ly = 2;
    c.tau = 5.0;
    c.init = "random";
    c.steps = 5;
    c.mode = RunMode::kStatevector;
  } else if (name == "random-l4-statevector") {
    // Same validation at N = 16, where the per-step success probability is
    // the reported quantity.
    c.lx = c.ly = 4;
    c.tau = 5.0;
    c.init = "random";
    c.steps = 5;
    c.mode = RunMode::kStatevector;
  } else if (name == "random-l2-shots") {
    // Count-based readout with the full shot budget.
    c.lx = c.ly = 2;
    c.tau = 5.0;
    c.init = "random";
    c.steps = 2;
    c.mode = RunMode::kShots;
    c.shots = 500000000LL;
  } else if (name == "random-l4-shots") {
    c.lx = c.ly = 4;
    c.tau = 5.0;
    c.init = "random";
    c.steps = 2;
    c.mode = RunMode::kShots;
    c.shots = 500000000LL;
  } else if (name == "tgv-l32-classical") {
    // Vortex physics at the largest classical size.
    c.lx = c.ly = 32;
    c.tau = 5.0;
    c.init = "taylor-green";
    c.u_max = 0.15;
    c.k_mode = "full";
    c.steps = 10;
    c.mode = RunMode::kClassicalCarleman;
  } else if (name == "tgv-l8-statevector") {
    // Vortex run through the full quantum pipeline; half-period wave vector
    // so the velocity field is nonzero on the coarse grid.
    c.lx = c.ly = 8;
    c.tau = 5.0;
    c.init = "taylor-green";
    c.u_max = 0.15;
    c.k_mode = "half";
    c.steps = 6;
    c.mode = RunMode::kStatevector;
  } else {
    std::string known;
    for (const std::string& n : scenario_names()) {
      known += known.empty() ? n : (", " + n);
    }
    throw usage_error("unknown scenario '" + name + "' (known: " + known + ")");
  }
  return c;
}

void set_config_field(ExperimentConfig& config, const std::string& key,
                      const std::string& value) {
  if (key == "scenario") {
    config.scenario = value;
  } else if (key == "lx") {
    config.lx = static_cast<int>(parse_int(key, value));
  } else if (key == "ly") {
    config.ly = static_cast<int>(parse_int(key, value));
  } else if (key == "tau") {
    config.tau = parse_real(key, value);
  } else if (key == "init") {
    config.init = value;
  } else if (key == "u_max") {
    config.u_max = parse_real(key, value);
  } else if (key == "k_mode") {
    config.k_mode = value;
  } else if (key == "amplitude") {
    config.amplitude = parse_real(key, value);
  } else if (key == "steps") {
    config.steps = static_cast<int>(parse_int(key, value));
  } else if (key == "mode") {
    config.mode = parse_mode(value);
  } else if (key == "shots") {
    config.shots = parse_int(key, value);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "out") {
    config.out_dir = value;
  } else {
    throw usage_error("unknown config key '" + key + "'");
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw usage_error("cannot open config file '" + path + "'");
  }
  ExperimentConfig config;
  bool scenario_loaded = false;
  std::string line;
  int line_no = 0;
  // First pass collects assignments; a scenario key seeds the preset before
  // the remaining keys override it.
  std::vector<std::pair<std::string, std::string>> assignments;
  while (std::getline(is, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    const size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
      continue;
    }
    const size_t end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw usage_error("config file line " + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      const size_t b = s.find_first_not_of(" \t");
      const size_t e = s.find_last_not_of(" \t");
      s = (b == std::string::npos) ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    if (key == "scenario" && !scenario_loaded) {
      config = scenario_preset(value);
      scenario_loaded = true;
    } else {
      assignments.emplace_back(key, value);
    }
  }
  for (const auto& [key, value] : assignments) {
    set_config_field(config, key, value);
  }
  return config;
}

void validate(const ExperimentConfig& config) {
  if (!is_power_of_two(config.lx)) {
    throw usage_error("config field 'lx': must be a power of two, got " +
                      std::to_string(config.lx));
  }
  if (!is_power_of_two(config.ly)) {
    throw usage_error("config field 'ly': must be a power of two, got " +
                      std::to_string(config.ly));
  }
  if (!(config.tau > 0.0) || !std::isfinite(config.tau)) {
    throw usage_error("config field 'tau': must be positive and finite");
  }
  if (config.init != "random" && config.init != "taylor-green") {
    throw usage_error("config field 'init': expected random | taylor-green, got '" +
                      config.init + "'");
  }
  if (config.k_mode != "full" && config.k_mode != "half") {
    throw usage_error("config field 'k_mode': expected full | half, got '" +
                      config.k_mode + "'");
  }
  if (config.init == "taylor-green" && !(config.u_max > 0.0)) {
    throw usage_error("config field 'u_max': must be positive for taylor-green");
  }
  if (config.amplitude < 0.0 || config.amplitude >= 1.0) {
    throw usage_error("config field 'amplitude': must lie in [0, 1)");
  }
  if (config.steps < 0) {
    throw usage_error("config field 'steps': must be >= 0");
  }
  const bool quantum = config.mode == RunMode::kStatevector ||
                       config.mode == RunMode::kShots;
  if (quantum && config.steps < 1) {
    throw usage_error("config field 'steps': must be >= 1 in quantum modes");
  }
  if (config.mode == RunMode::kShots && config.shots < 1) {
    throw usage_error("config field 'shots': required (>= 1) in shots mode");
  }
  if (quantum) {
    const int x_bits = static_cast<int>(std::lround(std::log2(config.lx)));
    const int y_bits = static_cast<int>(std::lround(std::log2(config.ly)));
    const int total = 2 * (x_bits + y_bits) + 11;
    if (total > 30) {
      throw usage_error(
          "config fields 'lx'/'ly': quantum register would need " +
          std::to_string(total) + " qubits (limit 30)");
    }
  }
}

std::string to_key_values(const ExperimentConfig& config) {
  std::ostringstream os;
  os << "scenario=" << config.scenario << '\n';
  os << "lx=" << config.lx << '\n';
  os << "ly=" << config.ly << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", config.tau);
  os << "tau=" << buf << '\n';
  os << "init=" << config.init << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", config.u_max);
  os << "u_max=" << buf << '\n';
  os << "k_mode=" << config.k_mode << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", config.amplitude);
  os << "amplitude=" << buf << '\n';
  os << "steps=" << config.steps << '\n';
  os << "mode=" << to_string(config.mode) << '\n';
  os << "shots=" << config.shots << '\n';
  os << "seed=" << config.seed << '\n';
  os << "out=" << config.out_dir << '\n';
  return os.str();
}

}  // namespace qlbm
