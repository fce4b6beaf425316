#include "qlbm/run_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlbm/field_io.hpp"
#include "qlbm/local_encoding.hpp"
#include "qlbm/statevector.hpp"

namespace qlbm::run_io {

namespace {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("run_io: cannot open " + path + " for writing");
  }
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("run_io: cannot open " + path);
  }
  return is;
}

std::string f_step_name(int t) {
  return "step_" + std::to_string(t) + "_f.csv";
}
std::string g_step_name(int t) {
  return "step_" + std::to_string(t) + "_g.csv";
}

}  // namespace

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("run_io: cannot create directory " + dir + ": " +
                             ec.message());
  }
}

void write_manifest(const std::string& dir, const ExperimentConfig& config) {
  auto os = open_out(join(dir, "manifest.txt"));
  os << "version=" << kCodeVersion << '\n';
  os << to_key_values(config);
}

void write_config_echo(const std::string& dir,
                       const ExperimentConfig& config) {
  auto os = open_out(join(dir, "config.txt"));
  os << to_key_values(config);
}

void write_f_step(const std::string& dir, int t, const DistributionField& f) {
  write_field_csv(join(dir, f_step_name(t)), f);
}

DistributionField read_f_step(const std::string& dir, int t) {
  return read_field_csv(join(dir, f_step_name(t)));
}

bool has_f_step(const std::string& dir, int t) {
  return fs::exists(join(dir, f_step_name(t)));
}

void write_g_step(const std::string& dir, int t, const LatticeGrid& grid,
                  const std::vector<double>& g_natural) {
  const size_t n = static_cast<size_t>(grid.sites());
  if (g_natural.size() != n * n * 81) {
    throw std::invalid_argument("write_g_step: array size mismatch");
  }
  auto os = open_out(join(dir, g_step_name(t)));
  os << "x1,y1,x2,y2,i,j,g\n";
  for (int x1 = 0; x1 < grid.sites(); ++x1) {
    const Vec2i a = grid.coords(x1);
    for (int x2 = 0; x2 < grid.sites(); ++x2) {
      const Vec2i b = grid.coords(x2);
      const double* block = &g_natural[(static_cast<size_t>(x1) * n + x2) * 81];
      for (int i = 0; i < 9; ++i) {
        for (int j = 0; j < 9; ++j) {
          os << a.x << ',' << a.y << ',' << b.x << ',' << b.y << ',' << i
             << ',' << j << ',' << format_double(block[i * 9 + j]) << '\n';
        }
      }
    }
  }
}

std::vector<double> read_g_step(const std::string& dir, int t,
                                const LatticeGrid& grid) {
  auto is = open_in(join(dir, g_step_name(t)));
  std::string line;
  if (!std::getline(is, line) || line != "x1,y1,x2,y2,i,j,g") {
    throw std::runtime_error("read_g_step: missing header in " +
                             g_step_name(t));
  }
  const size_t n = static_cast<size_t>(grid.sites());
  std::vector<double> g(n * n * 81, 0.0);
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ss(line);
    int x1, y1, x2, y2, i, j;
    double v;
    char c[6];
    if (!(ss >> x1 >> c[0] >> y1 >> c[1] >> x2 >> c[2] >> y2 >> c[3] >> i >>
          c[4] >> j >> c[5] >> v)) {
      throw std::runtime_error("read_g_step: bad row '" + line + "'");
    }
    const size_t p = static_cast<size_t>(grid.index(x1, y1)) * n +
                     static_cast<size_t>(grid.index(x2, y2));
    g[p * 81 + static_cast<size_t>(i) * 9 + j] = v;
  }
  return g;
}

bool has_g_step(const std::string& dir, int t) {
  return fs::exists(join(dir, g_step_name(t)));
}

void write_probabilities(const std::string& dir,
                         const std::vector<StepRecord>& records) {
  auto os = open_out(join(dir, "probabilities.csv"));
  os << "step,success_probability,cumulative_probability,global_scale,"
        "a_diag_population,a_lcu_population\n";
  for (const StepRecord& r : records) {
    os << r.step << ',' << format_double(r.success_probability) << ','
       << format_double(r.cumulative_probability) << ','
       << format_double(r.global_scale) << ','
       << format_double(r.a_diag_population) << ','
       << format_double(r.a_lcu_population) << '\n';
  }
}

void write_costs(const std::string& dir, const std::vector<CostEntry>& costs) {
  write_cost_csv(join(dir, "costs.csv"), costs);
}

void write_counts(const std::string& dir,
                  const std::map<std::uint64_t, long long>& counts,
                  int n_qubits) {
  auto os = open_out(join(dir, "counts.csv"));
  write_counts_csv(os, counts, n_qubits);
}

void write_estimated_fields(const std::string& dir, const LatticeGrid& grid,
                            const std::vector<double>& f_estimated,
                            const std::vector<double>& g_estimated) {
  DistributionField f(grid);
  f.values = f_estimated;
  write_field_csv(join(dir, "estimated_f.csv"), f);
  const size_t n = static_cast<size_t>(grid.sites());
  if (g_estimated.size() == n * n * 81) {
    auto os = open_out(join(dir, "estimated_g.csv"));
    os << "x1,y1,x2,y2,i,j,g\n";
    for (int x1 = 0; x1 < grid.sites(); ++x1) {
      const Vec2i a = grid.coords(x1);
      for (int x2 = 0; x2 < grid.sites(); ++x2) {
        const Vec2i b = grid.coords(x2);
        const double* block =
            &g_estimated[(static_cast<size_t>(x1) * n + x2) * 81];
        for (int i = 0; i < 9; ++i) {
          for (int j = 0; j < 9; ++j) {
            os << a.x << ',' << a.y << ',' << b.x << ',' << b.y << ',' << i
               << ',' << j << ',' << format_double(block[i * 9 + j]) << '\n';
          }
        }
      }
    }
  }
}

bool has_estimated_f(const std::string& dir) {
  return fs::exists(join(dir, "estimated_f.csv"));
}

DistributionField read_estimated_f(const std::string& dir,
                                   const LatticeGrid& grid) {
  DistributionField f = read_field_csv(join(dir, "estimated_f.csv"));
  if (!(f.grid == grid)) {
    throw std::runtime_error("read_estimated_f: grid mismatch");
  }
  return f;
}

std::vector<double> read_estimated_g(const std::string& dir,
                                     const LatticeGrid& grid) {
  auto is = open_in(join(dir, "estimated_g.csv"));
  std::string line;
  if (!std::getline(is, line) || line != "x1,y1,x2,y2,i,j,g") {
    throw std::runtime_error("read_estimated_g: missing header");
  }
  const size_t n = static_cast<size_t>(grid.sites());
  std::vector<double> g(n * n * 81, 0.0);
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream ss(line);
    int x1, y1, x2, y2, i, j;
    double v;
    char c[6];
    if (!(ss >> x1 >> c[0] >> y1 >> c[1] >> x2 >> c[2] >> y2 >> c[3] >> i >>
          c[4] >> j >> c[5] >> v)) {
      throw std::runtime_error("read_estimated_g: bad row '" + line + "'");
    }
    const size_t p = static_cast<size_t>(grid.index(x1, y1)) * n +
                     static_cast<size_t>(grid.index(x2, y2));
    g[p * 81 + static_cast<size_t>(i) * 9 + j] = v;
  }
  return g;
}

void write_observables(const std::string& dir, const LatticeGrid& grid,
                       const Observables& obs) {
  {
    auto os = open_out(join(dir, "sigma_f.csv"));
    os << "x,y,sigma_f\n";
    for (int x = 0; x < grid.lx(); ++x) {
      for (int y = 0; y < grid.ly(); ++y) {
        os << x << ',' << y << ','
           << format_double(obs.sigma_f[static_cast<size_t>(grid.index(x, y))])
           << '\n';
      }
    }
  }
  {
    auto os = open_out(join(dir, "sigma_g.csv"));
    os << "x1,y1,x2,y2,sigma_g\n";
    const size_t n = static_cast<size_t>(grid.sites());
    for (int x1 = 0; x1 < grid.sites(); ++x1) {
      const Vec2i a = grid.coords(x1);
      for (int x2 = 0; x2 < grid.sites(); ++x2) {
        const Vec2i b = grid.coords(x2);
        os << a.x << ',' << a.y << ',' << b.x << ',' << b.y << ','
           << format_double(obs.sigma_g[static_cast<size_t>(x1) * n + x2])
           << '\n';
      }
    }
  }
}

void write_velocity_grid(const std::string& path, const LatticeGrid& grid,
                         const Macroscopics& macro) {
  auto os = open_out(path);
  os << "x,y,ux,uy\n";
  for (int x = 0; x < grid.lx(); ++x) {
    for (int y = 0; y < grid.ly(); ++y) {
      const Vec2d u = macro.u[static_cast<size_t>(grid.index(x, y))];
      os << x << ',' << y << ',' << format_double(u.x) << ','
         << format_double(u.y) << '\n';
    }
  }
}

std::map<std::string, std::string> read_manifest(const std::string& dir) {
  auto is = open_in(join(dir, "manifest.txt"));
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      continue;
    }
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

int count_f_steps(const std::string& dir) {
  int t = 0;
  while (has_f_step(dir, t)) {
    ++t;
  }
  return t;
}

}  // namespace qlbm::run_io
