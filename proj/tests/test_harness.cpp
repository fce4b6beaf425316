#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qlbm/carleman.hpp"
#include "qlbm/cli_main.hpp"
#include "qlbm/config.hpp"
#include "qlbm/cost_model.hpp"
#include "qlbm/field_io.hpp"
#include "qlbm/lbm.hpp"
#include "qlbm/run_io.hpp"

namespace {

using namespace qlbm;
namespace fs = std::filesystem;

/// Invokes the CLI entry point with a real argv array.
int call_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("qlbm");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  argv.reserve(storage.size());
  for (std::string& s : storage) {
    argv.push_back(s.data());
  }
  return cli::run_main(static_cast<int>(argv.size()), argv.data());
}

/// Fresh unique directory under the system temp root.
std::string temp_dir(const std::string& tag) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() /
                       ("qlbm_harness_" + tag + "_" +
                        std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream is(line);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    cells.push_back(cell);
  }
  return cells;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  for (const std::string& line : split_lines(text)) {
    const size_t eq = line.find('=');
    if (eq != std::string::npos) {
      out[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("experiment config: presets, assignment, and serialization") {
  SUBCASE("every preset validates and serializes with its own name") {
    const std::vector<std::string> names = scenario_names();
    REQUIRE(names.size() == 6);
    for (const std::string& name : names) {
      CAPTURE(name);
      const ExperimentConfig config = scenario_preset(name);
      CHECK(config.scenario == name);
      CHECK_NOTHROW(validate(config));
      CHECK(to_key_values(config).find("scenario=" + name) !=
            std::string::npos);
    }
    CHECK_THROWS_AS(scenario_preset("no-such-preset"), usage_error);
  }

  SUBCASE("serialization round-trips through field assignment") {
    ExperimentConfig original = scenario_preset("tgv-l8-statevector");
    original.seed = 99;
    original.out_dir = "/tmp/somewhere";
    const std::string text = to_key_values(original);

    ExperimentConfig rebuilt;
    for (const std::string& line : split_lines(text)) {
      const size_t eq = line.find('=');
      REQUIRE(eq != std::string::npos);
      set_config_field(rebuilt, line.substr(0, eq), line.substr(eq + 1));
    }
    CHECK(to_key_values(rebuilt) == text);
  }

  SUBCASE("unknown keys and malformed numbers are usage errors") {
    ExperimentConfig config;
    CHECK_THROWS_AS(set_config_field(config, "bananas", "3"), usage_error);
    CHECK_THROWS_AS(set_config_field(config, "lx", "two"), usage_error);
    CHECK_THROWS_AS(set_config_field(config, "tau", "fast"), usage_error);
    CHECK_THROWS_AS(parse_mode("quantum"), usage_error);
    CHECK(parse_mode("statevector") == RunMode::kStatevector);
    CHECK(to_string(RunMode::kClassicalLbm) == "classical-lbm");
  }

  SUBCASE("validation names the offending field") {
    const auto rejects = [](void (*mutate)(ExperimentConfig&),
                            const std::string& needle) {
      ExperimentConfig config;  // defaults are valid
      config.steps = 1;
      mutate(config);
      try {
        validate(config);
        FAIL_CHECK("expected usage_error mentioning '" << needle << "'");
      } catch (const usage_error& e) {
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
      }
    };
    rejects([](ExperimentConfig& c) { c.lx = 3; }, "lx");
    rejects([](ExperimentConfig& c) { c.ly = 6; }, "ly");
    rejects([](ExperimentConfig& c) { c.tau = 0.0; }, "tau");
    rejects([](ExperimentConfig& c) { c.tau = -2.0; }, "tau");
    rejects([](ExperimentConfig& c) { c.init = "checkerboard"; }, "init");
    rejects(
        [](ExperimentConfig& c) {
          c.init = "taylor-green";
          c.k_mode = "quarter";
        },
        "k_mode");
    rejects(
        [](ExperimentConfig& c) {
          c.init = "taylor-green";
          c.u_max = 0.0;
        },
        "u_max");
    rejects([](ExperimentConfig& c) { c.amplitude = 1.0; }, "amplitude");
    rejects([](ExperimentConfig& c) { c.steps = -1; }, "steps");
    rejects(
        [](ExperimentConfig& c) {
          c.steps = 0;
          c.mode = RunMode::kStatevector;
        },
        "steps");
    rejects(
        [](ExperimentConfig& c) {
          c.mode = RunMode::kShots;
          c.shots = 0;
        },
        "shots");
    // A register that does not fit the emulator is rejected up front for the
    // quantum modes only.
    rejects(
        [](ExperimentConfig& c) {
          c.lx = 32;
          c.ly = 32;
          c.mode = RunMode::kStatevector;
        },
        "lx");
    ExperimentConfig classical = scenario_preset("tgv-l32-classical");
    CHECK_NOTHROW(validate(classical));
  }

  SUBCASE("config files: comments, whitespace, preset seeding, overrides") {
    const std::string dir = temp_dir("config");
    const std::string path = dir + "/experiment.cfg";
    {
      std::ofstream os(path);
      os << "# comment line\n";
      os << "\n";
      os << "scenario = random-l2-statevector\n";
      os << "  steps = 3   # trailing comment\n";
      os << "seed=42\n";
    }
    const ExperimentConfig config = load_config_file(path);
    CHECK(config.scenario == "random-l2-statevector");
    CHECK(config.lx == 2);          // from the preset
    CHECK(config.steps == 3);       // overridden
    CHECK(config.seed == 42);       // overridden
    CHECK(config.tau == 5.0);       // from the preset

    {
      std::ofstream os(path);
      os << "steps 3\n";
    }
    CHECK_THROWS_AS(load_config_file(path), usage_error);
    CHECK_THROWS_AS(load_config_file(dir + "/missing.cfg"), usage_error);
    fs::remove_all(dir);
  }
}

TEST_CASE("run subcommand: full statevector experiment directory") {
  const std::string dir = temp_dir("run_sv");
  REQUIRE(call_cli({"run", "--scenario", "random-l2-statevector", "--out",
                    dir}) == 0);

  SUBCASE("all expected files exist") {
    for (const char* name :
         {"manifest.txt", "config.txt", "probabilities.csv", "costs.csv",
          "sigma_f.csv", "sigma_g.csv"}) {
      CAPTURE(name);
      CHECK(fs::exists(fs::path(dir) / name));
    }
    CHECK(run_io::count_f_steps(dir) == 6);
    for (int t = 0; t <= 5; ++t) {
      CHECK(run_io::has_g_step(dir, t));
    }
    CHECK_FALSE(run_io::has_estimated_f(dir));
  }

  SUBCASE("manifest records the resolved configuration") {
    const auto manifest = run_io::read_manifest(dir);
    CHECK(manifest.at("version") == run_io::kCodeVersion);
    CHECK(manifest.at("scenario") == "random-l2-statevector");
    CHECK(manifest.at("lx") == "2");
    CHECK(manifest.at("ly") == "2");
    CHECK(manifest.at("mode") == "statevector");
    CHECK(manifest.at("steps") == "5");
  }

  SUBCASE("step 0 is the seeded initial condition, decoded") {
    // The quantum run records step 0 as the decoded prepared state, i.e.
    // (f/Z) * Z per entry, so agreement is to rounding, not bit-exact.
    const DistributionField expected =
        random_init(LatticeGrid(2, 2), 12345, 0.2);
    const DistributionField written = run_io::read_f_step(dir, 0);
    REQUIRE(written.values.size() == expected.values.size());
    for (size_t k = 0; k < expected.values.size(); ++k) {
      CHECK(written.values[k] ==
            doctest::Approx(expected.values[k]).epsilon(1e-13));
    }
  }

  SUBCASE("probability table has one row per recorded step") {
    const auto lines = split_lines(read_text_file(dir + "/probabilities.csv"));
    REQUIRE(lines.size() == 7);  // header + steps 0..5
    CHECK(lines[0] ==
          "step,success_probability,cumulative_probability,global_scale,"
          "a_diag_population,a_lcu_population");
    const auto prepared = split_csv(lines[1]);
    REQUIRE(prepared.size() == 6);
    CHECK(prepared[0] == "0");
    CHECK(std::stod(prepared[1]) == 1.0);
    double cumulative = 1.0;
    for (size_t r = 1; r < lines.size(); ++r) {
      const auto cells = split_csv(lines[r]);
      const double p = std::stod(cells[1]);
      CHECK(p > 0.0);
      CHECK(p <= 1.0);
      cumulative *= p;
      CHECK(std::stod(cells[2]) == doctest::Approx(cumulative).epsilon(1e-12));
      CHECK(std::stod(cells[4]) <= 1e-12);  // a_diag population
      CHECK(std::stod(cells[5]) <= 1e-12);  // a_lcu population
    }
  }

  SUBCASE("reruns are byte-identical") {
    const std::string dir2 = temp_dir("run_sv_again");
    REQUIRE(call_cli({"run", "--scenario", "random-l2-statevector", "--out",
                      dir2}) == 0);
    for (const char* name : {"step_5_f.csv", "step_5_g.csv",
                             "probabilities.csv", "costs.csv"}) {
      CAPTURE(name);
      CHECK(read_text_file(dir + "/" + name) ==
            read_text_file(dir2 + "/" + name));
    }
    // Manifests agree on everything except the output directory itself.
    auto manifest_a = run_io::read_manifest(dir);
    auto manifest_b = run_io::read_manifest(dir2);
    manifest_a.erase("out");
    manifest_b.erase("out");
    CHECK(manifest_a == manifest_b);
    fs::remove_all(dir2);
  }

  SUBCASE("flag overrides land in the manifest") {
    const std::string dir3 = temp_dir("run_override");
    REQUIRE(call_cli({"run", "--scenario", "random-l2-statevector", "--steps",
                      "2", "--tau", "1.0", "--out", dir3}) == 0);
    const auto manifest = run_io::read_manifest(dir3);
    CHECK(manifest.at("steps") == "2");
    CHECK(manifest.at("tau") == "1");
    CHECK(run_io::count_f_steps(dir3) == 3);
    fs::remove_all(dir3);
  }

  fs::remove_all(dir);
}

TEST_CASE("run subcommand: usage errors exit with code 2") {
  CHECK(call_cli({"run", "--scenario", "random-l2-statevector"}) == 2);
  CHECK(call_cli({"run", "--scenario", "does-not-exist", "--out", "/tmp/x"}) ==
        2);
  CHECK(call_cli({"run", "--scenario", "random-l2-statevector", "--config",
                  "also.cfg", "--out", "/tmp/x"}) == 2);
  CHECK(call_cli({"run", "--lx", "2", "--ly", "2", "--mode", "shots",
                  "--steps", "1", "--out", "/tmp/x"}) == 2);
  CHECK(call_cli({"run", "--lx", "3", "--ly", "2", "--out", "/tmp/x"}) == 2);
  CHECK(call_cli({"frobnicate"}) == 2);
  CHECK(call_cli({}) == 2);
  CHECK(call_cli({"--help"}) == 0);
}

TEST_CASE("compare subcommand: gated error reports between run directories") {
  // One classical pair-evolution reference and one statevector run with the
  // same seed and lattice.
  const std::string sv = temp_dir("cmp_sv");
  const std::string cc = temp_dir("cmp_cc");
  const std::string lbm = temp_dir("cmp_lbm");
  REQUIRE(call_cli({"run", "--scenario", "random-l2-statevector", "--out",
                    sv}) == 0);
  REQUIRE(call_cli({"run", "--scenario", "random-l2-statevector", "--mode",
                    "classical-carleman", "--out", cc}) == 0);
  REQUIRE(call_cli({"run", "--scenario", "random-l2-statevector", "--mode",
                    "classical-lbm", "--out", lbm}) == 0);

  SUBCASE("a run compared with itself reports zero error everywhere") {
    const std::string report = temp_dir("cmp_report");
    REQUIRE(call_cli({"compare", sv, sv, "--tolerance", "0", "--out",
                      report}) == 0);
    const auto lines = split_lines(read_text_file(report + "/report.csv"));
    REQUIRE(lines.size() > 1);
    CHECK(lines[0] == "step,array,max_abs,max_rel,rel_l2");
    for (size_t r = 1; r < lines.size(); ++r) {
      const auto cells = split_csv(lines[r]);
      REQUIRE(cells.size() == 5);
      CHECK(std::stod(cells[2]) == 0.0);
      CHECK(std::stod(cells[3]) == 0.0);
      CHECK(std::stod(cells[4]) == 0.0);
    }
    const auto summary = parse_key_values(read_text_file(report +
                                                         "/summary.txt"));
    CHECK(std::stod(summary.at("gated_metric")) == 0.0);
    fs::remove_all(report);
  }

  SUBCASE("statevector agrees with the classical pair evolution") {
    CHECK(call_cli({"compare", sv, cc, "--tolerance", "1e-9"}) == 0);
  }

  SUBCASE("the quadratic truncation is visible against the exact reference") {
    // The pair evolution drops the cubic collision term, so a tight
    // tolerance against plain collide-and-stream must fail.
    CHECK(call_cli({"compare", cc, lbm, "--tolerance", "1e-12"}) == 1);
    // ... and a loose one passes.
    CHECK(call_cli({"compare", cc, lbm, "--tolerance", "0.5"}) == 0);
  }

  SUBCASE("missing directories are a numeric failure, not a crash") {
    CHECK(call_cli({"compare", "/nonexistent/a", "/nonexistent/b"}) == 3);
  }

  fs::remove_all(sv);
  fs::remove_all(cc);
  fs::remove_all(lbm);
}

TEST_CASE("compare subcommand: count-based runs gate dominant channels") {
  const std::string shots = temp_dir("cmp_shots");
  const std::string ref = temp_dir("cmp_shots_ref");
  REQUIRE(call_cli({"run", "--lx", "2", "--ly", "2", "--tau", "5", "--steps",
                    "1", "--mode", "shots", "--shots", "4000000", "--seed",
                    "7", "--out", shots}) == 0);
  REQUIRE(call_cli({"run", "--lx", "2", "--ly", "2", "--tau", "5", "--steps",
                    "1", "--mode", "classical-carleman", "--seed", "7",
                    "--out", ref}) == 0);

  CHECK(fs::exists(fs::path(shots) / "counts.csv"));
  CHECK(fs::exists(fs::path(shots) / "estimated_f.csv"));
  CHECK(fs::exists(fs::path(shots) / "estimated_g.csv"));
  CHECK(run_io::has_estimated_f(shots));

  // Estimates carry sampling noise: a tight gate fails, a loose one passes.
  CHECK(call_cli({"compare", shots, ref, "--tolerance", "1e-9"}) == 1);
  CHECK(call_cli({"compare", shots, ref, "--tolerance", "0.25"}) == 0);

  fs::remove_all(shots);
  fs::remove_all(ref);
}

TEST_CASE("tgv subcommand: vortex benchmark across engines") {
  SUBCASE("classical engines write velocity grids and the summary") {
    const std::string dir = temp_dir("tgv_classical");
    REQUIRE(call_cli({"tgv", "--lx", "8", "--ly", "8", "--init",
                      "taylor-green", "--k-mode", "full", "--tau", "5",
                      "--steps", "5", "--mode", "classical-carleman", "--out",
                      dir}) == 0);
    for (int t = 0; t <= 5; ++t) {
      CHECK(fs::exists(fs::path(dir) / ("lbm_step_" + std::to_string(t) +
                                        ".csv")));
      CHECK(fs::exists(fs::path(dir) / ("carleman_step_" + std::to_string(t) +
                                        ".csv")));
      CHECK(fs::exists(fs::path(dir) / ("diff_step_" + std::to_string(t) +
                                        ".csv")));
    }
    // Both engines start from the same field, so step 0 grids are identical.
    CHECK(read_text_file(dir + "/lbm_step_0.csv") ==
          read_text_file(dir + "/carleman_step_0.csv"));

    const auto summary = parse_key_values(read_text_file(dir +
                                                         "/summary.txt"));
    CHECK(summary.at("steps") == "5");
    CHECK(summary.at("diff_pair") == "carleman-lbm");
    CHECK(std::stod(summary.at("lbm_mass_drift")) <= 1e-12);
    const double rel_l2 =
        std::stod(summary.at("carleman_vs_lbm_final_velocity_rel_l2"));
    CHECK(rel_l2 > 0.0);
    CHECK(rel_l2 < 0.1);
    fs::remove_all(dir);
  }

  SUBCASE("statevector engine matches the classical pair evolution") {
    const std::string dir = temp_dir("tgv_sv");
    REQUIRE(call_cli({"tgv", "--lx", "2", "--ly", "2", "--init",
                      "taylor-green", "--k-mode", "half", "--tau", "5",
                      "--steps", "3", "--mode", "statevector", "--out", dir,
                      "--tolerance", "1e-9"}) == 0);
    CHECK(fs::exists(fs::path(dir) / "statevector_step_3.csv"));
    const auto summary = parse_key_values(read_text_file(dir +
                                                         "/summary.txt"));
    CHECK(summary.at("diff_pair") == "statevector-carleman");
    CHECK(std::stod(summary.at("max_velocity_diff")) <= 1e-9);
    fs::remove_all(dir);
  }

  SUBCASE("vortex runs require the vortex initial condition") {
    CHECK(call_cli({"tgv", "--lx", "2", "--ly", "2", "--init", "random",
                    "--out", "/tmp/x"}) == 2);
  }
}

TEST_CASE("cost subcommand: scaling table and quadratic per-step model") {
  const std::string dir = temp_dir("cost");
  const std::string csv_path = dir + "/cost.csv";
  REQUIRE(call_cli({"cost", "--out", csv_path}) == 0);

  const auto lines = split_lines(read_text_file(csv_path));
  REQUIRE(lines.size() > 1);
  CHECK(lines[0] == "lx,ly,sites,site_bits,component,gate_count_model");

  std::map<int, std::map<std::string, long long>> by_bits;
  for (size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv(lines[r]);
    REQUIRE(cells.size() == 6);
    by_bits[std::stoi(cells[3])][cells[4]] = std::stoll(cells[5]);
  }
  REQUIRE(by_bits.size() == 4);  // default sizes 2, 4, 8, 16

  SUBCASE("tabulated counts follow the closed-form model") {
    for (const auto& [bits, components] : by_bits) {
      CAPTURE(bits);
      const long long sb = bits;
      CHECK(components.at("permutation") == sb * sb * sb);
      CHECK(components.at("propagation") == 120 * sb * sb);
      CHECK(components.at("per_step") == 1622 + 122 * sb * sb);
      CHECK(components.at("plan_length") == sb);
      // One load per amplitude: 9 channels per site.
      CHECK(components.at("state_prep") == (1LL << sb) * 9);
      CHECK(components.at("measurement") == components.at("state_prep"));
      // The coordinate permutation runs once at preparation; a step is one
      // collision plus one propagation.
      CHECK(components.at("per_step") ==
            components.at("collision") + components.at("propagation"));
    }
  }

  SUBCASE("per-step counts fit a + b * site_bits^2 with zero residual") {
    // Independent least-squares fit on the tabulated values.
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (const auto& [bits, components] : by_bits) {
      const double x = static_cast<double>(bits) * bits;
      const double y = static_cast<double>(components.at("per_step"));
      s1 += 1;
      sx += x;
      sxx += x * x;
      sy += y;
      sxy += x * y;
    }
    const double det = s1 * sxx - sx * sx;
    const double a = (sxx * sy - sx * sxy) / det;
    const double b = (s1 * sxy - sx * sy) / det;
    CHECK(a == doctest::Approx(1622.0).epsilon(1e-9));
    CHECK(b == doctest::Approx(122.0).epsilon(1e-9));
    for (const auto& [bits, components] : by_bits) {
      const double model = a + b * bits * bits;
      CHECK(std::abs(components.at("per_step") - model) /
                components.at("per_step") <
            0.01);
    }
  }

  SUBCASE("permutation cost grows as the cube of the address width") {
    std::vector<double> xs, ys;
    for (const auto& [bits, components] : by_bits) {
      xs.push_back(static_cast<double>(bits));
      ys.push_back(static_cast<double>(components.at("permutation")));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < xs.size(); ++k) {
      const double lx = std::log(xs[k]);
      const double ly = std::log(ys[k]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    const double n = static_cast<double>(xs.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(3.0).epsilon(1e-9));
  }

  SUBCASE("explicit sizes select the tabulated rows") {
    const std::string small_csv = dir + "/small.csv";
    REQUIRE(call_cli({"cost", "--lx", "2", "--lx", "4", "--out",
                      small_csv}) == 0);
    const auto small_lines = split_lines(read_text_file(small_csv));
    CHECK(small_lines.size() == 1 + 2 * 7);  // header + 7 components per size
  }

  fs::remove_all(dir);
}

TEST_CASE("run directory readers invert the writers") {
  const std::string dir = temp_dir("roundtrip");
  const LatticeGrid grid(4, 2);
  const DistributionField f = random_init(grid, 5, 0.3);

  SUBCASE("per-step distribution files") {
    run_io::write_f_step(dir, 3, f);
    CHECK(run_io::has_f_step(dir, 3));
    CHECK_FALSE(run_io::has_f_step(dir, 2));
    const DistributionField back = run_io::read_f_step(dir, 3);
    CHECK(back.values == f.values);
    CHECK(back.grid == grid);
    // Steps are only counted from zero upward without gaps.
    CHECK(run_io::count_f_steps(dir) == 0);
    run_io::write_f_step(dir, 0, f);
    CHECK(run_io::count_f_steps(dir) == 1);
  }

  SUBCASE("pair-field files in natural coordinates") {
    const int n = grid.sites();
    std::vector<double> g(static_cast<size_t>(n) * n * 81);
    for (size_t k = 0; k < g.size(); ++k) {
      g[k] = std::sin(static_cast<double>(k) + 0.25);
    }
    run_io::write_g_step(dir, 1, grid, g);
    CHECK(run_io::has_g_step(dir, 1));
    const std::vector<double> back = run_io::read_g_step(dir, 1, grid);
    CHECK(back == g);
  }

  SUBCASE("manifest echoes every config field") {
    ExperimentConfig config = scenario_preset("random-l4-shots");
    config.out_dir = dir;
    run_io::write_manifest(dir, config);
    const auto manifest = run_io::read_manifest(dir);
    CHECK(manifest.at("version") == run_io::kCodeVersion);
    for (const std::string& line : split_lines(to_key_values(config))) {
      const size_t eq = line.find('=');
      REQUIRE(eq != std::string::npos);
      CHECK(manifest.at(line.substr(0, eq)) == line.substr(eq + 1));
    }
  }

  fs::remove_all(dir);
}
