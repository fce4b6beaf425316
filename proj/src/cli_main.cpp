#include "qlbm/cli_main.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "qlbm/carleman.hpp"
#include "qlbm/compare.hpp"
#include "qlbm/config.hpp"
#include "qlbm/field_io.hpp"
#include "qlbm/lbm.hpp"
#include "qlbm/local_encoding.hpp"
#include "qlbm/qlbm_circuit.hpp"
#include "qlbm/run_io.hpp"

namespace qlbm::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitToleranceFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

/// Sites up to which the pair field is kept (and written) densely.
constexpr int kDensePairSiteLimit = 64;

/// Reference-channel gate for count-based comparisons: a channel counts as
/// dominant when its reference value exceeds this fraction of the site mass.
constexpr double kDominantChannelFraction = 0.01;

struct CommonFlags {
  std::string config_file;
  std::string scenario;
  ExperimentConfig overrides;  // staging area for CLI values
  bool has_lx = false, has_ly = false, has_tau = false, has_umax = false;
  bool has_steps = false, has_mode = false, has_shots = false;
  bool has_seed = false, has_out = false, has_init = false;
  bool has_kmode = false, has_amplitude = false;
  std::string mode_text;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_file,
                  "key=value config file to start from");
  cmd->add_option("--scenario", flags.scenario,
                  "built-in scenario preset to start from");
  cmd->add_option("--lx", flags.overrides.lx, "lattice extent in x")
      ->each([&flags](const std::string&) { flags.has_lx = true; });
  cmd->add_option("--ly", flags.overrides.ly, "lattice extent in y")
      ->each([&flags](const std::string&) { flags.has_ly = true; });
  cmd->add_option("--tau", flags.overrides.tau, "relaxation time")
      ->each([&flags](const std::string&) { flags.has_tau = true; });
  cmd->add_option("--umax", flags.overrides.u_max, "vortex velocity amplitude")
      ->each([&flags](const std::string&) { flags.has_umax = true; });
  cmd->add_option("--steps", flags.overrides.steps, "time steps")
      ->each([&flags](const std::string&) { flags.has_steps = true; });
  cmd->add_option("--mode", flags.mode_text,
                  "statevector | shots | classical-carleman | classical-lbm")
      ->each([&flags](const std::string&) { flags.has_mode = true; });
  cmd->add_option("--shots", flags.overrides.shots,
                  "measurement shots (shots mode)")
      ->each([&flags](const std::string&) { flags.has_shots = true; });
  cmd->add_option("--seed", flags.overrides.seed, "random seed")
      ->each([&flags](const std::string&) { flags.has_seed = true; });
  cmd->add_option("--out", flags.overrides.out_dir, "output directory")
      ->each([&flags](const std::string&) { flags.has_out = true; });
  cmd->add_option("--init", flags.overrides.init,
                  "initial condition: random | taylor-green")
      ->each([&flags](const std::string&) { flags.has_init = true; });
  cmd->add_option("--k-mode", flags.overrides.k_mode,
                  "vortex wave vector: full | half")
      ->each([&flags](const std::string&) { flags.has_kmode = true; });
  cmd->add_option("--amplitude", flags.overrides.amplitude,
                  "random-init perturbation amplitude")
      ->each([&flags](const std::string&) { flags.has_amplitude = true; });
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  if (!flags.config_file.empty() && !flags.scenario.empty()) {
    throw usage_error("pass either --config or --scenario, not both");
  }
  ExperimentConfig config;
  if (!flags.scenario.empty()) {
    config = scenario_preset(flags.scenario);
  } else if (!flags.config_file.empty()) {
    config = load_config_file(flags.config_file);
  }
  if (flags.has_lx) config.lx = flags.overrides.lx;
  if (flags.has_ly) config.ly = flags.overrides.ly;
  if (flags.has_tau) config.tau = flags.overrides.tau;
  if (flags.has_umax) config.u_max = flags.overrides.u_max;
  if (flags.has_steps) config.steps = flags.overrides.steps;
  if (flags.has_mode) config.mode = parse_mode(flags.mode_text);
  if (flags.has_shots) config.shots = flags.overrides.shots;
  if (flags.has_seed) config.seed = flags.overrides.seed;
  if (flags.has_out) config.out_dir = flags.overrides.out_dir;
  if (flags.has_init) config.init = flags.overrides.init;
  if (flags.has_kmode) config.k_mode = flags.overrides.k_mode;
  if (flags.has_amplitude) config.amplitude = flags.overrides.amplitude;
  validate(config);
  return config;
}

DistributionField make_initial_field(const ExperimentConfig& config) {
  const LatticeGrid grid(config.lx, config.ly);
  if (config.init == "random") {
    return random_init(grid, config.seed, config.amplitude);
  }
  return taylor_green_init(grid, config.u_max,
                           config.k_mode == "full"
                               ? TgvWavenumber::kFullPeriod
                               : TgvWavenumber::kHalfPeriod);
}

DistributionField field_from_values(const LatticeGrid& grid,
                                    const std::vector<double>& values,
                                    int time) {
  DistributionField f(grid);
  f.values = values;
  f.time = time;
  return f;
}

// ---------------------------------------------------------------- run ----

int cmd_run(const ExperimentConfig& config) {
  if (config.out_dir.empty()) {
    throw usage_error("config field 'out': required for run");
  }
  const LatticeGrid grid(config.lx, config.ly);
  run_io::ensure_dir(config.out_dir);
  run_io::write_manifest(config.out_dir, config);
  run_io::write_config_echo(config.out_dir, config);

  const DistributionField f0 = make_initial_field(config);

  if (config.mode == RunMode::kClassicalLbm) {
    DistributionField f = f0;
    run_io::write_f_step(config.out_dir, 0, f);
    for (int t = 1; t <= config.steps; ++t) {
      f = bgk_step(f, config.tau);
      run_io::write_f_step(config.out_dir, t, f);
    }
    std::cout << "wrote " << config.steps + 1 << " reference steps to "
              << config.out_dir << "\n";
    return kExitOk;
  }

  if (config.mode == RunMode::kClassicalCarleman) {
    const PairStorage storage = grid.sites() <= kDensePairSiteLimit
                                    ? PairStorage::kDense
                                    : PairStorage::kImplicit;
    const auto series = carleman_run(f0, config.tau, config.steps, storage);
    for (size_t t = 0; t < series.size(); ++t) {
      run_io::write_f_step(config.out_dir, static_cast<int>(t),
                           series[t].f_field());
      if (storage == PairStorage::kDense) {
        run_io::write_g_step(config.out_dir, static_cast<int>(t), grid,
                             series[t].g);
      }
    }
    if (storage == PairStorage::kDense) {
      run_io::write_observables(
          config.out_dir, grid,
          estimate_observables(grid, series.back().f, series.back().g));
    }
    std::cout << "wrote " << series.size() << " pair-evolution steps to "
              << config.out_dir << "\n";
    return kExitOk;
  }

  // Quantum modes.
  QlbmCircuit circuit(grid, config.tau);
  const long long shots = config.mode == RunMode::kShots ? config.shots : 0;
  const RunRecord rec = circuit.run(f0, config.steps, shots, config.seed);

  for (const StepRecord& sr : rec.step_records) {
    run_io::write_f_step(config.out_dir, sr.step,
                         field_from_values(grid, sr.f, sr.step));
    run_io::write_g_step(config.out_dir, sr.step, grid, sr.g);
  }
  run_io::write_probabilities(config.out_dir, rec.step_records);
  run_io::write_costs(config.out_dir, rec.costs);
  run_io::write_observables(
      config.out_dir, grid,
      estimate_observables(grid, rec.step_records.back().f,
                           rec.step_records.back().g));
  if (shots > 0) {
    run_io::write_counts(config.out_dir, rec.counts, circuit.layout().total);
    run_io::write_estimated_fields(config.out_dir, grid, rec.f_estimated,
                                   rec.g_estimated);
  }
  std::cout << "wrote " << rec.step_records.size() << " circuit steps to "
            << config.out_dir << " (cumulative success probability "
            << rec.cumulative_probability() << ")\n";
  return kExitOk;
}

// ------------------------------------------------------------ compare ----

struct StepError {
  int step;
  std::string array;
  ErrorStats stats;
};

void write_report_csv(const std::string& path,
                      const std::vector<StepError>& rows) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open " + path);
  }
  os << "step,array,max_abs,max_rel,rel_l2\n";
  char buf[64];
  for (const StepError& r : rows) {
    os << r.step << ',' << r.array;
    std::snprintf(buf, sizeof(buf), "%.17g", r.stats.max_abs);
    os << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", r.stats.max_rel);
    os << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", r.stats.rel_l2);
    os << ',' << buf << '\n';
  }
}

/// Max relative error over channels whose reference value exceeds the
/// dominant-channel fraction of the site mass.
double dominant_channel_error(const DistributionField& test,
                              const DistributionField& ref) {
  double worst = 0.0;
  for (int s = 0; s < ref.grid.sites(); ++s) {
    double mass = 0.0;
    for (int i = 0; i < 9; ++i) {
      mass += ref.at(s, i);
    }
    for (int i = 0; i < 9; ++i) {
      if (ref.at(s, i) > kDominantChannelFraction * mass) {
        worst = std::max(
            worst, std::abs(test.at(s, i) - ref.at(s, i)) / ref.at(s, i));
      }
    }
  }
  return worst;
}

int cmd_compare(const std::string& run_a, const std::string& run_b,
                std::optional<double> tolerance, const std::string& out_dir) {
  const auto manifest_a = run_io::read_manifest(run_a);
  const auto manifest_b = run_io::read_manifest(run_b);
  const auto geometry = [](const std::map<std::string, std::string>& m) {
    return LatticeGrid(std::stoi(m.at("lx")), std::stoi(m.at("ly")));
  };
  const LatticeGrid grid_a = geometry(manifest_a);
  const LatticeGrid grid_b = geometry(manifest_b);
  if (!(grid_a == grid_b)) {
    throw std::runtime_error("compare: runs have different lattice shapes");
  }
  const LatticeGrid grid = grid_a;

  std::cout << "run_a: " << run_a << " (" << manifest_a.at("mode") << ")\n";
  std::cout << "run_b: " << run_b << " (" << manifest_b.at("mode")
            << ", reference)\n";

  std::vector<StepError> rows;
  double gated_metric = 0.0;
  const int steps_b = run_io::count_f_steps(run_b);
  if (steps_b == 0) {
    throw std::runtime_error("compare: no step files in " + run_b);
  }
  const int final_b = steps_b - 1;

  const bool count_based = run_io::has_estimated_f(run_a);
  if (count_based) {
    // Count-estimated fields against the reference's final step. Only
    // dominant channels are gated; everything else is reported.
    const DistributionField est = run_io::read_estimated_f(run_a, grid);
    const DistributionField ref = run_io::read_f_step(run_b, final_b);
    const ErrorStats stats = compare_values(est.values, ref.values);
    rows.push_back({final_b, "f_estimated", stats});
    gated_metric = dominant_channel_error(est, ref);
    std::cout << "estimated f vs reference step " << final_b
              << ": dominant-channel max rel error " << gated_metric
              << " (all-channel max rel " << stats.max_rel << ")\n";
    if (run_io::has_g_step(run_b, final_b) &&
        std::filesystem::exists(std::filesystem::path(run_a) /
                                "estimated_g.csv")) {
      const std::vector<double> est_g = run_io::read_estimated_g(run_a, grid);
      const std::vector<double> ref_g =
          run_io::read_g_step(run_b, final_b, grid);
      const ErrorStats gstats = compare_values(est_g, ref_g);
      rows.push_back({final_b, "g_estimated", gstats});
      std::cout << "estimated g vs reference step " << final_b
                << ": max rel error " << gstats.max_rel
                << " (reported, not gated)\n";
    }
  } else {
    const int steps_a = run_io::count_f_steps(run_a);
    const int common = std::min(steps_a, steps_b);
    if (common == 0) {
      throw std::runtime_error("compare: no step files in " + run_a);
    }
    for (int t = 0; t < common; ++t) {
      const DistributionField fa = run_io::read_f_step(run_a, t);
      const DistributionField fb = run_io::read_f_step(run_b, t);
      const FieldComparison cmp = compare_fields(fa, fb);
      rows.push_back({t, "f", cmp.overall});
      gated_metric = std::max(gated_metric, cmp.overall.max_rel);
      std::cout << "step " << t << " f: max rel " << cmp.overall.max_rel
                << ", rel L2 " << cmp.overall.rel_l2 << "\n";
      if (run_io::has_g_step(run_a, t) && run_io::has_g_step(run_b, t)) {
        const ErrorStats gstats =
            compare_values(run_io::read_g_step(run_a, t, grid),
                           run_io::read_g_step(run_b, t, grid));
        rows.push_back({t, "g", gstats});
        gated_metric = std::max(gated_metric, gstats.max_rel);
        std::cout << "step " << t << " g: max rel " << gstats.max_rel
                  << ", rel L2 " << gstats.rel_l2 << "\n";
      }
    }
  }

  // Mass observables on the final common data.
  {
    const DistributionField fa = count_based
                                     ? run_io::read_estimated_f(run_a, grid)
                                     : run_io::read_f_step(
                                           run_a, std::min(run_io::count_f_steps(
                                                               run_a),
                                                           steps_b) -
                                                      1);
    const DistributionField fb = run_io::read_f_step(run_b, final_b);
    std::vector<double> sa(grid.sites(), 0.0), sb(grid.sites(), 0.0);
    for (int s = 0; s < grid.sites(); ++s) {
      for (int i = 0; i < 9; ++i) {
        sa[s] += fa.at(s, i);
        sb[s] += fb.at(s, i);
      }
    }
    const ErrorStats sigma_stats = compare_values(sa, sb);
    rows.push_back({final_b, "sigma_f", sigma_stats});
    std::cout << "sigma_f: max rel " << sigma_stats.max_rel << ", rel L2 "
              << sigma_stats.rel_l2 << "\n";
  }

  if (!out_dir.empty()) {
    run_io::ensure_dir(out_dir);
    write_report_csv((std::filesystem::path(out_dir) / "report.csv").string(),
                     rows);
    std::ofstream os(std::filesystem::path(out_dir) / "summary.txt");
    os << "run_a=" << run_a << "\nrun_b=" << run_b << "\ngated_metric="
       << gated_metric << "\n";
  }

  if (tolerance) {
    std::cout << "gated metric " << gated_metric << " vs tolerance "
              << *tolerance << ": "
              << (gated_metric <= *tolerance ? "PASS" : "FAIL") << "\n";
    return gated_metric <= *tolerance ? kExitOk : kExitToleranceFail;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- tgv ----

Macroscopics velocity_of(const DistributionField& f) { return macroscopics(f); }

double max_velocity_diff(const Macroscopics& a, const Macroscopics& b) {
  double worst = 0.0;
  for (size_t s = 0; s < a.u.size(); ++s) {
    worst = std::max(worst, std::abs(a.u[s].x - b.u[s].x));
    worst = std::max(worst, std::abs(a.u[s].y - b.u[s].y));
  }
  return worst;
}

double velocity_rel_l2(const Macroscopics& a, const Macroscopics& b) {
  std::vector<double> va, vb;
  va.reserve(a.u.size() * 2);
  vb.reserve(b.u.size() * 2);
  for (size_t s = 0; s < a.u.size(); ++s) {
    va.push_back(a.u[s].x);
    va.push_back(a.u[s].y);
    vb.push_back(b.u[s].x);
    vb.push_back(b.u[s].y);
  }
  return relative_l2(va, vb);
}

void write_velocity_diff(const std::string& path, const LatticeGrid& grid,
                         const Macroscopics& a, const Macroscopics& b) {
  std::ofstream os(path);
  if (!os) {
    throw std::runtime_error("cannot open " + path);
  }
  os << "x,y,ux,uy\n";
  char bx[64], by[64];
  for (int x = 0; x < grid.lx(); ++x) {
    for (int y = 0; y < grid.ly(); ++y) {
      const size_t s = static_cast<size_t>(grid.index(x, y));
      std::snprintf(bx, sizeof(bx), "%.17g", a.u[s].x - b.u[s].x);
      std::snprintf(by, sizeof(by), "%.17g", a.u[s].y - b.u[s].y);
      os << x << ',' << y << ',' << bx << ',' << by << '\n';
    }
  }
}

int cmd_tgv(const ExperimentConfig& config, std::optional<double> tolerance) {
  if (config.init != "taylor-green") {
    throw usage_error("config field 'init': tgv requires taylor-green");
  }
  if (config.out_dir.empty()) {
    throw usage_error("config field 'out': required for tgv");
  }
  const LatticeGrid grid(config.lx, config.ly);
  run_io::ensure_dir(config.out_dir);
  run_io::write_manifest(config.out_dir, config);

  const DistributionField f0 = make_initial_field(config);
  const auto path_of = [&](const std::string& engine, int t) {
    return (std::filesystem::path(config.out_dir) /
            (engine + "_step_" + std::to_string(t) + ".csv"))
        .string();
  };

  // Reference collide-and-stream evolution.
  std::vector<Macroscopics> lbm_u;
  double mass_drift = 0.0;
  {
    DistributionField f = f0;
    const double mass0 = f.total_mass();
    lbm_u.push_back(velocity_of(f));
    run_io::write_velocity_grid(path_of("lbm", 0), grid, lbm_u.back());
    for (int t = 1; t <= config.steps; ++t) {
      f = bgk_step(f, config.tau);
      mass_drift = std::max(mass_drift, std::abs(f.total_mass() - mass0));
      lbm_u.push_back(velocity_of(f));
      run_io::write_velocity_grid(path_of("lbm", t), grid, lbm_u.back());
    }
  }

  // Second-order pair evolution (dense at small sizes, implicit otherwise).
  std::vector<Macroscopics> carleman_u;
  {
    const PairStorage storage = grid.sites() <= kDensePairSiteLimit
                                    ? PairStorage::kDense
                                    : PairStorage::kImplicit;
    const auto series = carleman_run(f0, config.tau, config.steps, storage);
    for (size_t t = 0; t < series.size(); ++t) {
      carleman_u.push_back(velocity_of(series[t].f_field()));
      run_io::write_velocity_grid(path_of("carleman", static_cast<int>(t)),
                                  grid, carleman_u.back());
    }
  }

  // Optional quantum engine on top.
  std::vector<Macroscopics> engine_u;
  const bool quantum = config.mode == RunMode::kStatevector;
  if (quantum) {
    QlbmCircuit circuit(grid, config.tau);
    const RunRecord rec = circuit.run(f0, config.steps);
    for (const StepRecord& sr : rec.step_records) {
      engine_u.push_back(velocity_of(field_from_values(grid, sr.f, sr.step)));
      run_io::write_velocity_grid(path_of("statevector", sr.step), grid,
                                  engine_u.back());
    }
  }

  // Difference grids: quantum vs classical pair evolution when present,
  // otherwise pair evolution vs reference.
  const std::vector<Macroscopics>& diff_a = quantum ? engine_u : carleman_u;
  const std::vector<Macroscopics>& diff_b = quantum ? carleman_u : lbm_u;
  double max_diff = 0.0;
  for (size_t t = 0; t < diff_a.size(); ++t) {
    write_velocity_diff(path_of("diff", static_cast<int>(t)), grid, diff_a[t],
                        diff_b[t]);
    max_diff = std::max(max_diff, max_velocity_diff(diff_a[t], diff_b[t]));
  }
  const double final_rel_l2 = velocity_rel_l2(carleman_u.back(), lbm_u.back());

  {
    std::ofstream os(std::filesystem::path(config.out_dir) / "summary.txt");
    os << "steps=" << config.steps << "\n";
    os << "lbm_mass_drift=" << mass_drift << "\n";
    os << "carleman_vs_lbm_final_velocity_rel_l2=" << final_rel_l2 << "\n";
    os << "diff_pair=" << (quantum ? "statevector-carleman" : "carleman-lbm")
       << "\n";
    os << "max_velocity_diff=" << max_diff << "\n";
  }
  std::cout << "vortex run " << grid.lx() << "x" << grid.ly() << ", "
            << config.steps << " steps: pair-evolution vs reference final "
            << "velocity rel L2 = " << final_rel_l2 << "\n";
  std::cout << "reference mass drift " << mass_drift << "\n";
  if (quantum) {
    std::cout << "statevector vs classical pair evolution: max velocity diff "
              << max_diff << "\n";
  }

  if (tolerance) {
    const double metric = quantum ? max_diff : final_rel_l2;
    std::cout << "metric " << metric << " vs tolerance " << *tolerance << ": "
              << (metric <= *tolerance ? "PASS" : "FAIL") << "\n";
    return metric <= *tolerance ? kExitOk : kExitToleranceFail;
  }
  return kExitOk;
}

// --------------------------------------------------------------- cost ----

/// Least-squares slope of log(y) against log(x).
double fit_power_exponent(const std::vector<double>& x,
                          const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_cost(std::vector<int> sizes, const std::string& out_path) {
  if (sizes.empty()) {
    sizes = {2, 4, 8, 16};
  }
  std::ostringstream csv;
  csv << "lx,ly,sites,site_bits,component,gate_count_model\n";
  std::vector<double> bits, permutation, propagation, per_step;
  for (int l : sizes) {
    const LatticeGrid grid(l, l);
    const CostModel cm(grid);
    const auto row = [&](const std::string& component, long long count) {
      csv << l << ',' << l << ',' << grid.sites() << ',' << grid.site_bits()
          << ',' << component << ',' << count << '\n';
    };
    row("state_prep", cm.amplitude_load());
    row("permutation", cm.permutation_phase());
    row("collision", cm.collision_phase());
    row("propagation", cm.propagation_phase());
    row("per_step", cm.per_step());
    row("measurement", cm.amplitude_load());
    row("plan_length", grid.site_bits());
    bits.push_back(grid.site_bits());
    permutation.push_back(static_cast<double>(cm.permutation_phase()));
    propagation.push_back(static_cast<double>(cm.propagation_phase()));
    per_step.push_back(static_cast<double>(cm.per_step()));
  }

  std::ostringstream fit;
  fit << "fit permutation ~ site_bits^e: e = "
      << fit_power_exponent(bits, permutation) << "\n";
  fit << "fit propagation ~ site_bits^e: e = "
      << fit_power_exponent(bits, propagation) << "\n";
  {
    // Least-squares a + b * site_bits^2 for the per-step total.
    double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (size_t k = 0; k < bits.size(); ++k) {
      const double x = bits[k] * bits[k];
      s1 += 1;
      sx += x;
      sxx += x * x;
      sy += per_step[k];
      sxy += x * per_step[k];
    }
    const double det = s1 * sxx - sx * sx;
    const double a = (sxx * sy - sx * sxy) / det;
    const double b = (s1 * sxy - sx * sy) / det;
    double max_resid = 0.0;
    for (size_t k = 0; k < bits.size(); ++k) {
      const double model = a + b * bits[k] * bits[k];
      max_resid = std::max(max_resid,
                           std::abs(per_step[k] - model) / per_step[k]);
    }
    fit << "fit per_step = a + b*site_bits^2: a = " << a << ", b = " << b
        << ", max relative residual = " << max_resid << "\n";
  }

  if (out_path.empty()) {
    std::cout << csv.str() << fit.str();
  } else {
    std::ofstream os(out_path);
    if (!os) {
      throw std::runtime_error("cannot open " + out_path);
    }
    os << csv.str();
    std::cout << fit.str();
  }
  return kExitOk;
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{
      "Quantum lattice-Boltzmann emulator with a relative-coordinate pair "
      "encoding"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd =
      app.add_subcommand("run", "execute one experiment into a run directory");
  add_common_flags(run_cmd, run_flags);

  std::string cmp_a, cmp_b, cmp_out;
  double cmp_tolerance = -1.0;
  bool cmp_has_tolerance = false;
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "error report between two run directories");
  cmp_cmd->add_option("run_a", cmp_a, "run directory under test")->required();
  cmp_cmd->add_option("run_b", cmp_b, "reference run directory")->required();
  cmp_cmd->add_option("--out", cmp_out, "directory for report files");
  cmp_cmd->add_option("--tolerance", cmp_tolerance,
                      "max allowed gated relative error")
      ->each([&cmp_has_tolerance](const std::string&) {
        cmp_has_tolerance = true;
      });

  CommonFlags tgv_flags;
  double tgv_tolerance = -1.0;
  bool tgv_has_tolerance = false;
  CLI::App* tgv_cmd = app.add_subcommand(
      "tgv", "vortex benchmark: velocity grids for all engines");
  add_common_flags(tgv_cmd, tgv_flags);
  tgv_cmd->add_option("--tolerance", tgv_tolerance,
                      "max allowed velocity discrepancy")
      ->each([&tgv_has_tolerance](const std::string&) {
        tgv_has_tolerance = true;
      });

  std::vector<int> cost_sizes;
  std::string cost_out;
  CLI::App* cost_cmd =
      app.add_subcommand("cost", "gate-count scaling table across sizes");
  cost_cmd->add_option("--lx", cost_sizes,
                       "square lattice extents (default 2 4 8 16)");
  cost_cmd->add_option("--out", cost_out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      return cmd_run(resolve_config(run_flags));
    }
    if (cmp_cmd->parsed()) {
      return cmd_compare(cmp_a, cmp_b,
                         cmp_has_tolerance
                             ? std::optional<double>(cmp_tolerance)
                             : std::nullopt,
                         cmp_out);
    }
    if (tgv_cmd->parsed()) {
      return cmd_tgv(resolve_config(tgv_flags),
                     tgv_has_tolerance ? std::optional<double>(tgv_tolerance)
                                       : std::nullopt);
    }
    if (cost_cmd->parsed()) {
      return cmd_cost(cost_sizes, cost_out);
    }
    std::cerr << "no subcommand selected\n";
    return kExitUsage;
  } catch (const usage_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace qlbm::cli
