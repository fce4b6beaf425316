#pragma once

#include <map>
#include <string>
#include <vector>

#include "qlbm/config.hpp"
#include "qlbm/field.hpp"
#include "qlbm/qlbm_circuit.hpp"

namespace qlbm::run_io {

/// Version string recorded in every manifest.
inline constexpr const char* kCodeVersion = "qlbm 1.0.0";

void ensure_dir(const std::string& dir);

/// manifest.txt: code version plus every config field, deterministic order,
/// no timestamps — a directory is reproducible from its manifest alone.
void write_manifest(const std::string& dir, const ExperimentConfig& config);

/// config.txt: the canonical key=value echo of the config.
void write_config_echo(const std::string& dir, const ExperimentConfig& config);

/// step_<t>_f.csv ("x,y,i,f").
void write_f_step(const std::string& dir, int t, const DistributionField& f);
DistributionField read_f_step(const std::string& dir, int t);
bool has_f_step(const std::string& dir, int t);

/// step_<t>_g.csv ("x1,y1,x2,y2,i,j,g"), natural pair coordinates.
void write_g_step(const std::string& dir, int t, const LatticeGrid& grid,
                  const std::vector<double>& g_natural);
std::vector<double> read_g_step(const std::string& dir, int t,
                                const LatticeGrid& grid);
bool has_g_step(const std::string& dir, int t);

/// probabilities.csv: one row per recorded step.
void write_probabilities(const std::string& dir,
                         const std::vector<StepRecord>& records);

/// costs.csv ("step,component,gate_count_model").
void write_costs(const std::string& dir, const std::vector<CostEntry>& costs);

/// counts.csv ("bitstring,count").
void write_counts(const std::string& dir,
                  const std::map<std::uint64_t, long long>& counts,
                  int n_qubits);

/// estimated_f.csv / estimated_g.csv: count-based field estimates.
void write_estimated_fields(const std::string& dir, const LatticeGrid& grid,
                            const std::vector<double>& f_estimated,
                            const std::vector<double>& g_estimated);
bool has_estimated_f(const std::string& dir);
DistributionField read_estimated_f(const std::string& dir,
                                   const LatticeGrid& grid);
std::vector<double> read_estimated_g(const std::string& dir,
                                     const LatticeGrid& grid);

/// sigma_f.csv ("x,y,sigma_f") and sigma_g.csv ("x1,y1,x2,y2,sigma_g").
void write_observables(const std::string& dir, const LatticeGrid& grid,
                       const Observables& obs);

/// Velocity grid "x,y,ux,uy" (for vortex comparisons).
void write_velocity_grid(const std::string& path, const LatticeGrid& grid,
                         const Macroscopics& macro);

std::map<std::string, std::string> read_manifest(const std::string& dir);

/// Number of consecutive step_<t>_f.csv files starting at t = 0.
int count_f_steps(const std::string& dir);

}  // namespace qlbm::run_io
