#pragma once

#include <filesystem>
#include <optional>

#include "lrsim/cini.hpp"
#include "lrsim/config.hpp"

namespace lrsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Check thresholds; every one can be overridden from the [tolerances]
// section of the scenario file.
struct Tolerances {
  double commutator = 1e-13;            // times the entry scale
  double invariant_residual = 1e-6;
  double displacement_conjugation = 1e-11;
  double hv_offdiagonal = 1e-5;
  double hv_coefficient = 1e-5;
  double lr_schrodinger = 1e-4;         // relative to max ||H||
  double oracle_overlap = 1e-6;         // 1 - min overlap
  double overlap_vs_factor = 1e-5;
  double abs_f_excess = 1e-10;          // max |F| - 1
  double f_symmetry = 1e-12;
  double sin_floor = kDefaultSinFloor;
};

struct BranchSpec {
  std::string label;
  Protocol protocol;
  AuxiliaryState init;
  bool explicit_init = false;  // false: default (theta(0), phi(0)) convention
  AuxMode mode = AuxMode::integrated;
};

struct ScanSpec {
  double j_max = 25.0;
  std::optional<double> delta;  // default: theta_i(0) - theta_j(0)
};

struct CiniScenario {
  CiniModel model;
  int level_i = 0;
  int level_j = 1;
  AuxMode mode = AuxMode::integrated;
};

struct Scenario {
  AlgebraSpec algebra;
  double j = 0.5;
  double T = 1.0;
  double step = 0.0;                // 0: default_step over the branches
  std::optional<double> lambda;     // default: m*j (highest weight)
  std::vector<Route> routes;
  std::vector<BranchSpec> branches;  // protocol scenarios
  std::optional<CiniScenario> cini;  // cini scenarios (exclusive with branches)
  std::optional<ScanSpec> scan;
  std::string output_dir = "out";
  Tolerances tol;
  bool richardson = false;
};

// Builds and validates a scenario; throws config_error naming the offending
// section/key.
Scenario load_scenario(const Config& cfg);

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool overall_pass() const;
};

struct RunOptions {
  std::optional<double> step;
  std::optional<std::string> output_dir;
  bool dump_trajectories = false;
};

// Pipelines; all return kExitOk/kExitNumerical and write CSV + report files
// into the resolved output directory.
int run_scenario(const Scenario& sc, const RunOptions& opts = {});
int verify_scenario(const Scenario& sc, const RunOptions& opts = {});
int scan_scenario(const Scenario& sc, const RunOptions& opts = {},
                  std::optional<double> delta_override = {},
                  std::optional<double> j_max_override = {});

// Branches with solved auxiliary systems and phases, on a shared grid.
struct PreparedBranch {
  BranchSpec spec;
  AuxiliarySolution sol;
  PhaseDecomposition ph;
  HamiltonianFn oracle_h;
};

struct PreparedScenario {
  Representation rep;
  double step = 0.0;
  double lambda = 0.0;
  std::vector<PreparedBranch> branches;
};

PreparedScenario prepare_scenario(const Scenario& sc, const RunOptions& opts = {});

// CSV emitters; floats printed with 17 significant digits, fixed order.
std::string format_float(double v);
void write_aux_csv(const std::filesystem::path& path, const AuxiliarySolution& sol);
void write_phases_csv(const std::filesystem::path& path, const PhaseDecomposition& ph);
void write_decoherence_csv(const std::filesystem::path& path,
                           const std::vector<DecoherenceSeries>& series);
void write_scan_csv(const std::filesystem::path& path, const ScanResult& scan);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_report_csv(const std::filesystem::path& path, const VerificationReport& report);

}  // namespace lrsim
