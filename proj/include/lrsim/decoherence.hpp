#pragma once

#include <utility>

#include "lrsim/invariant.hpp"

namespace lrsim {

enum class Route { matrix_element, closed_form, adiabatic_formula, oracle_overlap };
const char* to_string(Route r);

struct DecoherenceSeries {
  std::vector<double> times;
  std::vector<complexd> F;
  Route route = Route::matrix_element;
  std::pair<std::string, std::string> branch_pair;
  double lambda = 0.0;
  double j_spin = 0.0;  // detector labels
  double mu = 0.0;

  std::size_t size() const { return times.size(); }
};

// Ground-truth route: F(t) = <lambda| V_i^dag(t) V_j(t) |lambda>.
DecoherenceSeries decoherence_matrix_element(const Representation& rep,
                                             const AuxiliarySolution& sol_i,
                                             const AuxiliarySolution& sol_j,
                                             double lambda);

// Printed closed form, implemented verbatim:
//   exp[(n lambda / 2)(beta_i beta_j* - beta_i* beta_j)]
//     * <lambda| exp[(beta_j - beta_i) A+ - (beta_j* - beta_i*) A-] |lambda>.
// Exact whenever beta_i and beta_j share a phase; otherwise callers should
// compare it against the matrix-element route and report the discrepancy.
complexd decoherence_closed_form(complexd beta_i, complexd beta_j, double lambda,
                                 const Representation& rep);

DecoherenceSeries decoherence_closed_form_series(const Representation& rep,
                                                 const AuxiliarySolution& sol_i,
                                                 const AuxiliarySolution& sol_j,
                                                 double lambda);

// [cos((theta_i - theta_j)/2)]^{2j}: highest-weight detector, aligned b's.
double adiabatic_cini_factor(double theta_i, double theta_j, double j_spin);

// adiabatic_cini_factor along two solutions' a(t).
DecoherenceSeries adiabatic_formula_series(const Representation& rep,
                                           const AuxiliarySolution& sol_i,
                                           const AuxiliarySolution& sol_j,
                                           double lambda);

struct ScanPoint {
  double j = 0.0;
  double abs_F = 0.0;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  double delta = 0.0;
  // delta/2 within 1e-9 of a multiple of pi: |F| stays 1 for every j.
  bool excluded_delta = false;
};

ScanResult classical_limit_scan(double delta, const std::vector<double>& j_list);

// Max modulus deviation of <Psi_i|Psi_j> from e^{i(phi_i - phi_j)} F_{i,j}.
double detector_overlap_vs_factor(const Trajectory& traj_i, const Trajectory& traj_j,
                                  const PhaseDecomposition& phases_i,
                                  const PhaseDecomposition& phases_j,
                                  const DecoherenceSeries& F);

}  // namespace lrsim
