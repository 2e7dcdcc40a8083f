#include "lrsim/decoherence.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lrsim {

const char* to_string(Route r) {
  switch (r) {
    case Route::matrix_element:
      return "matrix-element";
    case Route::closed_form:
      return "closed-form";
    case Route::adiabatic_formula:
      return "adiabatic-formula";
    case Route::oracle_overlap:
      return "oracle-overlap";
  }
  return "unknown";
}

namespace {

DecoherenceSeries make_series(const Representation& rep, const AuxiliarySolution& sol_i,
                              const AuxiliarySolution& sol_j, double lambda, Route route) {
  require_matching_grid(sol_i.times, sol_j.times, "decoherence");
  DecoherenceSeries series;
  series.times = sol_i.times;
  series.F.reserve(sol_i.size());
  series.route = route;
  series.branch_pair = {sol_i.protocol_label, sol_j.protocol_label};
  series.lambda = lambda;
  series.j_spin = rep.j;
  series.mu = lambda / rep.spec.m;
  return series;
}

}  // namespace

DecoherenceSeries decoherence_matrix_element(const Representation& rep,
                                             const AuxiliarySolution& sol_i,
                                             const AuxiliarySolution& sol_j,
                                             double lambda) {
  DecoherenceSeries series =
      make_series(rep, sol_i, sol_j, lambda, Route::matrix_element);
  const int idx = eigenvalue_index(rep, lambda);
  for (std::size_t k = 0; k < sol_i.size(); ++k) {
    const cmatrix vi = build_displacement(rep, sol_i.at(k));
    const cmatrix vj = build_displacement(rep, sol_j.at(k));
    series.F.push_back(vi.col(idx).dot(vj.col(idx)));
  }
  return series;
}

complexd decoherence_closed_form(complexd beta_i, complexd beta_j, double lambda,
                                 const Representation& rep) {
  const int idx = eigenvalue_index(rep, lambda);
  const complexd prefactor = std::exp(
      0.5 * rep.spec.n * lambda * (beta_i * std::conj(beta_j) - std::conj(beta_i) * beta_j));
  const complexd d = beta_j - beta_i;
  const cmatrix e = expm_skew(d * rep.a_plus - std::conj(d) * rep.a_minus);
  return prefactor * e(idx, idx);
}

DecoherenceSeries decoherence_closed_form_series(const Representation& rep,
                                                 const AuxiliarySolution& sol_i,
                                                 const AuxiliarySolution& sol_j,
                                                 double lambda) {
  DecoherenceSeries series = make_series(rep, sol_i, sol_j, lambda, Route::closed_form);
  for (std::size_t k = 0; k < sol_i.size(); ++k) {
    const complexd bi = displacement_parameters(rep.spec, sol_i.at(k)).beta;
    const complexd bj = displacement_parameters(rep.spec, sol_j.at(k)).beta;
    series.F.push_back(decoherence_closed_form(bi, bj, lambda, rep));
  }
  return series;
}

double adiabatic_cini_factor(double theta_i, double theta_j, double j_spin) {
  if (!is_half_integer(j_spin))
    throw std::invalid_argument("adiabatic_cini_factor: j must be a positive half-integer");
  const double twoj = std::round(2.0 * j_spin);
  return std::pow(std::cos(0.5 * (theta_i - theta_j)), twoj);
}

DecoherenceSeries adiabatic_formula_series(const Representation& rep,
                                           const AuxiliarySolution& sol_i,
                                           const AuxiliarySolution& sol_j,
                                           double lambda) {
  DecoherenceSeries series =
      make_series(rep, sol_i, sol_j, lambda, Route::adiabatic_formula);
  for (std::size_t k = 0; k < sol_i.size(); ++k)
    series.F.push_back(adiabatic_cini_factor(sol_i.a[k], sol_j.a[k], rep.j));
  return series;
}

ScanResult classical_limit_scan(double delta, const std::vector<double>& j_list) {
  ScanResult result;
  result.delta = delta;
  const double dist = std::remainder(0.5 * delta, std::numbers::pi);
  result.excluded_delta = std::abs(dist) < 1e-9;
  result.points.reserve(j_list.size());
  for (double j : j_list)
    result.points.push_back({j, std::abs(adiabatic_cini_factor(delta, 0.0, j))});
  return result;
}

double detector_overlap_vs_factor(const Trajectory& traj_i, const Trajectory& traj_j,
                                  const PhaseDecomposition& phases_i,
                                  const PhaseDecomposition& phases_j,
                                  const DecoherenceSeries& F) {
  require_matching_grid(traj_i.times, traj_j.times, "detector_overlap_vs_factor");
  require_matching_grid(traj_i.times, phases_i.times, "detector_overlap_vs_factor");
  require_matching_grid(traj_i.times, phases_j.times, "detector_overlap_vs_factor");
  require_matching_grid(traj_i.times, F.times, "detector_overlap_vs_factor");

  double worst = 0.0;
  for (std::size_t k = 0; k < traj_i.size(); ++k) {
    const complexd overlap = traj_i.states[k].dot(traj_j.states[k]);
    const complexd predicted =
        std::exp(complexd(0.0, phases_i.phi_total[k] - phases_j.phi_total[k])) * F.F[k];
    worst = std::max(worst, std::abs(overlap - predicted));
  }
  return worst;
}

}  // namespace lrsim
