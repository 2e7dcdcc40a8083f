#include "lrsim/oracle.hpp"

#include <cmath>
#include <sstream>

namespace lrsim {

void require_matching_grid(const std::vector<double>& lhs, const std::vector<double>& rhs,
                           const char* context) {
  if (lhs.size() != rhs.size()) {
    std::ostringstream os;
    os << context << ": grid size mismatch (" << lhs.size() << " vs " << rhs.size() << ")";
    throw std::invalid_argument(os.str());
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(lhs.empty() ? 0.0 : lhs.back()));
  for (std::size_t k = 0; k < lhs.size(); ++k) {
    if (std::abs(lhs[k] - rhs[k]) > tol) {
      std::ostringstream os;
      os << context << ": grids disagree at index " << k;
      throw std::invalid_argument(os.str());
    }
  }
}

Trajectory propagate(const HamiltonianFn& hamiltonian, const cvector& psi0, double T,
                     double step, std::string label) {
  if (std::abs(psi0.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("propagate: initial state must be normalized");

  Trajectory traj;
  traj.times = make_grid(T, step);
  traj.states.reserve(traj.times.size());
  traj.states.push_back(psi0);
  traj.branch_label = std::move(label);

  cvector psi = psi0;
  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    const double h = traj.times[k + 1] - traj.times[k];
    const double tm = traj.times[k] + 0.5 * h;
    const cmatrix u = expm_skew(complexd(0.0, -h) * hamiltonian(tm));
    psi = u * psi;
    traj.states.push_back(psi);
  }
  return traj;
}

Trajectory propagate(const Representation& rep, const Protocol& p, const cvector& psi0,
                     double T, double step) {
  Trajectory traj = propagate(
      [&](double t) { return hamiltonian_matrix(p, rep, t); }, psi0, T, step, p.label);
  return traj;
}

double schrodinger_residual(const Trajectory& traj, const HamiltonianFn& hamiltonian) {
  if (traj.size() < 3)
    throw std::invalid_argument("schrodinger_residual: need at least three grid points");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k - 1];
    const cvector lhs = complexd(0.0, 1.0) * (traj.states[k + 1] - traj.states[k - 1]) / dt;
    const cvector rhs = hamiltonian(traj.times[k]) * traj.states[k];
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

double schrodinger_residual(const Trajectory& traj, const Representation& rep,
                            const Protocol& p) {
  return schrodinger_residual(
      traj, [&](double t) { return hamiltonian_matrix(p, rep, t); });
}

std::vector<complexd> overlap_series(const Trajectory& traj_i, const Trajectory& traj_j) {
  require_matching_grid(traj_i.times, traj_j.times, "overlap_series");
  std::vector<complexd> out;
  out.reserve(traj_i.size());
  for (std::size_t k = 0; k < traj_i.size(); ++k)
    out.push_back(traj_i.states[k].dot(traj_j.states[k]));
  return out;
}

}  // namespace lrsim
