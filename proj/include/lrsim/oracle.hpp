#pragma once

#include <functional>

#include "lrsim/protocol.hpp"

namespace lrsim {

struct Trajectory {
  std::vector<double> times;
  std::vector<cvector> states;
  std::string branch_label;
  std::string initial_state;

  std::size_t size() const { return times.size(); }
};

using HamiltonianFn = std::function<cmatrix(double)>;

// Brute-force time-ordered propagation with the midpoint-exponential rule
//   psi(t+h) = exp(-i h H(t+h/2)) psi(t),
// exactly unitary per step and second-order accurate. psi0 must be
// normalized within 1e-12.
Trajectory propagate(const HamiltonianFn& hamiltonian, const cvector& psi0, double T,
                     double step, std::string label = "");
Trajectory propagate(const Representation& rep, const Protocol& p, const cvector& psi0,
                     double T, double step);

// Max over interior grid points of || i (psi_{k+1}-psi_{k-1})/(2h) - H(t_k) psi_k ||.
double schrodinger_residual(const Trajectory& traj, const HamiltonianFn& hamiltonian);
double schrodinger_residual(const Trajectory& traj, const Representation& rep,
                            const Protocol& p);

// <psi_i(t)|psi_j(t)> per grid point; grids must match.
std::vector<complexd> overlap_series(const Trajectory& traj_i, const Trajectory& traj_j);

// Throws invalid_argument unless the two grids agree pointwise.
void require_matching_grid(const std::vector<double>& lhs, const std::vector<double>& rhs,
                           const char* context);

}  // namespace lrsim
