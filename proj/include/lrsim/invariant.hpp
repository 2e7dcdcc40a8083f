#pragma once

#include "lrsim/auxiliary.hpp"
#include "lrsim/oracle.hpp"

namespace lrsim {

// beta = -(a/2) x e^{-ib} with x = 1/sqrt(mn/2).
struct DisplacementParameters {
  complexd beta;
  double x = 0.0;
};

DisplacementParameters displacement_parameters(const AlgebraSpec& spec,
                                               const AuxiliaryState& s);

// I = y [ (1/2) sin a e^{-ib} A+ + (1/2) sin a e^{ib} A- ] + cos a A_z,
// y = m / sqrt(mn/2). Hermitian and isospectral with A_z for every (a, b).
cmatrix build_invariant(const Representation& rep, const AuxiliaryState& s);

// V = exp(beta A+ - beta* A-); unitary.
cmatrix build_displacement(const Representation& rep, const AuxiliaryState& s);

// Max over interior grid points of || dI/dt + (1/i)[I, H] ||_max with dI/dt
// by centered differences on the solution grid.
double invariant_residual(const Representation& rep, const Protocol& p,
                          const AuxiliarySolution& sol);

// || V^dag I V - A_z ||_max at one (a, b).
double displacement_conjugation_defect(const Representation& rep,
                                       const AuxiliaryState& s);

// h(t) in H_V = h(t) A_z:
//   h = omega [cos a cos theta + (sqrt(mn/2)/m) sin a sin theta cos(b-phi)]
//       + (db/dt / m)(1 - cos a).
double transformed_hamiltonian_coefficient(const ProtocolValues& pv,
                                           const AuxiliaryState& s, double db_dt,
                                           const AlgebraSpec& spec);

// Full-matrix defect of H_V = V^dag H V - V^dag (i dV/dt) along a solution:
// how far it is from diagonal, and how far its diagonal is from
// h(t) * spec(A_z). dV/dt uses centered differences on the grid.
struct TransformedHamiltonianDefect {
  double max_offdiagonal = 0.0;
  double max_diagonal_error = 0.0;
};
TransformedHamiltonianDefect transformed_hamiltonian_defect(
    const Representation& rep, const Protocol& p, const AuxiliarySolution& sol,
    std::size_t max_samples = 0);

struct PhaseDecomposition {
  double lambda = 0.0;
  std::vector<double> times;
  std::vector<double> phi_d;
  std::vector<double> phi_g;
  std::vector<double> phi_total;

  std::size_t size() const { return times.size(); }
};

// Cumulative dynamical and geometric phases along the solution for the A_z
// eigenvalue lambda. db/dt comes from auxiliary_rhs along the solution,
// except in adiabatic mode where b == phi by construction and the protocol
// derivative is the consistent rate.
PhaseDecomposition phases(const AuxiliarySolution& sol, const Protocol& p,
                          const Representation& rep, double lambda);

// (lambda/m) * 2*pi * (1 - cos a): geometric phase of one full b-loop at
// constant a.
double solid_angle_phase(double a, double lambda, double m);

// exp(-i phi_total(t_k)) V(t_k) |lambda>.
cvector lr_state(const Representation& rep, const AuxiliarySolution& sol,
                 const PhaseDecomposition& ph, double lambda, std::size_t t_index);

// lr_state over the whole grid, packaged as a Trajectory.
Trajectory lr_trajectory(const Representation& rep, const AuxiliarySolution& sol,
                         const PhaseDecomposition& ph, double lambda);

}  // namespace lrsim
