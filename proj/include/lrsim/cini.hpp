#pragma once

#include <functional>

#include "lrsim/decoherence.hpp"

namespace lrsim {

// One measured-system level: energy E_k(t) and detector coupling g_k(t).
struct CiniLevel {
  ScalarFunction energy;
  ScalarFunction g_re;
  ScalarFunction g_im;
};

// M-level system coupled to a two-boson detector, restricted to the sector
// of fixed occupations (n1, n2). The sector carries spin j = (n1+n2)/2.
struct CiniModel {
  std::vector<CiniLevel> levels;
  ScalarFunction omega1;
  ScalarFunction omega2;
  int n1 = 0;
  int n2 = 0;

  double j_spin() const { return 0.5 * (n1 + n2); }
  double n_total() const { return 0.5 * (n1 + n2); }  // eigenvalue of N
  int sector_dim() const { return n1 + n2 + 1; }
};

void validate(const CiniModel& model);

// H_{n,k}(t) = E_k + n(w1+w2) + g_k J+ + g_k* J- + (w1-w2) J3 on the sector.
struct BranchHamiltonian {
  int level = 0;
  double j_spin = 0.0;
  double n_total = 0.0;
  ScalarFunction energy;
  ScalarFunction g_re;
  ScalarFunction g_im;
  ScalarFunction omega1;
  ScalarFunction omega2;

  complexd coupling(double t) const { return {g_re.value(t), g_im.value(t)}; }
  double jz_coefficient(double t) const { return omega1.value(t) - omega2.value(t); }
  double scalar_offset(double t) const {
    return energy.value(t) + n_total * (omega1.value(t) + omega2.value(t));
  }
};

BranchHamiltonian reduce_to_sector(const CiniModel& model, int k);

// Dense matrix of the branch Hamiltonian; rep must be the (m=1, n=2, j)
// realization of the sector.
cmatrix branch_matrix(const BranchHamiltonian& bh, const Representation& rep, double t,
                      bool include_offset = true);

// Inverse of the coefficient parameterization with m=1, n=2:
//   omega = sqrt((w1-w2)^2 + 4|g|^2), theta = atan2(2|g|, w1-w2),
//   phi = -arg(g) (unwrapped along t).
// The scalar offset only contributes the c-number phase
// exp(-i Int (E_k + n(w1+w2)) dt) and is returned separately.
struct BranchProtocol {
  Protocol protocol;
  std::function<double(double)> scalar_offset;
  // omega vanished somewhere: theta fixed to 0 there by convention.
  bool degenerate = false;
};

// Constant inputs map to exact constant profiles; time-dependent inputs are
// sampled on a grid of width sample_step (default T/2048) and interpolated.
BranchProtocol branch_protocol(const BranchHamiltonian& bh, double T,
                               double sample_step = 0.0);

// Matrix-element decoherence series between levels k and l with detector
// state |j, j>. Throws degenerate_branch_error when either branch is
// degenerate.
DecoherenceSeries level_pair_decoherence(const CiniModel& model, int k, int l, double T,
                                         double step, AuxMode mode);

// |Psi(t)> = sum_k c_k |Phi_k>|psi_k(t)> in the system (x) detector basis.
struct CompositeState {
  std::vector<double> times;
  int system_dim = 0;
  int detector_dim = 0;
  std::vector<cvector> states;  // flattened, detector index fastest

  // Partial trace over the detector.
  cmatrix reduced_system(std::size_t t_index) const;
};

CompositeState composite_state(const CiniModel& model,
                               const std::vector<complexd>& coefficients,
                               const std::vector<Trajectory>& branch_trajectories);

}  // namespace lrsim
