#pragma once

#include "lrsim/protocol.hpp"

namespace lrsim {

struct AuxiliaryState {
  double a = 0.0;
  double b = 0.0;
};

struct AuxiliaryRates {
  double da_dt = 0.0;
  double db_dt = 0.0;
};

inline constexpr double kDefaultSinFloor = 1e-6;

// Real reduced form of the invariant parameter equations:
//   da/dt = -sqrt(mn/2) * omega * sin(theta) * sin(b - phi)
//   db/dt =  m * omega * cos(theta)
//            - sqrt(mn/2) * omega * (cos a / sin a) * sin(theta) * cos(b - phi)
// Throws singularity_error when |sin a| < sin_floor.
AuxiliaryRates auxiliary_rhs(const AuxiliaryState& s, const ProtocolValues& pv,
                             const AlgebraSpec& spec,
                             double sin_floor = kDefaultSinFloor);

enum class AuxMode { integrated, stationary, adiabatic };
const char* to_string(AuxMode mode);

struct AuxiliarySolution {
  std::vector<double> times;
  std::vector<double> a;
  std::vector<double> b;
  AuxMode mode = AuxMode::integrated;
  std::string protocol_label;

  std::size_t size() const { return times.size(); }
  AuxiliaryState at(std::size_t k) const { return {a[k], b[k]}; }
};

struct SolveOptions {
  double step = 0.0;  // <= 0 picks default_step(protocol)
  bool richardson_check = false;
  double richardson_tol = 1e-6;
  double sin_floor = kDefaultSinFloor;
};

// Fixed-step classical RK4 on the uniform grid over [0, T].
AuxiliarySolution solve_auxiliary(const Protocol& p, const AlgebraSpec& spec,
                                  AuxiliaryState init, double T,
                                  const SolveOptions& opts = {});

// a(t) = theta(t), b(t) = phi(t) sampled on the grid.
AuxiliarySolution adiabatic_solution(const Protocol& p, double T, double step);

// Constant (a, b) on the grid; exact for constant protocols started at the
// stationary point.
AuxiliarySolution stationary_solution(const Protocol& p, AuxiliaryState point,
                                      double T, double step);

// Max defect between centered finite differences of the solution and the
// right-hand side, over interior grid points.
double auxiliary_fd_residual(const AuxiliarySolution& sol, const Protocol& p,
                             const AlgebraSpec& spec);

// Default initial condition (theta(0), phi(0)); aligns I(0) with H(0).
AuxiliaryState default_initial_state(const Protocol& p);

}  // namespace lrsim
