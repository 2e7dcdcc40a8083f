#include "lrsim/auxiliary.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace lrsim {

AuxiliaryRates auxiliary_rhs(const AuxiliaryState& s, const ProtocolValues& pv,
                             const AlgebraSpec& spec, double sin_floor) {
  const double r = spec.root_half_mn();
  const double delta = s.b - pv.phi;
  const double sin_a = std::sin(s.a);
  if (std::abs(sin_a) < sin_floor)
    throw singularity_error(std::numeric_limits<double>::quiet_NaN(), s.a, s.b);
  AuxiliaryRates rates;
  rates.da_dt = -r * pv.omega * std::sin(pv.theta) * std::sin(delta);
  rates.db_dt = spec.m * pv.omega * std::cos(pv.theta) -
                r * pv.omega * (std::cos(s.a) / sin_a) * std::sin(pv.theta) * std::cos(delta);
  return rates;
}

const char* to_string(AuxMode mode) {
  switch (mode) {
    case AuxMode::integrated:
      return "integrated";
    case AuxMode::stationary:
      return "stationary";
    case AuxMode::adiabatic:
      return "adiabatic";
  }
  return "unknown";
}

namespace {

// One RK4 sweep along the grid. Singularities get stamped with the step time.
std::vector<AuxiliaryState> rk4_path(const Protocol& p, const AlgebraSpec& spec,
                                     AuxiliaryState y, const std::vector<double>& grid,
                                     double sin_floor) {
  const auto f = [&](double t, const AuxiliaryState& s) {
    return auxiliary_rhs(s, evaluate(p, t), spec, sin_floor);
  };

  std::vector<AuxiliaryState> path;
  path.reserve(grid.size());
  path.push_back(y);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = grid[k];
    const double h = grid[k + 1] - grid[k];
    try {
      const AuxiliaryRates k1 = f(t, y);
      const AuxiliaryRates k2 =
          f(t + 0.5 * h, {y.a + 0.5 * h * k1.da_dt, y.b + 0.5 * h * k1.db_dt});
      const AuxiliaryRates k3 =
          f(t + 0.5 * h, {y.a + 0.5 * h * k2.da_dt, y.b + 0.5 * h * k2.db_dt});
      const AuxiliaryRates k4 = f(t + h, {y.a + h * k3.da_dt, y.b + h * k3.db_dt});
      y.a += h / 6.0 * (k1.da_dt + 2.0 * k2.da_dt + 2.0 * k3.da_dt + k4.da_dt);
      y.b += h / 6.0 * (k1.db_dt + 2.0 * k2.db_dt + 2.0 * k3.db_dt + k4.db_dt);
    } catch (const singularity_error& e) {
      throw singularity_error(t, e.a, e.b);
    }
    path.push_back(y);
  }
  return path;
}

std::vector<double> refine_grid(const std::vector<double>& grid) {
  std::vector<double> fine;
  fine.reserve(2 * grid.size());
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    fine.push_back(grid[k]);
    fine.push_back(0.5 * (grid[k] + grid[k + 1]));
  }
  fine.push_back(grid.back());
  return fine;
}

}  // namespace

AuxiliarySolution solve_auxiliary(const Protocol& p, const AlgebraSpec& spec,
                                  AuxiliaryState init, double T, const SolveOptions& opts) {
  validate(spec);
  const double step = opts.step > 0.0 ? opts.step : default_step(p);
  const std::vector<double> grid = make_grid(T, step);
  const std::vector<AuxiliaryState> path = rk4_path(p, spec, init, grid, opts.sin_floor);

  if (opts.richardson_check) {
    const std::vector<AuxiliaryState> fine =
        rk4_path(p, spec, init, refine_grid(grid), opts.sin_floor);
    const AuxiliaryState& c = path.back();
    const AuxiliaryState& fn = fine.back();
    const double err = std::max(std::abs(c.a - fn.a), std::abs(c.b - fn.b));
    const double scale = 1.0 + std::max(std::abs(fn.a), std::abs(fn.b));
    if (err > opts.richardson_tol * scale) {
      std::ostringstream os;
      os << "step-halving check failed: terminal deviation " << err << " exceeds "
         << opts.richardson_tol * scale << " (step " << step << ")";
      throw step_size_error(os.str());
    }
  }

  AuxiliarySolution sol;
  sol.times = grid;
  sol.a.reserve(path.size());
  sol.b.reserve(path.size());
  for (const auto& s : path) {
    sol.a.push_back(s.a);
    sol.b.push_back(s.b);
  }
  sol.mode = AuxMode::integrated;
  sol.protocol_label = p.label;
  return sol;
}

AuxiliarySolution adiabatic_solution(const Protocol& p, double T, double step) {
  AuxiliarySolution sol;
  sol.times = make_grid(T, step);
  sol.a.reserve(sol.times.size());
  sol.b.reserve(sol.times.size());
  for (double t : sol.times) {
    const ProtocolValues pv = evaluate(p, t);
    sol.a.push_back(pv.theta);
    sol.b.push_back(pv.phi);
  }
  sol.mode = AuxMode::adiabatic;
  sol.protocol_label = p.label;
  return sol;
}

AuxiliarySolution stationary_solution(const Protocol& p, AuxiliaryState point, double T,
                                      double step) {
  AuxiliarySolution sol;
  sol.times = make_grid(T, step);
  sol.a.assign(sol.times.size(), point.a);
  sol.b.assign(sol.times.size(), point.b);
  sol.mode = AuxMode::stationary;
  sol.protocol_label = p.label;
  return sol;
}

double auxiliary_fd_residual(const AuxiliarySolution& sol, const Protocol& p,
                             const AlgebraSpec& spec) {
  if (sol.size() < 3)
    throw std::invalid_argument("auxiliary_fd_residual: need at least three grid points");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < sol.size(); ++k) {
    const double dt = sol.times[k + 1] - sol.times[k - 1];
    const AuxiliaryRates rhs = auxiliary_rhs(sol.at(k), evaluate(p, sol.times[k]), spec);
    const double ra = (sol.a[k + 1] - sol.a[k - 1]) / dt - rhs.da_dt;
    const double rb = (sol.b[k + 1] - sol.b[k - 1]) / dt - rhs.db_dt;
    worst = std::max({worst, std::abs(ra), std::abs(rb)});
  }
  return worst;
}

AuxiliaryState default_initial_state(const Protocol& p) {
  const ProtocolValues pv = evaluate(p, 0.0);
  return {pv.theta, pv.phi};
}

}  // namespace lrsim
