#include "lrsim/cini.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace lrsim {

void validate(const CiniModel& model) {
  if (model.levels.empty())
    throw std::invalid_argument("cini model: at least one level required");
  if (model.n1 < 0 || model.n2 < 0)
    throw std::invalid_argument("cini model: boson occupations must be non-negative");
  if (model.n1 + model.n2 < 1)
    throw std::invalid_argument("cini model: sector must hold at least one boson");
}

BranchHamiltonian reduce_to_sector(const CiniModel& model, int k) {
  validate(model);
  if (k < 0 || static_cast<std::size_t>(k) >= model.levels.size()) {
    std::ostringstream os;
    os << "reduce_to_sector: level " << k << " out of range (M=" << model.levels.size()
       << ")";
    throw std::invalid_argument(os.str());
  }
  BranchHamiltonian bh;
  bh.level = k;
  bh.j_spin = model.j_spin();
  bh.n_total = model.n_total();
  bh.energy = model.levels[static_cast<std::size_t>(k)].energy;
  bh.g_re = model.levels[static_cast<std::size_t>(k)].g_re;
  bh.g_im = model.levels[static_cast<std::size_t>(k)].g_im;
  bh.omega1 = model.omega1;
  bh.omega2 = model.omega2;
  return bh;
}

cmatrix branch_matrix(const BranchHamiltonian& bh, const Representation& rep, double t,
                      bool include_offset) {
  if (std::abs(rep.spec.m - 1.0) > 1e-12 || std::abs(rep.spec.n - 2.0) > 1e-12 ||
      std::abs(rep.j - bh.j_spin) > 1e-12)
    throw std::invalid_argument("branch_matrix: representation must realize the sector "
                                "with m=1, n=2");
  const complexd g = bh.coupling(t);
  cmatrix h = g * rep.a_plus + std::conj(g) * rep.a_minus +
              bh.jz_coefficient(t) * rep.a_z;
  if (include_offset)
    h += bh.scalar_offset(t) * cmatrix::Identity(rep.dim, rep.dim);
  return h;
}

namespace {

bool constant_inputs(const BranchHamiltonian& bh) {
  const auto is_const = [](const ScalarFunction& f) {
    return f.kind() == ScalarFunction::Kind::constant;
  };
  return is_const(bh.g_re) && is_const(bh.g_im) && is_const(bh.omega1) &&
         is_const(bh.omega2);
}

struct InverseMap {
  double omega = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  bool degenerate = false;
};

InverseMap invert_pointwise(const BranchHamiltonian& bh, double t) {
  InverseMap out;
  const complexd g = bh.coupling(t);
  const double dw = bh.jz_coefficient(t);
  const double gg = std::abs(g);
  out.omega = std::hypot(dw, 2.0 * gg);
  if (out.omega == 0.0) {
    out.degenerate = true;  // any theta works with omega = 0
    return out;
  }
  out.theta = std::atan2(2.0 * gg, dw);
  out.phi = (gg == 0.0) ? 0.0 : -std::arg(g);
  return out;
}

}  // namespace

BranchProtocol branch_protocol(const BranchHamiltonian& bh, double T, double sample_step) {
  BranchProtocol bp;
  bp.scalar_offset = [bh](double t) { return bh.scalar_offset(t); };

  std::ostringstream label;
  label << "level" << bh.level;

  if (constant_inputs(bh)) {
    const InverseMap inv = invert_pointwise(bh, 0.0);
    bp.degenerate = inv.degenerate;
    bp.protocol.omega = ScalarFunction::constant(inv.omega);
    bp.protocol.theta = ScalarFunction::constant(inv.theta);
    bp.protocol.phi = ScalarFunction::constant(inv.phi);
    bp.protocol.horizon = T;
    bp.protocol.label = label.str();
    return bp;
  }

  const double step = sample_step > 0.0 ? sample_step : T / 2048.0;
  const std::vector<double> grid = make_grid(T, step);
  std::vector<double> omegas, thetas, phis;
  omegas.reserve(grid.size());
  thetas.reserve(grid.size());
  phis.reserve(grid.size());
  double prev_phi = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const InverseMap inv = invert_pointwise(bh, grid[k]);
    bp.degenerate = bp.degenerate || inv.degenerate;
    omegas.push_back(inv.omega);
    thetas.push_back(inv.theta);
    // keep phi continuous across the atan2 branch cut
    double phi = inv.phi;
    if (k > 0) {
      const double two_pi = 2.0 * std::numbers::pi;
      phi += two_pi * std::round((prev_phi - phi) / two_pi);
    }
    phis.push_back(phi);
    prev_phi = phi;
  }
  bp.protocol.omega = ScalarFunction::sampled(grid, omegas);
  bp.protocol.theta = ScalarFunction::sampled(grid, thetas);
  bp.protocol.phi = ScalarFunction::sampled(grid, phis);
  bp.protocol.horizon = T;
  bp.protocol.label = label.str();
  return bp;
}

DecoherenceSeries level_pair_decoherence(const CiniModel& model, int k, int l, double T,
                                         double step, AuxMode mode) {
  if (k == l)
    throw std::invalid_argument("level_pair_decoherence: levels must differ");
  const BranchProtocol bk = branch_protocol(reduce_to_sector(model, k), T, step);
  const BranchProtocol bl = branch_protocol(reduce_to_sector(model, l), T, step);
  if (bk.degenerate || bl.degenerate) {
    std::ostringstream os;
    os << "level_pair_decoherence: degenerate branch (level "
       << (bk.degenerate ? k : l) << " has omega = 0)";
    throw degenerate_branch_error(os.str());
  }

  const Representation rep = build_representation({1.0, 2.0}, model.j_spin());
  const double lambda = rep.spec.m * rep.j;  // detector state |j, j>

  const auto solve_branch = [&](const Protocol& p) {
    switch (mode) {
      case AuxMode::adiabatic:
        return adiabatic_solution(p, T, step);
      case AuxMode::stationary:
        return stationary_solution(p, default_initial_state(p), T, step);
      case AuxMode::integrated:
      default: {
        SolveOptions opts;
        opts.step = step;
        return solve_auxiliary(p, rep.spec, default_initial_state(p), T, opts);
      }
    }
  };

  const AuxiliarySolution sk = solve_branch(bk.protocol);
  const AuxiliarySolution sl = solve_branch(bl.protocol);
  return decoherence_matrix_element(rep, sk, sl, lambda);
}

cmatrix CompositeState::reduced_system(std::size_t t_index) const {
  if (t_index >= states.size())
    throw std::out_of_range("reduced_system: index outside the grid");
  const cvector& psi = states[t_index];
  cmatrix rho = cmatrix::Zero(system_dim, system_dim);
  for (int r = 0; r < system_dim; ++r)
    for (int c = 0; c < system_dim; ++c)
      for (int d = 0; d < detector_dim; ++d)
        rho(r, c) += psi(r * detector_dim + d) * std::conj(psi(c * detector_dim + d));
  return rho;
}

CompositeState composite_state(const CiniModel& model,
                               const std::vector<complexd>& coefficients,
                               const std::vector<Trajectory>& branch_trajectories) {
  validate(model);
  if (coefficients.size() != model.levels.size() ||
      branch_trajectories.size() != model.levels.size())
    throw std::invalid_argument(
        "composite_state: need one coefficient and one trajectory per level");

  double norm2 = 0.0;
  for (const complexd& c : coefficients) norm2 += std::norm(c);
  if (std::abs(norm2 - 1.0) > 1e-10)
    throw std::invalid_argument("composite_state: coefficients must be normalized");

  const int detector_dim = model.sector_dim();
  for (std::size_t k = 1; k < branch_trajectories.size(); ++k)
    require_matching_grid(branch_trajectories[0].times, branch_trajectories[k].times,
                          "composite_state");
  for (const Trajectory& traj : branch_trajectories)
    for (const cvector& s : traj.states)
      if (s.size() != detector_dim)
        throw std::invalid_argument("composite_state: trajectory dimension does not "
                                    "match the sector");

  CompositeState composite;
  composite.times = branch_trajectories[0].times;
  composite.system_dim = static_cast<int>(model.levels.size());
  composite.detector_dim = detector_dim;
  composite.states.reserve(composite.times.size());
  for (std::size_t t = 0; t < composite.times.size(); ++t) {
    cvector psi = cvector::Zero(composite.system_dim * detector_dim);
    for (int k = 0; k < composite.system_dim; ++k)
      psi.segment(k * detector_dim, detector_dim) =
          coefficients[static_cast<std::size_t>(k)] *
          branch_trajectories[static_cast<std::size_t>(k)].states[t];
    composite.states.push_back(std::move(psi));
  }
  return composite;
}

}  // namespace lrsim
