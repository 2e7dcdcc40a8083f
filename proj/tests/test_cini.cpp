#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lrsim/cini.hpp"

using namespace lrsim;

namespace {

const double pi = std::numbers::pi;

CiniModel constant_model(std::vector<std::pair<double, complexd>> levels, double w1,
                         double w2, int n1, int n2) {
  CiniModel model;
  for (const auto& [energy, g] : levels) {
    CiniLevel level;
    level.energy = ScalarFunction::constant(energy);
    level.g_re = ScalarFunction::constant(g.real());
    level.g_im = ScalarFunction::constant(g.imag());
    model.levels.push_back(std::move(level));
  }
  model.omega1 = ScalarFunction::constant(w1);
  model.omega2 = ScalarFunction::constant(w2);
  model.n1 = n1;
  model.n2 = n2;
  return model;
}

}  // namespace

TEST_CASE("sector bookkeeping: j = (n1+n2)/2 and dim = n1+n2+1") {
  const CiniModel model = constant_model({{0.0, 0.5}}, 1.0, 1.0, 3, 2);
  CHECK(model.j_spin() == doctest::Approx(2.5));
  CHECK(model.n_total() == doctest::Approx(2.5));
  CHECK(model.sector_dim() == 6);
}

TEST_CASE("uncoupled level reduces to a pure J3 branch plus scalar") {
  const CiniModel model = constant_model({{0.7, 0.0}}, 1.3, 0.9, 1, 1);
  const BranchHamiltonian bh = reduce_to_sector(model, 0);
  const Representation rep = build_representation({1.0, 2.0}, model.j_spin());
  const cmatrix h = branch_matrix(bh, rep, 0.0, true);
  const cmatrix expected = 0.7 * cmatrix::Identity(3, 3) +
                           1.0 * (1.3 + 0.9) * cmatrix::Identity(3, 3) +
                           (1.3 - 0.9) * rep.a_z;
  CHECK(max_abs(cmatrix(h - expected)) < 1e-14);
}

TEST_CASE("degenerate boson modes with real coupling give a pure ladder branch") {
  const CiniModel model = constant_model({{0.0, 0.4}}, 1.1, 1.1, 2, 0);
  const BranchHamiltonian bh = reduce_to_sector(model, 0);
  const Representation rep = build_representation({1.0, 2.0}, 1.0);
  const cmatrix h = branch_matrix(bh, rep, 0.0, true);
  const cmatrix expected = 0.4 * (rep.a_plus + rep.a_minus) +
                           2.0 * 1.1 * cmatrix::Identity(3, 3);
  CHECK(max_abs(cmatrix(h - expected)) < 1e-14);
}

TEST_CASE("branch spectrum is the scalar offset plus sqrt(2)-spaced levels") {
  // omega1 - omega2 = 1, g = 0.5: effective omega = sqrt(1 + 4*0.25) = sqrt(2).
  const CiniModel model = constant_model({{0.0, 0.5}}, 1.5, 0.5, 2, 0);
  const BranchHamiltonian bh = reduce_to_sector(model, 0);
  const Representation rep = build_representation({1.0, 2.0}, 1.0);
  const cmatrix h = branch_matrix(bh, rep, 0.0, true);
  Eigen::SelfAdjointEigenSolver<cmatrix> es(h);
  const double offset = 1.0 * (1.5 + 0.5);
  CHECK(es.eigenvalues()(0) == doctest::Approx(offset - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(es.eigenvalues()(1) == doctest::Approx(offset).epsilon(1e-12));
  CHECK(es.eigenvalues()(2) == doctest::Approx(offset + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("reduce_to_sector validates the level index") {
  const CiniModel model = constant_model({{0.0, 0.5}}, 1.0, 1.0, 1, 0);
  CHECK_THROWS_AS(reduce_to_sector(model, 1), std::invalid_argument);
  CHECK_THROWS_AS(reduce_to_sector(model, -1), std::invalid_argument);
}

TEST_CASE("inverse parameterization on constant branches") {
  SUBCASE("pure detuning gives theta = 0") {
    const CiniModel model = constant_model({{0.0, 0.0}}, 1.5, 0.5, 1, 0);
    const BranchProtocol bp = branch_protocol(reduce_to_sector(model, 0), 2.0);
    CHECK_FALSE(bp.degenerate);
    CHECK(bp.protocol.omega.value(0.0) == doctest::Approx(1.0));
    CHECK(bp.protocol.theta.value(0.0) == doctest::Approx(0.0));
    CHECK(bp.protocol.phi.value(0.0) == doctest::Approx(0.0));
  }
  SUBCASE("resonant real coupling gives theta = pi/2") {
    const CiniModel model = constant_model({{0.0, 0.5}}, 1.0, 1.0, 1, 0);
    const BranchProtocol bp = branch_protocol(reduce_to_sector(model, 0), 2.0);
    CHECK(bp.protocol.omega.value(0.0) == doctest::Approx(1.0));
    CHECK(bp.protocol.theta.value(0.0) == doctest::Approx(pi / 2.0));
    CHECK(bp.protocol.phi.value(0.0) == doctest::Approx(0.0));
  }
  SUBCASE("complex coupling fixes omega, theta and phi together") {
    const complexd g = 0.5 * std::exp(complexd(0.0, pi / 3.0));
    const CiniModel model = constant_model({{0.0, g}}, 1.5, 0.5, 2, 0);
    const BranchProtocol bp = branch_protocol(reduce_to_sector(model, 0), 2.0);
    CHECK(bp.protocol.omega.value(0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(bp.protocol.theta.value(0.0) == doctest::Approx(pi / 4.0));
    CHECK(bp.protocol.phi.value(0.0) == doctest::Approx(-pi / 3.0));
  }
}

TEST_CASE("round trip: protocol plus offset reproduces the branch matrix") {
  const complexd g = 0.5 * std::exp(complexd(0.0, pi / 3.0));
  const CiniModel model = constant_model({{0.3, g}}, 1.5, 0.5, 2, 0);
  const BranchHamiltonian bh = reduce_to_sector(model, 0);
  const BranchProtocol bp = branch_protocol(bh, 2.0);
  const Representation rep = build_representation({1.0, 2.0}, 1.0);
  for (double t : {0.0, 0.7, 2.0}) {
    const cmatrix rebuilt = hamiltonian_matrix(bp.protocol, rep, t) +
                            bp.scalar_offset(t) * cmatrix::Identity(3, 3);
    CHECK(max_abs(cmatrix(rebuilt - branch_matrix(bh, rep, t, true))) < 1e-13);
  }
}

TEST_CASE("round trip holds pointwise for time-dependent couplings") {
  CiniModel model = constant_model({{0.0, 0.3}}, 1.5, 0.5, 2, 0);
  model.levels[0].g_re = ScalarFunction::linear(0.3, 0.05);
  model.levels[0].g_im = ScalarFunction::sinusoid(0.0, 0.1, 0.8, 0.0);
  const BranchHamiltonian bh = reduce_to_sector(model, 0);
  const BranchProtocol bp = branch_protocol(bh, 6.0, 1e-3);
  CHECK(bp.protocol.omega.kind() == ScalarFunction::Kind::sampled);
  const Representation rep = build_representation({1.0, 2.0}, 1.0);
  for (double t : {0.5, 2.2, 4.9}) {
    const cmatrix rebuilt = hamiltonian_matrix(bp.protocol, rep, t) +
                            bp.scalar_offset(t) * cmatrix::Identity(3, 3);
    CHECK(max_abs(cmatrix(rebuilt - branch_matrix(bh, rep, t, true))) < 1e-9);
  }
}

TEST_CASE("vanishing effective omega is flagged and propagated as an error") {
  const CiniModel model =
      constant_model({{0.0, 0.0}, {0.0, 0.5}}, 1.0, 1.0, 1, 0);
  const BranchProtocol bp = branch_protocol(reduce_to_sector(model, 0), 2.0);
  CHECK(bp.degenerate);
  CHECK(bp.protocol.theta.value(0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(level_pair_decoherence(model, 0, 1, 2.0, 0.1, AuxMode::adiabatic),
                  degenerate_branch_error);
  CHECK_THROWS_AS(level_pair_decoherence(model, 0, 0, 2.0, 0.1, AuxMode::adiabatic),
                  std::invalid_argument);
}

TEST_CASE("identical couplings decohere nothing") {
  const CiniModel model =
      constant_model({{0.0, 0.4}, {1.0, 0.4}}, 1.2, 1.0, 2, 1);
  const DecoherenceSeries f =
      level_pair_decoherence(model, 0, 1, 2.0, 0.1, AuxMode::adiabatic);
  for (const complexd& v : f.F) CHECK(std::abs(v - complexd(1.0, 0.0)) < 1e-12);
}

TEST_CASE("adiabatic constant model equals the pointer-angle power law") {
  // A quarter-turn separation gives cos^6(pi/4) = 1/8 at j = 3.
  CHECK(adiabatic_cini_factor(pi / 2.0 + 0.3, 0.3, 3.0) ==
        doctest::Approx(0.125).epsilon(1e-12));

  // Within one constant model the shared detuning bounds |theta_k - theta_l|
  // below pi/2; check an attainable pair against the same law.
  const CiniModel model =
      constant_model({{0.0, 0.5}, {0.5, 0.0}}, 2.0, 1.0, 6, 0);  // j = 3
  const BranchProtocol bi = branch_protocol(reduce_to_sector(model, 0), 1.0);
  const BranchProtocol bj = branch_protocol(reduce_to_sector(model, 1), 1.0);
  CHECK(bi.protocol.theta.value(0.0) == doctest::Approx(pi / 4.0));
  CHECK(bj.protocol.theta.value(0.0) == doctest::Approx(0.0));

  const DecoherenceSeries f =
      level_pair_decoherence(model, 0, 1, 1.0, 0.25, AuxMode::adiabatic);
  CHECK(f.j_spin == doctest::Approx(3.0));
  CHECK(f.lambda == doctest::Approx(3.0));
  const double expected = adiabatic_cini_factor(pi / 4.0, 0.0, 3.0);
  for (const complexd& v : f.F)
    CHECK(std::abs(v - complexd(expected, 0.0)) < 1e-10);
}

TEST_CASE("time-dependent coupling ramp agrees with the oracle overlap") {
  CiniModel model = constant_model({{0.0, 0.3}, {0.2, 0.45}}, 1.5, 0.5, 2, 0);
  model.levels[0].g_re = ScalarFunction::linear(0.3, 0.05);   // slow ramp
  model.levels[1].g_re = ScalarFunction::sinusoid(0.45, 0.05, 0.4, 0.0);
  const double T = 6.0;
  const double step = 2e-3;

  const DecoherenceSeries f =
      level_pair_decoherence(model, 0, 1, T, step, AuxMode::integrated);

  // Rebuild the branch machinery the same way to obtain phases and oracles.
  const Representation rep = build_representation({1.0, 2.0}, model.j_spin());
  const double lambda = model.j_spin();
  std::vector<Trajectory> oracles;
  std::vector<PhaseDecomposition> phase_list;
  for (int lvl : {0, 1}) {
    const BranchHamiltonian bh = reduce_to_sector(model, lvl);
    const BranchProtocol bp = branch_protocol(bh, T, step);
    SolveOptions opts;
    opts.step = step;
    const AuxiliarySolution sol = solve_auxiliary(
        bp.protocol, rep.spec, default_initial_state(bp.protocol), T, opts);
    const PhaseDecomposition ph = phases(sol, bp.protocol, rep, lambda);
    const cvector psi0 = lr_state(rep, sol, ph, lambda, 0);
    oracles.push_back(propagate(
        [&bh, &rep](double t) { return branch_matrix(bh, rep, t, false); }, psi0, T,
        step, bp.protocol.label));
    phase_list.push_back(ph);
  }
  CHECK(detector_overlap_vs_factor(oracles[0], oracles[1], phase_list[0], phase_list[1],
                                   f) < 1e-5);
}

TEST_CASE("composite state: single level is trivial") {
  const CiniModel model = constant_model({{0.0, 0.5}}, 1.0, 1.0, 1, 0);
  const BranchProtocol bp = branch_protocol(reduce_to_sector(model, 0), 1.0);
  const Representation rep = build_representation({1.0, 2.0}, 0.5);
  const AuxiliarySolution sol = adiabatic_solution(bp.protocol, 1.0, 0.25);
  const PhaseDecomposition ph = phases(sol, bp.protocol, rep, 0.5);
  const Trajectory traj = lr_trajectory(rep, sol, ph, 0.5);
  const CompositeState composite = composite_state(model, {complexd(1.0, 0.0)}, {traj});
  for (std::size_t k = 0; k < composite.times.size(); ++k) {
    const cmatrix rho = composite.reduced_system(k);
    CHECK(std::abs(rho(0, 0) - complexd(1.0, 0.0)) < 1e-12);
  }
}

TEST_CASE("composite state rejects unnormalized coefficients") {
  const CiniModel model = constant_model({{0.0, 0.5}, {0.0, 0.2}}, 1.0, 1.0, 1, 0);
  const Representation rep = build_representation({1.0, 2.0}, 0.5);
  std::vector<Trajectory> trajs;
  for (int lvl : {0, 1}) {
    const BranchProtocol bp = branch_protocol(reduce_to_sector(model, lvl), 1.0);
    const AuxiliarySolution sol = adiabatic_solution(bp.protocol, 1.0, 0.25);
    const PhaseDecomposition ph = phases(sol, bp.protocol, rep, 0.5);
    trajs.push_back(lr_trajectory(rep, sol, ph, 0.5));
  }
  CHECK_THROWS_AS(
      composite_state(model, {complexd(0.9, 0.0), complexd(0.1, 0.0)}, trajs),
      std::invalid_argument);
}

TEST_CASE("orthogonal pointer branches kill the reduced off-diagonal") {
  // Equal and opposite resonant couplings: theta both pi/2, phi differs by pi,
  // so the adiabatic factor is cos^{2j}(pi/2) = 0.
  const CiniModel model = constant_model({{0.0, 0.5}, {0.0, -0.5}}, 1.0, 1.0, 2, 0);
  const Representation rep = build_representation({1.0, 2.0}, 1.0);
  const double lambda = 1.0;
  std::vector<Trajectory> trajs;
  for (int lvl : {0, 1}) {
    const BranchProtocol bp = branch_protocol(reduce_to_sector(model, lvl), 1.0);
    const AuxiliarySolution sol = adiabatic_solution(bp.protocol, 1.0, 0.25);
    const PhaseDecomposition ph = phases(sol, bp.protocol, rep, lambda);
    trajs.push_back(lr_trajectory(rep, sol, ph, lambda));
  }
  const double amp = 1.0 / std::sqrt(2.0);
  const CompositeState composite =
      composite_state(model, {complexd(amp, 0.0), complexd(amp, 0.0)}, trajs);
  for (std::size_t k = 0; k < composite.times.size(); ++k)
    CHECK(std::abs(composite.reduced_system(k)(0, 1)) < 1e-12);
}

TEST_CASE("classical-limit composite: off-diagonal is half the scanned factor") {
  // Couplings tuned so theta_1 - theta_2 = pi/3 exactly at j = 25.
  const double g1 = 0.5 * std::tan(5.0 * pi / 12.0);
  const double g2 = 0.5 * std::tan(pi / 12.0);
  const CiniModel model = constant_model({{0.0, g1}, {0.3, g2}}, 1.5, 0.5, 50, 0);
  REQUIRE(model.j_spin() == doctest::Approx(25.0));

  const Representation rep = build_representation({1.0, 2.0}, 25.0);
  const double lambda = 25.0;
  std::vector<Trajectory> trajs;
  for (int lvl : {0, 1}) {
    const BranchProtocol bp = branch_protocol(reduce_to_sector(model, lvl), 1.0);
    const AuxiliarySolution sol = adiabatic_solution(bp.protocol, 1.0, 0.5);
    const PhaseDecomposition ph = phases(sol, bp.protocol, rep, lambda);
    trajs.push_back(lr_trajectory(rep, sol, ph, lambda));
  }
  const double amp = 1.0 / std::sqrt(2.0);
  const CompositeState composite =
      composite_state(model, {complexd(amp, 0.0), complexd(amp, 0.0)}, trajs);
  const double expected = 0.5 * std::pow(std::cos(pi / 6.0), 50.0);
  for (std::size_t k = 0; k < composite.times.size(); ++k)
    CHECK(std::abs(composite.reduced_system(k)(0, 1)) ==
          doctest::Approx(expected).epsilon(1e-9));
}
