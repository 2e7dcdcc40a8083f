#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lrsim/invariant.hpp"
#include "oracles.hpp"

using namespace lrsim;

namespace {

const double pi = std::numbers::pi;

Protocol make_protocol(ScalarFunction omega, ScalarFunction theta, ScalarFunction phi,
                       double horizon, std::string label = "i") {
  Protocol p;
  p.omega = std::move(omega);
  p.theta = std::move(theta);
  p.phi = std::move(phi);
  p.horizon = horizon;
  p.label = std::move(label);
  return p;
}

Protocol constant_protocol(double omega, double theta, double phi, double horizon) {
  return make_protocol(ScalarFunction::constant(omega), ScalarFunction::constant(theta),
                       ScalarFunction::constant(phi), horizon);
}

// Exact constant-a solution: with phi winding at
//   rate = omega (cos theta - cot(a0) sin theta)
// and b(0) = 0, the pair (a0, b = phi(t)) solves the su(2) system exactly.
struct ConeScenario {
  Protocol protocol;
  AuxiliaryState init;
  double rate;
  double T;
};

ConeScenario cone_scenario(double a0, double theta, double omega = 1.0) {
  ConeScenario cone;
  cone.rate = omega * (std::cos(theta) - std::sin(theta) / std::tan(a0));
  cone.T = 2.0 * pi / cone.rate;
  cone.protocol = make_protocol(ScalarFunction::constant(omega),
                                ScalarFunction::constant(theta),
                                ScalarFunction::winding(cone.rate), cone.T);
  cone.init = {a0, 0.0};
  return cone;
}

}  // namespace

TEST_CASE("invariant at the north pole is A_z") {
  const Representation rep = build_representation({1.0, 2.0}, 1.0);
  CHECK(max_abs(cmatrix(build_invariant(rep, {0.0, 0.7}) - rep.a_z)) < 1e-15);
}

TEST_CASE("equatorial su(2) invariant is sigma_x over two") {
  const Representation rep = build_representation({1.0, 2.0}, 0.5);
  const cmatrix inv = build_invariant(rep, {pi / 2.0, 0.0});
  cmatrix expected(2, 2);
  expected << 0.0, 0.5, 0.5, 0.0;
  CHECK(max_abs(cmatrix(inv - expected)) < 1e-15);
  Eigen::SelfAdjointEigenSolver<cmatrix> es(inv);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5));
  CHECK(es.eigenvalues()(1) == doctest::Approx(0.5));
}

TEST_CASE("invariant spectrum equals the A_z spectrum for any (a, b)") {
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> angle(0.0, pi);
  std::uniform_real_distribution<double> full(0.0, 2.0 * pi);
  for (const AlgebraSpec spec : {AlgebraSpec{1.0, 2.0}, AlgebraSpec{2.0, 4.0},
                                 AlgebraSpec{1.0, 8.0}}) {
    const Representation rep = build_representation(spec, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const cmatrix inv = build_invariant(rep, {angle(rng), full(rng)});
      CHECK(max_abs(cmatrix(inv - cmatrix(inv.adjoint()))) < 1e-13);
      Eigen::SelfAdjointEigenSolver<cmatrix> es(inv);
      std::vector<double> expected = rep.az_eigenvalues;
      std::sort(expected.begin(), expected.end());
      for (int k = 0; k < rep.dim; ++k)
        CHECK(es.eigenvalues()(k) ==
              doctest::Approx(expected[static_cast<std::size_t>(k)]).epsilon(1e-10));
    }
  }
}

TEST_CASE("stationary solutions satisfy the invariant equation to roundoff") {
  const Representation rep = build_representation({1.0, 2.0}, 0.5);
  const Protocol p = constant_protocol(1.0, pi / 3.0, 0.4, 5.0);
  const AuxiliarySolution sol = stationary_solution(p, {pi / 3.0, 0.4}, 5.0, 0.05);
  CHECK(invariant_residual(rep, p, sol) < 1e-10);
}

TEST_CASE("integrated solutions meet the 1e-6 residual bound, shrinking ~4x per halving") {
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 1.0);
  const Protocol p = make_protocol(ScalarFunction::constant(0.2),
                                   ScalarFunction::sinusoid(pi / 4.0, 0.1, 0.25, 0.0),
                                   ScalarFunction::constant(0.3), 10.0);
  const AuxiliaryState init{p.theta.value(0.0), 0.3};

  SolveOptions opts;
  opts.step = 1e-2;
  const double coarse =
      invariant_residual(rep, p, solve_auxiliary(p, su2, init, 10.0, opts));
  CHECK(coarse <= 1e-6);

  opts.step = 5e-3;
  const double fine =
      invariant_residual(rep, p, solve_auxiliary(p, su2, init, 10.0, opts));
  const double ratio = coarse / fine;
  CHECK(ratio > 2.5);
  CHECK(ratio < 8.0);
}

TEST_CASE("the adiabatic ansatz is not an invariant solution for fast drives") {
  const Representation rep = build_representation({1.0, 2.0}, 0.5);
  const Protocol p = make_protocol(ScalarFunction::constant(1.0),
                                   ScalarFunction::sinusoid(pi / 4.0, 0.5, 2.0, 0.0),
                                   ScalarFunction::constant(0.0), 6.0);
  const AuxiliarySolution sol = adiabatic_solution(p, 6.0, 1e-2);
  CHECK(invariant_residual(rep, p, sol) > 1e-3);
}

TEST_CASE("displacement at a = 0 is the identity") {
  const Representation rep = build_representation({1.0, 2.0}, 1.5);
  CHECK(max_abs(cmatrix(build_displacement(rep, {0.0, 1.1}) -
                        cmatrix::Identity(rep.dim, rep.dim))) < 1e-14);
}

TEST_CASE("spin-1/2 displacement is the closed-form rotation") {
  const Representation rep = build_representation({1.0, 2.0}, 0.5);
  const cmatrix v = build_displacement(rep, {pi / 2.0, 0.0});
  cmatrix expected(2, 2);
  expected << std::cos(pi / 4.0), -std::sin(pi / 4.0), std::sin(pi / 4.0),
      std::cos(pi / 4.0);
  CHECK(max_abs(cmatrix(v - expected)) < 1e-12);
}

TEST_CASE("V conjugates the invariant back to A_z over the whole chart") {
  std::mt19937 rng(808);
  std::uniform_real_distribution<double> angle(0.01, pi - 0.01);
  std::uniform_real_distribution<double> full(0.0, 2.0 * pi);
  for (const AlgebraSpec spec : {AlgebraSpec{1.0, 2.0}, AlgebraSpec{2.0, 4.0},
                                 AlgebraSpec{1.0, 8.0}}) {
    for (double j : {0.5, 1.0, 2.5}) {
      const Representation rep = build_representation(spec, j);
      for (int trial = 0; trial < 15; ++trial)
        CHECK(displacement_conjugation_defect(rep, {angle(rng), full(rng)}) < 1e-11);
    }
  }
}

TEST_CASE("beta has the stated modulus and phase") {
  const AlgebraSpec spec{2.0, 4.0};  // x = 1/2
  const DisplacementParameters dp = displacement_parameters(spec, {pi / 3.0, 0.8});
  CHECK(dp.x == doctest::Approx(0.5));
  CHECK(std::abs(dp.beta) == doctest::Approx(pi / 3.0 / 2.0 * 0.5));
  CHECK(std::arg(-dp.beta) == doctest::Approx(-0.8));
}

TEST_CASE("transformed coefficient recovers known limits") {
  const AlgebraSpec su2{1.0, 2.0};
  // Stationary case: h = omega.
  const ProtocolValues stationary{1.7, pi / 5.0, 0.3, 0.0, 0.0};
  CHECK(transformed_hamiltonian_coefficient(stationary, {pi / 5.0, 0.3}, 0.0, su2) ==
        doctest::Approx(1.7).epsilon(1e-14));
  // North pole: h = omega cos theta.
  const ProtocolValues pole{2.0, pi / 3.0, 0.0, 0.0, 0.0};
  CHECK(transformed_hamiltonian_coefficient(pole, {0.0, 0.0}, 0.5, su2) ==
        doctest::Approx(2.0 * std::cos(pi / 3.0)).epsilon(1e-14));
  // Worked value: sqrt(6)/4 + 0.1.
  const ProtocolValues pv{1.0, pi / 2.0, 0.0, 0.0, 0.0};
  CHECK(transformed_hamiltonian_coefficient(pv, {pi / 3.0, pi / 4.0}, 0.2, su2) ==
        doctest::Approx(std::sqrt(6.0) / 4.0 + 0.1).epsilon(1e-12));
}

TEST_CASE("full-matrix H_V is diagonal with the analytic coefficient along solutions") {
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 1.0);
  const Protocol p = make_protocol(ScalarFunction::constant(0.2),
                                   ScalarFunction::sinusoid(pi / 4.0, 0.1, 0.25, 0.0),
                                   ScalarFunction::winding(0.05), 10.0);
  SolveOptions opts;
  opts.step = 1e-2;
  const AuxiliarySolution sol =
      solve_auxiliary(p, su2, default_initial_state(p), 10.0, opts);
  const TransformedHamiltonianDefect defect =
      transformed_hamiltonian_defect(rep, p, sol, 100);
  CHECK(defect.max_offdiagonal < 1e-5);
  CHECK(defect.max_diagonal_error < 1e-5);
}

TEST_CASE("stationary phases: dynamical pi, geometric zero over one period") {
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 0.5);
  const Protocol p = constant_protocol(1.0, pi / 4.0, 0.2, 2.0 * pi);
  const AuxiliarySolution sol = stationary_solution(p, {pi / 4.0, 0.2}, 2.0 * pi, 1e-2);
  const PhaseDecomposition ph = phases(sol, p, rep, 0.5);
  CHECK(ph.phi_d.back() == doctest::Approx(pi).epsilon(1e-10));
  CHECK(ph.phi_g.back() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(ph.phi_total.back() == doctest::Approx(pi).epsilon(1e-10));
  CHECK(ph.phi_d.front() == 0.0);
  CHECK(ph.phi_g.front() == 0.0);
}

TEST_CASE("winding loop accumulates the solid-angle geometric phase") {
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 0.5);

  SUBCASE("a = pi/3, lambda = 1/2 gives pi/2") {
    const ConeScenario cone = cone_scenario(pi / 3.0, pi / 6.0);
    SolveOptions opts;
    opts.step = 1e-2;
    const AuxiliarySolution sol =
        solve_auxiliary(cone.protocol, su2, cone.init, cone.T, opts);
    const PhaseDecomposition ph = phases(sol, cone.protocol, rep, 0.5);
    CHECK(ph.phi_g.back() == doctest::Approx(pi / 2.0).epsilon(1e-9));
    CHECK(ph.phi_g.back() ==
          doctest::Approx(solid_angle_phase(pi / 3.0, 0.5, 1.0)).epsilon(1e-9));
  }

  SUBCASE("a = pi/2 matches the closed form to 1e-8") {
    const ConeScenario cone = cone_scenario(pi / 2.0, pi / 3.0);
    SolveOptions opts;
    opts.step = 1e-2;
    const AuxiliarySolution sol =
        solve_auxiliary(cone.protocol, su2, cone.init, cone.T, opts);
    const PhaseDecomposition ph = phases(sol, cone.protocol, rep, 0.5);
    CHECK(std::abs(ph.phi_g.back() - solid_angle_phase(pi / 2.0, 0.5, 1.0)) < 1e-8);
  }
}

TEST_CASE("pure A_z field precesses b at rate m*omega and sweeps the solid angle") {
  // theta = 0 removes the cot(a) term entirely: a stays put, b winds at
  // m*omega, and one period accumulates the full solid-angle phase.
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 0.5);
  const double a0 = 0.4;
  const double T = 2.0 * pi;  // m*omega = 1
  const Protocol p = constant_protocol(1.0, 0.0, 0.0, T);
  SolveOptions opts;
  opts.step = 1e-2;
  const AuxiliarySolution sol = solve_auxiliary(p, su2, {a0, 0.0}, T, opts);
  CHECK(std::abs(sol.a.back() - a0) < 1e-12);
  CHECK(sol.b.back() == doctest::Approx(2.0 * pi).epsilon(1e-12));
  const PhaseDecomposition ph = phases(sol, p, rep, 0.5);
  CHECK(ph.phi_g.back() ==
        doctest::Approx(solid_angle_phase(a0, 0.5, 1.0)).epsilon(1e-10));
  CHECK(ph.phi_d.back() == doctest::Approx(0.5 * T * std::cos(a0)).epsilon(1e-10));
}

TEST_CASE("general structure constants keep the solid-angle normalization") {
  const AlgebraSpec spec{2.0, 4.0};  // sqrt(mn/2) = 2 = m
  const Representation rep = build_representation(spec, 0.5);
  const double a0 = pi / 3.0;
  const double theta = pi / 6.0;
  const double rate = spec.m * std::cos(theta) -
                      spec.root_half_mn() * std::sin(theta) / std::tan(a0);
  const double T = 2.0 * pi / rate;
  Protocol p;
  p.omega = ScalarFunction::constant(1.0);
  p.theta = ScalarFunction::constant(theta);
  p.phi = ScalarFunction::winding(rate);
  p.horizon = T;
  SolveOptions opts;
  opts.step = 1e-2;
  const AuxiliarySolution sol = solve_auxiliary(p, spec, {a0, 0.0}, T, opts);
  CHECK(std::abs(sol.a.back() - a0) < 1e-10);
  const double lambda = spec.m * rep.j;  // = 1
  const PhaseDecomposition ph = phases(sol, p, rep, lambda);
  CHECK(ph.phi_g.back() ==
        doctest::Approx(solid_angle_phase(a0, lambda, spec.m)).epsilon(1e-9));
}

TEST_CASE("solid angle phase closed form") {
  CHECK(solid_angle_phase(0.0, 0.5, 1.0) == doctest::Approx(0.0));
  CHECK(solid_angle_phase(pi, 0.5, 1.0) == doctest::Approx(2.0 * pi));
  CHECK(solid_angle_phase(pi / 3.0, 0.5, 1.0) == doctest::Approx(pi / 2.0));
}

TEST_CASE("phase quadrature converges at fourth order with the solver") {
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 0.5);
  const Protocol p = make_protocol(ScalarFunction::constant(1.0),
                                   ScalarFunction::sinusoid(0.9, 0.25, 0.7, 0.1),
                                   ScalarFunction::winding(0.3), 6.0);
  const AuxiliaryState init{0.9, 0.0};

  const auto total_phase = [&](double step) {
    SolveOptions opts;
    opts.step = step;
    const AuxiliarySolution sol = solve_auxiliary(p, su2, init, 6.0, opts);
    return phases(sol, p, rep, 0.5).phi_total.back();
  };

  const double reference = total_phase(0.04 / 8.0);
  const double e1 = std::abs(total_phase(0.04) - reference);
  const double e2 = std::abs(total_phase(0.02) - reference);
  REQUIRE(e1 > 0.0);
  CHECK(e1 / e2 > 3.0);  // order >= 2; the scheme actually gives ~16x
}

TEST_CASE("phases rejects lambda outside the spectrum") {
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 0.5);
  const Protocol p = constant_protocol(1.0, pi / 4.0, 0.0, 1.0);
  const AuxiliarySolution sol = stationary_solution(p, {pi / 4.0, 0.0}, 1.0, 0.1);
  CHECK_THROWS_AS(phases(sol, p, rep, 0.75), std::invalid_argument);
}

TEST_CASE("lr_state at t = 0 with a(0) = 0 is the bare eigenvector") {
  const Representation rep = build_representation({1.0, 2.0}, 1.0);
  AuxiliarySolution sol;
  sol.times = {0.0, 0.5, 1.0};
  sol.a = {0.0, 0.0, 0.0};
  sol.b = {0.0, 0.0, 0.0};
  sol.mode = AuxMode::stationary;
  PhaseDecomposition ph;
  ph.lambda = 1.0;
  ph.times = sol.times;
  ph.phi_d = {0.0, 0.0, 0.0};
  ph.phi_g = {0.0, 0.0, 0.0};
  ph.phi_total = {0.0, 0.0, 0.0};
  const cvector psi = lr_state(rep, sol, ph, 1.0, 0);
  CHECK(std::abs(psi(0) - complexd(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(psi(1)) < 1e-15);
  CHECK(std::abs(psi(2)) < 1e-15);
}

TEST_CASE("constant-protocol lr states match eigendecomposition propagation") {
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 0.5);
  const Protocol p = constant_protocol(1.3, pi / 3.0, 0.5, 4.0);
  const AuxiliarySolution sol = stationary_solution(p, {pi / 3.0, 0.5}, 4.0, 1e-2);
  const PhaseDecomposition ph = phases(sol, p, rep, 0.5);

  const cmatrix h = hamiltonian_matrix(p, rep, 0.0);
  const cvector psi0 = lr_state(rep, sol, ph, 0.5, 0);
  for (std::size_t k : {std::size_t(50), std::size_t(200), sol.size() - 1}) {
    const cmatrix u = testutil::taylor_expm(complexd(0.0, -sol.times[k]) * h);
    const cvector expected = u * psi0;
    const cvector actual = lr_state(rep, sol, ph, 0.5, k);
    CHECK((expected - actual).norm() < 1e-9);
  }
}

TEST_CASE("lr trajectory satisfies the Schrodinger equation on the grid") {
  const AlgebraSpec su2{1.0, 2.0};
  const Representation rep = build_representation(su2, 1.0);
  const Protocol p = make_protocol(ScalarFunction::constant(0.8),
                                   ScalarFunction::sinusoid(0.8, 0.15, 0.4, 0.0),
                                   ScalarFunction::winding(0.2), 8.0);
  SolveOptions opts;
  opts.step = 2e-3;
  const AuxiliarySolution sol =
      solve_auxiliary(p, su2, default_initial_state(p), 8.0, opts);
  const PhaseDecomposition ph = phases(sol, p, rep, 1.0);
  const Trajectory lr = lr_trajectory(rep, sol, ph, 1.0);

  for (const cvector& s : lr.states) CHECK(std::abs(s.norm() - 1.0) < 1e-12);

  double h_max = 0.0;
  for (double t : sol.times)
    h_max = std::max(h_max, hamiltonian_norm(evaluate(p, t), su2, rep.j));
  const double residual = schrodinger_residual(lr, rep, p);
  CHECK(residual <= 1e-4 * h_max);
}
