#pragma once

#include <string>
#include <vector>

#include "lrsim/algebra.hpp"

namespace lrsim {

// Time profile with exact derivative access. The analytic kinds carry their
// parameters; the sampled kind interpolates a grid with a natural cubic
// spline, so value and derivative stay mutually consistent.
class ScalarFunction {
 public:
  enum class Kind { constant, linear, sinusoid, winding, sampled };

  ScalarFunction() = default;  // constant 0

  static ScalarFunction constant(double c);
  static ScalarFunction linear(double c0, double c1);  // c0 + c1*t
  // c0 + c1*sin(c2*t + c3)
  static ScalarFunction sinusoid(double c0, double c1, double c2, double c3);
  static ScalarFunction winding(double rate);  // rate*t
  static ScalarFunction sampled(std::vector<double> times, std::vector<double> values);

  double value(double t) const;
  double derivative(double t) const;
  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::constant;
  double c0_ = 0.0, c1_ = 0.0, c2_ = 0.0, c3_ = 0.0;
  std::vector<double> ts_, vs_, d2_;  // sampled: knots, values, spline curvatures
  std::size_t segment(double& t) const;
};

// Coefficient triple of one branch Hamiltonian over the window [0, horizon].
struct Protocol {
  ScalarFunction omega;
  ScalarFunction theta;
  ScalarFunction phi;
  double horizon = 0.0;
  std::string label = "i";
};

struct ProtocolValues {
  double omega = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double dtheta_dt = 0.0;
  double dphi_dt = 0.0;
};

// Values and derivatives at t; throws std::out_of_range outside [0, horizon].
ProtocolValues evaluate(const Protocol& p, double t);

// H(t) = omega * [ (1/2) sin(theta) e^{-i phi} A+ + h.c. + cos(theta) A_z ].
cmatrix hamiltonian_matrix(const Protocol& p, const Representation& rep, double t);

// Exact spectral norm of H(t): |omega| * j * sqrt(mn/2 sin^2 + m^2 cos^2).
double hamiltonian_norm(const ProtocolValues& pv, const AlgebraSpec& spec, double j);

// Sampled bound of |omega| over the window.
double max_abs_omega(const Protocol& p);

// min(1e-2, 1/(50 max|omega|)).
double default_step(const Protocol& p);

}  // namespace lrsim
