#include "lrsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lrsim {

ScalarFunction ScalarFunction::constant(double c) {
  ScalarFunction f;
  f.kind_ = Kind::constant;
  f.c0_ = c;
  return f;
}

ScalarFunction ScalarFunction::linear(double c0, double c1) {
  ScalarFunction f;
  f.kind_ = Kind::linear;
  f.c0_ = c0;
  f.c1_ = c1;
  return f;
}

ScalarFunction ScalarFunction::sinusoid(double c0, double c1, double c2, double c3) {
  ScalarFunction f;
  f.kind_ = Kind::sinusoid;
  f.c0_ = c0;
  f.c1_ = c1;
  f.c2_ = c2;
  f.c3_ = c3;
  return f;
}

ScalarFunction ScalarFunction::winding(double rate) {
  ScalarFunction f;
  f.kind_ = Kind::winding;
  f.c1_ = rate;
  return f;
}

ScalarFunction ScalarFunction::sampled(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size())
    throw std::invalid_argument("sampled function: times/values size mismatch");
  if (times.size() < 2)
    throw std::invalid_argument("sampled function: need at least two knots");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]))
      throw std::invalid_argument("sampled function: knots must be strictly increasing");

  ScalarFunction f;
  f.kind_ = Kind::sampled;
  f.ts_ = std::move(times);
  f.vs_ = std::move(values);

  // Natural cubic spline curvatures via the Thomas algorithm.
  const std::size_t n = f.ts_.size();
  f.d2_.assign(n, 0.0);
  if (n > 2) {
    const std::size_t m = n - 2;
    std::vector<double> diag(m), upper(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double h0 = f.ts_[i + 1] - f.ts_[i];
      const double h1 = f.ts_[i + 2] - f.ts_[i + 1];
      diag[i] = (h0 + h1) / 3.0;
      upper[i] = h1 / 6.0;
      rhs[i] = (f.vs_[i + 2] - f.vs_[i + 1]) / h1 - (f.vs_[i + 1] - f.vs_[i]) / h0;
    }
    for (std::size_t i = 1; i < m; ++i) {
      const double lower = upper[i - 1];  // symmetric tridiagonal
      const double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    f.d2_[m] = rhs[m - 1] / diag[m - 1];
    for (std::size_t i = m - 1; i >= 1; --i)
      f.d2_[i] = (rhs[i - 1] - upper[i - 1] * f.d2_[i + 1]) / diag[i - 1];
  }
  return f;
}

std::size_t ScalarFunction::segment(double& t) const {
  const double lo = ts_.front();
  const double hi = ts_.back();
  const double slack = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (t < lo - slack || t > hi + slack) {
    std::ostringstream os;
    os << "sampled function: t=" << t << " outside knot range [" << lo << ", " << hi << "]";
    throw std::out_of_range(os.str());
  }
  t = std::clamp(t, lo, hi);
  const auto it = std::upper_bound(ts_.begin(), ts_.end(), t);
  std::size_t i = static_cast<std::size_t>(std::distance(ts_.begin(), it));
  if (i > 0) --i;
  if (i >= ts_.size() - 1) i = ts_.size() - 2;
  return i;
}

double ScalarFunction::value(double t) const {
  switch (kind_) {
    case Kind::constant:
      return c0_;
    case Kind::linear:
      return c0_ + c1_ * t;
    case Kind::sinusoid:
      return c0_ + c1_ * std::sin(c2_ * t + c3_);
    case Kind::winding:
      return c1_ * t;
    case Kind::sampled: {
      double tt = t;
      const std::size_t i = segment(tt);
      const double h = ts_[i + 1] - ts_[i];
      const double a = (ts_[i + 1] - tt) / h;
      const double b = (tt - ts_[i]) / h;
      return a * vs_[i] + b * vs_[i + 1] +
             ((a * a * a - a) * d2_[i] + (b * b * b - b) * d2_[i + 1]) * h * h / 6.0;
    }
  }
  return 0.0;
}

double ScalarFunction::derivative(double t) const {
  switch (kind_) {
    case Kind::constant:
      return 0.0;
    case Kind::linear:
      return c1_;
    case Kind::sinusoid:
      return c1_ * c2_ * std::cos(c2_ * t + c3_);
    case Kind::winding:
      return c1_;
    case Kind::sampled: {
      double tt = t;
      const std::size_t i = segment(tt);
      const double h = ts_[i + 1] - ts_[i];
      const double a = (ts_[i + 1] - tt) / h;
      const double b = (tt - ts_[i]) / h;
      return (vs_[i + 1] - vs_[i]) / h -
             (3.0 * a * a - 1.0) * h * d2_[i] / 6.0 +
             (3.0 * b * b - 1.0) * h * d2_[i + 1] / 6.0;
    }
  }
  return 0.0;
}

ProtocolValues evaluate(const Protocol& p, double t) {
  const double slack = 1e-9 * std::max(1.0, std::abs(p.horizon));
  if (t < -slack || t > p.horizon + slack) {
    std::ostringstream os;
    os << "protocol '" << p.label << "': t=" << t << " outside window [0, " << p.horizon << "]";
    throw std::out_of_range(os.str());
  }
  ProtocolValues pv;
  pv.omega = p.omega.value(t);
  pv.theta = p.theta.value(t);
  pv.phi = p.phi.value(t);
  pv.dtheta_dt = p.theta.derivative(t);
  pv.dphi_dt = p.phi.derivative(t);
  return pv;
}

cmatrix hamiltonian_matrix(const Protocol& p, const Representation& rep, double t) {
  const ProtocolValues pv = evaluate(p, t);
  const complexd c =
      0.5 * pv.omega * std::sin(pv.theta) * std::exp(complexd(0.0, -pv.phi));
  return c * rep.a_plus + std::conj(c) * rep.a_minus +
         (pv.omega * std::cos(pv.theta)) * rep.a_z;
}

double hamiltonian_norm(const ProtocolValues& pv, const AlgebraSpec& spec, double j) {
  const double s = std::sin(pv.theta);
  const double c = std::cos(pv.theta);
  const double v = std::sqrt(0.5 * spec.m * spec.n * s * s + spec.m * spec.m * c * c);
  return std::abs(pv.omega) * v * j;
}

double max_abs_omega(const Protocol& p) {
  const int samples = 1000;
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double t = p.horizon * static_cast<double>(k) / samples;
    worst = std::max(worst, std::abs(p.omega.value(t)));
  }
  return worst;
}

double default_step(const Protocol& p) {
  const double w = max_abs_omega(p);
  if (w <= 0.0) return 1e-2;
  return std::min(1e-2, 1.0 / (50.0 * w));
}

}  // namespace lrsim
