#include "lrsim/errors.hpp"

#include <cmath>
#include <sstream>

namespace lrsim {

namespace {

std::string singularity_message(double t, double a, double b) {
  std::ostringstream os;
  os << "coordinate singularity";
  if (std::isfinite(t)) os << " at t=" << t;
  os << ": |sin a| below floor (a=" << a << ", b=" << b << ")";
  return os.str();
}

}  // namespace

singularity_error::singularity_error(double t_, double a_, double b_)
    : std::runtime_error(singularity_message(t_, a_, b_)), t(t_), a(a_), b(b_) {}

}  // namespace lrsim
