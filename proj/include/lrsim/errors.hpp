#pragma once

#include <stdexcept>
#include <string>

namespace lrsim {

// Scenario/config problems; the CLI maps these to exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// m*n <= 0 has no finite-dimensional realization of the kind used here.
class non_compact_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// |sin a| fell below the floor: the (a, b) chart is invalid at the poles,
// so integration stops instead of regularizing silently.
class singularity_error : public std::runtime_error {
 public:
  singularity_error(double t, double a, double b);
  double t;  // NaN when the failing time is unknown to the thrower
  double a;
  double b;
};

// The Richardson step-halving validation found the step too coarse.
class step_size_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Branch Hamiltonian with vanishing effective omega: theta is undefined.
class degenerate_branch_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lrsim
