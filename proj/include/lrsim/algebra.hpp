#pragma once

#include <cmath>
#include <vector>

#include "lrsim/errors.hpp"
#include "lrsim/util.hpp"

namespace lrsim {

// Structure constants of [A+, A-] = n A, [A, A+] = m A+, [A, A-] = -m A-.
// Only the compact case m*n > 0 is supported.
struct AlgebraSpec {
  double m = 1.0;
  double n = 2.0;

  double root_half_mn() const { return std::sqrt(0.5 * m * n); }
  // Ladder weight that makes the rotated invariant isospectral with A_z.
  double y() const { return m / root_half_mn(); }
  // Displacement scale; cancels the ladder normalization inside exponents.
  double x() const { return 1.0 / root_half_mn(); }
};

// Throws non_compact_error for m*n <= 0, invalid_argument otherwise.
void validate(const AlgebraSpec& spec);

// Concrete (2j+1)-dimensional matrices. A_z is diagonal with eigenvalues
// m*mu, mu = j, j-1, ..., -j going down the stored basis; A_minus is the
// conjugate transpose of A_plus by construction.
struct Representation {
  AlgebraSpec spec;
  double j = 0.5;
  int dim = 2;
  cmatrix a_plus;
  cmatrix a_minus;
  cmatrix a_z;
  std::vector<double> az_eigenvalues;  // az_eigenvalues[k] = m * (j - k)
};

// Rescaled angular-momentum matrices: A_z = m*J3, A+- = sqrt(mn/2)*J+-.
Representation build_representation(const AlgebraSpec& spec, double j,
                                    double j_max = 100.0);

// Max entry deviation over the three defining commutators.
double commutator_residual(const Representation& rep);

// Basis index whose A_z eigenvalue matches lambda within 1e-9; throws
// invalid_argument when lambda is not in the spectrum.
int eigenvalue_index(const Representation& rep, double lambda);

// exp(K) for anti-Hermitian K via eigendecomposition of -iK; the result is
// unitary to roundoff. Rejects non-square input and generators whose
// anti-Hermiticity defect exceeds the tolerance.
cmatrix expm_skew(const cmatrix& generator, double anti_hermiticity_tol = 1e-10);

}  // namespace lrsim
