#include "lrsim/algebra.hpp"

#include <sstream>

namespace lrsim {

void validate(const AlgebraSpec& spec) {
  if (!std::isfinite(spec.m) || !std::isfinite(spec.n))
    throw std::invalid_argument("algebra: structure constants must be finite");
  if (spec.m == 0.0 || spec.n == 0.0)
    throw std::invalid_argument("algebra: structure constants must be nonzero");
  if (spec.m * spec.n <= 0.0)
    throw non_compact_error("non-compact algebra unsupported (m*n <= 0)");
}

Representation build_representation(const AlgebraSpec& spec, double j, double j_max) {
  validate(spec);
  if (!is_half_integer(j)) {
    std::ostringstream os;
    os << "build_representation: j=" << j << " is not a positive half-integer";
    throw std::invalid_argument(os.str());
  }
  if (j > j_max + 1e-12) {
    std::ostringstream os;
    os << "build_representation: j=" << j << " exceeds j_max=" << j_max;
    throw std::invalid_argument(os.str());
  }

  const long twoj = std::lround(2.0 * j);
  const double jj = 0.5 * static_cast<double>(twoj);
  const int dim = static_cast<int>(twoj) + 1;

  cmatrix jz = cmatrix::Zero(dim, dim);
  cmatrix jp = cmatrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) jz(k, k) = jj - k;
  for (int k = 1; k < dim; ++k) {
    const double mu = jj - k;  // J+ |j,mu> = sqrt(j(j+1) - mu(mu+1)) |j,mu+1>
    jp(k - 1, k) = std::sqrt(jj * (jj + 1.0) - mu * (mu + 1.0));
  }

  Representation rep;
  rep.spec = spec;
  rep.j = jj;
  rep.dim = dim;
  rep.a_plus = spec.root_half_mn() * jp;
  rep.a_minus = rep.a_plus.adjoint();
  rep.a_z = spec.m * jz;
  rep.az_eigenvalues.resize(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k)
    rep.az_eigenvalues[static_cast<std::size_t>(k)] = spec.m * (jj - k);
  return rep;
}

double commutator_residual(const Representation& rep) {
  const auto& ap = rep.a_plus;
  const auto& am = rep.a_minus;
  const auto& az = rep.a_z;
  const double r1 = max_abs(ap * am - am * ap - rep.spec.n * az);
  const double r2 = max_abs(az * ap - ap * az - rep.spec.m * ap);
  const double r3 = max_abs(az * am - am * az + rep.spec.m * am);
  return std::max({r1, r2, r3});
}

int eigenvalue_index(const Representation& rep, double lambda) {
  for (int k = 0; k < rep.dim; ++k)
    if (std::abs(rep.az_eigenvalues[static_cast<std::size_t>(k)] - lambda) <= 1e-9)
      return k;
  std::ostringstream os;
  os << "lambda=" << lambda << " is not an eigenvalue of A_z (j=" << rep.j
     << ", m=" << rep.spec.m << ")";
  throw std::invalid_argument(os.str());
}

cmatrix expm_skew(const cmatrix& generator, double anti_hermiticity_tol) {
  if (generator.rows() != generator.cols() || generator.rows() == 0)
    throw std::invalid_argument("expm_skew: generator must be square and non-empty");
  const double defect = max_abs(cmatrix(generator + generator.adjoint()));
  if (defect > anti_hermiticity_tol) {
    std::ostringstream os;
    os << "expm_skew: generator is not anti-Hermitian (defect " << defect << ")";
    throw std::invalid_argument(os.str());
  }

  // K = i S with S Hermitian; symmetrizing removes the allowed slack.
  cmatrix s = complexd(0.0, -1.0) * generator;
  s = 0.5 * (s + cmatrix(s.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<cmatrix> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expm_skew: eigendecomposition failed");

  const Eigen::VectorXd& d = es.eigenvalues();
  cvector phases(d.size());
  for (Eigen::Index k = 0; k < d.size(); ++k)
    phases(k) = std::exp(complexd(0.0, d(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace lrsim
