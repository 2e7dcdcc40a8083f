#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace lrsim {

using complexd = std::complex<double>;
using cmatrix = Eigen::MatrixXcd;
using cvector = Eigen::VectorXcd;

// Uniform grid over [0, T] with round(T/step) intervals (at least one).
// The last point is exactly T.
std::vector<double> make_grid(double T, double step);

inline double max_abs(const cmatrix& m) { return m.cwiseAbs().maxCoeff(); }

// True when 2j is a positive integer (within 1e-9).
bool is_half_integer(double j);

// Cumulative integral of samples f on a uniform grid: composite Simpson
// pairs, with the leading odd interval handled by a quadratic fit.
std::vector<double> cumulative_integral(const std::vector<double>& times,
                                        const std::vector<double>& f);

}  // namespace lrsim
