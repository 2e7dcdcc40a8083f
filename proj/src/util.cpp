#include "lrsim/util.hpp"

#include <cmath>
#include <stdexcept>

namespace lrsim {

std::vector<double> make_grid(double T, double step) {
  if (!(T > 0.0)) throw std::invalid_argument("make_grid: horizon must be positive");
  if (!(step > 0.0)) throw std::invalid_argument("make_grid: step must be positive");
  const long n = std::max(1L, std::lround(T / step));
  const double h = T / static_cast<double>(n);
  std::vector<double> times(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) times[static_cast<std::size_t>(k)] = h * static_cast<double>(k);
  times.back() = T;
  return times;
}

bool is_half_integer(double j) {
  if (!std::isfinite(j)) return false;
  const double twoj = 2.0 * j;
  return std::abs(twoj - std::round(twoj)) <= 1e-9 && std::round(twoj) >= 1.0;
}

std::vector<double> cumulative_integral(const std::vector<double>& times,
                                        const std::vector<double>& f) {
  if (times.size() != f.size())
    throw std::invalid_argument("cumulative_integral: size mismatch");
  const std::size_t n = times.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  const double h = times[1] - times[0];
  if (n == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return out;
  }
  // out[1] integrates the quadratic through the first three samples over one step.
  out[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
  for (std::size_t k = 2; k < n; ++k)
    out[k] = out[k - 2] + h * (f[k - 2] + 4.0 * f[k - 1] + f[k]) / 3.0;
  return out;
}

}  // namespace lrsim
