#include "cno/rng.hpp"

#include <cmath>

namespace cno {

double Rng::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

void Rng::fill_gaussian(std::span<double> out) {
  for (double& v : out) v = next_gaussian();
}

}  // namespace cno
