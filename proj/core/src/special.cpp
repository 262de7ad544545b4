#include "uwr/special.hpp"

#include <cmath>
#include <numbers>

namespace uwr {

double log_erfcx(double z) {
  if (z < 5.0) return std::log(std::erfc(z)) + z * z;
  // Continued fraction erfcx(z) = 1/sqrt(pi) / (z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))).
  double f = z;
  for (int k = 80; k >= 1; --k) f = z + 0.5 * k / f;
  return -std::log(f) - 0.5 * std::log(std::numbers::pi);
}

}  // namespace uwr
