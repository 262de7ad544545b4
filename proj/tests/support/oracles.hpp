#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library code under test except for plain containers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "uwr/volume.hpp"

namespace uwr::testing {

// Global minimizer of a 1D function on [lo, hi]: dense grid, then
// golden-section refinement of the best grid cell down to `tol`.
inline double brute_minimize(const std::function<double(double)>& f, double lo, double hi,
                             int grid = 4001, double tol = 1e-12) {
  double best_x = lo, best_f = f(lo);
  const double h = (hi - lo) / (grid - 1);
  for (int i = 1; i < grid; ++i) {
    const double x = lo + h * i;
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(best_x))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return f(x) <= best_f ? x : best_x;
}

// Root of an increasing function on [lo, hi] by plain bisection.
inline double bisect(const std::function<double(double)>& g, double lo, double hi, double tol = 1e-14) {
  for (int i = 0; i < 400 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Solves the pair stationarity system
//   wk p |u|^(p-1) u/|u| + (a' - a) = 0,  -wk p |u|^(p-1) u/|u| + (b' - b) = 0
// with u = a' - b'. Summing gives a' + b' = a + b; subtracting gives
// |u| + 2 wk p |u|^(p-1) = |a - b| along the direction of a - b.
inline std::pair<cplx, cplx> pair_oracle(cplx a, cplx b, double kappa, double p, double w) {
  const cplx diff = a - b;
  const double r = std::abs(diff);
  if (r == 0.0) return {a, b};
  const double m = bisect(
      [&](double t) { return t + 2.0 * w * kappa * p * std::pow(t, p - 1.0) - r; }, 0.0, r, 1e-15);
  const double um = (p == 1.0) ? std::max(r - 2.0 * w * kappa, 0.0) : m;
  const cplx u = diff / r * um;
  const cplx s = a + b;
  return {(s + u) / 2.0, (s - u) / 2.0};
}

// Samples of density proportional to exp(-(alpha |x-mu| + beta/2 (x-mu)^2)).
// |x - mu| is a normal N(-alpha/beta, 1/beta) truncated to [0, inf), drawn
// with Robert's exponential-proposal rejection sampler.
inline std::vector<double> sample_ggl(std::size_t n, double mu, double alpha, double beta,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) {
    double t = 0.0;
    if (beta == 0.0) {
      t = -std::log1p(-unit(rng)) / alpha;
    } else if (alpha == 0.0) {
      t = std::abs(gauss(rng)) / std::sqrt(beta);
    } else {
      const double s = 1.0 / std::sqrt(beta);
      const double a = alpha * s;  // truncation point in standard units
      const double lam = 0.5 * (a + std::sqrt(a * a + 4.0));
      double z = 0.0;
      for (;;) {
        z = a - std::log1p(-unit(rng)) / lam;
        if (unit(rng) <= std::exp(-0.5 * (z - lam) * (z - lam))) break;
      }
      t = (z - a) * s;
    }
    x = mu + (unit(rng) < 0.5 ? -t : t);
  }
  return out;
}

inline ComplexVolume random_volume(Dims dims, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexVolume v(dims);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {g(rng), g(rng)};
  return v;
}

inline cplx random_cplx(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng)};
}

}  // namespace uwr::testing
