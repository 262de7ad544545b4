#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace uwr {

struct PowellConfig {
  // Relative tolerance of the golden-section line search.
  double coordinate_tol = 1e-10;
  // Stop when 2 (f_prev - f) <= function_tol (|f_prev| + |f|) over a sweep.
  double function_tol = 1e-8;
  int max_sweeps = 200;
  double growth = 1.618033988749895;
  double initial_step = 1.0;
  // Reset to coordinate directions every this many sweeps (0: number of variables + 1).
  int restart_every = 0;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct PowellResult {
  std::vector<double> x;
  double value = 0.0;
  int sweeps = 0;
  int evaluations = 0;
  // False when max_sweeps ran out (MaxSweepsExceeded); x is then the best point seen.
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Derivative-free direction-set minimization (Powell) with bracketing and
// golden-section line searches kept inside the box `bounds`.
PowellResult powell_minimize(const Objective& f, std::vector<double> x0,
                             std::vector<Interval> bounds, const PowellConfig& cfg = {});

}  // namespace uwr
