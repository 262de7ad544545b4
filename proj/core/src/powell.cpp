#include "uwr/powell.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uwr/error.hpp"

namespace uwr {
namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - phi

class LineSearch {
 public:
  LineSearch(const Objective& f, const std::vector<Interval>& bounds, const PowellConfig& cfg,
             int& evaluations)
      : f_(f), bounds_(bounds), cfg_(cfg), evaluations_(evaluations) {}

  // Minimizes f(x + t u) over the feasible t; updates x, returns f at the new x.
  double minimize(std::vector<double>& x, const std::vector<double>& u, double fx) {
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    double unorm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      unorm = std::max(unorm, std::abs(u[i]));
      if (u[i] > 0.0) {
        tmax = std::min(tmax, (bounds_[i].hi - x[i]) / u[i]);
        tmin = std::max(tmin, (bounds_[i].lo - x[i]) / u[i]);
      } else if (u[i] < 0.0) {
        tmax = std::min(tmax, (bounds_[i].lo - x[i]) / u[i]);
        tmin = std::max(tmin, (bounds_[i].hi - x[i]) / u[i]);
      }
    }
    if (unorm == 0.0) return fx;
    tmin = std::min(tmin, 0.0);
    tmax = std::max(tmax, 0.0);
    x_ = &x;
    u_ = &u;

    const double h = cfg_.initial_step / unorm;
    // Bracket (a, b, c) with f(b) <= f(a), f(b) <= f(c).
    double a = 0.0, fa = fx;
    double b = std::min(h, tmax), fb = b > a ? at(b) : fa;
    if (!(fb < fa)) {
      const double back = std::max(-h, tmin);
      const double fback = back < 0.0 ? at(back) : fa;
      if (fback < fa) {
        // Search backward: mirror roles.
        return expand_and_refine(x, fx, 0.0, back, fback, tmin);
      }
      if (b == a && back == a) return fx;
      return refine(x, fx, back, 0.0, b, fa);
    }
    return expand_and_refine(x, fx, a, b, fb, tmax);
  }

 private:
  double at(double t) {
    std::vector<double> p(*x_);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] += t * (*u_)[i];
      p[i] = std::clamp(p[i], bounds_[i].lo, bounds_[i].hi);
    }
    ++evaluations_;
    const double v = f_(p);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  }

  // Walks from a through b toward `limit` until f rises, then refines.
  double expand_and_refine(std::vector<double>& x, double fx, double a, double b, double fb,
                           double limit) {
    for (int k = 0; k < 200; ++k) {
      double c = b + cfg_.growth * (b - a);
      if ((limit > b && c >= limit) || (limit < b && c <= limit)) c = limit;
      if (c == b) return commit(x, b, fb, fx);  // minimum sits on the boundary
      const double fc = at(c);
      if (fc >= fb) return refine(x, fx, a, b, c, fb);
      a = b;
      b = c;
      fb = fc;
    }
    return commit(x, b, fb, fx);
  }

  // Golden-section search on [lo, hi] bracketing mid.
  double refine(std::vector<double>& x, double fx, double lo, double mid, double hi, double fmid) {
    if (lo > hi) std::swap(lo, hi);
    double xm = mid, fm = fmid;
    while (hi - lo > cfg_.coordinate_tol * (std::abs(xm) + 1e-3) + 1e-14) {
      const bool right = (hi - xm) > (xm - lo);
      const double probe = right ? xm + kGolden * (hi - xm) : xm - kGolden * (xm - lo);
      const double fp = at(probe);
      if (fp < fm) {
        if (right) lo = xm;
        else hi = xm;
        xm = probe;
        fm = fp;
      } else {
        if (right) hi = probe;
        else lo = probe;
      }
    }
    return commit(x, xm, fm, fx);
  }

  double commit(std::vector<double>& x, double t, double ft, double fx) {
    if (!(ft < fx)) return fx;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = std::clamp(x[i] + t * (*u_)[i], bounds_[i].lo, bounds_[i].hi);
    }
    return ft;
  }

  const Objective& f_;
  const std::vector<Interval>& bounds_;
  const PowellConfig& cfg_;
  int& evaluations_;
  std::vector<double>* x_ = nullptr;
  const std::vector<double>* u_ = nullptr;
};

std::vector<std::vector<double>> unit_directions(std::size_t n) {
  std::vector<std::vector<double>> dirs(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) dirs[i][i] = 1.0;
  return dirs;
}

}  // namespace

PowellResult powell_minimize(const Objective& f, std::vector<double> x0,
                             std::vector<Interval> bounds, const PowellConfig& cfg) {
  const std::size_t n = x0.size();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "powell_minimize needs at least one variable");
  if (bounds.empty()) bounds.assign(n, Interval{});
  if (bounds.size() != n) throw Error(ErrorKind::ShapeMismatch, "one interval per variable");
  if (!(cfg.function_tol > 0.0) || !(cfg.coordinate_tol > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "Powell tolerances must be positive");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (bounds[i].lo > bounds[i].hi) throw Error(ErrorKind::InvalidArgument, "empty interval");
    x0[i] = std::clamp(x0[i], bounds[i].lo, bounds[i].hi);
  }

  PowellResult result;
  LineSearch line(f, bounds, cfg, result.evaluations);
  std::vector<double> x = x0;
  double fx = f(x);
  ++result.evaluations;
  if (!std::isfinite(fx)) throw Error(ErrorKind::InvalidArgument, "objective not finite at start");

  const int restart = cfg.restart_every > 0 ? cfg.restart_every : static_cast<int>(n) + 1;
  auto dirs = unit_directions(n);
  std::vector<double> start = x;

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    result.sweeps = sweep;
    if (sweep > 1 && (sweep - 1) % restart == 0) dirs = unit_directions(n);
    const double f_start = fx;
    double biggest_drop = 0.0;
    std::size_t biggest = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double before = fx;
      fx = line.minimize(x, dirs[i], fx);
      if (before - fx > biggest_drop) {
        biggest_drop = before - fx;
        biggest = i;
      }
    }
    if (2.0 * (f_start - fx) <= cfg.function_tol * (std::abs(f_start) + std::abs(fx)) + 1e-300) {
      result.converged = true;
      break;
    }
    // Extrapolated point and the sweep's net displacement.
    std::vector<double> net(n), extrapolated(n);
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
      net[i] = x[i] - start[i];
      extrapolated[i] = 2.0 * x[i] - start[i];
      inside = inside && extrapolated[i] >= bounds[i].lo && extrapolated[i] <= bounds[i].hi;
    }
    start = x;
    if (!inside || n == 1) continue;
    const double fe = f(extrapolated);
    ++result.evaluations;
    if (fe < f_start) {
      const double t = 2.0 * (f_start - 2.0 * fx + fe) * std::pow(f_start - fx - biggest_drop, 2) -
                       biggest_drop * std::pow(f_start - fe, 2);
      if (t < 0.0) {
        fx = line.minimize(x, net, fx);
        dirs[biggest] = dirs[n - 1];
        dirs[n - 1] = net;
      }
    }
  }
  result.x = std::move(x);
  result.value = fx;
  return result;
}

}  // namespace uwr
