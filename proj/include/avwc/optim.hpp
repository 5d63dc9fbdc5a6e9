#pragma once

// Small dense optimization utilities over probability simplices.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "avwc/rng.hpp"

namespace avwc {

struct OptimizerConfig {
  int grid = 1001;      // simplex grid resolution for low-dimensional sweeps
  int starts = 8;       // multistart count
  double tol = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 0;
};

/// Euclidean projection onto the probability simplex.
inline void project_simplex(std::vector<double>& v) {
  const std::size_t d = v.size();
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t i = 0; i < d; ++i) {
    css += u[i];
    double t = (css - 1.0) / double(i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (auto& x : v) x = std::max(0.0, x - theta);
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s > 0) {
    for (auto& x : v) x /= s;
  } else {
    for (auto& x : v) x = 1.0 / double(d);
  }
}

struct SimplexOptResult {
  std::vector<double> point;
  double value = 0.0;
  bool converged = true;
};

/// Projected (sub)gradient descent of f over the simplex. `grad` returns the
/// gradient at the current point; minimizes when `minimize`, else maximizes.
/// Backtracking line search on the projected step keeps iterates feasible.
inline SimplexOptResult projected_gradient_simplex(
    const std::function<double(const std::vector<double>&)>& f,
    const std::function<std::vector<double>(const std::vector<double>&)>& grad,
    std::vector<double> start, bool minimize, double tol, int max_iter) {
  double sign = minimize ? 1.0 : -1.0;
  project_simplex(start);
  std::vector<double> x = start;
  double fx = f(x);
  if (x.size() <= 1) return {x, fx, true};
  double step = 0.5;
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> g = grad(x);
    std::vector<double> cand(x.size());
    bool improved = false;
    double trial_step = step;
    for (int bt = 0; bt < 24 && trial_step > 1e-13; ++bt) {
      for (std::size_t i = 0; i < x.size(); ++i) cand[i] = x[i] - sign * trial_step * g[i];
      project_simplex(cand);
      double fc = f(cand);
      if ((minimize && fc < fx - 1e-15) || (!minimize && fc > fx + 1e-15)) {
        double moved = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) moved += std::abs(cand[i] - x[i]);
        x = cand;
        double delta = std::abs(fc - fx);
        fx = fc;
        improved = true;
        step = std::min(1.0, trial_step * 2.0);
        if (delta < tol && moved < tol) ++stall;
        else stall = 0;
        break;
      }
      trial_step *= 0.5;
    }
    if (!improved || stall >= 2) return {x, fx, true};
  }
  return {x, fx, false};
}

/// Lexicographic comparison with tolerance, for deterministic tie-breaking.
inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b,
                     double tol = 1e-12) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return a.size() < b.size();
}

} // namespace avwc
