#pragma once

// Symmetrizability: exact LP decision with quantitative margin, certificate
// verification, the F-function (distance from symmetrizability), the
// two-input convex-hull criterion, and the pre-coding extension check.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avwc/channel.hpp"
#include "avwc/error.hpp"
#include "avwc/lp.hpp"
#include "avwc/optim.hpp"
#include "avwc/rng.hpp"

namespace avwc {

/// Stochastic map from inputs to states witnessing (near-)symmetrizability.
struct SymmetrizabilityCertificate {
  Channel u;       // X -> S
  double residual; // max-abs violation of the symmetry equations
};

struct SymVerdict {
  bool symmetrizable = false;
  std::optional<SymmetrizabilityCertificate> certificate;
  std::optional<double> infeasibility_margin; // minimal achievable max-abs violation
};

/// [OP] verify_certificate: max over (x,x',y) of
/// | sum_s u(s|x) w(y|x',s) - sum_s u(s|x') w(y|x,s) |.
inline double verify_certificate(const AVC& avc, const Channel& u) {
  if (u.input != avc.input || u.output != avc.states)
    throw Error(ErrorKind::AlphabetMismatch, "certificate must map inputs to states");
  const std::size_t nx = avc.input.size(), ny = avc.output.size(), ns = avc.state_count();
  double worst = 0.0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t xp = x + 1; xp < nx; ++xp)
      for (std::size_t y = 0; y < ny; ++y) {
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t s = 0; s < ns; ++s) {
          lhs += u.kernel[x][s] * avc.w(y, xp, s);
          rhs += u.kernel[xp][s] * avc.w(y, x, s);
        }
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  return worst;
}

namespace detail {

// Epigraph LP: minimize the max-abs violation t over stochastic u.
// Variables: u(s|x) laid out x-major, then t. Returns (t*, u*).
inline std::pair<double, Channel> symmetrizability_lp(const AVC& avc) {
  const std::size_t nx = avc.input.size(), ny = avc.output.size(), ns = avc.state_count();
  const std::size_t nu = nx * ns;
  const std::size_t nvar = nu + 1;
  auto uvar = [&](std::size_t x, std::size_t s) { return x * ns + s; };

  std::vector<LpRow> rows;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t xp = x + 1; xp < nx; ++xp)
      for (std::size_t y = 0; y < ny; ++y) {
        LpRow pos, neg;
        pos.coeffs.assign(nvar, 0.0);
        neg.coeffs.assign(nvar, 0.0);
        for (std::size_t s = 0; s < ns; ++s) {
          pos.coeffs[uvar(x, s)] += avc.w(y, xp, s);
          pos.coeffs[uvar(xp, s)] -= avc.w(y, x, s);
        }
        for (std::size_t j = 0; j < nu; ++j) neg.coeffs[j] = -pos.coeffs[j];
        pos.coeffs[nu] = -1.0; // viol - t <= 0
        neg.coeffs[nu] = -1.0; // -viol - t <= 0
        pos.kind = neg.kind = RowKind::LessEqual;
        pos.rhs = neg.rhs = 0.0;
        rows.push_back(std::move(pos));
        rows.push_back(std::move(neg));
      }
  for (std::size_t x = 0; x < nx; ++x) {
    LpRow simplex;
    simplex.coeffs.assign(nvar, 0.0);
    for (std::size_t s = 0; s < ns; ++s) simplex.coeffs[uvar(x, s)] = 1.0;
    simplex.kind = RowKind::Equal;
    simplex.rhs = 1.0;
    rows.push_back(std::move(simplex));
  }
  std::vector<double> cost(nvar, 0.0);
  cost[nu] = 1.0;

  LpResult res = SimplexSolver::minimize(cost, rows);
  if (!res.feasible || !res.bounded)
    throw Error(ErrorKind::SolverFailure, "symmetrizability LP did not solve");
  // normalize rows exactly before building the certificate channel
  std::vector<std::vector<double>> uk(nx, std::vector<double>(ns, 0.0));
  for (std::size_t x = 0; x < nx; ++x) {
    double sum = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      uk[x][s] = std::max(0.0, res.x[uvar(x, s)]);
      sum += uk[x][s];
    }
    if (sum <= 0.0) { uk[x].assign(ns, 1.0 / double(ns)); continue; }
    for (std::size_t s = 0; s < ns; ++s) uk[x][s] /= sum;
  }
  return {res.objective, Channel(avc.input, avc.states, std::move(uk), 1e-6)};
}

} // namespace detail

/// [OP] is_symmetrizable: decides the linear feasibility problem by
/// minimizing the max-abs violation, so non-symmetrizable verdicts carry a
/// quantitative margin.
inline SymVerdict is_symmetrizable(const AVC& avc, double tol = 1e-9) {
  if (tol <= 0.0) throw Error(ErrorKind::OutOfRange, "tol must be positive");
  SymVerdict verdict;
  if (avc.input.size() < 2) {
    // a single input symmetrizes vacuously (no pairs to confuse)
    verdict.symmetrizable = true;
    verdict.certificate = SymmetrizabilityCertificate{
        Channel::trash(avc.input, avc.states), 0.0};
    return verdict;
  }
  auto [t_star, u_star] = detail::symmetrizability_lp(avc);
  double residual = verify_certificate(avc, u_star);
  if (residual <= tol) {
    verdict.symmetrizable = true;
    verdict.certificate = SymmetrizabilityCertificate{u_star, residual};
  } else {
    verdict.symmetrizable = false;
    verdict.infeasibility_margin = std::max(t_star, tol);
    verdict.certificate = SymmetrizabilityCertificate{u_star, residual};
  }
  return verdict;
}

enum class FMode { Exact, Multistart };

struct FValueResult {
  double value = 0.0;
  Channel u_star;
  bool certified_exact = false;
};

namespace detail {

// per-pair L1 violation of the symmetry equations under u
inline double pair_l1_violation(const AVC& avc, const std::vector<std::vector<double>>& u,
                                std::size_t x, std::size_t xp) {
  const std::size_t ny = avc.output.size(), ns = avc.state_count();
  double total = 0.0;
  for (std::size_t y = 0; y < ny; ++y) {
    double e = 0.0;
    for (std::size_t s = 0; s < ns; ++s)
      e += u[x][s] * avc.w(y, xp, s) - u[xp][s] * avc.w(y, x, s);
    total += std::abs(e);
  }
  return total;
}

inline double worst_pair_l1(const AVC& avc, const std::vector<std::vector<double>>& u) {
  double worst = 0.0;
  for (std::size_t x = 0; x < avc.input.size(); ++x)
    for (std::size_t xp = x + 1; xp < avc.input.size(); ++xp)
      worst = std::max(worst, pair_l1_violation(avc, u, x, xp));
  return worst;
}

// Exact LP for min_u max_{x<x'} sum_y |violation|. Variables: u, then one
// t per (pair,y), then F.
inline std::pair<double, Channel> f_lp(const AVC& avc) {
  const std::size_t nx = avc.input.size(), ny = avc.output.size(), ns = avc.state_count();
  const std::size_t npairs = nx * (nx - 1) / 2;
  const std::size_t nu = nx * ns;
  const std::size_t nt = npairs * ny;
  const std::size_t fvar = nu + nt;
  const std::size_t nvar = fvar + 1;
  auto uvar = [&](std::size_t x, std::size_t s) { return x * ns + s; };
  auto tvar = [&](std::size_t pair, std::size_t y) { return nu + pair * ny + y; };

  std::vector<LpRow> rows;
  std::size_t pair = 0;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t xp = x + 1; xp < nx; ++xp, ++pair) {
      for (std::size_t y = 0; y < ny; ++y) {
        LpRow pos, neg;
        pos.coeffs.assign(nvar, 0.0);
        neg.coeffs.assign(nvar, 0.0);
        for (std::size_t s = 0; s < ns; ++s) {
          pos.coeffs[uvar(x, s)] += avc.w(y, xp, s);
          pos.coeffs[uvar(xp, s)] -= avc.w(y, x, s);
        }
        for (std::size_t j = 0; j < nu; ++j) neg.coeffs[j] = -pos.coeffs[j];
        pos.coeffs[tvar(pair, y)] = -1.0;
        neg.coeffs[tvar(pair, y)] = -1.0;
        pos.kind = neg.kind = RowKind::LessEqual;
        rows.push_back(std::move(pos));
        rows.push_back(std::move(neg));
      }
      LpRow sum;
      sum.coeffs.assign(nvar, 0.0);
      for (std::size_t y = 0; y < ny; ++y) sum.coeffs[tvar(pair, y)] = 1.0;
      sum.coeffs[fvar] = -1.0; // sum_y t - F <= 0
      sum.kind = RowKind::LessEqual;
      rows.push_back(std::move(sum));
    }
  for (std::size_t x = 0; x < nx; ++x) {
    LpRow simplex;
    simplex.coeffs.assign(nvar, 0.0);
    for (std::size_t s = 0; s < ns; ++s) simplex.coeffs[uvar(x, s)] = 1.0;
    simplex.kind = RowKind::Equal;
    simplex.rhs = 1.0;
    rows.push_back(std::move(simplex));
  }
  std::vector<double> cost(nvar, 0.0);
  cost[fvar] = 1.0;
  LpResult res = SimplexSolver::minimize(cost, rows);
  if (!res.feasible || !res.bounded)
    throw Error(ErrorKind::SolverFailure, "F-function LP did not solve");
  std::vector<std::vector<double>> uk(nx, std::vector<double>(ns, 0.0));
  for (std::size_t x = 0; x < nx; ++x) {
    double sum = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      uk[x][s] = std::max(0.0, res.x[uvar(x, s)]);
      sum += uk[x][s];
    }
    if (sum <= 0.0) { uk[x].assign(ns, 1.0 / double(ns)); continue; }
    for (std::size_t s = 0; s < ns; ++s) uk[x][s] /= sum;
  }
  return {std::max(0.0, res.objective), Channel(avc.input, avc.states, std::move(uk), 1e-6)};
}

} // namespace detail

/// [OP] f_value: the quantitative distance from symmetrizability,
///   F = min over U in C(X,S) of max over input pairs of the L1 violation.
/// F vanishes exactly on the symmetrizable set. The objective is a max of
/// convex functions of U, so the minimization is an LP and `Exact` mode is
/// certified for every alphabet size; `Multistart` runs projected
/// subgradient descent from `starts` random points plus the deterministic
/// vertex maps and is not certified.
inline FValueResult f_value(const AVC& avc, FMode mode = FMode::Exact, int starts = 16,
                            std::uint64_t seed = 0) {
  if (avc.input.size() < 2)
    throw Error(ErrorKind::DimensionMismatch, "F needs at least two inputs");
  if (mode == FMode::Exact) {
    auto [value, u] = detail::f_lp(avc);
    return {std::max(value, 0.0), u, true};
  }
  const std::size_t nx = avc.input.size(), ns = avc.state_count();
  auto objective = [&](const std::vector<std::vector<double>>& u) {
    return detail::worst_pair_l1(avc, u);
  };
  // subgradient of the active pair, rows projected back onto simplices
  auto descend = [&](std::vector<std::vector<double>> u) {
    double val = objective(u);
    double step = 0.25;
    for (int it = 0; it < 400; ++it) {
      // find active pair
      std::size_t ax = 0, axp = 1;
      double worst = -1.0;
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t xp = x + 1; xp < nx; ++xp) {
          double v = detail::pair_l1_violation(avc, u, x, xp);
          if (v > worst) { worst = v; ax = x; axp = xp; }
        }
      std::vector<std::vector<double>> g(nx, std::vector<double>(ns, 0.0));
      for (std::size_t y = 0; y < avc.output.size(); ++y) {
        double e = 0.0;
        for (std::size_t s = 0; s < ns; ++s)
          e += u[ax][s] * avc.w(y, axp, s) - u[axp][s] * avc.w(y, ax, s);
        const double sgn = e >= 0 ? 1.0 : -1.0;
        for (std::size_t s = 0; s < ns; ++s) {
          g[ax][s] += sgn * avc.w(y, axp, s);
          g[axp][s] -= sgn * avc.w(y, ax, s);
        }
      }
      auto cand = u;
      for (std::size_t x = 0; x < nx; ++x) {
        for (std::size_t s = 0; s < ns; ++s) cand[x][s] -= step * g[x][s];
        project_simplex(cand[x]);
      }
      double cv = objective(cand);
      if (cv < val - 1e-14) {
        u = cand;
        val = cv;
        step = std::min(0.5, step * 1.5);
      } else {
        step *= 0.5;
        if (step < 1e-10) break;
      }
    }
    return std::make_pair(val, u);
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best_u;
  // deterministic maps first (lexicographic), then random starts
  const std::size_t det_count = [&] {
    std::size_t c = 1;
    for (std::size_t i = 0; i < nx; ++i) c *= ns;
    return c;
  }();
  if (det_count <= 4096) {
    for (std::size_t code = 0; code < det_count; ++code) {
      std::vector<std::vector<double>> u(nx, std::vector<double>(ns, 0.0));
      std::size_t rem = code;
      for (std::size_t x = 0; x < nx; ++x) {
        u[x][rem % ns] = 1.0;
        rem /= ns;
      }
      auto [v, uu] = descend(std::move(u));
      if (v < best) { best = v; best_u = uu; }
    }
  }
  Rng rng(seed, 0x6676616cULL);
  for (int i = 0; i < starts; ++i) {
    std::vector<std::vector<double>> u(nx);
    for (std::size_t x = 0; x < nx; ++x) u[x] = rng.next_simplex(ns);
    auto [v, uu] = descend(std::move(u));
    if (v < best) { best = v; best_u = uu; }
  }
  return {best, Channel(avc.input, avc.states, best_u, 1e-6), false};
}

/// [OP] hulls_intersect: conv({w(.|x,s)}_s) meets conv({w(.|x',s)}_s)?
/// For |X| = 2 this is equivalent to symmetrizability.
inline bool hulls_intersect(const AVC& avc, std::size_t x, std::size_t xp, double tol = 1e-9) {
  if (x == xp) throw Error(ErrorKind::OutOfRange, "inputs must differ");
  const std::size_t ny = avc.output.size(), ns = avc.state_count();
  // variables: lambda (ns), mu (ns), t; minimize max-abs gap t
  const std::size_t nvar = 2 * ns + 1;
  std::vector<LpRow> rows;
  for (std::size_t y = 0; y < ny; ++y) {
    LpRow pos, neg;
    pos.coeffs.assign(nvar, 0.0);
    neg.coeffs.assign(nvar, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      pos.coeffs[s] += avc.w(y, x, s);
      pos.coeffs[ns + s] -= avc.w(y, xp, s);
    }
    for (std::size_t j = 0; j < 2 * ns; ++j) neg.coeffs[j] = -pos.coeffs[j];
    pos.coeffs[2 * ns] = -1.0;
    neg.coeffs[2 * ns] = -1.0;
    pos.kind = neg.kind = RowKind::LessEqual;
    rows.push_back(std::move(pos));
    rows.push_back(std::move(neg));
  }
  for (int block = 0; block < 2; ++block) {
    LpRow simplex;
    simplex.coeffs.assign(nvar, 0.0);
    for (std::size_t s = 0; s < ns; ++s) simplex.coeffs[block * ns + s] = 1.0;
    simplex.kind = RowKind::Equal;
    simplex.rhs = 1.0;
    rows.push_back(std::move(simplex));
  }
  std::vector<double> cost(nvar, 0.0);
  cost[2 * ns] = 1.0;
  LpResult res = SimplexSolver::minimize(cost, rows);
  if (!res.feasible || !res.bounded)
    throw Error(ErrorKind::SolverFailure, "hull LP did not solve");
  return res.objective <= tol;
}

struct PrecodingCheckReport {
  SymmetrizabilityCertificate original;    // certificate of the input AVC
  SymmetrizabilityCertificate constructed; // Q composed with T, for the composed AVC
  AVC composed;
};

/// [OP] precoding_preserves_symmetrizability_check: composes the AVC with a
/// pre-coder and exhibits the explicit certificate u'(s|a') =
/// sum_a q(s|a) t(a|a') for the composed family.
inline PrecodingCheckReport precoding_preserves_symmetrizability_check(const AVC& avc,
                                                                       const Channel& t) {
  SymVerdict v = is_symmetrizable(avc);
  if (!v.symmetrizable)
    throw Error(ErrorKind::PreconditionNotSymmetrizable,
                "input AVC is not symmetrizable; the lemma does not apply");
  AVC composed = compose_precoding(avc, t);
  Channel constructed_u = compose_precoding(v.certificate->u, t);
  double residual = verify_certificate(composed, constructed_u);
  return {*v.certificate, SymmetrizabilityCertificate{constructed_u, residual},
          std::move(composed)};
}

} // namespace avwc
