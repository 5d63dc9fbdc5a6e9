#pragma once

// Entropy, divergence and mutual-information primitives, the inner mixture
// optimizations B(p) = min_q I(p;W_q) and E(p) = max_q I(p;V_q), and the
// continuity / type-approximation bounds. Logarithms are base 2, 0 log 0 = 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "avwc/channel.hpp"
#include "avwc/error.hpp"
#include "avwc/optim.hpp"

namespace avwc {

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// Binary entropy h(x) in bits.
inline double binary_entropy(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return -xlog2x(x) - xlog2x(1.0 - x);
}

inline double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h -= xlog2x(v);
  return h;
}

/// [OP] entropy(p) in bits.
inline double entropy(const Distribution& p) { return entropy_of(p.mass); }

/// [OP] relative_entropy D(p||q); +inf exactly when supp(p) !<= supp(q).
inline double relative_entropy(const Distribution& p, const Distribution& q) {
  if (p.alphabet != q.alphabet)
    throw Error(ErrorKind::AlphabetMismatch, "relative_entropy alphabets differ");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.mass[i] > 0.0) {
      if (q.mass[i] <= 0.0) return std::numeric_limits<double>::infinity();
      d += p.mass[i] * std::log2(p.mass[i] / q.mass[i]);
    }
  }
  return std::max(0.0, d);
}

/// divergence of raw weight vectors (used on empirical types)
inline double relative_entropy_raw(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
      d += p[i] * std::log2(p[i] / q[i]);
    }
  }
  return std::max(0.0, d);
}

/// I(p;W) = H(Wp) - sum_a p(a) H(w(.|a)), clamped into [0, ...).
inline double mutual_information_raw(const std::vector<double>& p,
                                     const std::vector<std::vector<double>>& kernel) {
  const std::size_t nx = p.size();
  const std::size_t ny = kernel.empty() ? 0 : kernel[0].size();
  std::vector<double> out(ny, 0.0);
  double hcond = 0.0;
  for (std::size_t a = 0; a < nx; ++a) {
    if (p[a] == 0.0) continue;
    double hrow = 0.0;
    for (std::size_t b = 0; b < ny; ++b) {
      out[b] += p[a] * kernel[a][b];
      hrow -= xlog2x(kernel[a][b]);
    }
    hcond += p[a] * hrow;
  }
  double i = entropy_of(out) - hcond;
  if (i < -1e-12)
    throw Error(ErrorKind::ValidationError, "mutual information came out negative");
  return std::max(0.0, i);
}

/// [OP] mutual_information(p, w).
inline double mutual_information(const Distribution& p, const Channel& w) {
  if (p.alphabet != w.input)
    throw Error(ErrorKind::AlphabetMismatch, "mutual_information input mismatch");
  return mutual_information_raw(p.mass, w.kernel);
}

/// Mutual information of a joint probability table (rows: A, cols: B).
inline double mutual_information_joint(const std::vector<std::vector<double>>& joint) {
  const std::size_t na = joint.size();
  const std::size_t nb = na ? joint[0].size() : 0;
  std::vector<double> pa(na, 0.0), pb(nb, 0.0);
  double hj = 0.0;
  for (std::size_t a = 0; a < na; ++a)
    for (std::size_t b = 0; b < nb; ++b) {
      pa[a] += joint[a][b];
      pb[b] += joint[a][b];
      hj -= xlog2x(joint[a][b]);
    }
  double i = entropy_of(pa) + entropy_of(pb) - hj;
  return std::max(0.0, i);
}

/// [OP] empirical_mutual_information of two index sequences.
inline double empirical_mutual_information(const std::vector<std::size_t>& a_seq,
                                           const std::vector<std::size_t>& b_seq,
                                           std::size_t a_size, std::size_t b_size) {
  if (a_seq.size() != b_seq.size())
    throw Error(ErrorKind::LengthMismatch, "sequences have different lengths");
  if (a_seq.empty()) throw Error(ErrorKind::LengthMismatch, "sequences must be non-empty");
  std::vector<std::vector<double>> joint(a_size, std::vector<double>(b_size, 0.0));
  const double inv = 1.0 / double(a_seq.size());
  for (std::size_t i = 0; i < a_seq.size(); ++i) joint[a_seq[i]][b_seq[i]] += inv;
  return mutual_information_joint(joint);
}

/// [OP] entropy_continuity_bound: f1(delta) = |Z| h(delta/|Z|). Bounds the
/// conditional-entropy difference |H(w|p) - H(r|p)| when the p-averaged L1
/// distance of the kernels is at most delta.
inline double entropy_continuity_bound(double delta, std::size_t z_size) {
  if (delta < 0.0 || delta > 1.0)
    throw Error(ErrorKind::OutOfRange, "delta must lie in [0,1]");
  if (z_size == 0) throw Error(ErrorKind::OutOfRange, "alphabet size must be positive");
  return double(z_size) * binary_entropy(delta / double(z_size));
}

/// f1 extended to arguments above 1 by clamping; |H - H'| <= log|Z| <= f1(1)
/// always, so the clamped value is still a valid bound.
inline double entropy_continuity_bound_clamped(double delta, std::size_t z_size) {
  return entropy_continuity_bound(std::min(delta, 1.0), z_size);
}

namespace detail {

// gradient of q |-> I(p; W_q) (convex in q)
inline std::vector<double> mixture_mi_gradient(const std::vector<double>& p, const AVC& avc,
                                               const std::vector<double>& q) {
  const std::size_t ns = avc.state_count(), nx = avc.input.size(), ny = avc.output.size();
  std::vector<std::vector<double>> wq(nx, std::vector<double>(ny, 0.0));
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y) wq[x][y] += q[s] * avc.family[s].kernel[x][y];
  std::vector<double> out(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) out[y] += p[x] * wq[x][y];
  const double kLogFloor = -60.0; // saturate log of vanishing mass
  auto safe_log2 = [&](double v) { return v > 0.0 ? std::log2(v) : kLogFloor; };
  std::vector<double> g(ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    double acc = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      if (p[x] == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) {
        const double ws = avc.family[s].kernel[x][y];
        if (ws == 0.0) continue;
        acc += p[x] * ws * (safe_log2(wq[x][y]) - safe_log2(out[y]));
      }
    }
    g[s] = acc;
  }
  return g;
}

} // namespace detail

struct MixtureMiResult {
  double value = 0.0;
  Distribution q_star;
};

/// [OP] min_mixture_mi: B(p) = min_q I(p;W_q). Convex in q, solved by
/// projected gradient with multistart (vertices + barycenter + random).
inline MixtureMiResult min_mixture_mi(const Distribution& p, const AVC& avc,
                                      const OptimizerConfig& cfg = {}) {
  if (p.alphabet != avc.input)
    throw Error(ErrorKind::AlphabetMismatch, "min_mixture_mi input mismatch");
  const std::size_t ns = avc.state_count();
  if (ns == 1) {
    return {mutual_information_raw(p.mass, avc.family[0].kernel),
            Distribution(avc.states, {1.0})};
  }
  std::vector<std::vector<double>> mixed(avc.input.size(),
                                         std::vector<double>(avc.output.size(), 0.0));
  auto f = [&](const std::vector<double>& q) {
    for (std::size_t x = 0; x < mixed.size(); ++x) {
      auto& row = mixed[x];
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t s = 0; s < ns; ++s) {
        if (q[s] == 0.0) continue;
        const auto& src = avc.family[s].kernel[x];
        for (std::size_t y = 0; y < row.size(); ++y) row[y] += q[s] * src[y];
      }
    }
    return mutual_information_raw(p.mass, mixed);
  };
  auto grad = [&](const std::vector<double>& q) {
    return detail::mixture_mi_gradient(p.mass, avc, q);
  };

  // vertices are cheap to evaluate directly; descents start at the
  // barycenter and a few seeded random points (convexity makes any local
  // minimum global; the multistart guards numerical stalls)
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_q(ns, 1.0 / double(ns));
  for (std::size_t s = 0; s < ns; ++s) {
    double v = mutual_information_raw(p.mass, avc.family[s].kernel);
    if (v < best) {
      best = v;
      best_q.assign(ns, 0.0);
      best_q[s] = 1.0;
    }
  }
  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(ns, 1.0 / double(ns)));
  Rng rng(cfg.seed, 0x6d696e6d69ULL);
  const int extra = std::min(cfg.starts, 6);
  for (int i = 1; i < extra; ++i) starts.push_back(rng.next_simplex(ns));
  const int iters = std::min(cfg.max_iter, 600);
  for (auto& st : starts) {
    auto res = projected_gradient_simplex(f, grad, st, /*minimize=*/true, cfg.tol, iters);
    if (res.value < best - 1e-15 ||
        (std::abs(res.value - best) <= 1e-15 && lex_less(res.point, best_q))) {
      best = res.value;
      best_q = res.point;
    }
  }
  if (!std::isfinite(best))
    throw Error(ErrorKind::OptimizerDidNotConverge, "min_mixture_mi produced no finite value");
  return {std::max(0.0, best), Distribution(avc.states, best_q, 1e-6)};
}

struct MaxMixtureMiResult {
  double value = 0.0;
  std::size_t state_index = 0;
};

/// [OP] max_mixture_mi: E(p) = max_q I(p;V_q). The maximum of a convex
/// function over the simplex sits at a vertex; ties go to the lowest index.
inline MaxMixtureMiResult max_mixture_mi(const Distribution& p, const AVC& avc) {
  if (p.alphabet != avc.input)
    throw Error(ErrorKind::AlphabetMismatch, "max_mixture_mi input mismatch");
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t s = 0; s < avc.state_count(); ++s) {
    double v = mutual_information_raw(p.mass, avc.family[s].kernel);
    if (v > best + 1e-15) {
      best = v;
      arg = s;
    }
  }
  return {std::max(0.0, best), arg};
}

} // namespace avwc
