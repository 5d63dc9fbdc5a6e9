#pragma once

// Secrecy-rate machinery: the single-letter AVC capacity, the finite-r
// secrecy lower bounds C_r / r, the secret-key capacity formula, the
// uncorrelated-secrecy estimate, the super-activation classifier, the
// discontinuity probe and the capacity-vs-G curve.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "avwc/channel.hpp"
#include "avwc/error.hpp"
#include "avwc/info.hpp"
#include "avwc/optim.hpp"
#include "avwc/rng.hpp"
#include "avwc/symmetrizability.hpp"

namespace avwc {

enum class CapacityKind { AvcCapacity, SecrecyLowerBoundR, CKey, CSEstimate };

inline const char* capacity_kind_name(CapacityKind k) {
  switch (k) {
    case CapacityKind::AvcCapacity: return "avc_capacity";
    case CapacityKind::SecrecyLowerBoundR: return "secrecy_lower_bound_r";
    case CapacityKind::CKey: return "c_key";
    case CapacityKind::CSEstimate: return "c_s_estimate";
  }
  return "unknown";
}

struct CapacityReport {
  double value_bits = 0.0;
  CapacityKind kind = CapacityKind::AvcCapacity;
  int r = 1;
  Distribution p_star;
  std::optional<Channel> u_star;               // pre-coder, when searched
  std::optional<Distribution> q_star;          // worst-case mixture (legal side)
  std::optional<std::size_t> s_star;           // worst pure state sequence index (eve side)
  std::optional<bool> u_star_composed_symmetrizable; // recorded for returned U*
  bool certified = false;
};

namespace detail {

// gradient of p |-> I(p; W) for a fixed kernel (Danskin pieces)
inline std::vector<double> input_mi_gradient(const std::vector<double>& p,
                                             const std::vector<std::vector<double>>& kernel) {
  const std::size_t nx = p.size();
  const std::size_t ny = kernel.empty() ? 0 : kernel[0].size();
  std::vector<double> out(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) out[y] += p[x] * kernel[x][y];
  const double floor_log = -60.0;
  auto safe_log2 = [&](double v) { return v > 0.0 ? std::log2(v) : floor_log; };
  std::vector<double> g(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      if (kernel[x][y] == 0.0) continue;
      acc += kernel[x][y] * (safe_log2(kernel[x][y]) - safe_log2(out[y]));
    }
    g[x] = acc;
  }
  return g;
}

// B(p) over an AVC with Danskin subgradient through the minimizing mixture
inline double b_value(const Distribution& p, const AVC& avc, const OptimizerConfig& cfg,
                      Distribution* q_out = nullptr) {
  auto res = min_mixture_mi(p, avc, cfg);
  if (q_out) *q_out = res.q_star;
  return res.value;
}

} // namespace detail

/// [OP] avc_capacity: C = max_p min_q I(p; W_q). Concave in p; solved by a
/// dense line grid for binary inputs and multistart projected ascent above.
inline CapacityReport avc_capacity(const AVC& avc, const OptimizerConfig& cfg = {}) {
  const std::size_t nx = avc.input.size();
  OptimizerConfig inner = cfg;

  auto value_at = [&](const std::vector<double>& p) {
    return detail::b_value(Distribution(avc.input, p, 1e-6), avc, inner);
  };

  std::vector<double> best_p(nx, 1.0 / double(nx));
  double best = value_at(best_p);

  if (nx == 2) {
    const int grid = std::max(cfg.grid, 3);
    for (int i = 0; i < grid; ++i) {
      double a = double(i) / double(grid - 1);
      std::vector<double> p{a, 1.0 - a};
      double v = value_at(p);
      if (v > best + 1e-15) {
        best = v;
        best_p = p;
      }
    }
    // golden-section polish around the grid best (B is concave in p)
    double lo = std::max(0.0, best_p[0] - 1.0 / double(grid)),
           hi = std::min(1.0, best_p[0] + 1.0 / double(grid));
    const double gr = 0.6180339887498949;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = value_at({c, 1 - c}), fd = value_at({d, 1 - d});
    for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
      if (fc >= fd) {
        hi = d; d = c; fd = fc;
        c = hi - gr * (hi - lo);
        fc = value_at({c, 1 - c});
      } else {
        lo = c; c = d; fc = fd;
        d = lo + gr * (hi - lo);
        fd = value_at({d, 1 - d});
      }
    }
    double mid = 0.5 * (lo + hi), fm = value_at({mid, 1 - mid});
    if (fm > best) { best = fm; best_p = {mid, 1 - mid}; }
  } else {
    // multistart projected supergradient ascent
    auto grad = [&](const std::vector<double>& p) {
      Distribution pd(avc.input, p, 1e-6);
      auto res = min_mixture_mi(pd, avc, inner);
      Channel wq = mix_avc(avc, res.q_star);
      return detail::input_mi_gradient(p, wq.kernel);
    };
    std::vector<std::vector<double>> starts;
    starts.push_back(std::vector<double>(nx, 1.0 / double(nx)));
    Rng rng(cfg.seed, 0x61766363ULL);
    for (int i = 0; i < cfg.starts; ++i) starts.push_back(rng.next_simplex(nx));
    const int iters = std::min(cfg.max_iter, 300);
    for (auto& st : starts) {
      auto res = projected_gradient_simplex(value_at, grad, st, /*minimize=*/false, cfg.tol,
                                            iters);
      if (res.value > best + 1e-12 ||
          (std::abs(res.value - best) <= 1e-12 && lex_less(res.point, best_p))) {
        best = res.value;
        best_p = res.point;
      }
    }
  }

  CapacityReport rep;
  rep.kind = CapacityKind::AvcCapacity;
  rep.r = 1;
  rep.value_bits = std::max(0.0, best);
  rep.p_star = Distribution(avc.input, best_p, 1e-6);
  Distribution q_star;
  detail::b_value(rep.p_star, avc, inner, &q_star);
  rep.q_star = q_star;
  rep.certified = true; // exact up to grid/optimizer tolerance
  return rep;
}

/// [OP] lift_precoder: extend a pre-coder on r letters to r+1 letters by
/// acting as the identity on the extra (first) letter. The composed family
/// W^(x)(r+1) o (Id (x) U_r) keeps a non-symmetrizable factor intact.
inline Channel lift_precoder(const Channel& u_r, const Alphabet& letter) {
  if (u_r.input != u_r.output)
    throw Error(ErrorKind::AlphabetMismatch, "pre-coder must map X^r to X^r");
  return tensor_channel(Channel::identity(letter), u_r);
}

namespace detail {

struct SecrecyObjective {
  const AVC& legal;
  const AVC& eve;
  OptimizerConfig inner;

  double operator()(const std::vector<double>& p) const {
    Distribution pd(legal.input, p, 1e-6);
    double b = min_mixture_mi(pd, legal, inner).value;
    double e = max_mixture_mi(pd, eve).value;
    return b - e;
  }
  std::vector<double> grad(const std::vector<double>& p) const {
    Distribution pd(legal.input, p, 1e-6);
    auto bres = min_mixture_mi(pd, legal, inner);
    auto eres = max_mixture_mi(pd, eve);
    Channel wq = mix_avc(legal, bres.q_star);
    auto gb = input_mi_gradient(p, wq.kernel);
    auto ge = input_mi_gradient(p, eve.family[eres.state_index].kernel);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= ge[i];
    return gb;
  }
};

// maximize B(p) - E(p) over the input simplex for fixed effective links
inline std::pair<double, std::vector<double>> maximize_secrecy(const AVC& legal, const AVC& eve,
                                                               const OptimizerConfig& cfg) {
  SecrecyObjective obj{legal, eve, cfg};
  const std::size_t nx = legal.input.size();
  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(nx, 1.0 / double(nx)));
  if (nx == 2) {
    const int coarse = 33;
    double best_a = 0.5, best_v = -1e100;
    for (int i = 0; i < coarse; ++i) {
      double a = double(i) / double(coarse - 1);
      double v = obj({a, 1 - a});
      if (v > best_v) { best_v = v; best_a = a; }
    }
    starts.push_back({best_a, 1 - best_a});
  }
  Rng rng(cfg.seed, 0x736563ULL);
  for (int i = 0; i < cfg.starts; ++i) starts.push_back(rng.next_simplex(nx));

  double best = -1e100;
  std::vector<double> best_p(nx, 1.0 / double(nx));
  const int iters = std::min(cfg.max_iter, 300);
  for (auto& st : starts) {
    auto res = projected_gradient_simplex(
        [&](const std::vector<double>& p) { return obj(p); },
        [&](const std::vector<double>& p) { return obj.grad(p); }, st,
        /*minimize=*/false, cfg.tol, iters);
    if (res.value > best + 1e-12 ||
        (std::abs(res.value - best) <= 1e-12 && lex_less(res.point, best_p))) {
      best = res.value;
      best_p = res.point;
    }
  }
  return {best, best_p};
}

inline AVC repeat_tensor(const AVC& a, int r) {
  AVC out = a;
  for (int i = 1; i < r; ++i) out = tensor_avc(out, a);
  return out;
}

} // namespace detail

struct SecrecyRateOptions {
  bool search_precoders = true; // when false, only U = Id is evaluated
};

/// [OP] secrecy_rate_r: the normalized finite-r lower bound
///   C_r / r,  C_r = max_{p, U} [ min_q I(p; W_q o U) - max_{s^r} I(p; V_{s^r} o U) ],
/// with q ranging over mixtures of the r-fold product states and s^r over
/// pure product states. r in {1,2}; the result is clamped at the
/// time-sharing floor 0 and is a lower bound, never certified exact.
inline CapacityReport secrecy_rate_r(const AVWC& avwc, int r, const OptimizerConfig& cfg = {},
                                     const SecrecyRateOptions& opts = {}) {
  if (r != 1 && r != 2) throw Error(ErrorKind::UnsupportedR, "only r in {1,2} is supported");

  AVC legal_r = detail::repeat_tensor(avwc.legal, r);
  AVC eve_r = detail::repeat_tensor(avwc.eve, r);

  // candidate pre-coders: identity, (for r=2) the lifted r=1 optimum, randoms
  std::vector<Channel> candidates;
  candidates.push_back(Channel::identity(legal_r.input));
  if (opts.search_precoders) {
    if (r == 2) {
      OptimizerConfig sub = cfg;
      sub.starts = std::max(2, cfg.starts / 2);
      CapacityReport base = secrecy_rate_r(avwc, 1, sub, opts);
      if (base.u_star) {
        Channel lifted = lift_precoder(*base.u_star, avwc.legal.input);
        // product alphabets are rebuilt so labels line up with legal_r
        candidates.push_back(Channel(legal_r.input, legal_r.input, lifted.kernel, 1e-6));
      }
    }
    Rng rng(cfg.seed, 0x70726543ULL);
    const std::size_t nin = legal_r.input.size();
    for (int i = 0; i < cfg.starts; ++i) {
      std::vector<std::vector<double>> k(nin);
      for (auto& row : k) row = rng.next_simplex(nin);
      candidates.emplace_back(legal_r.input, legal_r.input, std::move(k), 1e-6);
    }
  }

  double best = -1e100;
  std::vector<double> best_p;
  std::size_t best_u = 0;
  for (std::size_t ui = 0; ui < candidates.size(); ++ui) {
    AVC legal_eff = compose_precoding(legal_r, candidates[ui]);
    AVC eve_eff = compose_precoding(eve_r, candidates[ui]);
    auto [v, p] = detail::maximize_secrecy(legal_eff, eve_eff, cfg);
    if (v > best + 1e-12) {
      best = v;
      best_p = p;
      best_u = ui;
    }
  }

  CapacityReport rep;
  rep.kind = CapacityKind::SecrecyLowerBoundR;
  rep.r = r;
  rep.value_bits = std::max(0.0, best) / double(r);
  rep.p_star = Distribution(legal_r.input, best_p, 1e-6);
  rep.u_star = candidates[best_u];
  AVC legal_eff = compose_precoding(legal_r, candidates[best_u]);
  AVC eve_eff = compose_precoding(eve_r, candidates[best_u]);
  rep.q_star = min_mixture_mi(rep.p_star, legal_eff, cfg).q_star;
  rep.s_star = max_mixture_mi(rep.p_star, eve_eff).state_index;
  rep.u_star_composed_symmetrizable = is_symmetrizable(legal_eff).symmetrizable;
  rep.certified = false;
  return rep;
}

/// [OP] c_key: min{ secrecy bound + G, avc capacity }. G = 0 is rejected
/// (the zero-randomness case is a different operational object).
inline CapacityReport c_key(const AVWC& avwc, double g_bits, int r = 1,
                            const OptimizerConfig& cfg = {}) {
  if (!(g_bits > 0.0)) throw Error(ErrorKind::NonpositiveG, "G must be positive");
  CapacityReport secrecy = secrecy_rate_r(avwc, r, cfg);
  CapacityReport plain = avc_capacity(avwc.legal, cfg);
  CapacityReport rep;
  rep.kind = CapacityKind::CKey;
  rep.r = r;
  if (secrecy.value_bits + g_bits <= plain.value_bits) {
    rep.value_bits = secrecy.value_bits + g_bits;
    rep.p_star = secrecy.p_star;
    rep.u_star = secrecy.u_star;
    rep.q_star = secrecy.q_star;
    rep.s_star = secrecy.s_star;
    rep.certified = false; // inherits lower-bound status
  } else {
    rep.value_bits = plain.value_bits;
    rep.p_star = plain.p_star;
    rep.q_star = plain.q_star;
    rep.certified = plain.certified;
  }
  return rep;
}

/// [OP] c_s_estimate: zero exactly when the legal link is symmetrizable,
/// otherwise the finite-r lower bound on the mean capacity.
inline CapacityReport c_s_estimate(const AVWC& avwc, int r = 1, const OptimizerConfig& cfg = {}) {
  SymVerdict v = is_symmetrizable(avwc.legal);
  if (v.symmetrizable) {
    CapacityReport rep;
    rep.kind = CapacityKind::CSEstimate;
    rep.r = r;
    rep.value_bits = 0.0;
    rep.p_star = Distribution::uniform(avwc.legal.input);
    rep.certified = true; // exact: symmetrizable legal link forces zero
    return rep;
  }
  CapacityReport rep = secrecy_rate_r(avwc, r, cfg);
  rep.kind = CapacityKind::CSEstimate;
  rep.certified = false;
  return rep;
}

enum class SuperActivationClass {
  Activated,
  ImpossibleSymmetrizableProduct,
  ImpossibleZeroMean,
  Inconclusive,
};

inline const char* super_activation_class_name(SuperActivationClass c) {
  switch (c) {
    case SuperActivationClass::Activated: return "activated";
    case SuperActivationClass::ImpossibleSymmetrizableProduct:
      return "impossible_symmetrizable_product";
    case SuperActivationClass::ImpossibleZeroMean: return "impossible_zero_mean";
    case SuperActivationClass::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct SuperActivationVerdict {
  SuperActivationClass cls = SuperActivationClass::Inconclusive;
  std::string reason;
  bool legal_a_symmetrizable = false;
  bool legal_b_symmetrizable = false;
  bool product_symmetrizable = false;
  double product_secrecy_bound = 0.0;
  double secrecy_bound_a = 0.0;
  double secrecy_bound_b = 0.0;
  CapacityReport product_report;
};

namespace detail {

// Exact zero-mean certificate: when the legal and eavesdropper families
// coincide state by state, every achievable secret rate is zero.
inline bool links_identical(const AVWC& c) {
  if (c.legal.output != c.eve.output) return false;
  for (std::size_t s = 0; s < c.legal.state_count(); ++s)
    if (channel_distance(c.legal.family[s], c.eve.family[s]) > 1e-12) return false;
  return true;
}

} // namespace detail

/// [OP] classify_super_activation. Activation requires a non-symmetrizable
/// product together with a certified-positive mean-capacity lower bound on
/// the product; a vanishing bound cannot certify a zero mean capacity at
/// finite r, which is what the `inconclusive` class records.
inline SuperActivationVerdict classify_super_activation(const AVWC& a, const AVWC& b, int r = 1,
                                                        const OptimizerConfig& cfg = {}) {
  SuperActivationVerdict verdict;
  SymVerdict sa = is_symmetrizable(a.legal);
  SymVerdict sb = is_symmetrizable(b.legal);
  verdict.legal_a_symmetrizable = sa.symmetrizable;
  verdict.legal_b_symmetrizable = sb.symmetrizable;

  // precondition: each factor must have zero uncorrelated secrecy evidence
  CapacityReport ca = c_s_estimate(a, r, cfg);
  CapacityReport cb = c_s_estimate(b, r, cfg);
  verdict.secrecy_bound_a = ca.value_bits;
  verdict.secrecy_bound_b = cb.value_bits;
  const bool a_zero = sa.symmetrizable || ca.value_bits <= 1e-9;
  const bool b_zero = sb.symmetrizable || cb.value_bits <= 1e-9;
  if (!a_zero || !b_zero) {
    verdict.cls = SuperActivationClass::Inconclusive;
    verdict.reason = "a factor shows a positive individual secrecy bound, so the pair "
                     "does not qualify for super-activation";
    return verdict;
  }

  AVWC product = product_avwc(a, b);
  SymVerdict sp = is_symmetrizable(product.legal);
  verdict.product_symmetrizable = sp.symmetrizable;
  if (sp.symmetrizable) {
    verdict.cls = SuperActivationClass::ImpossibleSymmetrizableProduct;
    verdict.reason = "the product legal link is symmetrizable";
    return verdict;
  }
  if (detail::links_identical(product)) {
    verdict.cls = SuperActivationClass::ImpossibleZeroMean;
    verdict.reason = "legal and eavesdropper links coincide on the product, forcing a zero "
                     "mean capacity";
    return verdict;
  }
  verdict.product_report = secrecy_rate_r(product, r, cfg);
  verdict.product_secrecy_bound = verdict.product_report.value_bits;
  if (verdict.product_secrecy_bound > 1e-9) {
    verdict.cls = SuperActivationClass::Activated;
    verdict.reason = "product is non-symmetrizable with a positive mean-capacity lower bound";
  } else {
    verdict.cls = SuperActivationClass::Inconclusive;
    verdict.reason = "a zero mean capacity cannot be certified at finite r";
  }
  return verdict;
}

struct DiscontinuityProbeReport {
  bool positivity_holds = false;     // condition (i): positive mean-capacity bound
  bool legal_symmetrizable = false;  // condition (ii)
  bool witness_found = false;        // condition (iii): a non-symmetrizable neighbor
  double witness_distance = 0.0;
  double witness_margin = 0.0;
  std::optional<AVC> witness;
  std::string summary;
};

/// [OP] discontinuity_probe: tests the three discontinuity conditions and
/// searches seeded random perturbations within Hausdorff distance eps for a
/// non-symmetrizable neighbor. Absence of a witness is reported as "not
/// found", never as nonexistence.
inline DiscontinuityProbeReport discontinuity_probe(const AVWC& avwc, double eps,
                                                    int samples, std::uint64_t seed,
                                                    const OptimizerConfig& cfg = {}) {
  if (!(eps > 0.0)) throw Error(ErrorKind::OutOfRange, "eps must be positive");
  DiscontinuityProbeReport rep;
  rep.positivity_holds = secrecy_rate_r(avwc, 1, cfg).value_bits > 1e-9;
  SymVerdict v = is_symmetrizable(avwc.legal);
  rep.legal_symmetrizable = v.symmetrizable;
  if (!v.symmetrizable) {
    rep.summary = "legal link is non-symmetrizable; the capacity is continuous around "
                  "its positivity points";
    return rep;
  }
  const std::size_t nx = avwc.legal.input.size(), ny = avwc.legal.output.size();
  for (int trial = 0; trial < samples; ++trial) {
    Rng rng(seed, 0x70726f62ULL + std::uint64_t(trial));
    std::vector<Channel> fam;
    for (const auto& ch : avwc.legal.family) {
      std::vector<std::vector<double>> k = ch.kernel;
      for (std::size_t x = 0; x < nx; ++x) {
        double sum = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
          k[x][y] = std::max(0.0, k[x][y] + 0.5 * eps * rng.next_gaussian() / double(ny));
          sum += k[x][y];
        }
        if (sum <= 0) { k[x].assign(ny, 1.0 / double(ny)); continue; }
        for (std::size_t y = 0; y < ny; ++y) k[x][y] /= sum;
      }
      fam.emplace_back(avwc.legal.input, avwc.legal.output, std::move(k), 1e-6);
    }
    AVC neighbor(avwc.legal.input, avwc.legal.output, avwc.legal.states, std::move(fam));
    double dist = hausdorff_distance(avwc.legal, neighbor);
    if (dist > eps) continue;
    SymVerdict nv = is_symmetrizable(neighbor);
    if (!nv.symmetrizable) {
      rep.witness_found = true;
      rep.witness_distance = dist;
      rep.witness_margin = nv.infeasibility_margin.value_or(0.0);
      rep.witness = neighbor;
      break;
    }
  }
  rep.summary = rep.witness_found
                    ? "non-symmetrizable neighbor found within eps"
                    : "no non-symmetrizable neighbor found (not a proof of nonexistence)";
  return rep;
}

struct CurvePoint {
  double g_bits;
  double c_key_bits;
};

/// [OP] capacity_curve: c_key on a uniform G-grid over [0, g_max]. The G=0
/// entry reports the G -> 0 limit, which is the finite-r secrecy bound.
inline std::vector<CurvePoint> capacity_curve(const AVWC& avwc, double g_max, int steps,
                                              int r = 1, const OptimizerConfig& cfg = {}) {
  if (!(g_max > 0.0)) throw Error(ErrorKind::OutOfRange, "g_max must be positive");
  if (steps < 2) throw Error(ErrorKind::OutOfRange, "steps must be at least 2");
  CapacityReport secrecy = secrecy_rate_r(avwc, r, cfg);
  CapacityReport plain = avc_capacity(avwc.legal, cfg);
  std::vector<CurvePoint> out;
  out.reserve(std::size_t(steps));
  for (int i = 0; i < steps; ++i) {
    double g = g_max * double(i) / double(steps - 1);
    double v = g == 0.0 ? std::min(secrecy.value_bits, plain.value_bits)
                        : std::min(secrecy.value_bits + g, plain.value_bits);
    out.push_back({g, v});
  }
  return out;
}

} // namespace avwc
