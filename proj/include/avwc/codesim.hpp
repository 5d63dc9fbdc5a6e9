#pragma once

// Small-blocklength constructive machinery: relative-entropy typical sets,
// random codebooks indexed (k,l,gamma), typicality decoding sets, exhaustive
// worst-case evaluation over state sequences, the Theta function, the
// counting events E1..E5, the Chernoff-Hoeffding tail and Ahlswede's
// robustification identity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avwc/channel.hpp"
#include "avwc/error.hpp"
#include "avwc/info.hpp"
#include "avwc/rng.hpp"
#include "avwc/types.hpp"

namespace avwc {

inline constexpr double kStateEnumGuard = 1e6;  // |S|^n
inline constexpr double kOutputEnumGuard = 1e7; // |Y|^n, |Z|^n
inline constexpr double kTypeClassGuard = 1e5;  // |T_p| for exact expectations

/// Enumeration guard, overridable through AVWC_MAX_ENUM.
inline double enum_guard(double default_guard) {
  if (const char* env = std::getenv("AVWC_MAX_ENUM")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return default_guard;
}

inline double pow_count(std::size_t base, std::size_t n) {
  return std::pow(double(base), double(n));
}

/// [OP] is_typical: D(joint empirical type || reference) <= delta. The
/// reference is a joint law over the product of the per-sequence alphabets;
/// an infinite divergence (a zero-reference transition observed) is false.
inline bool is_typical(const std::vector<Sequence>& seqs,
                       const std::vector<std::size_t>& alphabet_sizes,
                       const std::vector<double>& reference, double delta) {
  if (seqs.empty() || seqs.size() != alphabet_sizes.size())
    throw Error(ErrorKind::LengthMismatch, "sequence/alphabet tuple mismatch");
  const std::size_t n = seqs[0].size();
  for (const auto& s : seqs)
    if (s.size() != n) throw Error(ErrorKind::LengthMismatch, "sequences have unequal lengths");
  if (n == 0) throw Error(ErrorKind::LengthMismatch, "empty sequences");
  std::size_t cells = 1;
  for (auto a : alphabet_sizes) cells *= a;
  if (reference.size() != cells)
    throw Error(ErrorKind::DimensionMismatch, "reference size mismatch");
  std::vector<double> counts(cells, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cell = 0;
    for (std::size_t j = 0; j < seqs.size(); ++j) cell = cell * alphabet_sizes[j] + seqs[j][i];
    counts[cell] += 1.0 / double(n);
  }
  const double d = relative_entropy_raw(counts, reference);
  return d <= delta;
}

/// Bound functions used in the exponential estimates. f2 and f3 are derived
/// from f1 evaluated on the joint alphabet S x X x Z.
struct BoundParameters {
  double tau;
  double delta;
  double nu;

  explicit BoundParameters(double tau_, std::optional<double> delta_ = std::nullopt,
                           std::optional<double> nu_ = std::nullopt)
      : tau(tau_), delta(delta_.value_or(tau_)), nu(nu_.value_or(tau_ / 5.0)) {
    if (tau <= 0) throw Error(ErrorKind::OutOfRange, "tau must be positive");
  }

  double f1(std::size_t joint_alphabet_size) const {
    return entropy_continuity_bound_clamped(std::sqrt(2.0 * delta), joint_alphabet_size);
  }
  double f2(std::size_t joint_alphabet_size) const {
    return 2.0 * f1(joint_alphabet_size) + delta;
  }
  double f3(std::size_t joint_alphabet_size) const {
    return 4.0 * (delta + f1(joint_alphabet_size));
  }
  double f(std::size_t joint_alphabet_size) const {
    return f2(joint_alphabet_size) + f3(joint_alphabet_size);
  }
};

/// K x L x Gamma codewords drawn uniformly i.i.d. from the type class T_p.
struct CodeBook {
  std::size_t n = 0;
  std::size_t K = 0, L = 0, Gamma = 0;
  EmpiricalType p;
  Alphabet x_alphabet;
  std::vector<Sequence> codewords; // index ((k*L)+l)*Gamma + gamma
  std::uint64_t seed = 0;

  const Sequence& word(std::size_t k, std::size_t l, std::size_t g) const {
    return codewords[(k * L + l) * Gamma + g];
  }
};

/// [OP] build_codebook: the draw for index (k,l,gamma) depends only on the
/// seed and the index, so generation order is irrelevant.
inline CodeBook build_codebook(std::size_t n, std::size_t K, std::size_t L, std::size_t Gamma,
                               const EmpiricalType& p, std::uint64_t seed) {
  if (K * L * Gamma < 1) throw Error(ErrorKind::OutOfRange, "need at least one index");
  if (p.n != n) throw Error(ErrorKind::InconsistentCounts, "type denominator differs from n");
  Sequence base;
  for (std::size_t sym = 0; sym < p.counts.size(); ++sym)
    for (std::uint64_t c = 0; c < p.counts[sym]; ++c) base.push_back(sym);
  if (base.empty()) throw Error(ErrorKind::EmptyTypeClass, "type class is empty");
  CodeBook cb;
  cb.n = n;
  cb.K = K;
  cb.L = L;
  cb.Gamma = Gamma;
  cb.p = p;
  cb.x_alphabet = p.alphabet;
  cb.seed = seed;
  cb.codewords.resize(K * L * Gamma);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t g = 0; g < Gamma; ++g) {
        Sequence word = base;
        Rng rng = indexed_rng(seed, k, l, g);
        rng.shuffle(word); // uniform over the multiset arrangements of T_p
        cb.codewords[(k * L + l) * Gamma + g] = std::move(word);
      }
  return cb;
}

/// Fixed-size bitset over output-sequence codes.
struct SeqSet {
  std::vector<std::uint64_t> words;
  std::size_t size = 0;

  explicit SeqSet(std::size_t n = 0) : words((n + 63) / 64, 0), size(n) {}
  void set(std::size_t i) { words[i >> 6] |= (1ULL << (i & 63)); }
  bool test(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1ULL; }
  void subtract(const SeqSet& o) {
    for (std::size_t w = 0; w < words.size(); ++w) words[w] &= ~o.words[w];
  }
  bool intersects(const SeqSet& o) const {
    for (std::size_t w = 0; w < words.size(); ++w)
      if (words[w] & o.words[w]) return true;
    return false;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words) c += std::size_t(__builtin_popcountll(w));
    return c;
  }
};

/// Per-gamma disjoint decoding sets over Y^n codes.
struct DecodingSets {
  std::size_t n = 0;
  std::size_t y_size = 0;
  std::size_t K = 0, L = 0, Gamma = 0;
  double delta = 0.0;
  std::vector<std::vector<SeqSet>> per_gamma; // [gamma][k*L+l]
};

namespace detail {

inline std::size_t seq_code(const Sequence& s, std::size_t base) {
  std::size_t code = 0;
  for (auto v : s) code = code * base + v;
  return code;
}

inline Sequence decode_seq(std::size_t code, std::size_t base, std::size_t n) {
  Sequence s(n);
  for (std::size_t i = n; i-- > 0;) {
    s[i] = code % base;
    code /= base;
  }
  return s;
}

// D(empirical joint of (x_seq, y-code) || Nbar(x) * w_xi(y|x)) <= delta?
// Counts are gathered per (x,y) cell; any observed zero-reference cell
// makes the divergence infinite.
inline bool pair_typical(const Sequence& x_seq, const Sequence& y_seq,
                         const std::vector<double>& ref_xy, std::size_t ny, double delta) {
  const std::size_t n = x_seq.size();
  std::vector<double> counts(ref_xy.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) counts[x_seq[i] * ny + y_seq[i]] += 1.0 / double(n);
  return relative_entropy_raw(counts, ref_xy) <= delta;
}

// product probability prod_i fam[s_i](y_i | x_i)
inline double seq_prob(const AVC& avc, const Sequence& s_seq, const Sequence& x_seq,
                       const Sequence& y_seq) {
  double p = 1.0;
  for (std::size_t i = 0; i < x_seq.size(); ++i) {
    p *= avc.family[s_seq[i]].kernel[x_seq[i]][y_seq[i]];
    if (p == 0.0) return 0.0;
  }
  return p;
}

// full product distribution over Y^n codes for fixed (s_seq, x_seq)
inline std::vector<double> product_dist(const AVC& avc, const Sequence& s_seq,
                                        const Sequence& x_seq) {
  const std::size_t ny = avc.output.size();
  std::vector<double> dist{1.0};
  for (std::size_t i = 0; i < x_seq.size(); ++i) {
    std::vector<double> next(dist.size() * ny);
    const auto& row = avc.family[s_seq[i]].kernel[x_seq[i]];
    for (std::size_t c = 0; c < dist.size(); ++c)
      for (std::size_t y = 0; y < ny; ++y) next[c * ny + y] = dist[c] * row[y];
    dist = std::move(next);
  }
  return dist;
}

} // namespace detail

/// Union over state types xi of the relative-entropy typical sets
/// T_{W_xi,delta}(x^n); the "optimistic" decoding region of one codeword.
inline SeqSet optimistic_decoding_set(const Sequence& x_seq, const AVC& avc, double delta) {
  const std::size_t n = x_seq.size();
  const std::size_t ny = avc.output.size();
  const double total = pow_count(ny, n);
  if (total > enum_guard(kOutputEnumGuard))
    throw Error(ErrorKind::BlocklengthTooLarge, "|Y|^n exceeds the enumeration guard");
  const std::size_t ycount = std::size_t(total);
  const std::size_t nx = avc.input.size();

  EmpiricalType xt = EmpiricalType::of_sequence(avc.input, x_seq);
  auto state_types = enumerate_types(n, avc.states);
  // reference tables Nbar(x) * w_xi(y|x) per state type
  std::vector<std::vector<double>> refs;
  refs.reserve(state_types.size());
  for (const auto& xi : state_types) {
    Channel w_xi = mix_avc(avc, xi.distribution());
    std::vector<double> ref(nx * ny, 0.0);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t y = 0; y < ny; ++y)
        ref[x * ny + y] = (double(xt.counts[x]) / double(n)) * w_xi.kernel[x][y];
    refs.push_back(std::move(ref));
  }

  SeqSet set(ycount);
  Sequence y_seq(n, 0);
  for (std::size_t code = 0; code < ycount; ++code) {
    y_seq = detail::decode_seq(code, ny, n);
    for (const auto& ref : refs) {
      if (detail::pair_typical(x_seq, y_seq, ref, ny, delta)) {
        set.set(code);
        break;
      }
    }
  }
  return set;
}

/// [OP] build_decoding_sets: optimistic regions intersected with the
/// complements of every other codeword's region (same gamma), which makes
/// the sets disjoint over (k,l) pairs by construction.
inline DecodingSets build_decoding_sets(const CodeBook& cb, const AVWC& avwc, double delta) {
  if (avwc.legal.input != cb.x_alphabet)
    throw Error(ErrorKind::AlphabetMismatch, "codebook alphabet differs from channel input");
  DecodingSets ds;
  ds.n = cb.n;
  ds.y_size = avwc.legal.output.size();
  ds.K = cb.K;
  ds.L = cb.L;
  ds.Gamma = cb.Gamma;
  ds.delta = delta;
  ds.per_gamma.resize(cb.Gamma);
  for (std::size_t g = 0; g < cb.Gamma; ++g) {
    std::vector<SeqSet> optimistic;
    optimistic.reserve(cb.K * cb.L);
    for (std::size_t k = 0; k < cb.K; ++k)
      for (std::size_t l = 0; l < cb.L; ++l)
        optimistic.push_back(optimistic_decoding_set(cb.word(k, l, g), avwc.legal, delta));
    std::vector<SeqSet> realistic = optimistic;
    for (std::size_t i = 0; i < realistic.size(); ++i)
      for (std::size_t j = 0; j < optimistic.size(); ++j)
        if (i != j) realistic[i].subtract(optimistic[j]);
    ds.per_gamma[g] = std::move(realistic);
  }
  return ds;
}

struct EventStats {
  bool pass = true;
  double worst_margin = 0.0; // most adverse slack observed (sign convention per event)
  std::uint64_t count = 0;   // count backing the event
  std::string witness;
};

struct EventReport {
  EventStats e1, e2, e3, e4, e5;
  bool all() const { return e1.pass && e2.pass && e3.pass && e4.pass && e5.pass; }
};

struct SimReport {
  double worst_error = 0.0;
  Sequence worst_error_state;
  double leakage = 0.0;
  Sequence leakage_state;
  bool leakage_exact = true; // false when the reference mean used Monte Carlo
  std::optional<EventReport> events;
};

namespace detail {

inline void check_state_guard(const AVC& avc, std::size_t n) {
  if (pow_count(avc.state_count(), n) > enum_guard(kStateEnumGuard))
    throw Error(ErrorKind::BlocklengthTooLarge, "|S|^n exceeds the enumeration guard");
}

inline void check_output_guard(const AVC& avc, std::size_t n) {
  if (pow_count(avc.output.size(), n) > enum_guard(kOutputEnumGuard))
    throw Error(ErrorKind::BlocklengthTooLarge, "output alphabet power exceeds the guard");
}

} // namespace detail

/// [OP] evaluate_code: exhaustive worst-case error over all state sequences
/// plus the leakage term max_{s^n,k} || avg_{l,gamma} v(.|x_{klg}) - E v ||_1.
inline SimReport evaluate_code(const CodeBook& cb, const DecodingSets& ds, const AVWC& avwc) {
  detail::check_state_guard(avwc.legal, cb.n);
  detail::check_output_guard(avwc.legal, cb.n);
  detail::check_output_guard(avwc.eve, cb.n);

  SimReport rep;
  const std::size_t ns = avwc.legal.state_count();
  const std::size_t state_count = std::size_t(pow_count(ns, cb.n));
  const double inv_klg = 1.0 / double(cb.K * cb.L * cb.Gamma);
  const std::size_t nz = avwc.eve.output.size();
  const std::size_t zcount = std::size_t(pow_count(nz, cb.n));

  // ensemble for the reference mean, shared across state sequences
  const bool exact_mean = double(type_class_size(cb.p)) <= enum_guard(kTypeClassGuard);
  std::vector<Sequence> ensemble;
  if (exact_mean) {
    ensemble = type_class_sequences(cb.p);
  } else {
    Sequence base;
    for (std::size_t sym = 0; sym < cb.p.counts.size(); ++sym)
      for (std::uint64_t c = 0; c < cb.p.counts[sym]; ++c) base.push_back(sym);
    for (std::size_t i = 0; i < 10000; ++i) {
      Sequence x = base;
      Rng rng = indexed_rng(cb.seed ^ 0x45564dULL, i);
      rng.shuffle(x);
      ensemble.push_back(std::move(x));
    }
    rep.leakage_exact = false;
  }

  rep.worst_error = -1.0;
  rep.leakage = -1.0;
  for (std::size_t scode = 0; scode < state_count; ++scode) {
    Sequence s_seq = detail::decode_seq(scode, ns, cb.n);

    // success probability under this state sequence
    double success = 0.0;
    for (std::size_t g = 0; g < cb.Gamma; ++g)
      for (std::size_t k = 0; k < cb.K; ++k)
        for (std::size_t l = 0; l < cb.L; ++l) {
          auto dist = detail::product_dist(avwc.legal, s_seq, cb.word(k, l, g));
          const SeqSet& dset = ds.per_gamma[g][k * cb.L + l];
          double mass = 0.0;
          for (std::size_t c = 0; c < dist.size(); ++c)
            if (dset.test(c)) mass += dist[c];
          success += mass;
        }
    double err = 1.0 - inv_klg * success;
    if (err > rep.worst_error + 1e-15) {
      rep.worst_error = err;
      rep.worst_error_state = s_seq;
    }

    // leakage
    std::vector<double> mean(zcount, 0.0);
    for (const auto& x : ensemble) {
      auto dist = detail::product_dist(avwc.eve, s_seq, x);
      for (std::size_t c = 0; c < zcount; ++c) mean[c] += dist[c];
    }
    for (auto& v : mean) v /= double(ensemble.size());
    const double inv_lg = 1.0 / double(cb.L * cb.Gamma);
    for (std::size_t k = 0; k < cb.K; ++k) {
      std::vector<double> avg(zcount, 0.0);
      for (std::size_t l = 0; l < cb.L; ++l)
        for (std::size_t g = 0; g < cb.Gamma; ++g) {
          auto dist = detail::product_dist(avwc.eve, s_seq, cb.word(k, l, g));
          for (std::size_t c = 0; c < zcount; ++c) avg[c] += inv_lg * dist[c];
        }
      double l1 = 0.0;
      for (std::size_t c = 0; c < zcount; ++c) l1 += std::abs(avg[c] - mean[c]);
      if (l1 > rep.leakage + 1e-15) {
        rep.leakage = l1;
        rep.leakage_state = s_seq;
      }
    }
  }
  rep.worst_error = std::max(0.0, rep.worst_error);
  rep.leakage = std::max(0.0, rep.leakage);
  return rep;
}

/// [OP] theta_value: Theta_{s^n,z^n}(x^n) = v^(x)n(z^n|s^n,x^n) gated by the
/// joint typicality set M(s^n,z^n); checked against the upper bound
/// b = 2^{-n(H(Z|X,S) - f2(delta))}.
inline double theta_value(const Sequence& s_seq, const Sequence& z_seq, const Sequence& x_seq,
                          const AVWC& avwc, const EmpiricalType& p, const Distribution& q,
                          double delta) {
  const std::size_t n = s_seq.size();
  if (z_seq.size() != n || x_seq.size() != n)
    throw Error(ErrorKind::LengthMismatch, "sequences have different lengths");
  // q must be the type of s_seq
  EmpiricalType st = EmpiricalType::of_sequence(avwc.legal.states, s_seq);
  for (std::size_t s = 0; s < q.size(); ++s)
    if (std::abs(q.mass[s] - double(st.counts[s]) / double(n)) > 1e-12)
      throw Error(ErrorKind::InconsistentCounts, "q is not the type of the state sequence");

  const std::size_t ns = avwc.legal.state_count();
  const std::size_t nx = avwc.legal.input.size();
  const std::size_t nz = avwc.eve.output.size();
  std::vector<double> p_sxz(ns * nx * nz, 0.0);
  double h_z_given_xs = 0.0;
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t x = 0; x < nx; ++x) {
      const double w = q.mass[s] * double(p.counts[x]) / double(p.n);
      double hrow = 0.0;
      for (std::size_t z = 0; z < nz; ++z) {
        p_sxz[(s * nx + x) * nz + z] = w * avwc.eve.w(z, x, s);
        hrow -= xlog2x(avwc.eve.w(z, x, s));
      }
      h_z_given_xs += w * hrow;
    }

  // gate: x^n in T_p and joint type within delta of p_SXZ
  bool gated = true;
  EmpiricalType xt = EmpiricalType::of_sequence(avwc.legal.input, x_seq);
  if (xt.counts != p.counts) gated = false;
  if (gated) {
    std::vector<double> counts(ns * nx * nz, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      counts[(s_seq[i] * nx + x_seq[i]) * nz + z_seq[i]] += 1.0 / double(n);
    gated = relative_entropy_raw(counts, p_sxz) <= delta;
  }
  double value = 0.0;
  if (gated) value = detail::seq_prob(avwc.eve, s_seq, x_seq, z_seq);

  BoundParameters bp(std::max(delta, 1e-12), delta);
  const double b =
      std::exp2(-double(n) * (h_z_given_xs - bp.f2(ns * nx * nz)));
  if (value > b * (1.0 + 1e-9))
    throw Error(ErrorKind::ValidationError, "Theta exceeded its exponential bound");
  return value;
}

/// [OP] chernoff_tail: 2 * 2^(-L eps^2 nu / (3 b)).
inline double chernoff_tail(double b, double nu, double eps, std::uint64_t L_count) {
  if (!(eps > 0.0 && eps < 0.5)) throw Error(ErrorKind::OutOfRange, "eps must lie in (0, 1/2)");
  if (!(b > 0.0)) throw Error(ErrorKind::OutOfRange, "b must be positive");
  if (nu < 0.0 || nu > b) throw Error(ErrorKind::OutOfRange, "nu must lie in [0, b]");
  return 2.0 * std::exp2(-double(L_count) * eps * eps * nu / (3.0 * b));
}

/// [OP] check_events: the five codeword-ensemble events, evaluated
/// exhaustively at desk scale. R := log2(K L)/n.
inline EventReport check_events(const CodeBook& cb, const AVWC& avwc,
                                const BoundParameters& params) {
  detail::check_state_guard(avwc.legal, cb.n);
  detail::check_output_guard(avwc.eve, cb.n);
  const std::size_t n = cb.n;
  const std::size_t ns = avwc.legal.state_count();
  const std::size_t nx = avwc.legal.input.size();
  const std::size_t nz = avwc.eve.output.size();
  const std::size_t state_count = std::size_t(pow_count(ns, n));
  const std::size_t zcount = std::size_t(pow_count(nz, n));
  if (pow_count(nx, n) > enum_guard(kStateEnumGuard))
    throw Error(ErrorKind::BlocklengthTooLarge, "|X|^n exceeds the enumeration guard");
  const std::size_t xcount = std::size_t(pow_count(nx, n));
  const double R = std::log2(double(cb.K * cb.L)) / double(n);
  const double tau = params.tau, delta = params.delta;

  EventReport rep;

  // ---- E1: ensemble averages of Theta against the exact expectation ----
  {
    auto members = type_class_sequences(cb.p);
    const double eps1 = std::exp2(-double(n) * tau / 4.0);
    double worst_rel = 0.0;
    std::uint64_t violations = 0;
    std::string witness;
    for (std::size_t scode = 0; scode < state_count; ++scode) {
      Sequence s_seq = detail::decode_seq(scode, ns, n);
      EmpiricalType st = EmpiricalType::of_sequence(avwc.legal.states, s_seq);
      // reference p_SXZ for this state type
      std::vector<double> p_sxz(ns * nx * nz, 0.0);
      for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t x = 0; x < nx; ++x) {
          const double w =
              (double(st.counts[s]) / double(n)) * (double(cb.p.counts[x]) / double(cb.p.n));
          for (std::size_t z = 0; z < nz; ++z)
            p_sxz[(s * nx + x) * nz + z] = w * avwc.eve.w(z, x, s);
        }
      auto theta_of = [&](const Sequence& x_seq, const Sequence& z_seq) {
        std::vector<double> counts(ns * nx * nz, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          counts[(s_seq[i] * nx + x_seq[i]) * nz + z_seq[i]] += 1.0 / double(n);
        if (relative_entropy_raw(counts, p_sxz) > delta) return 0.0;
        return detail::seq_prob(avwc.eve, s_seq, x_seq, z_seq);
      };
      for (std::size_t zcode = 0; zcode < zcount; ++zcode) {
        Sequence z_seq = detail::decode_seq(zcode, nz, n);
        double expectation = 0.0;
        for (const auto& x : members) expectation += theta_of(x, z_seq);
        expectation /= double(members.size());
        const double lo = (1.0 - eps1) * expectation, hi = (1.0 + eps1) * expectation;
        for (std::size_t k = 0; k < cb.K; ++k) {
          double avg = 0.0;
          for (std::size_t l = 0; l < cb.L; ++l)
            for (std::size_t g = 0; g < cb.Gamma; ++g) avg += theta_of(cb.word(k, l, g), z_seq);
          avg /= double(cb.L * cb.Gamma);
          if (avg < lo - 1e-15 || avg > hi + 1e-15) {
            ++violations;
            double rel = expectation > 0 ? std::abs(avg - expectation) / expectation : 1.0;
            if (rel > worst_rel) {
              worst_rel = rel;
              witness = "s=" + std::to_string(scode) + " z=" + std::to_string(zcode) +
                        " k=" + std::to_string(k);
            }
          }
        }
      }
    }
    rep.e1.pass = violations == 0;
    rep.e1.count = violations;
    rep.e1.worst_margin = worst_rel;
    rep.e1.witness = witness;
  }

  // ---- E2: average success of the typicality decoder ----
  {
    detail::check_output_guard(avwc.legal, n);
    DecodingSets ds = build_decoding_sets(cb, avwc, delta);
    double worst = 2.0;
    std::string witness;
    for (std::size_t scode = 0; scode < state_count; ++scode) {
      Sequence s_seq = detail::decode_seq(scode, ns, n);
      double avg = 0.0;
      for (std::size_t g = 0; g < cb.Gamma; ++g) {
        double d = 0.0;
        for (std::size_t k = 0; k < cb.K; ++k)
          for (std::size_t l = 0; l < cb.L; ++l) {
            auto dist = detail::product_dist(avwc.legal, s_seq, cb.word(k, l, g));
            const SeqSet& dset = ds.per_gamma[g][k * cb.L + l];
            for (std::size_t c = 0; c < dist.size(); ++c)
              if (dset.test(c)) d += dist[c];
          }
        avg += d / double(cb.K * cb.L);
      }
      avg /= double(cb.Gamma);
      if (avg < worst) {
        worst = avg;
        witness = "s=" + std::to_string(scode);
      }
    }
    const double threshold = 1.0 - 2.0 * std::exp2(-double(n) * delta / 4.0);
    rep.e2.pass = worst >= threshold - 1e-15;
    rep.e2.worst_margin = worst - threshold;
    rep.e2.count = std::uint64_t(state_count);
    rep.e2.witness = witness;
  }

  // ---- E3/E4/E5: the counting conditions ----
  {
    // per-(gamma, s^n) empirical MI of each codeword with s^n
    const double bound4 = double(cb.K * cb.L) * std::exp2(-double(n) * tau);
    const double bound5 = double(cb.K * cb.L) * std::exp2(-double(n) * tau / 2.0);
    std::uint64_t worst3 = 0, worst4 = 0, worst5 = 0;
    double excess3 = 0.0;
    std::string wit3, wit4, wit5;
    bool pass3 = true;

    for (std::size_t g = 0; g < cb.Gamma; ++g) {
      for (std::size_t scode = 0; scode < state_count; ++scode) {
        Sequence s_seq = detail::decode_seq(scode, ns, n);
        // E4
        std::uint64_t count4 = 0;
        std::vector<double> mi_with_s(cb.K * cb.L, 0.0);
        for (std::size_t k = 0; k < cb.K; ++k)
          for (std::size_t l = 0; l < cb.L; ++l) {
            double mi = empirical_mutual_information(cb.word(k, l, g), s_seq, nx, ns);
            mi_with_s[k * cb.L + l] = mi;
            if (mi >= tau) ++count4;
          }
        if (count4 > worst4) {
          worst4 = count4;
          wit4 = "gamma=" + std::to_string(g) + " s=" + std::to_string(scode);
        }

        // E5: pack the pair (other codeword, state) letters into one symbol
        std::uint64_t count5 = 0;
        for (std::size_t k = 0; k < cb.K; ++k)
          for (std::size_t l = 0; l < cb.L; ++l) {
            const Sequence& self = cb.word(k, l, g);
            const double slack = std::abs(std::max(R - mi_with_s[k * cb.L + l], 0.0));
            bool violating = false;
            for (std::size_t k2 = 0; k2 < cb.K && !violating; ++k2)
              for (std::size_t l2 = 0; l2 < cb.L && !violating; ++l2)
                for (std::size_t g2 = 0; g2 < cb.Gamma && !violating; ++g2) {
                  if (k2 == k && l2 == l && g2 == g) continue;
                  const Sequence& other = cb.word(k2, l2, g2);
                  Sequence packed(n);
                  for (std::size_t i = 0; i < n; ++i)
                    packed[i] = other[i] * ns + s_seq[i];
                  double mi = empirical_mutual_information(self, packed, nx, nx * ns);
                  if (mi - slack > tau) violating = true;
                }
            if (violating) ++count5;
          }
        if (count5 > worst5) {
          worst5 = count5;
          wit5 = "gamma=" + std::to_string(g) + " s=" + std::to_string(scode);
        }

        // E3: bucket codewords by their joint type with (x^n, s^n)
        for (std::size_t xcode = 0; xcode < xcount; ++xcode) {
          Sequence x_seq = detail::decode_seq(xcode, nx, n);
          Sequence packed(n);
          for (std::size_t i = 0; i < n; ++i) packed[i] = x_seq[i] * ns + s_seq[i];
          // joint type key and MI per codeword
          std::map<std::vector<std::uint64_t>, std::pair<std::uint64_t, double>> buckets;
          for (std::size_t k = 0; k < cb.K; ++k)
            for (std::size_t l = 0; l < cb.L; ++l) {
              const Sequence& cw = cb.word(k, l, g);
              std::vector<std::uint64_t> key(nx * nx * ns, 0);
              for (std::size_t i = 0; i < n; ++i) key[cw[i] * nx * ns + packed[i]]++;
              auto it = buckets.find(key);
              if (it == buckets.end()) {
                double mi = empirical_mutual_information(cw, packed, nx, nx * ns);
                buckets.emplace(std::move(key), std::make_pair(std::uint64_t(1), mi));
              } else {
                it->second.first++;
              }
            }
          for (const auto& [key, entry] : buckets) {
            const auto [cnt, mi] = entry;
            const double cap = std::exp2(double(n) * (std::max(R - mi, 0.0) + tau));
            if (double(cnt) > cap * (1.0 + 1e-12)) {
              pass3 = false;
              double ex = double(cnt) / cap;
              if (ex > excess3) {
                excess3 = ex;
                worst3 = cnt;
                wit3 = "gamma=" + std::to_string(g) + " s=" + std::to_string(scode) +
                       " x=" + std::to_string(xcode);
              }
            }
          }
        }
      }
    }
    rep.e3.pass = pass3;
    rep.e3.count = worst3;
    rep.e3.worst_margin = excess3;
    rep.e3.witness = wit3;
    rep.e4.pass = double(worst4) <= bound4 + 1e-12;
    rep.e4.count = worst4;
    rep.e4.worst_margin = double(worst4) - bound4;
    rep.e4.witness = wit4;
    rep.e5.pass = double(worst5) <= bound5 + 1e-12;
    rep.e5.count = worst5;
    rep.e5.worst_margin = double(worst5) - bound5;
    rep.e5.witness = wit5;
  }

  return rep;
}

struct RobustificationReport {
  bool conclusion_holds = true;
  double bound = 0.0;          // 1 - 3 (n+1)^{|S|} eps
  double tightest_average = 1.0;
  EmpiricalType tightest_orbit;
};

/// [OP] robustification_check: verifies the i.i.d. hypothesis for every
/// state type, then the permutation-average conclusion orbit by orbit.
inline RobustificationReport robustification_check(const std::vector<double>& f_table,
                                                   std::size_t n, const Alphabet& states,
                                                   double eps) {
  const std::size_t ns = states.size();
  const std::size_t scount = std::size_t(pow_count(ns, n));
  if (f_table.size() != scount)
    throw Error(ErrorKind::DimensionMismatch, "f table must cover all state sequences");
  for (double v : f_table)
    if (v < 0.0 || v > 1.0) throw Error(ErrorKind::OutOfRange, "f values must lie in [0,1]");

  auto types = enumerate_types(n, states);
  // hypothesis: sum_s f(s^n) q^(x)n(s^n) >= 1 - eps for every type q
  for (const auto& q : types) {
    double total = 0.0;
    for (std::size_t code = 0; code < scount; ++code) {
      Sequence s = detail::decode_seq(code, ns, n);
      double prob = 1.0;
      for (auto si : s) prob *= double(q.counts[si]) / double(n);
      total += f_table[code] * prob;
    }
    if (total < 1.0 - eps - 1e-12) {
      std::string desc = "q=(";
      for (std::size_t i = 0; i < q.counts.size(); ++i)
        desc += (i ? "," : "") + std::to_string(q.counts[i]);
      desc += ")/" + std::to_string(n);
      throw Error(ErrorKind::HypothesisViolated, "i.i.d. hypothesis fails at " + desc);
    }
  }

  // permutation orbits are exactly the type classes; the orbit average of f
  // is the mean of f over the class
  RobustificationReport rep;
  rep.bound = 1.0 - 3.0 * std::pow(double(n + 1), double(ns)) * eps;
  rep.tightest_orbit = types.front();
  std::vector<double> sums(types.size(), 0.0);
  std::vector<std::uint64_t> sizes(types.size(), 0);
  std::map<std::vector<std::uint64_t>, std::size_t> index;
  for (std::size_t t = 0; t < types.size(); ++t) index[types[t].counts] = t;
  for (std::size_t code = 0; code < scount; ++code) {
    Sequence s = detail::decode_seq(code, ns, n);
    EmpiricalType t = EmpiricalType::of_sequence(states, s);
    const std::size_t ti = index.at(t.counts);
    sums[ti] += f_table[code];
    sizes[ti]++;
  }
  for (std::size_t t = 0; t < types.size(); ++t) {
    const double avg = sums[t] / double(sizes[t]);
    if (avg < rep.tightest_average) {
      rep.tightest_average = avg;
      rep.tightest_orbit = types[t];
    }
    if (avg < rep.bound - 1e-12) rep.conclusion_holds = false;
  }
  return rep;
}

} // namespace avwc
