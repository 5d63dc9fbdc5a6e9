#pragma once

// Finite-alphabet probability and channel algebra: validation, state
// mixtures, tensor products, pre-coding composition and the AVWC metric.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "avwc/error.hpp"

namespace avwc {

inline constexpr double kValidationTol = 1e-9; // raw inputs
inline constexpr double kComputedTol = 2e-9;   // kernels produced by algebra

/// Ordered list of distinct labels; the order is the canonical index order.
struct Alphabet {
  std::vector<std::string> symbols;

  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> syms) : symbols(std::move(syms)) {
    if (symbols.empty()) throw Error(ErrorKind::ValidationError, "alphabet must be non-empty");
    for (std::size_t i = 0; i < symbols.size(); ++i)
      for (std::size_t j = i + 1; j < symbols.size(); ++j)
        if (symbols[i] == symbols[j])
          throw Error(ErrorKind::ValidationError, "duplicate label '" + symbols[i] + "'");
  }

  static Alphabet indexed(const std::string& prefix, std::size_t n) {
    std::vector<std::string> s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.push_back(prefix + std::to_string(i + 1));
    return Alphabet(std::move(s));
  }

  std::size_t size() const { return symbols.size(); }
  bool operator==(const Alphabet& o) const { return symbols == o.symbols; }
  bool operator!=(const Alphabet& o) const { return !(*this == o); }

  /// Lexicographic product order of (first, second) indices.
  static Alphabet product(const Alphabet& a, const Alphabet& b) {
    std::vector<std::string> s;
    s.reserve(a.size() * b.size());
    for (const auto& x : a.symbols)
      for (const auto& y : b.symbols) s.push_back("(" + x + "," + y + ")");
    return Alphabet(std::move(s));
  }
};

/// Probability distribution over an Alphabet.
struct Distribution {
  Alphabet alphabet;
  std::vector<double> mass;

  Distribution() = default;
  Distribution(Alphabet a, std::vector<double> m, double tol = kValidationTol)
      : alphabet(std::move(a)), mass(std::move(m)) {
    if (mass.size() != alphabet.size())
      throw Error(ErrorKind::DimensionMismatch, "mass size does not match alphabet");
    double sum = 0.0;
    for (double w : mass) {
      if (w < 0.0) throw Error(ErrorKind::NegativeEntry, "negative probability weight");
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol)
      throw Error(ErrorKind::RowSumViolation,
                  "weights sum to " + std::to_string(sum) + ", deviation " +
                      std::to_string(std::abs(sum - 1.0)));
  }

  std::size_t size() const { return mass.size(); }
  double operator[](std::size_t i) const { return mass[i]; }

  static Distribution uniform(const Alphabet& a) {
    return Distribution(a, std::vector<double>(a.size(), 1.0 / double(a.size())));
  }
  static Distribution point(const Alphabet& a, std::size_t idx) {
    std::vector<double> m(a.size(), 0.0);
    m.at(idx) = 1.0;
    return Distribution(a, std::move(m));
  }
};

inline double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

/// Row-stochastic kernel w(b|a), indexed [input][output].
struct Channel {
  Alphabet input;
  Alphabet output;
  std::vector<std::vector<double>> kernel;

  Channel() = default;
  Channel(Alphabet in, Alphabet out, std::vector<std::vector<double>> k,
          double tol = kValidationTol)
      : input(std::move(in)), output(std::move(out)), kernel(std::move(k)) {
    if (kernel.size() != input.size())
      throw Error(ErrorKind::DimensionMismatch, "kernel row count does not match input alphabet");
    for (std::size_t a = 0; a < kernel.size(); ++a) {
      if (kernel[a].size() != output.size())
        throw Error(ErrorKind::DimensionMismatch,
                    "kernel row " + std::to_string(a) + " does not match output alphabet");
      double sum = 0.0;
      for (double w : kernel[a]) {
        if (w < 0.0)
          throw Error(ErrorKind::NegativeEntry, "negative entry in row " + std::to_string(a));
        sum += w;
      }
      if (std::abs(sum - 1.0) > tol)
        throw Error(ErrorKind::RowSumViolation,
                    "row " + std::to_string(a) + " sums to " + std::to_string(sum) +
                        ", deviation " + std::to_string(std::abs(sum - 1.0)));
    }
  }

  double operator()(std::size_t out_idx, std::size_t in_idx) const {
    return kernel[in_idx][out_idx];
  }
  const std::vector<double>& row(std::size_t in_idx) const { return kernel[in_idx]; }

  /// Push a distribution through the channel.
  Distribution apply(const Distribution& p) const {
    if (p.alphabet != input) throw Error(ErrorKind::AlphabetMismatch, "apply: input mismatch");
    std::vector<double> out(output.size(), 0.0);
    for (std::size_t a = 0; a < input.size(); ++a)
      for (std::size_t b = 0; b < output.size(); ++b) out[b] += p.mass[a] * kernel[a][b];
    return Distribution(output, std::move(out), kComputedTol);
  }

  static Channel identity(const Alphabet& a) {
    std::vector<std::vector<double>> k(a.size(), std::vector<double>(a.size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) k[i][i] = 1.0;
    return Channel(a, a, std::move(k));
  }

  /// Binary channel that flips the input.
  static Channel flip(const Alphabet& a) {
    if (a.size() != 2) throw Error(ErrorKind::DimensionMismatch, "flip needs a binary alphabet");
    return Channel(a, a, {{0.0, 1.0}, {1.0, 0.0}});
  }

  /// Binary symmetric channel with crossover probability q.
  static Channel bsc(double q, const Alphabet& a) {
    if (a.size() != 2) throw Error(ErrorKind::DimensionMismatch, "bsc needs a binary alphabet");
    if (q < 0.0 || q > 1.0) throw Error(ErrorKind::OutOfRange, "bsc crossover outside [0,1]");
    return Channel(a, a, {{1.0 - q, q}, {q, 1.0 - q}});
  }

  /// Uniform output regardless of input.
  static Channel trash(const Alphabet& in, const Alphabet& out) {
    std::vector<std::vector<double>> k(in.size(),
                                       std::vector<double>(out.size(), 1.0 / double(out.size())));
    return Channel(in, out, std::move(k));
  }
};

/// State-indexed channel family over a common input/output pair.
struct AVC {
  Alphabet input;
  Alphabet output;
  Alphabet states;
  std::vector<Channel> family; // indexed by the state alphabet

  AVC() = default;
  AVC(Alphabet in, Alphabet out, Alphabet st, std::vector<Channel> fam)
      : input(std::move(in)), output(std::move(out)), states(std::move(st)),
        family(std::move(fam)) {
    if (family.empty()) throw Error(ErrorKind::ValidationError, "AVC needs at least one state");
    if (family.size() != states.size())
      throw Error(ErrorKind::DimensionMismatch, "family size does not match state alphabet");
    for (const auto& ch : family)
      if (ch.input != input || ch.output != output)
        throw Error(ErrorKind::AlphabetMismatch, "family member alphabets disagree");
  }

  static AVC single(const Channel& ch, const std::string& state_label = "s1") {
    return AVC(ch.input, ch.output, Alphabet({state_label}), {ch});
  }

  std::size_t state_count() const { return family.size(); }
  double w(std::size_t y, std::size_t x, std::size_t s) const { return family[s].kernel[x][y]; }
};

/// Legal link to Bob plus eavesdropper link to Eve over shared input/states.
struct AVWC {
  AVC legal;
  AVC eve;

  AVWC() = default;
  AVWC(AVC l, AVC e) : legal(std::move(l)), eve(std::move(e)) {
    if (legal.input != eve.input)
      throw Error(ErrorKind::AlphabetMismatch, "legal and eve input alphabets differ");
    if (legal.states != eve.states)
      throw Error(ErrorKind::AlphabetMismatch, "legal and eve state alphabets differ");
  }
};

/// [OP] validate_channel
inline Channel validate_channel(const std::vector<std::vector<double>>& kernel,
                                const Alphabet& input, const Alphabet& output) {
  return Channel(input, output, kernel, kValidationTol);
}

/// [OP] mix_avc: the q-average channel W_q = sum_s q(s) W_s.
inline Channel mix_avc(const AVC& avc, const Distribution& q) {
  if (q.alphabet != avc.states)
    throw Error(ErrorKind::AlphabetMismatch, "mixture is not over the state alphabet");
  std::vector<std::vector<double>> k(avc.input.size(), std::vector<double>(avc.output.size(), 0.0));
  for (std::size_t s = 0; s < avc.state_count(); ++s) {
    if (q.mass[s] == 0.0) continue;
    for (std::size_t a = 0; a < avc.input.size(); ++a)
      for (std::size_t b = 0; b < avc.output.size(); ++b)
        k[a][b] += q.mass[s] * avc.family[s].kernel[a][b];
  }
  return Channel(avc.input, avc.output, std::move(k), kComputedTol);
}

/// mix by raw weights (no Distribution validation round-trip)
inline Channel mix_avc(const AVC& avc, const std::vector<double>& q) {
  return mix_avc(avc, Distribution(avc.states, q, 1e-6));
}

/// [OP] tensor_channel: (v (x) w)((b,b')|(a,a')) = v(b|a) w(b'|a').
inline Channel tensor_channel(const Channel& a, const Channel& b) {
  Alphabet in = Alphabet::product(a.input, b.input);
  Alphabet out = Alphabet::product(a.output, b.output);
  std::vector<std::vector<double>> k(in.size(), std::vector<double>(out.size()));
  const std::size_t bo = b.output.size();
  for (std::size_t i1 = 0; i1 < a.input.size(); ++i1)
    for (std::size_t i2 = 0; i2 < b.input.size(); ++i2)
      for (std::size_t o1 = 0; o1 < a.output.size(); ++o1)
        for (std::size_t o2 = 0; o2 < bo; ++o2)
          k[i1 * b.input.size() + i2][o1 * bo + o2] = a.kernel[i1][o1] * b.kernel[i2][o2];
  return Channel(in, out, std::move(k), kComputedTol);
}

/// [OP] tensor_avc: state alphabet is the Cartesian product S x S'.
inline AVC tensor_avc(const AVC& a, const AVC& b) {
  Alphabet states = Alphabet::product(a.states, b.states);
  std::vector<Channel> fam;
  fam.reserve(a.state_count() * b.state_count());
  for (std::size_t s = 0; s < a.state_count(); ++s)
    for (std::size_t t = 0; t < b.state_count(); ++t)
      fam.push_back(tensor_channel(a.family[s], b.family[t]));
  Alphabet in = fam.front().input, out = fam.front().output;
  return AVC(std::move(in), std::move(out), std::move(states), std::move(fam));
}

/// [OP] compose_precoding: w'(b|a') = sum_a w(b|a) t(a|a').
inline Channel compose_precoding(const Channel& w, const Channel& t) {
  if (t.output != w.input)
    throw Error(ErrorKind::AlphabetMismatch, "pre-coder output must equal channel input");
  std::vector<std::vector<double>> k(t.input.size(), std::vector<double>(w.output.size(), 0.0));
  for (std::size_t ap = 0; ap < t.input.size(); ++ap)
    for (std::size_t a = 0; a < w.input.size(); ++a) {
      const double ta = t.kernel[ap][a];
      if (ta == 0.0) continue;
      for (std::size_t b = 0; b < w.output.size(); ++b) k[ap][b] += ta * w.kernel[a][b];
    }
  return Channel(t.input, w.output, std::move(k), kComputedTol);
}

/// Lifted AVC variant: the same pre-coder in front of every state.
inline AVC compose_precoding(const AVC& avc, const Channel& t) {
  std::vector<Channel> fam;
  fam.reserve(avc.state_count());
  for (const auto& ch : avc.family) fam.push_back(compose_precoding(ch, t));
  return AVC(t.input, avc.output, avc.states, std::move(fam));
}

/// max_a || W(delta_a) - W'(delta_a) ||_1
inline double channel_distance(const Channel& a, const Channel& b) {
  if (a.input != b.input || a.output != b.output)
    throw Error(ErrorKind::AlphabetMismatch, "channel_distance alphabets differ");
  double d = 0.0;
  for (std::size_t x = 0; x < a.input.size(); ++x)
    d = std::max(d, l1_distance(a.kernel[x], b.kernel[x]));
  return d;
}

namespace detail {

// Per-state joint channel x -> (y,z) with kernel w_s(y|x) v_s(z|x). The two
// families of an AVWC share one state alphabet, so the diagonal coupling is
// the canonical pairing; the full product of state sets is available for the
// metric via the flag below.
inline std::vector<Channel> joint_family_diagonal(const AVWC& c) {
  std::vector<Channel> fam;
  const std::size_t ny = c.legal.output.size(), nz = c.eve.output.size();
  Alphabet out = Alphabet::product(c.legal.output, c.eve.output);
  for (std::size_t s = 0; s < c.legal.state_count(); ++s) {
    std::vector<std::vector<double>> k(c.legal.input.size(), std::vector<double>(ny * nz));
    for (std::size_t x = 0; x < c.legal.input.size(); ++x)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t z = 0; z < nz; ++z)
          k[x][y * nz + z] = c.legal.family[s].kernel[x][y] * c.eve.family[s].kernel[x][z];
    fam.emplace_back(c.legal.input, out, std::move(k), kComputedTol);
  }
  return fam;
}

inline std::vector<Channel> joint_family_full_product(const AVWC& c) {
  std::vector<Channel> fam;
  const std::size_t ny = c.legal.output.size(), nz = c.eve.output.size();
  Alphabet out = Alphabet::product(c.legal.output, c.eve.output);
  for (std::size_t s = 0; s < c.legal.state_count(); ++s)
    for (std::size_t t = 0; t < c.eve.state_count(); ++t) {
      std::vector<std::vector<double>> k(c.legal.input.size(), std::vector<double>(ny * nz));
      for (std::size_t x = 0; x < c.legal.input.size(); ++x)
        for (std::size_t y = 0; y < ny; ++y)
          for (std::size_t z = 0; z < nz; ++z)
            k[x][y * nz + z] = c.legal.family[s].kernel[x][y] * c.eve.family[t].kernel[x][z];
      fam.emplace_back(c.legal.input, out, std::move(k), kComputedTol);
    }
  return fam;
}

// directed distance g: max over members of a of the closest member of b
inline double directed_g(const std::vector<Channel>& a, const std::vector<Channel>& b) {
  double g = 0.0;
  for (const auto& ca : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cb : b) best = std::min(best, channel_distance(ca, cb));
    g = std::max(g, best);
  }
  return g;
}

} // namespace detail

/// [OP] hausdorff_distance between AVWCs: symmetric max of the directed
/// max-min L1 distances between the joint (y,z) state families.
inline double hausdorff_distance(const AVWC& a, const AVWC& b, bool full_state_product = false) {
  if (a.legal.input != b.legal.input || a.legal.output != b.legal.output ||
      a.eve.output != b.eve.output)
    throw Error(ErrorKind::AlphabetMismatch, "hausdorff_distance alphabets differ");
  auto fa = full_state_product ? detail::joint_family_full_product(a)
                               : detail::joint_family_diagonal(a);
  auto fb = full_state_product ? detail::joint_family_full_product(b)
                               : detail::joint_family_diagonal(b);
  return std::max(detail::directed_g(fa, fb), detail::directed_g(fb, fa));
}

/// Directed-by-legal-only variant used when only an AVC is at hand.
inline double hausdorff_distance(const AVC& a, const AVC& b) {
  if (a.input != b.input || a.output != b.output)
    throw Error(ErrorKind::AlphabetMismatch, "hausdorff_distance alphabets differ");
  return std::max(detail::directed_g(a.family, b.family), detail::directed_g(b.family, a.family));
}

/// [OP] product_avwc: independent state pairs (s,s').
inline AVWC product_avwc(const AVWC& a, const AVWC& b) {
  return AVWC(tensor_avc(a.legal, b.legal), tensor_avc(a.eve, b.eve));
}

} // namespace avwc
