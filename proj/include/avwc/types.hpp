#pragma once

// Empirical types: enumeration, exact class cardinalities, and the
// constructive type-approximation bound ||p - p'||_1 <= 2|X|/n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "avwc/channel.hpp"
#include "avwc/error.hpp"
#include "avwc/info.hpp"

namespace avwc {

using Sequence = std::vector<std::size_t>; // index sequence over an alphabet

/// Empirical distribution with integer counts summing to n.
struct EmpiricalType {
  Alphabet alphabet;
  std::vector<std::uint64_t> counts;
  std::uint64_t n = 0;

  EmpiricalType() = default;
  EmpiricalType(Alphabet a, std::vector<std::uint64_t> c)
      : alphabet(std::move(a)), counts(std::move(c)) {
    if (counts.size() != alphabet.size())
      throw Error(ErrorKind::DimensionMismatch, "counts size does not match alphabet");
    n = 0;
    for (auto v : counts) n += v;
    if (n == 0) throw Error(ErrorKind::InconsistentCounts, "empty type");
  }

  static EmpiricalType of_sequence(const Alphabet& a, const Sequence& seq) {
    std::vector<std::uint64_t> c(a.size(), 0);
    for (auto s : seq) c.at(s)++;
    return EmpiricalType(a, std::move(c));
  }

  Distribution distribution() const {
    std::vector<double> m(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) m[i] = double(counts[i]) / double(n);
    return Distribution(alphabet, std::move(m));
  }
};

/// [OP] enumerate_types: all compositions of n into |X| parts. Order matches
/// the first-coordinate-descending convention, e.g. (2,0),(1,1),(0,2).
inline std::vector<EmpiricalType> enumerate_types(std::uint64_t n, const Alphabet& alphabet) {
  if (n < 1) throw Error(ErrorKind::OutOfRange, "n must be at least 1");
  std::vector<EmpiricalType> out;
  std::vector<std::uint64_t> cur(alphabet.size(), 0);
  auto rec = [&](auto&& self, std::size_t pos, std::uint64_t left) -> void {
    if (pos + 1 == cur.size()) {
      cur[pos] = left;
      out.emplace_back(alphabet, cur);
      return;
    }
    for (std::uint64_t k = left + 1; k-- > 0;) {
      cur[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  rec(rec, 0, n);
  return out;
}

/// [OP] type_class_size: exact multinomial n! / prod counts_i!.
inline std::uint64_t type_class_size(const EmpiricalType& p) {
  // iterative binomial product avoids factorial overflow at small n
  std::uint64_t result = 1, seen = 0;
  auto binom = [](std::uint64_t n, std::uint64_t k) {
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
      r = r * (n - k + i) / i;
    }
    return r;
  };
  for (auto c : p.counts) {
    seen += c;
    result *= binom(seen, c);
  }
  return result;
}

/// [OP] conditional_type_class_size: number of a-sequences sharing the given
/// joint type with the fixed b-sequence. joint counts indexed [a][b].
inline std::uint64_t conditional_type_class_size(
    const std::vector<std::vector<std::uint64_t>>& joint_counts, const Sequence& b_seq,
    std::size_t b_size) {
  if (joint_counts.empty()) throw Error(ErrorKind::InconsistentCounts, "empty joint counts");
  std::vector<std::uint64_t> b_marginal(b_size, 0);
  for (const auto& row : joint_counts) {
    if (row.size() != b_size)
      throw Error(ErrorKind::DimensionMismatch, "joint counts column count mismatch");
    for (std::size_t b = 0; b < b_size; ++b) b_marginal[b] += row[b];
  }
  std::vector<std::uint64_t> b_observed(b_size, 0);
  for (auto b : b_seq) b_observed.at(b)++;
  std::uint64_t total = 0;
  for (auto v : b_marginal) total += v;
  if (b_observed != b_marginal || total != b_seq.size())
    throw Error(ErrorKind::InconsistentCounts, "joint counts disagree with the fixed sequence");
  // per b-value, the a-letters in those slots form a free multinomial
  std::uint64_t result = 1;
  for (std::size_t b = 0; b < b_size; ++b) {
    if (b_marginal[b] == 0) continue;
    std::vector<std::uint64_t> c(joint_counts.size());
    for (std::size_t a = 0; a < joint_counts.size(); ++a) c[a] = joint_counts[a][b];
    result *= type_class_size(EmpiricalType(Alphabet::indexed("a", joint_counts.size()), c));
  }
  return result;
}

/// [OP] approximate_by_type: p' within 2|X|/n of p in L1, support preserved.
inline EmpiricalType approximate_by_type(const Distribution& p, std::uint64_t n) {
  const std::size_t d = p.size();
  if (n < std::uint64_t(d) * std::uint64_t(d))
    throw Error(ErrorKind::NTooSmall, "n must be at least |X|^2");
  // round everything except the heaviest symbol, which absorbs the remainder
  std::size_t heavy = 0;
  for (std::size_t i = 1; i < d; ++i)
    if (p.mass[i] > p.mass[heavy]) heavy = i;
  std::vector<std::uint64_t> counts(d, 0);
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (i == heavy) continue;
    counts[i] = p.mass[i] > 0.0 ? std::uint64_t(std::llround(p.mass[i] * double(n))) : 0;
    used += counts[i];
  }
  if (used > n) { // numeric corner: pull the excess back off the largest entry
    std::uint64_t excess = used - n;
    for (std::size_t i = 0; i < d && excess > 0; ++i) {
      if (i == heavy) continue;
      std::uint64_t take = std::min(excess, counts[i]);
      counts[i] -= take;
      excess -= take;
    }
    used = n;
  }
  counts[heavy] = n - used;
  return EmpiricalType(p.alphabet, std::move(counts));
}

inline double l1_between(const Distribution& p, const EmpiricalType& t) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    d += std::abs(p.mass[i] - double(t.counts[i]) / double(t.n));
  return d;
}

/// All sequences of the type class T_p, lexicographic. Guarded by the caller.
inline std::vector<Sequence> type_class_sequences(const EmpiricalType& p) {
  Sequence base;
  for (std::size_t sym = 0; sym < p.counts.size(); ++sym)
    for (std::uint64_t c = 0; c < p.counts[sym]; ++c) base.push_back(sym);
  std::sort(base.begin(), base.end());
  std::vector<Sequence> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

/// All sequences of length n over an alphabet of the given size,
/// lexicographic. Caller enforces enumeration guards.
inline std::vector<Sequence> all_sequences(std::size_t alphabet_size, std::size_t n) {
  std::vector<Sequence> out;
  Sequence cur(n, 0);
  while (true) {
    out.push_back(cur);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++cur[pos] < alphabet_size) break;
      cur[pos] = 0;
      if (pos == 0) return out;
    }
    if (n == 0) return out;
  }
}

} // namespace avwc
