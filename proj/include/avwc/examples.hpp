#pragma once

// Built-in channel families. Matrices follow the published presentations
// entry by entry; label order is chosen so that the published certificates
// verify verbatim under the cross-form symmetry equations.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "avwc/channel.hpp"
#include "avwc/error.hpp"
#include "avwc/io.hpp"
#include "avwc/symmetrizability.hpp"

namespace avwc {

struct BuiltinExample {
  std::vector<ChannelFile> files;
  std::vector<std::string> file_names;
  std::optional<SymmetrizabilityCertificate> certificate; // for the composed/second channel
};

namespace detail {

inline std::vector<std::vector<std::vector<double>>> trash_kernel(std::size_t ns, std::size_t nx,
                                                                  std::size_t nz) {
  return std::vector<std::vector<std::vector<double>>>(
      ns, std::vector<std::vector<double>>(nx, std::vector<double>(nz, 1.0 / double(nz))));
}

// closed-form certificate for a two-input AVC whose input hulls are segments:
// solve a*P1 + (1-a)*P2 = b*Q1 + (1-b)*Q2 where Q are the x1 rows and P the
// x2 rows; (a, b) = (u(s1|x1), u(s1|x2)) when both land in [0,1].
inline std::optional<std::pair<double, double>> two_segment_certificate(
    const std::vector<double>& q1, const std::vector<double>& q2, const std::vector<double>& p1,
    const std::vector<double>& p2) {
  // a*(P1-P2) - b*(Q1-Q2) = Q2 - P2, solved from the two best-conditioned rows
  const std::size_t ny = q1.size();
  double best_det = 0.0;
  double a = -1.0, b = -1.0;
  for (std::size_t i = 0; i < ny; ++i)
    for (std::size_t j = i + 1; j < ny; ++j) {
      const double a11 = p1[i] - p2[i], a12 = -(q1[i] - q2[i]);
      const double a21 = p1[j] - p2[j], a22 = -(q1[j] - q2[j]);
      const double det = a11 * a22 - a12 * a21;
      if (std::abs(det) > std::abs(best_det)) {
        best_det = det;
        const double r1 = q2[i] - p2[i], r2 = q2[j] - p2[j];
        a = (r1 * a22 - a12 * r2) / det;
        b = (a11 * r2 - r1 * a21) / det;
      }
    }
  if (std::abs(best_det) < 1e-14) return std::nullopt;
  if (a < -1e-12 || a > 1 + 1e-12 || b < -1e-12 || b > 1 + 1e-12) return std::nullopt;
  return std::make_pair(std::clamp(a, 0.0, 1.0), std::clamp(b, 0.0, 1.0));
}

} // namespace detail

/// Two-state 2->3 channel pair plus a blind eavesdropper, and its pre-coded
/// variant with a binary symmetric pre-coder of parameter p. The original
/// family is non-symmetrizable; the pre-coded one is symmetrizable.
inline BuiltinExample builtin_precoding_bsc(double p) {
  if (p < 0.0 || p > 1.0) throw Error(ErrorKind::OutOfRange, "p must lie in [0,1]");
  const double pp = 1.0 - p;
  BuiltinExample ex;

  Alphabet X({"x1", "x2"}), Y({"y1", "y2", "y3"}), S({"s1", "s2"}), Z({"z1", "z2"});
  ChannelFile original;
  original.name = "example1";
  original.input_alphabet = X;
  original.state_alphabet = S;
  original.output_alphabet_legal = Y;
  original.output_alphabet_eve = Z;
  // x1 carries the mixed rows, x2 the point masses
  original.w = {
      {{0.6, 0.2, 0.2}, {1.0, 0.0, 0.0}},  // state s1
      {{0.1, 0.3, 0.6}, {0.0, 1.0, 0.0}},  // state s2
  };
  original.v = detail::trash_kernel(2, 2, 2);
  ex.files.push_back(original);
  ex.file_names.push_back("example1.json");

  ChannelFile precoded = original;
  precoded.name = "example1_precoded_p" + std::to_string(p);
  precoded.w = {
      {{pp + 0.6 * p, 0.2 * p, 0.2 * p},                 // s1, x1
       {p + 0.2 * pp, 0.6 * pp, 0.2 * pp}},              // s1, x2
      {{0.1 * p, pp + 0.3 * p, 0.6 * p},                 // s2, x1
       {0.1 * pp, p + 0.3 * pp, 0.6 * pp}},              // s2, x2
  };
  ex.files.push_back(precoded);
  ex.file_names.push_back("example1_precoded.json");

  // certificate of the pre-coded family, in closed form
  auto cert = detail::two_segment_certificate(precoded.w[0][0], precoded.w[1][0],
                                              precoded.w[0][1], precoded.w[1][1]);
  if (cert) {
    Channel u(X, S, {{cert->first, 1.0 - cert->first}, {cert->second, 1.0 - cert->second}}, 1e-9);
    AVC composed = precoded.legal_avc();
    ex.certificate = SymmetrizabilityCertificate{u, verify_certificate(composed, u)};
  }
  return ex;
}

/// The one-parameter symmetrizable family: two 2->3 channels whose input
/// hulls intersect for every eps in [0, 1/2]. The certificate
/// u(s1|x1) = eps/(1-eps), u(s1|x2) = (1-2 eps)/(1-eps) verifies exactly.
inline BuiltinExample builtin_symmetrizable_family(double eps) {
  if (eps < 0.0 || eps > 0.5) throw Error(ErrorKind::EpsOutOfRange, "eps must lie in [0, 0.5]");
  BuiltinExample ex;
  Alphabet X({"x1", "x2"}), Y({"y1", "y2", "y3"}), S({"s1", "s2"}), Z({"z1", "z2"});
  ChannelFile f;
  f.name = "symmetrizable_family_eps" + std::to_string(eps);
  f.input_alphabet = X;
  f.state_alphabet = S;
  f.output_alphabet_legal = Y;
  f.output_alphabet_eve = Z;
  f.w = {
      {{1.0 - eps, eps, 0.0}, {0.0, 1.0 - eps, eps}},  // state s1
      {{0.0, eps, 1.0 - eps}, {1.0 - eps, 0.0, eps}},  // state s2
  };
  f.v = detail::trash_kernel(2, 2, 2);
  ex.files.push_back(f);
  ex.file_names.push_back("symmetrizable_family.json");

  const double a = eps / (1.0 - eps);
  const double b = (1.0 - 2.0 * eps) / (1.0 - eps);
  Channel u(X, S, {{a, 1.0 - a}, {b, 1.0 - b}}, 1e-9);
  ex.certificate = SymmetrizabilityCertificate{u, verify_certificate(f.legal_avc(), u)};
  return ex;
}

/// The super-activation pair: a symmetrizable deterministic 2->3 family with
/// a blind eavesdropper, and a single-state degraded BSC wiretap pair.
/// The BSC parameters (0.1, 0.05) are a toolkit choice, fixed here.
inline BuiltinExample builtin_super_activation() {
  BuiltinExample ex;
  Alphabet X({"x1", "x2"}), Y({"y1", "y2", "y3"}), S({"s1", "s2"}), Z({"z1", "z2"});
  ChannelFile a;
  a.name = "super_activation_a";
  a.input_alphabet = X;
  a.state_alphabet = S;
  a.output_alphabet_legal = Y;
  a.output_alphabet_eve = Z;
  a.w = {
      {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}},  // state s1: x1 -> y1, x2 -> y3
      {{0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}},  // state s2: x1 -> y3, x2 -> y2
  };
  a.v = detail::trash_kernel(2, 2, 2);
  ex.files.push_back(a);
  ex.file_names.push_back("super_a.json");

  ChannelFile b;
  b.name = "super_activation_b";
  b.input_alphabet = X;
  b.state_alphabet = Alphabet({"s1"});
  b.output_alphabet_legal = Alphabet({"y1", "y2"});
  b.output_alphabet_eve = Z;
  b.w = {{{0.9, 0.1}, {0.1, 0.9}}};
  b.v = {{{0.95, 0.05}, {0.05, 0.95}}};
  ex.files.push_back(b);
  ex.file_names.push_back("super_b.json");

  Channel u(X, S, {{1.0, 0.0}, {0.0, 1.0}}, 1e-9);
  ex.certificate = SymmetrizabilityCertificate{u, verify_certificate(a.legal_avc(), u)};
  return ex;
}

/// Blind channel: uniform output whatever the input and state.
inline BuiltinExample builtin_trash(std::size_t outputs, std::size_t inputs = 2) {
  if (outputs < 1 || inputs < 1) throw Error(ErrorKind::OutOfRange, "alphabet sizes must be >= 1");
  BuiltinExample ex;
  ChannelFile f;
  f.name = "trash";
  f.input_alphabet = Alphabet::indexed("x", inputs);
  f.state_alphabet = Alphabet({"s1"});
  f.output_alphabet_legal = Alphabet::indexed("z", outputs);
  f.w = detail::trash_kernel(1, inputs, outputs);
  ex.files.push_back(f);
  ex.file_names.push_back("trash.json");
  return ex;
}

/// [OP] emit_builtin_example by name.
inline BuiltinExample emit_builtin_example(const std::string& name, double eps_or_p = 0.4,
                                           std::size_t outputs = 3) {
  if (name == "precoding-bsc") return builtin_precoding_bsc(eps_or_p);
  if (name == "symmetrizable-family") return builtin_symmetrizable_family(eps_or_p);
  if (name == "super-activation") return builtin_super_activation();
  if (name == "trash") return builtin_trash(outputs);
  throw Error(ErrorKind::UnknownExample, "no built-in example named '" + name + "'");
}

} // namespace avwc
