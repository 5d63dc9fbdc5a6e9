#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "avwc/examples.hpp"
#include "avwc/rng.hpp"
#include "avwc/symmetrizability.hpp"

using namespace avwc;

namespace {

const Alphabet X2 = Alphabet::indexed("x", 2);
const Alphabet Y3 = Alphabet::indexed("y", 3);
const Alphabet S2 = Alphabet::indexed("s", 2);

AVC example1_original() { return builtin_precoding_bsc(0.4).files[0].legal_avc(); }
AVC example1_precoded() { return builtin_precoding_bsc(0.4).files[1].legal_avc(); }

AVC random_avc(Rng& rng, std::size_t nx, std::size_t ny, std::size_t ns) {
  std::vector<Channel> fam;
  Alphabet in = Alphabet::indexed("x", nx), out = Alphabet::indexed("y", ny);
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<std::vector<double>> k(nx);
    for (auto& row : k) row = rng.next_simplex(ny);
    fam.emplace_back(in, out, std::move(k), 1e-6);
  }
  return AVC(in, out, Alphabet::indexed("s", ns), std::move(fam));
}

// two-input AVC whose input hulls share a constructed point
AVC random_symmetrizable_avc(Rng& rng, std::size_t ny, std::size_t ns) {
  Alphabet in = X2, out = Alphabet::indexed("y", ny), st = Alphabet::indexed("s", ns);
  auto m = rng.next_simplex(ny); // the common hull point
  auto rows_through = [&](std::vector<std::vector<double>>& rows) {
    // first state row r1, second on the far side of m along the same line,
    // so m lies on the segment [r1, r2] and in the input's hull
    rows.resize(ns);
    rows[0] = rng.next_simplex(ny);
    double t_max = 1.0;
    for (std::size_t y = 0; y < ny; ++y) {
      double dir = m[y] - rows[0][y];
      if (dir < 0 && m[y] > 0) t_max = std::min(t_max, m[y] / -dir);
      if (dir < 0 && m[y] <= 0) t_max = 0.0;
    }
    double t = 0.9 * t_max * rng.next_double();
    std::vector<double> r2(ny);
    for (std::size_t y = 0; y < ny; ++y)
      r2[y] = std::max(0.0, m[y] + t * (m[y] - rows[0][y]));
    double sum = 0;
    for (double v : r2) sum += v;
    for (auto& v : r2) v /= sum;
    rows[1] = r2;
    for (std::size_t s = 2; s < ns; ++s) rows[s] = rng.next_simplex(ny);
  };
  std::vector<std::vector<double>> rows_x1, rows_x2;
  rows_through(rows_x1);
  rows_through(rows_x2);
  std::vector<Channel> fam;
  for (std::size_t s = 0; s < ns; ++s)
    fam.emplace_back(in, out, std::vector<std::vector<double>>{rows_x1[s], rows_x2[s]}, 1e-6);
  return AVC(in, out, st, std::move(fam));
}

} // namespace

TEST_CASE("verify_certificate reproduces the published certificates") {
  // pre-coded channel with u(s1|x1) = 31/37, u(s1|x2) = 75/148
  AVC wprime = example1_precoded();
  Channel u(X2, S2, {{31.0 / 37.0, 6.0 / 37.0}, {75.0 / 148.0, 73.0 / 148.0}});
  CHECK(verify_certificate(wprime, u) <= 1e-12);

  // the one-parameter family at eps = 0.25
  const double eps = 0.25;
  AVC fam = builtin_symmetrizable_family(eps).files[0].legal_avc();
  Channel ufam(X2, S2,
               {{eps / (1 - eps), 1 - eps / (1 - eps)},
                {(1 - 2 * eps) / (1 - eps), 1 - (1 - 2 * eps) / (1 - eps)}});
  CHECK(verify_certificate(fam, ufam) <= 1e-12);

  // a single-input AVC has no pairs, so every certificate verifies at zero
  Alphabet X1({"x1"});
  AVC one(X1, Y3, S2,
          {Channel(X1, Y3, {{0.2, 0.3, 0.5}}), Channel(X1, Y3, {{0.5, 0.25, 0.25}})});
  Channel uarb(X1, S2, {{0.7, 0.3}});
  CHECK(verify_certificate(one, uarb) == 0.0);

  CHECK_THROWS_AS(verify_certificate(wprime, Channel::identity(X2)), Error);
}

TEST_CASE("is_symmetrizable on the pre-coding example") {
  auto v0 = is_symmetrizable(example1_original());
  CHECK_FALSE(v0.symmetrizable);
  REQUIRE(v0.infeasibility_margin.has_value());
  CHECK(*v0.infeasibility_margin > 0.0);

  auto v1 = is_symmetrizable(example1_precoded());
  CHECK(v1.symmetrizable);
  REQUIRE(v1.certificate.has_value());
  CHECK(v1.certificate->residual <= 1e-10);
  // residual is recomputable from the stored map
  CHECK(std::abs(verify_certificate(example1_precoded(), v1.certificate->u) -
                 v1.certificate->residual) <= 1e-12);
}

TEST_CASE("is_symmetrizable on the deterministic two-state pair") {
  AVC w1 = builtin_super_activation().files[0].legal_avc();
  auto v = is_symmetrizable(w1);
  CHECK(v.symmetrizable);
  // the hand certificate u(s1|x1) = 1, u(s2|x2) = 1
  Channel u(X2, S2, {{1.0, 0.0}, {0.0, 1.0}});
  CHECK(verify_certificate(w1, u) <= 1e-12);
}

TEST_CASE("f_value vanishes exactly on symmetrizable families") {
  for (double eps : {0.0, 0.1, 0.25, 0.4}) {
    AVC fam = builtin_symmetrizable_family(eps).files[0].legal_avc();
    auto f = f_value(fam);
    CHECK(f.certified_exact);
    CHECK(f.value <= 1e-9);
    CHECK(is_symmetrizable(fam).symmetrizable);
  }
}

TEST_CASE("f_value of a single-state binary identity is 2") {
  AVC id = AVC::single(Channel::identity(X2));
  auto f = f_value(id);
  CHECK(f.value == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("f_value of the non-symmetrizable example, with a grid oracle") {
  AVC w = example1_original();
  auto f = f_value(w);
  CHECK(f.value > 0.0);
  CHECK(f.value == Catch::Approx(0.4).margin(1e-9)); // pinned from the 2-D oracle below

  // independent oracle: dense grid over the two free parameters of U
  double oracle = 1e100;
  const int m = 400;
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) {
      std::vector<std::vector<double>> u{{double(i) / m, 1.0 - double(i) / m},
                                         {double(j) / m, 1.0 - double(j) / m}};
      double worst = 0.0;
      for (std::size_t y = 0; y < 3; ++y) {
        double e = 0.0;
        for (std::size_t s = 0; s < 2; ++s)
          e += u[0][s] * w.w(y, 1, s) - u[1][s] * w.w(y, 0, s);
        worst += std::abs(e);
      }
      oracle = std::min(oracle, worst);
    }
  CHECK(f.value == Catch::Approx(oracle).margin(2e-3)); // grid resolution slack

  // the multistart mode lands on the same optimum here
  auto fm = f_value(w, FMode::Multistart, 12, 3);
  CHECK_FALSE(fm.certified_exact);
  CHECK(fm.value == Catch::Approx(f.value).margin(1e-6));
}

TEST_CASE("hulls_intersect matches the geometric picture") {
  AVC fam = builtin_symmetrizable_family(0.25).files[0].legal_avc();
  CHECK(hulls_intersect(fam, 0, 1));

  AVC id = AVC::single(Channel::identity(X2));
  CHECK_FALSE(hulls_intersect(id, 0, 1));

  CHECK_FALSE(hulls_intersect(example1_original(), 0, 1));
  CHECK(hulls_intersect(example1_precoded(), 0, 1));
  CHECK_THROWS_AS(hulls_intersect(id, 1, 1), Error);
}

TEST_CASE("LP verdict, F and the hull criterion agree on random AVCs") {
  Rng rng(71);
  int done = 0;
  while (done < 500) {
    std::size_t nx = 2 + rng.next_below(3), ny = 2 + rng.next_below(3),
                ns = 2 + rng.next_below(3);
    AVC avc = (done % 3 == 0) ? random_symmetrizable_avc(rng, ny, ns)
                              : random_avc(rng, nx, ny, ns);
    auto verdict = is_symmetrizable(avc);
    auto f = f_value(avc);
    CHECK(verdict.symmetrizable == (f.value < 1e-6));
    if (avc.input.size() == 2)
      CHECK(verdict.symmetrizable == hulls_intersect(avc, 0, 1));
    ++done;
  }
}

TEST_CASE("verdict and F are invariant under relabeling") {
  Rng rng(73);
  for (int trial = 0; trial < 40; ++trial) {
    AVC avc = (trial % 2 == 0) ? random_symmetrizable_avc(rng, 3, 2) : random_avc(rng, 2, 3, 2);
    auto base_v = is_symmetrizable(avc);
    double base_f = f_value(avc).value;

    // swap the two states
    AVC swapped_states(avc.input, avc.output, avc.states, {avc.family[1], avc.family[0]});
    CHECK(is_symmetrizable(swapped_states).symmetrizable == base_v.symmetrizable);
    CHECK(f_value(swapped_states).value == Catch::Approx(base_f).margin(1e-10));

    // permute the outputs
    std::vector<Channel> fam;
    for (const auto& ch : avc.family) {
      std::vector<std::vector<double>> k(2, std::vector<double>(3));
      for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 3; ++y) k[x][(y + 1) % 3] = ch.kernel[x][y];
      fam.emplace_back(avc.input, avc.output, std::move(k), 1e-6);
    }
    AVC permuted(avc.input, avc.output, avc.states, std::move(fam));
    CHECK(is_symmetrizable(permuted).symmetrizable == base_v.symmetrizable);
    CHECK(f_value(permuted).value == Catch::Approx(base_f).margin(1e-10));
  }
}

TEST_CASE("pre-coding preserves symmetrizability with an explicit certificate") {
  Rng rng(79);
  // the family plus arbitrary pre-coders
  for (int trial = 0; trial < 200; ++trial) {
    AVC sym = (trial % 2 == 0)
                  ? builtin_symmetrizable_family(0.05 + 0.4 * rng.next_double()).files[0].legal_avc()
                  : random_symmetrizable_avc(rng, 2 + rng.next_below(3), 2 + rng.next_below(2));
    std::size_t nin = 2 + rng.next_below(2);
    Alphabet newin = Alphabet::indexed("a", nin);
    std::vector<std::vector<double>> tk(nin);
    for (auto& row : tk) row = rng.next_simplex(sym.input.size());
    Channel t(newin, sym.input, std::move(tk), 1e-6);

    auto rep = precoding_preserves_symmetrizability_check(sym, t);
    CHECK(rep.constructed.residual <= 1e-9);
    CHECK(is_symmetrizable(rep.composed).symmetrizable);
  }

  // identity pre-coder keeps the certificate unchanged
  AVC fam = builtin_symmetrizable_family(0.25).files[0].legal_avc();
  auto rep = precoding_preserves_symmetrizability_check(fam, Channel::identity(X2));
  CHECK(rep.constructed.residual <= 1e-10);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t s = 0; s < 2; ++s)
      CHECK(rep.constructed.u.kernel[x][s] ==
            Catch::Approx(rep.original.u.kernel[x][s]).margin(1e-12));

  // the non-symmetrizable channel rejects the precondition, yet its
  // published pre-coded variant is symmetrizable: the converse fails
  Channel n04(X2, X2, {{0.4, 0.6}, {0.6, 0.4}});
  CHECK_THROWS_AS(precoding_preserves_symmetrizability_check(example1_original(), n04), Error);
  CHECK(is_symmetrizable(example1_precoded()).symmetrizable);
}
