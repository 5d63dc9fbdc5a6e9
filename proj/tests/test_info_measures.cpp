#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "avwc/info.hpp"
#include "avwc/rng.hpp"
#include "avwc/types.hpp"

using namespace avwc;

namespace {

const Alphabet X2 = Alphabet::indexed("x", 2);

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

} // namespace

TEST_CASE("entropy basics") {
  CHECK(entropy(Distribution::uniform(Alphabet::indexed("a", 4))) == Catch::Approx(2.0));
  CHECK(entropy(Distribution::point(Alphabet::indexed("a", 4), 2)) == 0.0);
  CHECK(entropy(Distribution(X2, {0.9, 0.1})) == Catch::Approx(0.468996).margin(1e-6));
}

TEST_CASE("relative entropy, including the infinite case") {
  Distribution p(X2, {0.3, 0.7});
  CHECK(relative_entropy(p, p) == 0.0);
  CHECK(relative_entropy(Distribution::point(X2, 0), Distribution::uniform(X2)) ==
        Catch::Approx(1.0));
  CHECK(std::isinf(relative_entropy(Distribution(X2, {1, 0}), Distribution(X2, {0, 1}))));
  CHECK_THROWS_AS(relative_entropy(p, Distribution::uniform(Alphabet::indexed("b", 2))), Error);
}

TEST_CASE("mutual information basics") {
  Distribution u = Distribution::uniform(X2);
  CHECK(mutual_information(u, Channel::identity(X2)) == Catch::Approx(1.0));
  CHECK(mutual_information(u, Channel::bsc(0.1, X2)) == Catch::Approx(0.531004).margin(1e-6));

  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    Distribution p(X2, rng.next_simplex(2), 1e-6);
    CHECK(mutual_information(p, Channel::trash(X2, Alphabet::indexed("z", 3))) ==
          Catch::Approx(0.0).margin(1e-12));
  }

  // I(p;W) is between 0 and min(H(p), log |output|)
  for (int i = 0; i < 200; ++i) {
    AVC a = random_avc(rng, 3, 4, 1);
    Distribution p(a.input, rng.next_simplex(3), 1e-6);
    double mi = mutual_information(p, a.family[0]);
    CHECK(mi >= 0.0);
    CHECK(mi <= std::min(entropy(p), std::log2(4.0)) + 1e-9);
  }
}

TEST_CASE("empirical mutual information of sequences") {
  // identical sequences carry their own entropy
  CHECK(empirical_mutual_information({0, 0, 1, 1}, {0, 0, 1, 1}, 2, 2) == Catch::Approx(1.0));
  // constant second sequence carries nothing
  CHECK(empirical_mutual_information({0, 0, 1, 1}, {2, 2, 2, 2}, 2, 3) ==
        Catch::Approx(0.0).margin(1e-12));
  // a permutation pairing is fully informative
  CHECK(empirical_mutual_information({0, 1}, {1, 0}, 2, 2) == Catch::Approx(1.0));
  CHECK_THROWS_AS(empirical_mutual_information({0, 1}, {0}, 2, 2), Error);
}

TEST_CASE("min_mixture_mi finds the minimizing state mixture") {
  Distribution u = Distribution::uniform(X2);

  AVC single = AVC::single(Channel::bsc(0.1, X2));
  auto r1 = min_mixture_mi(u, single);
  CHECK(r1.value == Catch::Approx(mutual_information(u, single.family[0])).margin(1e-9));
  CHECK(r1.q_star.mass[0] == Catch::Approx(1.0));

  AVC idflip(X2, X2, Alphabet::indexed("s", 2), {Channel::identity(X2), Channel::flip(X2)});
  auto r2 = min_mixture_mi(u, idflip);
  CHECK(r2.value == Catch::Approx(0.0).margin(1e-8));
  CHECK(r2.q_star.mass[0] == Catch::Approx(0.5).margin(1e-4));

  // B(p) never exceeds any pure state's value
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    AVC a = random_avc(rng, 2, 3, 3);
    Distribution p(a.input, rng.next_simplex(2), 1e-6);
    auto res = min_mixture_mi(p, a);
    for (std::size_t s = 0; s < a.state_count(); ++s)
      CHECK(res.value <= mutual_information(p, a.family[s]) + 1e-8);
  }

  // oracle sampling: the minimum is below 1000 random mixtures
  Rng orng(37);
  AVC a = random_avc(orng, 2, 3, 3);
  Distribution p(a.input, {0.4, 0.6});
  auto res = min_mixture_mi(p, a);
  for (int i = 0; i < 1000; ++i) {
    Channel wq = mix_avc(a, orng.next_simplex(3));
    CHECK(res.value <= mutual_information(p, wq) + 1e-6);
  }
}

TEST_CASE("max_mixture_mi attains the maximum at a vertex") {
  Distribution u = Distribution::uniform(X2);
  AVC single = AVC::single(Channel::bsc(0.2, X2));
  auto r1 = max_mixture_mi(u, single);
  CHECK(r1.value == Catch::Approx(mutual_information(u, single.family[0])));
  CHECK(r1.state_index == 0);

  AVC trash_id(X2, X2, Alphabet::indexed("s", 2),
               {Channel::trash(X2, X2), Channel::identity(X2)});
  auto r2 = max_mixture_mi(u, trash_id);
  CHECK(r2.value == Catch::Approx(1.0));
  CHECK(r2.state_index == 1);

  // E(p) >= B(p) on the same family
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    AVC a = random_avc(rng, 2, 3, 3);
    Distribution p(a.input, rng.next_simplex(2), 1e-6);
    CHECK(max_mixture_mi(p, a).value >= min_mixture_mi(p, a).value - 1e-9);
  }

  // vertex attainment: exhaustive simplex grid never beats the vertex max
  Rng grng(43);
  for (int trial = 0; trial < 5; ++trial) {
    AVC a = random_avc(grng, 2, 3, 3);
    Distribution p(a.input, grng.next_simplex(2), 1e-6);
    double vmax = max_mixture_mi(p, a).value;
    const int m = 140; // ~1e4 grid points on the 3-state simplex
    double gmax = 0.0;
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m - i; ++j) {
        std::vector<double> q{double(i) / m, double(j) / m, double(m - i - j) / m};
        gmax = std::max(gmax, mutual_information(p, mix_avc(a, q)));
      }
    CHECK(gmax <= vmax + 1e-6);
  }

  // convexity of q -> I(p; W_q)
  Rng crng(47);
  for (int trial = 0; trial < 200; ++trial) {
    AVC a = random_avc(crng, 2, 3, 3);
    Distribution p(a.input, crng.next_simplex(2), 1e-6);
    auto q1 = crng.next_simplex(3), q2 = crng.next_simplex(3);
    double lam = crng.next_double();
    std::vector<double> qm(3);
    for (int i = 0; i < 3; ++i) qm[i] = lam * q1[i] + (1 - lam) * q2[i];
    double lhs = mutual_information(p, mix_avc(a, qm));
    double rhs = lam * mutual_information(p, mix_avc(a, q1)) +
                 (1 - lam) * mutual_information(p, mix_avc(a, q2));
    CHECK(lhs <= rhs + 1e-9);
  }
}

TEST_CASE("conditional-entropy continuity bound") {
  CHECK(entropy_continuity_bound(0.0, 2) == 0.0);
  CHECK(entropy_continuity_bound(1.0, 2) == Catch::Approx(2.0));
  CHECK_THROWS_AS(entropy_continuity_bound(-0.1, 2), Error);
  CHECK_THROWS_AS(entropy_continuity_bound(1.5, 2), Error);

  // the bound holds on random kernel pairs
  Rng rng(53);
  int checked = 0;
  while (checked < 1000) {
    const std::size_t nx = 2 + rng.next_below(2), nz = 2 + rng.next_below(3);
    Alphabet in = Alphabet::indexed("x", nx), out = Alphabet::indexed("z", nz);
    std::vector<std::vector<double>> kw(nx), kr(nx);
    for (std::size_t x = 0; x < nx; ++x) {
      kw[x] = rng.next_simplex(nz);
      // r close to w so the averaged L1 distance stays within [0,1]
      kr[x] = kw[x];
      for (std::size_t z = 0; z < nz; ++z)
        kr[x][z] = std::max(0.0, kr[x][z] + 0.2 * (rng.next_double() - 0.5));
      double sum = 0;
      for (double v : kr[x]) sum += v;
      for (double& v : kr[x]) v /= sum;
    }
    Distribution p(in, rng.next_simplex(nx), 1e-6);
    double delta = 0.0;
    for (std::size_t x = 0; x < nx; ++x) delta += p.mass[x] * l1_distance(kw[x], kr[x]);
    if (delta > 1.0) continue;
    double hw = 0.0, hr = 0.0;
    for (std::size_t x = 0; x < nx; ++x) {
      hw += p.mass[x] * entropy_of(kw[x]);
      hr += p.mass[x] * entropy_of(kr[x]);
    }
    CHECK(std::abs(hw - hr) <= entropy_continuity_bound(delta, nz) + 1e-12);
    ++checked;
  }
}

TEST_CASE("approximate_by_type satisfies the 2|X|/n bound") {
  // already a type: returned unchanged
  Distribution p1(X2, {1.0 / 3.0, 2.0 / 3.0});
  EmpiricalType t1 = approximate_by_type(p1, 9);
  CHECK(t1.counts == std::vector<std::uint64_t>{3, 6});
  CHECK(l1_between(p1, t1) == Catch::Approx(0.0).margin(1e-12));

  Distribution p2(X2, {0.415, 0.585});
  EmpiricalType t2 = approximate_by_type(p2, 100);
  CHECK(l1_between(p2, t2) <= 0.04);

  CHECK_THROWS_AS(approximate_by_type(p2, 3), Error);

  // support preservation and the bound, on random instances
  Rng rng(59);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + rng.next_below(3);
    auto mass = rng.next_simplex(d);
    if (trial % 4 == 0) { // force a zero-mass symbol now and then
      mass[0] = 0.0;
      double sum = 0;
      for (double v : mass) sum += v;
      for (double& v : mass) v /= sum;
    }
    Distribution p(Alphabet::indexed("x", d), mass, 1e-6);
    const std::uint64_t n = d * d + rng.next_below(200);
    EmpiricalType t = approximate_by_type(p, n);
    CHECK(t.n == n);
    CHECK(l1_between(p, t) <= 2.0 * double(d) / double(n) + 1e-12);
    for (std::size_t i = 0; i < d; ++i)
      if (p.mass[i] == 0.0) CHECK(t.counts[i] == 0);
  }
}
