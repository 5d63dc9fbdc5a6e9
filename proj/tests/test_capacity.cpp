#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "avwc/capacity.hpp"
#include "avwc/examples.hpp"
#include "avwc/rng.hpp"

using namespace avwc;

namespace {

const Alphabet X2 = Alphabet::indexed("x", 2);

OptimizerConfig fast_cfg() {
  OptimizerConfig cfg;
  cfg.grid = 257;
  cfg.starts = 4;
  cfg.seed = 1;
  return cfg;
}

AVWC random_single_state_pair(Rng& rng) {
  std::vector<std::vector<double>> kw{rng.next_simplex(2), rng.next_simplex(2)};
  std::vector<std::vector<double>> kv{rng.next_simplex(2), rng.next_simplex(2)};
  return AVWC(AVC::single(Channel(X2, X2, kw, 1e-6)), AVC::single(Channel(X2, X2, kv, 1e-6)));
}

// dense 1-D oracle for max_p [I(p;W) - I(p;V)] over binary inputs, U = Id
double grid_secrecy_oracle(const AVWC& c, int grid = 4001) {
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    double a = double(i) / double(grid - 1);
    Distribution p(c.legal.input, {a, 1 - a}, 1e-6);
    double v = mutual_information(p, c.legal.family[0]) -
               mutual_information(p, c.eve.family[0]);
    best = std::max(best, v);
  }
  return best;
}

} // namespace

TEST_CASE("avc_capacity closed forms") {
  OptimizerConfig cfg;
  cfg.grid = 1001;

  auto bsc = avc_capacity(AVC::single(Channel::bsc(0.1, X2)), cfg);
  CHECK(bsc.value_bits == Catch::Approx(0.531004).margin(1e-3));
  CHECK(bsc.p_star.mass[0] == Catch::Approx(0.5).margin(1e-2));

  AVC idflip(X2, X2, Alphabet::indexed("s", 2), {Channel::identity(X2), Channel::flip(X2)});
  auto zero = avc_capacity(idflip, cfg);
  CHECK(zero.value_bits <= 1e-6);

  auto trash = avc_capacity(AVC::single(Channel::trash(X2, X2)), fast_cfg());
  CHECK(trash.value_bits <= 1e-9);
}

TEST_CASE("avc_capacity beyond binary inputs") {
  // ternary symmetric channel with error q: C = log2(3) - H(1-q, q/2, q/2)
  const double q = 0.15;
  Alphabet X3 = Alphabet::indexed("x", 3);
  std::vector<std::vector<double>> k(3, std::vector<double>(3, q / 2));
  for (int i = 0; i < 3; ++i) k[i][i] = 1 - q;
  OptimizerConfig cfg = fast_cfg();
  cfg.starts = 6;
  auto cap = avc_capacity(AVC::single(Channel(X3, X3, k)), cfg);
  double expected = std::log2(3.0) - entropy_of({1 - q, q / 2, q / 2});
  CHECK(cap.value_bits == Catch::Approx(expected).margin(2e-3));
}

TEST_CASE("secrecy_rate_r on degenerate single-state pairs") {
  OptimizerConfig cfg = fast_cfg();

  AVWC idid(AVC::single(Channel::identity(X2)), AVC::single(Channel::identity(X2)));
  CHECK(secrecy_rate_r(idid, 1, cfg).value_bits <= 1e-9);

  AVWC idtrash(AVC::single(Channel::identity(X2)), AVC::single(Channel::trash(X2, X2)));
  auto r = secrecy_rate_r(idtrash, 1, cfg);
  CHECK(r.value_bits == Catch::Approx(1.0).margin(1e-6));
  CHECK_FALSE(r.certified);

  CHECK_THROWS_AS(secrecy_rate_r(idtrash, 3, cfg), Error);
}

TEST_CASE("secrecy_rate_r against the pinned BSC oracle") {
  AVWC pair(AVC::single(Channel::bsc(0.1, X2)), AVC::single(Channel::bsc(0.3, X2)));
  double oracle = grid_secrecy_oracle(pair);
  // closed form at uniform input: h(0.3) - h(0.1)
  CHECK(oracle == Catch::Approx(0.4122953056).margin(1e-6));
  auto rep = secrecy_rate_r(pair, 1, fast_cfg());
  CHECK(rep.value_bits == Catch::Approx(oracle).margin(2e-3));
  CHECK(rep.value_bits >= oracle - 1e-9);
}

TEST_CASE("secrecy_rate_r matches the grid oracle on random single-state pairs") {
  Rng rng(101);
  OptimizerConfig cfg = fast_cfg();
  SecrecyRateOptions no_precoders;
  no_precoders.search_precoders = false; // oracle fixes U = Id
  for (int trial = 0; trial < 100; ++trial) {
    AVWC pair = random_single_state_pair(rng);
    double oracle = grid_secrecy_oracle(pair);
    auto rep = secrecy_rate_r(pair, 1, cfg, no_precoders);
    CHECK(rep.value_bits == Catch::Approx(oracle).margin(2e-3));
    // the full search can only improve on the restricted one
    auto full = secrecy_rate_r(pair, 1, cfg);
    CHECK(full.value_bits >= rep.value_bits - 1e-9);
  }
}

TEST_CASE("lift_precoder extends pre-coders by an identity letter") {
  Channel lifted = lift_precoder(Channel::identity(X2), X2);
  CHECK(lifted.input.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(lifted.kernel[i][j] == (i == j ? 1.0 : 0.0));

  Rng rng(103);
  Channel u(X2, X2, {rng.next_simplex(2), rng.next_simplex(2)}, 1e-6);
  Channel lu = lift_precoder(u, X2);
  for (const auto& row : lu.kernel) {
    double sum = 0;
    for (double v : row) sum += v;
    CHECK(std::abs(sum - 1.0) <= 2e-9);
  }

  // a non-symmetrizable family tensored with itself, composed with a lifted
  // pre-coder, stays non-symmetrizable
  AVC w = builtin_precoding_bsc(0.4).files[0].legal_avc();
  AVC w2 = tensor_avc(w, w);
  Channel lifted_u(w2.input, w2.input, lift_precoder(u, X2).kernel, 1e-6);
  AVC composed = compose_precoding(w2, lifted_u);
  CHECK_FALSE(is_symmetrizable(composed).symmetrizable);
}

TEST_CASE("secrecy_rate_r at r = 2 is supported and consistent") {
  OptimizerConfig cfg = fast_cfg();
  cfg.starts = 2;
  AVWC idtrash(AVC::single(Channel::identity(X2)), AVC::single(Channel::trash(X2, X2)));
  auto r2 = secrecy_rate_r(idtrash, 2, cfg);
  CHECK(r2.r == 2);
  CHECK(r2.value_bits == Catch::Approx(1.0).margin(5e-3));
}

TEST_CASE("c_key saturates at the plain capacity") {
  OptimizerConfig cfg = fast_cfg();
  AVWC idid(AVC::single(Channel::identity(X2)), AVC::single(Channel::identity(X2)));

  auto big = c_key(idid, 5.0, 1, cfg);
  auto cap = avc_capacity(idid.legal, cfg);
  CHECK(big.value_bits == Catch::Approx(cap.value_bits).margin(1e-9));

  auto mid = c_key(idid, 0.3, 1, cfg);
  CHECK(mid.value_bits == Catch::Approx(0.3).margin(1e-9));

  CHECK_THROWS_AS(c_key(idid, 0.0, 1, cfg), Error);
  CHECK_THROWS_AS(c_key(idid, -0.5, 1, cfg), Error);

  // monotone in G, bounded by both arguments of the minimum
  double prev = 0.0;
  for (double g : {0.1, 0.4, 0.8, 1.2, 2.0}) {
    auto rep = c_key(idid, g, 1, cfg);
    CHECK(rep.value_bits >= prev - 1e-9);
    CHECK(rep.value_bits <= g + 1e-9);          // secrecy part is 0 here
    CHECK(rep.value_bits <= cap.value_bits + 1e-9);
    prev = rep.value_bits;
  }
}

TEST_CASE("c_s_estimate follows the symmetrizability dichotomy") {
  OptimizerConfig cfg = fast_cfg();

  // symmetrizable legal link: exactly zero, certified, for any eavesdropper
  AVWC a = builtin_super_activation().files[0].avwc();
  auto za = c_s_estimate(a, 1, cfg);
  CHECK(za.value_bits == 0.0);
  CHECK(za.certified);

  // symmetrizable legal + blind eavesdropper: still zero despite positive
  // mean capacity
  auto zb = c_s_estimate(AVWC(a.legal, a.eve), 1, cfg);
  CHECK(zb.value_bits == 0.0);

  // non-symmetrizable legal with blind eavesdropper: the bound coincides
  // with the plain capacity bound
  AVWC open(builtin_precoding_bsc(0.4).files[0].legal_avc(),
            builtin_precoding_bsc(0.4).files[0].eve_avc());
  auto est = c_s_estimate(open, 1, cfg);
  auto cap = avc_capacity(open.legal, cfg);
  CHECK_FALSE(est.certified);
  CHECK(est.value_bits == Catch::Approx(cap.value_bits).margin(2e-3));
}

TEST_CASE("classify_super_activation on the built-in pair") {
  OptimizerConfig cfg = fast_cfg();
  auto ex = builtin_super_activation();
  AVWC a = ex.files[0].avwc(), b = ex.files[1].avwc();

  auto verdict = classify_super_activation(a, b, 1, cfg);
  CHECK(verdict.cls == SuperActivationClass::Activated);
  CHECK(verdict.legal_a_symmetrizable);
  CHECK_FALSE(verdict.legal_b_symmetrizable);
  CHECK_FALSE(verdict.product_symmetrizable);
  CHECK(verdict.product_secrecy_bound > 0.0);

  // the class field is independent of the labeling
  auto swapped = classify_super_activation(b, a, 1, cfg);
  CHECK(swapped.cls == verdict.cls);
}

TEST_CASE("classify_super_activation rejects and degenerates correctly") {
  OptimizerConfig cfg = fast_cfg();
  auto ex = builtin_super_activation();
  AVWC a = ex.files[0].avwc();

  // both legal links symmetrizable: the product stays symmetrizable
  auto verdict = classify_super_activation(a, a, 1, cfg);
  CHECK(verdict.cls == SuperActivationClass::ImpossibleSymmetrizableProduct);

  // identical legal and eve links: zero mean capacity is certifiable
  AVWC idid(AVC::single(Channel::identity(X2)), AVC::single(Channel::identity(X2)));
  auto v2 = classify_super_activation(idid, idid, 1, cfg);
  CHECK((v2.cls == SuperActivationClass::ImpossibleZeroMean ||
         v2.cls == SuperActivationClass::Inconclusive));

  // a factor with positive individual secrecy bound fails the gate
  AVWC leaky(AVC::single(Channel::identity(X2)), AVC::single(Channel::trash(X2, X2)));
  auto v3 = classify_super_activation(leaky, idid, 1, cfg);
  CHECK(v3.cls == SuperActivationClass::Inconclusive);
}

TEST_CASE("discontinuity_probe on the one-parameter family") {
  OptimizerConfig cfg = fast_cfg();

  // eps = 0: symmetrizable, positive mean bound, non-symmetrizable neighbors
  AVWC corner = builtin_symmetrizable_family(0.0).files[0].avwc();
  auto rep = discontinuity_probe(corner, 0.05, 200, 7, cfg);
  CHECK(rep.positivity_holds);
  CHECK(rep.legal_symmetrizable);
  CHECK(rep.witness_found);
  CHECK(rep.witness_distance <= 0.05);

  // eps = 0.25: the hull intersection is interior, a small vicinity stays
  // symmetrizable
  AVWC interior = builtin_symmetrizable_family(0.25).files[0].avwc();
  auto rep2 = discontinuity_probe(interior, 1e-3, 60, 7, cfg);
  CHECK(rep2.legal_symmetrizable);
  CHECK_FALSE(rep2.witness_found);

  // non-symmetrizable legal link: condition (ii) fails, probe reports
  // continuity around positivity points
  AVWC open(builtin_precoding_bsc(0.4).files[0].legal_avc(),
            builtin_precoding_bsc(0.4).files[0].eve_avc());
  auto rep3 = discontinuity_probe(open, 0.05, 10, 7, cfg);
  CHECK_FALSE(rep3.legal_symmetrizable);
  CHECK_FALSE(rep3.witness_found);

  CHECK_THROWS_AS(discontinuity_probe(open, 0.0, 10, 7, cfg), Error);
}

TEST_CASE("capacity_curve is the clipped line min{G, C}") {
  OptimizerConfig cfg = fast_cfg();
  AVWC idid(AVC::single(Channel::identity(X2)), AVC::single(Channel::identity(X2)));

  auto pts = capacity_curve(idid, 2.0, 11, 1, cfg);
  REQUIRE(pts.size() == 11);
  for (const auto& p : pts)
    CHECK(p.c_key_bits == Catch::Approx(std::min(p.g_bits, 1.0)).margin(1e-6));

  // monotone non-decreasing, plateau equals the plain capacity
  for (std::size_t i = 1; i < pts.size(); ++i)
    CHECK(pts[i].c_key_bits >= pts[i - 1].c_key_bits - 1e-9);
  CHECK(pts.back().c_key_bits ==
        Catch::Approx(avc_capacity(idid.legal, cfg).value_bits).margin(1e-6));

  CHECK_THROWS_AS(capacity_curve(idid, -1.0, 11, 1, cfg), Error);
  CHECK_THROWS_AS(capacity_curve(idid, 1.0, 1, 1, cfg), Error);
}

TEST_CASE("secrecy bound never exceeds the plain capacity") {
  Rng rng(107);
  OptimizerConfig cfg = fast_cfg();
  cfg.starts = 2;
  for (int trial = 0; trial < 20; ++trial) {
    AVWC pair = random_single_state_pair(rng);
    auto secrecy = secrecy_rate_r(pair, 1, cfg);
    auto cap = avc_capacity(pair.legal, cfg);
    CHECK(secrecy.value_bits <= cap.value_bits + 1e-9);
    double g = 0.1 + rng.next_double();
    auto key = c_key(pair, g, 1, cfg);
    CHECK(key.value_bits <= secrecy.value_bits + g + 1e-9);
    CHECK(key.value_bits <= cap.value_bits + 1e-9);
  }
}
