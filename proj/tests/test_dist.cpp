#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "binlot/dist.hpp"
#include "binlot/rng.hpp"

using namespace binlot;

namespace {

Dist random_dist(SplitRng& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& v : w) {
    v = -std::log(1.0 - rng.next_unit());
    total += v;
  }
  for (auto& v : w) v /= total;
  return Dist(std::move(w));
}

// Pushforward of a law under a deterministic map f : {0..k-1} -> {0..l-1}.
Dist pushforward(const Dist& p, const std::vector<std::size_t>& f, std::size_t l) {
  std::vector<double> out(l, 0.0);
  for (std::size_t x = 0; x < p.alphabet_size(); ++x) out[f[x]] += p.mass(x);
  return Dist(std::move(out));
}

}  // namespace

TEST_SUITE("dist") {

TEST_CASE("statistical distance on pinned pairs") {
  CHECK(stat_distance(Dist::uniform(2), Dist::uniform(2)) == 0.0);
  CHECK(stat_distance(Dist({1.0, 0.0}), Dist::uniform(2)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(stat_distance(Dist({0.8, 0.2}), Dist({0.6, 0.4})) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("statistical distance is a metric bounded by one") {
  SplitRng rng(301);
  for (int trial = 0; trial < 50; ++trial) {
    const Dist p = random_dist(rng, 6), q = random_dist(rng, 6), w = random_dist(rng, 6);
    const double dpq = stat_distance(p, q);
    CHECK(dpq >= 0.0);
    CHECK(dpq <= 1.0);
    CHECK(dpq == stat_distance(q, p));
    CHECK(stat_distance(p, p) == 0.0);
    CHECK(dpq <= stat_distance(p, w) + stat_distance(w, q) + 1e-12);
  }
}

TEST_CASE("distance between point mass and uniform") {
  // d(delta_0, uniform K) = 1 - 1/K
  for (std::size_t k : {2u, 3u, 8u, 17u}) {
    std::vector<double> point(k, 0.0);
    point[0] = 1.0;
    CHECK(stat_distance(Dist(point), Dist::uniform(k)) ==
          doctest::Approx(1.0 - 1.0 / double(k)).epsilon(1e-12));
  }
}

TEST_CASE("mixture endpoints and convexity of distance") {
  const Dist p({0.8, 0.2}), q({0.1, 0.9});
  CHECK(mixture(p, q, 1.0) == p);
  CHECK(mixture(p, q, 0.0) == q);
  const Dist half = mixture(p, q, 0.5);
  CHECK(half.mass(0) == doctest::Approx(0.45));

  SplitRng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Dist p1 = random_dist(rng, 5), p2 = random_dist(rng, 5);
    const Dist q1 = random_dist(rng, 5), q2 = random_dist(rng, 5);
    const double lam = rng.next_unit();
    const double lhs = stat_distance(mixture(p1, p2, lam), mixture(q1, q2, lam));
    const double rhs = lam * stat_distance(p1, q1) + (1.0 - lam) * stat_distance(p2, q2);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("deterministic processing cannot increase distance") {
  SplitRng rng(424);
  for (int trial = 0; trial < 50; ++trial) {
    const Dist p = random_dist(rng, 8), q = random_dist(rng, 8);
    std::vector<std::size_t> f(8);
    for (auto& v : f) v = rng.next_below(3);
    const double before = stat_distance(p, q);
    const double after = stat_distance(pushforward(p, f, 3), pushforward(q, f, 3));
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("entropy on pinned laws") {
  CHECK(entropy_nats(Dist::uniform(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(entropy_nats(Dist({0.0, 1.0})) == 0.0);
  CHECK(entropy_nats(Dist::uniform(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  for (std::size_t k : {3u, 7u, 100u})
    CHECK(entropy_nats(Dist::uniform(k)) == doctest::Approx(std::log(double(k))).epsilon(1e-12));
}

TEST_CASE("entropy is maximal at uniform") {
  SplitRng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Dist p = random_dist(rng, 9);
    CHECK(entropy_nats(p) <= std::log(9.0) + 1e-12);
  }
}

TEST_CASE("eps-inf-entropy at eps zero is min-entropy") {
  CHECK(eps_inf_entropy(Dist::uniform(8), 0.0) == doctest::Approx(std::log(8.0)).epsilon(1e-15));
  const Dist p({0.5, 0.25, 0.25});
  CHECK(eps_inf_entropy(p, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("eps-inf-entropy grows as mass is discarded") {
  const Dist p({0.5, 0.25, 0.25});
  // Discarding the heaviest atom (mass 0.5) leaves atoms of mass 1/4.
  CHECK(eps_inf_entropy(p, 0.5) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  // Just below the atom mass nothing can be discarded.
  CHECK(eps_inf_entropy(p, 0.499) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  SplitRng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Dist q = random_dist(rng, 6);
    double prev = -1.0;
    for (double eps : {0.0, 0.1, 0.3, 0.6, 0.9}) {
      const double h = eps_inf_entropy(q, eps);
      CHECK(h >= prev);
      prev = h;
    }
  }
  CHECK_THROWS_AS(eps_inf_entropy(p, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(eps_inf_entropy(p, -0.1), std::invalid_argument);
}

TEST_CASE("mass vectors are validated") {
  CHECK_THROWS_AS(Dist({}), std::invalid_argument);
  CHECK_THROWS_AS(Dist({0.5, -0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(Dist({0.5, 0.4}), std::invalid_argument);
  CHECK_NOTHROW(Dist({0.5, 0.5 + 0.5e-9}));  // inside the tolerance
  CHECK_THROWS_AS(stat_distance(Dist::uniform(2), Dist::uniform(3)), std::invalid_argument);
}

TEST_CASE("joint encode and decode are inverse, C order") {
  const JointDist j = JointDist::product({Dist::uniform(2), Dist::uniform(3), Dist::uniform(4)});
  CHECK(j.num_sources() == 2);
  CHECK(j.flat_size() == 24);
  const std::size_t symbols[] = {1, 2, 3};
  CHECK(j.encode(symbols) == 1 * 12 + 2 * 4 + 3);
  std::size_t back[3];
  for (std::size_t flat = 0; flat < 24; ++flat) {
    j.decode(flat, back);
    CHECK(j.encode(back) == flat);
  }
}

TEST_CASE("product mass factors and marginals recover the factors") {
  const Dist a({0.3, 0.7}), b({0.2, 0.5, 0.3});
  const JointDist j = JointDist::product({a, b});
  const std::size_t pt[] = {1, 2};
  CHECK(j.mass(pt) == doctest::Approx(0.7 * 0.3));
  CHECK(j.marginal_dist(0).masses()[0] == doctest::Approx(0.3));
  CHECK(j.marginal_dist(1).masses()[1] == doctest::Approx(0.5));
}

TEST_CASE("marginal keeps coordinates ascending") {
  // X_0 uniform bit, X_1 = X_0 (copy), X_2 independent uniform trit.
  std::vector<double> mass(2 * 2 * 3, 0.0);
  for (std::size_t x0 = 0; x0 < 2; ++x0)
    for (std::size_t x2 = 0; x2 < 3; ++x2) mass[x0 * 6 + x0 * 3 + x2] = 0.5 / 3.0;
  const JointDist j({2, 2, 3}, mass);

  const JointDist m01 = j.marginal(0b011);
  CHECK(m01.sizes().size() == 2);
  const std::size_t diag[] = {1, 1}, off[] = {0, 1};
  CHECK(m01.mass(diag) == doctest::Approx(0.5));
  CHECK(m01.mass(off) == 0.0);

  const JointDist m02 = j.marginal(0b101);
  CHECK(m02.alphabet_size(0) == 2);
  CHECK(m02.alphabet_size(1) == 3);
  const std::size_t pt[] = {1, 2};
  CHECK(m02.mass(pt) == doctest::Approx(0.5 / 3.0));

  CHECK_THROWS_AS(j.marginal(0), std::invalid_argument);
  CHECK_THROWS_AS(j.marginal(0b1000), std::invalid_argument);
}

TEST_CASE("support lists exactly the positive atoms") {
  const JointDist j({1, 4}, {0.5, 0.0, 0.25, 0.25});
  CHECK(j.support() == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("subset entropy satisfies the chain rule on products") {
  const Dist a({0.3, 0.7}), b = Dist::uniform(3);
  const JointDist j = JointDist::product({a, b});
  CHECK(subset_entropy_nats(j, 0b11) ==
        doctest::Approx(entropy_nats(a) + entropy_nats(b)).epsilon(1e-12));
  CHECK(subset_entropy_nats(j, 0b01) == doctest::Approx(entropy_nats(a)).epsilon(1e-12));
  CHECK(subset_entropy_nats(j, 0b10) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("from_source attaches a constant side coordinate") {
  const JointDist j = JointDist::from_source(Dist::uniform(4));
  CHECK(j.num_sources() == 1);
  CHECK(j.alphabet_size(0) == 1);
  CHECK(j.alphabet_size(1) == 4);
  CHECK(j.mass_at(2) == doctest::Approx(0.25));
}

TEST_CASE("block of length one reproduces the base law") {
  const JointDist base = JointDist::product({Dist::uniform(2), Dist({0.1, 0.9})});
  const BlockJoint b = block_extend(base, 1);
  CHECK(block_as_joint(b).masses()[3] == doctest::Approx(0.5 * 0.9));
  CHECK(b.support_count() == base.support().size());
}

TEST_CASE("block masses are products over time steps") {
  // Fair bit, n = 3: every block value has mass 1/8.
  const BlockJoint fair = block_extend(JointDist::from_source(Dist::uniform(2)), 3);
  const JointDist flat = block_as_joint(fair);
  CHECK(flat.alphabet_size(1) == 8);
  for (std::size_t v = 0; v < 8; ++v)
    CHECK(flat.mass_at(v) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));

  // Bernoulli(0.75), n = 2: block "11" has mass 9/16.
  const BlockJoint ber = block_extend(JointDist::from_source(Dist::bernoulli(0.75)), 2);
  const JointDist bflat = block_as_joint(ber);
  CHECK(bflat.mass_at(3) == doctest::Approx(9.0 / 16.0).epsilon(1e-15));
  CHECK(bflat.mass_at(0) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("block coordinates decode with time step zero most significant") {
  const BlockJoint b = block_extend(JointDist::from_source(Dist::uniform(4)), 3);
  CHECK(b.block_alphabet_size(1) == 64);
  std::size_t symbols[3];
  b.decode_coord(1, 1 * 16 + 2 * 4 + 3, symbols);
  CHECK(symbols[0] == 1);
  CHECK(symbols[1] == 2);
  CHECK(symbols[2] == 3);
}

TEST_CASE("block budget and alphabet overflow are hard errors") {
  CHECK_THROWS_AS(block_extend(JointDist::from_source(Dist::uniform(2)), 25,
                               std::uint64_t{1} << 24),
                  BudgetExceeded);
  // Support of size one keeps the block enumerable even for huge n, but the
  // coordinate alphabet itself overflows 64 bits.
  const BlockJoint thin = block_extend(JointDist::from_source(Dist({1.0, 0.0})), 70);
  CHECK(thin.support_count() == 1);
  CHECK_THROWS_AS(thin.block_alphabet_size(1), std::overflow_error);
}

TEST_CASE("spectrum of a uniform source") {
  const BlockJoint b = block_extend(JointDist::from_source(Dist::uniform(8)), 1);
  const std::uint64_t x[] = {0, 3};
  const SpectrumStats st = spectrum_stats(b, x);
  CHECK(st.subset(0b1) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(st.marginal(1) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("spectrum separates conditional from marginal statistics") {
  // X_1 = X_0: conditioned on X_0 the source is constant.
  const JointDist copy({2, 2}, {0.5, 0.0, 0.0, 0.5});
  const BlockJoint b = block_extend(copy, 1);
  const std::uint64_t x[] = {1, 1};
  const SpectrumStats st = spectrum_stats(b, x);
  CHECK(st.subset(0b1) == doctest::Approx(1.0));
  CHECK(st.marginal(1) == doctest::Approx(2.0));
}

TEST_CASE("spectrum multiplies across time steps and subsets") {
  const JointDist base =
      JointDist::product({Dist::uniform(1), Dist::uniform(2), Dist({0.25, 0.75})});
  const BlockJoint b = block_extend(base, 2);
  // x1 block 01, x2 block 10.
  const std::uint64_t x[] = {0, 1, 2};
  const SpectrumStats st = spectrum_stats(b, x);
  CHECK(st.subset(0b01) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(st.subset(0b10) == doctest::Approx(1.0 / (0.75 * 0.25)).epsilon(1e-12));
  CHECK(st.subset(0b11) == doctest::Approx(4.0 / (0.75 * 0.25)).epsilon(1e-12));
  CHECK(st.marginal(1) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("spectrum is infinite off the support") {
  const BlockJoint b = block_extend(JointDist::from_source(Dist({1.0, 0.0})), 1);
  const std::uint64_t x[] = {0, 1};
  const SpectrumStats st = spectrum_stats(b, x);
  CHECK(std::isinf(st.subset(0b1)));
}

TEST_CASE("typicality probability on pinned cases") {
  // Uniform 16: the spectrum is 16 everywhere.
  const BlockJoint u16 = block_extend(JointDist::from_source(Dist::uniform(16)), 1);
  const std::uint64_t two[] = {2}, thirty_two[] = {32};
  // 16 > 4 * 2: every point is typical.
  CHECK(typicality_prob(u16, 4.0, two) == 0.0);
  // 16 <= 0.9 * 32: every point is atypical.
  CHECK(typicality_prob(u16, 0.9, thirty_two) == 1.0);

  // Bernoulli(0.75) squared: only block "11" (mass 9/16, spectrum 16/9) falls
  // at or below 1.5 * 2.
  const BlockJoint ber = block_extend(JointDist::from_source(Dist::bernoulli(0.75)), 2);
  CHECK(typicality_prob(ber, 1.5, two) == doctest::Approx(9.0 / 16.0).epsilon(1e-15));
}

TEST_CASE("typicality probability is nondecreasing in r and s") {
  const JointDist base =
      JointDist::product({Dist({0.5, 0.5}), Dist({0.7, 0.3}), Dist({0.6, 0.2, 0.2})});
  const BlockJoint b = block_extend(base, 3);
  const std::uint64_t out[] = {2, 2};
  double prev = -1.0;
  for (double r : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double pr = typicality_prob(b, r, out);
    CHECK(pr >= prev);
    CHECK(pr >= 0.0);
    CHECK(pr <= 1.0);
    prev = pr;
  }
  prev = -1.0;
  for (double s : {0.5, 1.0, 2.0, 4.0}) {
    const double pr = typicality_prob(b, 1.0, out, s);
    CHECK(pr >= prev);
    prev = pr;
  }
  // The joint constraint can only exclude more than the subset ones alone.
  CHECK(typicality_prob(b, 1.0, out, 2.0) >= typicality_prob(b, 1.0, out));
}

TEST_CASE("marginal box joins the typical set when s is given") {
  const BlockJoint u4 = block_extend(JointDist::from_source(Dist::uniform(4)), 1);
  const std::uint64_t out[] = {2};
  CHECK(typicality_prob(u4, 1.0, out) == 0.0);         // 4 > 2
  CHECK(typicality_prob(u4, 1.0, out, 2.0) == 0.0);    // 4 > 2 both tests
  CHECK(typicality_prob(u4, 1.0, out, 5.0) == 1.0);    // 4 <= 5 marginal test
  CHECK_THROWS_AS(typicality_prob(u4, 0.0, out), std::invalid_argument);
  CHECK_THROWS_AS(typicality_prob(u4, 1.0, out, 0.0), std::invalid_argument);
}

TEST_CASE("block support materializes every positive atom once") {
  const JointDist base({2, 2}, {0.4, 0.1, 0.0, 0.5});
  const BlockJoint b = block_extend(base, 2);
  const BlockSupport sup(b);
  CHECK(sup.size() == 9);  // 3 support atoms squared
  double total = 0.0;
  for (std::size_t i = 0; i < sup.size(); ++i) total += sup.mass(i);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // Distinct x0 block values: 00, 01, 10, 11 restricted to per-step support.
  CHECK(sup.distinct_x0() == 4);
  double x0_total = 0.0;
  for (std::size_t id = 0; id < sup.distinct_x0(); ++id) x0_total += sup.x0_mass(id);
  CHECK(x0_total == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 0; i < sup.size(); ++i) CHECK(sup.x0_id(i) < sup.distinct_x0());
}

}  // TEST_SUITE
