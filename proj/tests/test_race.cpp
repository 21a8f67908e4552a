#include <cmath>
#include <random>
#include <set>

#include "doctest.h"

#include "cbias/claims.hpp"
#include "cbias/errors.hpp"
#include "cbias/race.hpp"

using namespace cbias;

namespace {

const Family kFamilies[] = {Family::Dihedral, Family::Quaternion};
const std::uint64_t kOddPrimes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};

std::int64_t pow2(int e) { return std::int64_t{1} << e; }

// Brute-force oracle: square roots by enumeration, z from the float character table.
double brute_mean(const Group& g, ClassLabel c1, ClassLabel c2, const std::map<CharacterId, int>& orders) {
  auto s = [&](ClassLabel c) {
    int roots = 0;
    for (const Element x : g.elements())
      if (g.class_of(g.multiply(x, x)) == c) ++roots;
    return double(roots) / double(g.class_size(c));
  };
  auto z = [&](ClassLabel c) {
    double t = 0;
    for (const auto& [id, ord] : orders)
      if (!id.is_trivial()) t += 2.0 * ord * character_value_double(g, id, g.representative(c));
    return t;
  };
  return s(c2) - s(c1) + z(c2) - z(c1);
}

}  // namespace

TEST_CASE("z values") {
  const Group h8({Family::Quaternion, 3});
  std::map<CharacterId, int> none;
  for (CharacterId id : irreducible_ids(h8)) none[id] = 0;
  CHECK(z_value(h8, ClassLabel::one(), none) == 0);

  for (int n = 3; n <= 8; ++n)
    for (int i = 3; i <= n; ++i) {
      const Group g({Family::Quaternion, i});
      const auto orders = vanishing_orders(Family::Quaternion, -1, i, n);
      const auto z1 = z_value(g, ClassLabel::one(), orders);
      const auto zm = z_value(g, ClassLabel::minus_one(), orders);
      CHECK(z1 == pow2(n - 1));
      CHECK(zm - z1 == -pow2(n));
      CHECK(z_value(g, ClassLabel::flip_even(), orders) == 0);
      CHECK(z_value(g, ClassLabel::flip_odd(), orders) == 0);
      for (std::uint32_t k = 1; k < g.rotation_order() / 4; ++k) CHECK(z_value(g, ClassLabel::power(k), orders) == 0);
    }
}

TEST_CASE("z values stay exact at large n") {
  const int n = 20, i = 18;
  const Group g({Family::Quaternion, i});
  const auto orders = vanishing_orders(Family::Quaternion, -1, i, n);
  CHECK(z_value(g, ClassLabel::one(), orders) == pow2(n - 1));
  CHECK(z_value(g, ClassLabel::power(12345), orders) == 0);
}

TEST_CASE("H8 means") {
  const GroupKind h8{Family::Quaternion, 3};
  for (int o = 0; o <= 2; ++o) {
    RaceSpec spec = make_race(h8, 3, ClassLabel::one(), ClassLabel::minus_one());
    spec.orders = std::map<CharacterId, int>{{CharacterId::psi(1), o}};
    CHECK(race_mean(spec) == 4 * (1 - 2 * o));
    for (const H8Row& row : h8_table(o)) {
      spec.c1 = row.a;
      spec.c2 = row.b;
      CHECK(race_mean(spec) == row.paper_mean);
    }
  }
  // LI+ with W = -1 forces o = 1.
  CHECK(race_mean(make_race(h8, 3, ClassLabel::one(), ClassLabel::minus_one(), -1)) == -4);
  CHECK(race_mean(make_race(h8, 3, ClassLabel::one(), ClassLabel::minus_one(), 1)) == 4);
}

TEST_CASE("quaternion C1 vs C-1 over the tower") {
  for (int n = 3; n <= 8; ++n)
    for (int i = 3; i <= n; ++i)
      for (int W : {1, -1}) {
        const auto m = race_mean(make_race({Family::Quaternion, n}, i, ClassLabel::one(), ClassLabel::minus_one(), W));
        CHECK(m == -pow2(n - 1) * (1 - W) + pow2(i - 1));
      }
}

TEST_CASE("fused classes are undefined") {
  const GroupKind q{Family::Quaternion, 5};
  CHECK(race_mean(make_race(q, 5, ClassLabel::flip_even(), ClassLabel::flip_odd())) == 0);
  for (int i = 3; i < 5; ++i) {
    const RaceSpec spec = make_race(q, i, ClassLabel::flip_even(), ClassLabel::flip_odd());
    CHECK_THROWS_AS(race_mean(spec), RaceUndefined);
    CHECK_THROWS_AS(race_weights(spec), RaceUndefined);
  }
  CHECK_THROWS_AS(race_mean(make_race(q, 5, ClassLabel::one(), ClassLabel::one())), ConfigError);
  CHECK_THROWS_AS(race_mean(make_race(q, 3, ClassLabel::one(), ClassLabel::power(3))), ConfigError);
}

TEST_CASE("mean table examples") {
  for (int n = 3; n <= 6; ++n)
    for (int i = 3; i <= n; ++i)
      for (int W : {1, -1}) {
        const auto u = pow2(n - 2) * (1 - W);
        const GroupKind q{Family::Quaternion, n}, d{Family::Dihedral, n};
        CHECK(race_mean(make_race(q, i, ClassLabel::one(), ClassLabel::flip_even(), W)) == -u - 2);
        CHECK(race_mean(make_race(q, i, ClassLabel::one(), ClassLabel::flip_odd(), W)) == -u - 2);
        CHECK(race_mean(make_race(d, i, ClassLabel::minus_one(), ClassLabel::flip_even())) == -2);
        CHECK(race_mean(make_race(d, i, ClassLabel::one(), ClassLabel::minus_one())) == -pow2(i - 1));
      }
}

TEST_CASE("mean tables against the printed closed forms") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 8; ++n)
      for (int i = 3; i <= n; ++i)
        for (int W : {1, -1}) {
          const Tower tower({f, n});
          for (const MeanRow& row : mean_table(f, n, i, W)) {
            REQUIRE(row.status != RowStatus::Mismatch);
            REQUIRE(row.paper.has_value());
            if (row.status == RowStatus::Undefined) {
              CHECK(i < n);
              CHECK(row.c1.kind == ClassLabel::Kind::FlipEven);
              CHECK(row.c2.kind == ClassLabel::Kind::FlipOdd);
              continue;
            }
            const bool oq = known_open_question(f, row.c1, row.c2);
            CHECK((row.status == RowStatus::OpenQuestion) == oq);
            if (!oq) continue;
            if (f == Family::Dihedral) {
              CHECK(*row.paper == *row.formula + 1);
            } else {
              const std::int64_t sign = row.c2.k % 2 ? -1 : 1;
              CHECK(*row.paper - *row.formula == -2 * sign);
            }
          }
        }
}

TEST_CASE("means against a brute-force oracle") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 6; ++n)
      for (int i = 3; i <= n; ++i)
        for (int W : {1, -1}) {
          const Tower tower({f, n});
          const Group& g = tower.level(i);
          const auto orders = vanishing_orders(f, W, i, n);
          for (ClassLabel a : g.classes())
            for (ClassLabel b : g.classes()) {
              if (a == b || !race_defined(tower, i, a, b)) continue;
              const auto m = race_mean(make_race({f, n}, i, a, b, W));
              CHECK(double(m) == doctest::Approx(brute_mean(g, a, b, orders)).epsilon(1e-9));
              CHECK(race_mean(make_race({f, n}, i, b, a, W)) == -m);
              const bool central = a.kind == ClassLabel::Kind::One || a.kind == ClassLabel::Kind::MinusOne ||
                                   b.kind == ClassLabel::Kind::One || b.kind == ClassLabel::Kind::MinusOne;
              if (!central) CHECK(m == square_root_ratio(g, b) - square_root_ratio(g, a));
            }
        }
}

TEST_CASE("H8 variances") {
  const GroupKind h8{Family::Quaternion, 3};
  const std::map<CharacterId, double> b0 = {{CharacterId::chi(0), 0.7}, {CharacterId::chi(1), 1.3},
                                            {CharacterId::chi(2), 2.9}, {CharacterId::chi(3), 5.1},
                                            {CharacterId::psi(1), 11.0}};
  auto two_sided = [&](CharacterId id) { return 2.0 * b0.at(id); };
  for (const H8Row& row : h8_table(1)) {
    const RaceSpec spec = make_race(h8, 3, row.a, row.b, -1);
    double expect = 0;
    for (const auto& [id, c] : row.paper_variance) expect += c * two_sided(id);
    CHECK(race_variance(spec, b0) == doctest::Approx(expect).epsilon(1e-14));
    const auto w = race_weights(spec);
    for (const auto& [id, x] : w) {
      const auto it = row.paper_variance.find(id);
      CHECK(x * x == doctest::Approx(it == row.paper_variance.end() ? 0.0 : double(it->second)));
    }
  }
  const RaceSpec ij = make_race(h8, 3, ClassLabel::power(1), ClassLabel::flip_even());
  CHECK(race_variance(ij, b0) == doctest::Approx(4 * two_sided(CharacterId::chi(1)) + 4 * two_sided(CharacterId::chi(2))));
}

TEST_CASE("uniform B0 gives 2 sum w^2 against the character table") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 6; ++n) {
      const Tower tower({f, n});
      const CharacterTable table(tower.top());
      std::map<CharacterId, double> ones;
      for (CharacterId id : irreducible_ids(tower.top())) ones[id] = 1.0;
      for (int i = 3; i <= n; ++i) {
        const Group& g = tower.level(i);
        for (ClassLabel a : g.classes())
          for (ClassLabel b : g.classes()) {
            if (a == b || !race_defined(tower, i, a, b)) continue;
            const auto A = tower.fuse(i, a), B = tower.fuse(i, b);
            double brute = 0;
            for (const Character& ch : table.characters()) {
              const double d = ch.value(tower.top(), B).to_double() - ch.value(tower.top(), A).to_double();
              brute += 2 * d * d;
            }
            const RaceSpec spec = make_race({f, n}, i, a, b);
            const double v = race_variance(spec, ones);
            CHECK(v == doctest::Approx(brute).epsilon(1e-12));
            CHECK(v > 0);
            CHECK(race_variance(make_race({f, n}, i, b, a), ones) == v);
          }
      }
    }
}

TEST_CASE("weights: exact zeros at large n") {
  const Tower tower({Family::Quaternion, 12});
  const auto w = race_weights(tower, 12, ClassLabel::one(), ClassLabel::minus_one());
  int nonzero = 0;
  for (const auto& [id, x] : w)
    if (x != 0.0) {
      ++nonzero;
      CHECK(x == doctest::Approx(4.0).epsilon(1e-14));
      CHECK(id.kind == CharacterId::Kind::Psi);
      CHECK(id.index % 2 == 1);
    }
  CHECK(nonzero == pow2(12 - 3));
  // psi_j at x^k vs x^l with k = -l modulo the rotation order is identical: the weight is 0, not 1e-16.
  const auto w2 = race_weights(tower, 12, ClassLabel::power(3), ClassLabel::power(5));
  int zeros = 0;
  for (const auto& [id, x] : w2) zeros += x == 0.0;
  CHECK(zeros >= 4);
}

TEST_CASE("bias factor") {
  CHECK(bias_factor(0, 3.0) == 0.0);
  CHECK_THROWS_AS(bias_factor(1, 0.0), ConfigError);
  const GroupKind h8{Family::Quaternion, 3};
  const RaceSpec spec = make_race(h8, 3, ClassLabel::one(), ClassLabel::minus_one(), -1);
  const double b0psi = 3.7;
  std::map<CharacterId, double> b0 = {{CharacterId::psi(1), b0psi}};
  const double B = bias_factor(double(race_mean(spec)), race_variance(spec, b0));
  CHECK(B == doctest::Approx(-1.0 / (std::sqrt(2.0) * std::sqrt(b0psi))).epsilon(1e-14));
  b0[CharacterId::psi(1)] *= 4;
  const double B4 = bias_factor(double(race_mean(spec)), race_variance(spec, b0));
  CHECK(B4 == doctest::Approx(B / 2).epsilon(1e-14));
}

TEST_CASE("term lists") {
  const GroupKind h8{Family::Quaternion, 3};
  {
    // psi weight 4 on (C1, C-1); one zero at sqrt(3)/2 gives 2 * 4 / 1.
    const RaceSpec spec = make_race(h8, 3, ClassLabel::one(), ClassLabel::minus_one());
    ZeroSet zs;
    zs.ordinates = {std::sqrt(3.0) / 2};
    zs.t_max = 1.0;
    const RaceModel m = term_list(spec, {{CharacterId::psi(1), zs}});
    REQUIRE(m.terms.size() == 1);
    CHECK(m.terms[0] == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(m.mean == 4);
  }
  {
    const RaceSpec spec = make_race(h8, 3, ClassLabel::one(), ClassLabel::flip_even(), -1);
    std::map<CharacterId, ZeroSet> sets;
    std::uint64_t seed = 5;
    for (CharacterId id : irreducible_ids(Group(h8))) {
      const ZeroCountModel model{3.0 + seed, character_degree(id)};
      sets[id] = sample_zero_set(character_name(id), model, 200.0, seed++);
    }
    const RaceModel m = term_list(spec, sets);
    CHECK(std::is_sorted(m.terms.rbegin(), m.terms.rend()));
    double sr2 = 0;
    for (double r : m.terms) sr2 += r * r;
    const auto b0s = b0_map(sets);
    double sw2b0 = 0;
    for (const auto& [id, w] : m.weights) sw2b0 += w * w * b0s.at(id);
    CHECK(sr2 == doctest::Approx(4 * sw2b0).epsilon(1e-12));
    CHECK(m.explicit_variance() == doctest::Approx(race_variance(spec, b0s)).epsilon(1e-12));
    CHECK(m.tail_variance > 0);
    CHECK(m.variance == doctest::Approx(m.explicit_variance() + m.tail_variance));

    sets.erase(CharacterId::psi(1));
    CHECK_THROWS_AS(term_list(spec, sets), ConfigError);
    // chi_j has zero weight on (C1, Cj), so its set is never needed.
    sets[CharacterId::psi(1)] = sets.begin()->second;
    sets.erase(CharacterId::chi(2));
    CHECK_NOTHROW(term_list(spec, sets));
  }
}

TEST_CASE("variance bracket on explicit tame scenarios") {
  // b0(lambda) := log A(lambda), the comparable quantity. Pinned: Var <= 16 log|d|, Var >= log|d| / 4^n.
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const Family f = kFamilies[trial % 2];
    const int n = 3 + trial % 4;
    const Group G({f, n});
    std::vector<std::uint64_t> pool(std::begin(kOddPrimes), std::end(kOddPrimes));
    std::shuffle(pool.begin(), pool.end(), rng);
    ArithmeticScenario sc;
    sc.kind = {f, n};
    RamificationData ram;
    const auto els = G.elements();
    for (int k = 0; k < 1 + int(rng() % 4); ++k) {
      Element g = els[rng() % els.size()];
      if (g == G.identity()) g = G.rotation(1);
      ram.primes.push_back({pool[k], std::log(double(pool[k])), {g}});
    }
    sc.ramification = ram;
    const auto logA = log_conductors(sc);
    const double log_d = conductor_discriminant(G, ram).log_abs;
    for (int i = 3; i <= n; ++i) {
      RaceSpec spec = make_race({f, n}, i, ClassLabel::one(), ClassLabel::minus_one());
      spec.scenario.ramification = ram;
      const double v = race_variance(spec, logA);
      CHECK(v <= 16 * log_d + 1e-9);
      CHECK(v >= log_d / std::pow(4.0, n));
    }
  }
}
