#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cbias/characters.hpp"
#include "cbias/errors.hpp"

using namespace cbias;

namespace {

const Family kFamilies[] = {Family::Dihedral, Family::Quaternion};

bool contains(const std::vector<CharacterId>& v, CharacterId id) {
  return std::find(v.begin(), v.end(), id) != v.end();
}

}  // namespace

TEST_CASE("table examples") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 8; ++n) {
      Group G({f, n});
      CharacterTable t(G);
      CHECK(t.characters().size() == (std::size_t{1} << (n - 2)) + 3);
      CHECK(t[CharacterId::psi(1)].value(G, ClassLabel::one()).exact() == CyclotomicInt::integer(n - 1, 2));
      for (std::uint32_t k = 1; k < G.half_rotation(); ++k)
        CHECK(t[CharacterId::chi(2)].value(G, ClassLabel::power(k)).exact() ==
              CyclotomicInt::integer(n - 1, (k % 2) ? -1 : 1));
      for (const auto& chi : t.characters()) {
        if (chi.degree == 2) CHECK(chi.value(G, ClassLabel::flip_even()).exact().is_zero());
        CHECK(chi.fs_type != FsType::Unitary);
      }
      // -1 column: 2(-1)^j
      for (std::uint32_t j = 1; j < G.half_rotation(); ++j)
        CHECK(t[CharacterId::psi(j)].value(G, ClassLabel::minus_one()).to_double() == ((j % 2) ? -2.0 : 2.0));
    }
}

TEST_CASE("float view equals 2 cos") {
  Group G({Family::Quaternion, 9});
  for (std::uint32_t j = 1; j < G.half_rotation(); j += 7)
    for (std::uint32_t e = 0; e < G.rotation_order(); e += 3) {
      const double expect = 2.0 * std::cos(2.0 * std::numbers::pi * j * e / G.rotation_order());
      CHECK(std::abs(character_value_double(G, CharacterId::psi(j), G.rotation(e)) - expect) < 1e-12);
      CHECK(std::abs(character_value(G, CharacterId::psi(j), G.rotation(e)).exact().real() - expect) < 1e-12);
    }
}

TEST_CASE("degree sum of squares") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 12; ++n) {
      Group G({f, n});
      std::uint64_t s = 0;
      for (CharacterId id : irreducible_ids(G)) s += character_degree(id) * character_degree(id);
      CHECK(s == G.order());
    }
}

TEST_CASE("row orthogonality, exact") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 8; ++n) {
      Group G({f, n});
      CharacterTable t(G);
      std::vector<ClassFunction> rows;
      for (const auto& chi : t.characters()) rows.push_back(chi.exact_values());
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a; b < rows.size(); ++b)
          REQUIRE(inner_product(G, rows[a], rows[b]) == Rational(a == b ? 1 : 0));
    }
  Group G({Family::Dihedral, 6});
  CharacterTable t(G);
  CHECK(inner_product(G, t[CharacterId::psi(1)].exact_values(), t[CharacterId::psi(2)].exact_values()) == Rational(0));
}

TEST_CASE("column orthogonality, exact") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 8; ++n) {
      Group G({f, n});
      CharacterTable t(G);
      const auto& cls = G.classes();
      for (std::size_t a = 0; a < cls.size(); ++a)
        for (std::size_t b = a; b < cls.size(); ++b) {
          CyclotomicInt s(n - 1);
          for (const auto& chi : t.characters()) s += chi.values[a].exact() * chi.values[b].exact().conj();
          const std::int64_t expect = a == b ? static_cast<std::int64_t>(G.order() / G.class_size(cls[a])) : 0;
          REQUIRE(s == CyclotomicInt::integer(n - 1, expect));
        }
    }
}

TEST_CASE("Frobenius-Schur brute force matches closed form") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 8; ++n) {
      Group G({f, n});
      CharacterTable t(G);
      for (const auto& chi : t.characters()) {
        const int brute = frobenius_schur_brute_force(G, chi);
        CHECK(brute == frobenius_schur_closed_form(f, chi.id));
        CHECK(chi.fs_type == fs_type_from_index(brute));
        const bool symplectic = f == Family::Quaternion && chi.id.kind == CharacterId::Kind::Psi && chi.id.index % 2 == 1;
        CHECK(brute == (symplectic ? -1 : 1));
      }
    }
}

TEST_CASE("faithfulness") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 8; ++n) {
      Group G({f, n});
      CharacterTable t(G);
      for (const auto& chi : t.characters()) {
        CHECK(is_faithful(G, chi) == chi.faithful);
        CHECK(chi.faithful == (chi.id.kind == CharacterId::Kind::Psi && chi.id.index % 2 == 1));
      }
      CHECK(is_faithful(G, t[CharacterId::psi(1)]));
      CHECK_FALSE(is_faithful(G, t[CharacterId::chi(0)]));
      if (n >= 4) CHECK_FALSE(is_faithful(G, t[CharacterId::psi(2)]));
    }
}

TEST_CASE("closed-form induction matches brute force") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 6; ++n) {
      Tower T({f, n});
      CharacterTable top(T.top());
      for (int i = 3; i <= n; ++i) {
        CharacterTable sub(T.level(i));
        for (const auto& chi : sub.characters()) {
          const auto closed = induce(T, i, chi.id);
          const auto brute = decompose(top, i, chi.id, induce_class_function(T, i, chi));
          CHECK(closed == brute);
          CHECK(closed.degree() == (1 << (n - i)) * chi.degree);
        }
      }
    }
}

TEST_CASE("induction of psi_k by residues") {
  Tower T({Family::Quaternion, 8});
  CharacterTable top(T.top());
  for (int i = 3; i < 8; ++i) {
    const std::uint32_t mod = 1u << (i - 1);
    for (std::uint32_t k = 1; k < mod / 2; ++k) {
      const auto ind = induce(T, i, CharacterId::psi(k));
      CHECK(ind.degree() == (1 << (8 - i + 1)));
      for (std::uint32_t j = 1; j < T.top().half_rotation(); ++j) {
        const bool hit = (j + k) % mod == 0 || (j + mod - k) % mod == 0;
        CHECK((ind.components.count(CharacterId::psi(j)) == 1) == hit);
      }
    }
  }
  CHECK(induce(T, 8, CharacterId::chi(3)).components == std::map<CharacterId, int>{{CharacterId::chi(3), 1}});
}

TEST_CASE("Frobenius reciprocity") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 6; ++n) {
      Tower T({f, n});
      CharacterTable top(T.top());
      for (int i = 3; i <= n; ++i) {
        CharacterTable sub(T.level(i));
        for (const auto& chi : sub.characters()) {
          const auto ind = induce_class_function(T, i, chi);
          for (const auto& lambda : top.characters()) {
            const auto lhs = inner_product(T.top(), ind, lambda.exact_values());
            const auto rhs = inner_product(T.level(i), chi.exact_values(),
                                           restrict_to_level(T, i, lambda.exact_values()));
            CHECK(lhs == rhs);
          }
        }
      }
    }
}

TEST_CASE("S/R partition") {
  for (Family f : kFamilies)
    for (int n = 4; n <= 9; ++n) {
      Tower T({f, n});
      const auto top = sr_partition(T, n);
      CHECK(top.r.empty());
      CHECK(top.b1 == 0);
      CHECK(top.b2 == 0);
      CHECK_FALSE(top.paper_quoted.has_value());
      for (int i = 3; i < n; ++i) {
        const auto p = sr_partition(T, i);
        CHECK(contains(p.r, CharacterId::chi(2)));
        CHECK(contains(p.r, CharacterId::chi(3)));
        CHECK(contains(p.r, CharacterId::chi(1)) == (i <= n - 2));
        CHECK(p.b1 == 1);
        CHECK(p.b2 == (i <= n - 2 ? 3 : 2));
        CHECK(p.paper_quoted == std::pair{2, 2});
        for (std::uint32_t k = 1; k < (1u << (i - 2)); ++k) CHECK(contains(p.s, CharacterId::psi(k)));
      }
    }
}

TEST_CASE("psi_k at level i lies in S by brute-force inductions") {
  for (Family f : kFamilies)
    for (int n = 4; n <= 6; ++n) {
      Tower T({f, n});
      CharacterTable top(T.top());
      for (int i = 3; i <= n; ++i) {
        CharacterTable sub(T.level(i));
        std::vector<ClassFunction> inds;
        for (const auto& chi : sub.characters()) inds.push_back(induce_class_function(T, i, chi));
        for (std::size_t a = 0; a < inds.size(); ++a) {
          if (sub.characters()[a].id.kind != CharacterId::Kind::Psi) continue;
          for (std::size_t b = 0; b < inds.size(); ++b)
            if (a != b) CHECK(inner_product(T.top(), inds[a], inds[b]) == Rational(0));
        }
      }
    }
}

TEST_CASE("symplectic value sums vanish") {
  CHECK(symplectic_value_sum(3, 1).is_zero());
  CHECK(symplectic_value_sum(5, 3).is_zero());
  for (int i = 3; i <= 10; ++i)
    for (std::int64_t k = 1; k < (std::int64_t{1} << (i - 2)); ++k) {
      const auto s = symplectic_value_sum(i, k);
      REQUIRE(s.is_zero());
      double fsum = 0;
      for (std::int64_t j = 1; j < (std::int64_t{1} << (i - 2)); j += 2)
        fsum += 2 * std::cos(2 * std::numbers::pi * double(j * k) / double(std::int64_t{1} << (i - 1)));
      CHECK(std::abs(fsum) < 1e-10);
    }
  CHECK_THROWS_AS(symplectic_value_sum(4, 4), ConfigError);
}

TEST_CASE("names and csv") {
  CHECK(parse_character("psi_3") == CharacterId::psi(3));
  CHECK(parse_character("chi2") == CharacterId::chi(2));
  CHECK_THROWS_AS(parse_character("chi7"), ConfigError);
  Group G({Family::Dihedral, 4});
  const auto csv = CharacterTable(G).to_csv();
  CHECK(csv.starts_with("character,C1,C-1,Cr^1,Cr^2,Cr^3,Cs,Crs\n"));
  CHECK(csv.find("psi1,2,-2,1.4142135623730951,0,-1.4142135623730951,0,0") != std::string::npos);
}
