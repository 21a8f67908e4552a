#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"

#include "cbias/errors.hpp"
#include "cbias/group.hpp"

using namespace cbias;

namespace {

const Family kFamilies[] = {Family::Dihedral, Family::Quaternion};

// Orbit of g under conjugation, by enumeration.
std::set<Element> orbit(const Group& G, Element g) {
  std::set<Element> out;
  for (Element x : G.elements()) out.insert(G.multiply(G.multiply(x, g), G.inverse(x)));
  return out;
}

}  // namespace

TEST_CASE("order-8 groups have five classes") {
  for (Family f : kFamilies) {
    Group G({f, 3});
    CHECK(G.order() == 8);
    CHECK(G.class_count() == 5);
  }
  CHECK_THROWS_AS(Group({Family::Dihedral, 2}), ConfigError);
  CHECK_THROWS_AS(Group({Family::Quaternion, 21}), ConfigError);
}

TEST_CASE("defining relations") {
  for (int n = 3; n <= 8; ++n) {
    Group D({Family::Dihedral, n});
    const Element s = D.flip(0), r = D.rotation(1);
    CHECK(D.multiply(D.multiply(s, r), s) == D.rotation(-1));
    CHECK(D.multiply(s, s) == D.identity());
    CHECK(D.power(r, D.rotation_order()) == D.identity());

    Group H({Family::Quaternion, n});
    const Element y = H.flip(0), x = H.rotation(1);
    CHECK(H.multiply(y, y) == H.rotation(std::int64_t{1} << (n - 2)));
    CHECK(H.multiply(H.multiply(y, x), H.inverse(y)) == H.rotation(-1));
    for (Element g : {D.identity(), r, s, D.flip(5)}) CHECK(D.multiply(g, D.identity()) == g);
  }
}

TEST_CASE("associativity and inverses, exhaustive") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 5; ++n) {
      Group G({f, n});
      const auto els = G.elements();
      CHECK(els.size() == G.order());
      for (Element a : els) {
        CHECK(G.multiply(a, G.inverse(a)) == G.identity());
        CHECK(G.multiply(G.inverse(a), a) == G.identity());
        for (Element b : els)
          for (Element c : els) REQUIRE(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
      }
    }
  Group G({Family::Quaternion, 6});
  for (Element a : G.elements()) CHECK(G.multiply(a, G.inverse(a)) == G.identity());
}

TEST_CASE("class partition matches conjugation orbits") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 8; ++n) {
      Group G({f, n});
      std::map<ClassLabel, std::set<Element>> seen;
      for (Element g : G.elements()) seen[G.class_of(g)].insert(g);
      CHECK(seen.size() == G.class_count());
      std::uint64_t total = 0;
      for (ClassLabel c : G.classes()) {
        const auto members = G.class_members(c);
        const std::set<Element> as_set(members.begin(), members.end());
        CHECK(as_set == seen[c]);
        CHECK(as_set.size() == G.class_size(c));
        CHECK(orbit(G, G.representative(c)) == as_set);
        total += G.class_size(c);
      }
      CHECK(total == G.order());
    }
}

TEST_CASE("class sizes and counts up to n = 12") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 12; ++n) {
      Group G({f, n});
      CHECK(G.class_count() == (std::size_t{1} << (n - 2)) + 3);
      std::uint64_t total = 0;
      for (ClassLabel c : G.classes()) total += G.class_size(c);
      CHECK(total == G.order());
      CHECK(G.class_size(ClassLabel::flip_even()) == (std::uint64_t{1} << (n - 2)));
    }
}

TEST_CASE("named class examples") {
  for (int n = 3; n <= 8; ++n) {
    Group D({Family::Dihedral, n});
    CHECK(D.class_of(D.rotation(std::int64_t{1} << (n - 2))) == ClassLabel::minus_one());
    Group H({Family::Quaternion, n});
    CHECK(H.class_of(H.multiply(H.rotation(1), H.flip(0))) == ClassLabel::flip_odd());
    for (std::uint32_t k = 1; k < D.rotation_order(); ++k) {
      if (k == D.half_rotation()) continue;
      const auto label = D.class_of(D.rotation(k));
      CHECK(label == ClassLabel::power(std::min(k, D.rotation_order() - k)));
      CHECK(label == D.class_of(D.rotation(D.rotation_order() - k)));
    }
  }
}

TEST_CASE("square root counts against squaring every element") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 8; ++n) {
      Group G({f, n});
      std::map<ClassLabel, std::uint64_t> count;
      for (Element g : G.elements()) count[G.class_of(G.multiply(g, g))] += 1;
      for (ClassLabel c : G.classes()) CHECK(G.square_root_count(c) == count[c]);
    }
  for (int n = 3; n <= 10; ++n) {
    Group H({Family::Quaternion, n});
    CHECK(H.square_root_count(ClassLabel::minus_one()) == (std::uint64_t{1} << (n - 1)) + 2);
    CHECK(H.square_root_count(ClassLabel::one()) == 2);
    Group D({Family::Dihedral, n});
    CHECK(D.square_root_count(ClassLabel::flip_even()) == 0);
  }
}

TEST_CASE("every x^k y squares to -1") {
  for (int n = 3; n <= 8; ++n) {
    Group H({Family::Quaternion, n});
    for (std::uint32_t k = 0; k < H.rotation_order(); ++k)
      CHECK(H.multiply(H.flip(k), H.flip(k)) == H.minus_one());
  }
}

TEST_CASE("fusion equals the union of conjugates") {
  for (Family f : kFamilies)
    for (int n = 3; n <= 6; ++n) {
      Tower T({f, n});
      const Group& top = T.top();
      for (int i = 3; i <= n; ++i) {
        const Group& sub = T.level(i);
        for (ClassLabel c : sub.classes()) {
          std::set<Element> fused;
          for (Element h : sub.class_members(c)) {
            const auto o = orbit(top, T.embed(i, h));
            fused.insert(o.begin(), o.end());
          }
          const ClassLabel plus = T.fuse(i, c);
          const auto members = top.class_members(plus);
          CHECK(fused == std::set<Element>(members.begin(), members.end()));
        }
        // Distinct classes fuse to distinct classes except the two flip classes below the top.
        for (ClassLabel a : sub.classes())
          for (ClassLabel b : sub.classes()) {
            if (!(a < b)) continue;
            const bool flips = a.kind == ClassLabel::Kind::FlipEven && b.kind == ClassLabel::Kind::FlipOdd;
            CHECK((T.fuse(i, a) == T.fuse(i, b)) == (flips && i < n));
          }
      }
      CHECK(T.fuse(3, ClassLabel::one()) == ClassLabel::one());
    }
  Tower T({Family::Quaternion, 7});
  for (int i = 3; i < 7; ++i) CHECK(T.fuse(i, ClassLabel::flip_odd()) == ClassLabel::flip_even());
}

TEST_CASE("names round-trip") {
  for (Family f : kFamilies) {
    Group G({f, 6});
    for (ClassLabel c : G.classes()) CHECK(parse_class(f, class_name(f, c)) == c);
    for (Element g : G.elements()) CHECK(G.parse_element(G.element_name(g)) == g);
  }
  CHECK(class_name(Family::Quaternion, ClassLabel::flip_odd()) == "Cxy");
  CHECK(parse_family("Q") == Family::Quaternion);
  CHECK_THROWS_AS(parse_family("cyclic"), ConfigError);
}
