#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cbias {

enum class Family { Dihedral, Quaternion };

std::string_view family_name(Family family);
Family parse_family(std::string_view text);

/// Largest supported group order exponent. Exhaustive oracles in the tests stop far below this.
inline constexpr int kMaxGroupExponent = 20;

struct GroupKind {
  Family family = Family::Dihedral;
  int n = 3;  // group order is 2^n

  friend bool operator==(const GroupKind&, const GroupKind&) = default;
};

/// a^exponent * b^flip, with (a, b) = (r, s) for D_{2^{n-1}} and (x, y) for H_{2^n}.
struct Element {
  std::uint32_t exponent = 0;
  bool flip = false;

  friend auto operator<=>(const Element&, const Element&) = default;
};

struct ClassLabel {
  enum class Kind : std::uint8_t { One, MinusOne, Power, FlipEven, FlipOdd };

  Kind kind = Kind::One;
  std::uint32_t k = 0;  // only meaningful for Power, 1 <= k <= 2^{n-2}-1

  static ClassLabel one() { return {Kind::One, 0}; }
  static ClassLabel minus_one() { return {Kind::MinusOne, 0}; }
  static ClassLabel power(std::uint32_t k) { return {Kind::Power, k}; }
  static ClassLabel flip_even() { return {Kind::FlipEven, 0}; }
  static ClassLabel flip_odd() { return {Kind::FlipOdd, 0}; }

  friend auto operator<=>(const ClassLabel&, const ClassLabel&) = default;
};

/// Paper-style names: C1, C-1, Cr^k / Cx^k, Cs / Cy, Crs / Cxy.
std::string class_name(Family family, ClassLabel label);
ClassLabel parse_class(Family family, std::string_view text);

/// Dihedral or generalized quaternion 2-group of order 2^n in (exponent, flip) normal form.
/// Immutable; every member function is pure.
class Group {
 public:
  explicit Group(GroupKind kind);

  GroupKind kind() const { return kind_; }
  Family family() const { return kind_.family; }
  int n() const { return kind_.n; }
  std::uint64_t order() const { return std::uint64_t{1} << kind_.n; }
  /// Order of the rotation generator, 2^{n-1}.
  std::uint32_t rotation_order() const { return rotation_order_; }
  std::uint32_t half_rotation() const { return rotation_order_ / 2; }

  Element identity() const { return {0, false}; }
  Element minus_one() const { return {half_rotation(), false}; }
  Element rotation(std::int64_t e) const;
  Element flip(std::int64_t e) const;  // a^e b

  Element multiply(Element g, Element h) const;
  Element inverse(Element g) const;
  Element power(Element g, std::int64_t e) const;
  std::uint64_t element_order(Element g) const;
  bool contains(Element g) const { return g.exponent < rotation_order_; }

  std::vector<Element> elements() const;

  /// Classes in canonical order: One, MinusOne, Power(1..2^{n-2}-1), FlipEven, FlipOdd.
  const std::vector<ClassLabel>& classes() const { return classes_; }
  std::size_t class_count() const { return classes_.size(); }
  std::size_t class_index(ClassLabel label) const;
  bool is_valid(ClassLabel label) const;
  ClassLabel class_of(Element g) const;
  std::uint64_t class_size(ClassLabel label) const;
  Element representative(ClassLabel label) const;
  std::vector<Element> class_members(ClassLabel label) const;

  /// |C^{1/2}| = #{g : g^2 in C}, closed form.
  std::uint64_t square_root_count(ClassLabel label) const;

  std::string element_name(Element g) const;
  Element parse_element(std::string_view text) const;

 private:
  GroupKind kind_;
  std::uint32_t rotation_order_;
  std::vector<ClassLabel> classes_;
};

/// The chain G_3 < ... < G_n with G_i = <a^{2^{n-i}}, b>, each G_i of the same family and order 2^i.
class Tower {
 public:
  explicit Tower(GroupKind top);

  const Group& top() const { return levels_.back(); }
  const Group& level(int i) const;
  int n() const { return top().n(); }
  Family family() const { return top().family(); }

  /// Level-i element expressed in top-group coordinates.
  Element embed(int i, Element g) const;
  /// Inverse of embed; nullopt when g is not in G_i.
  std::optional<Element> to_level(int i, Element g) const;
  /// C^+ : the top-group class containing the level-i class.
  ClassLabel fuse(int i, ClassLabel label) const;

 private:
  std::vector<Group> levels_;  // levels_[i - 3]
};

}  // namespace cbias
