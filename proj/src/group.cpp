#include "cbias/group.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "cbias/errors.hpp"

namespace cbias {

namespace {

std::uint32_t reduce(std::int64_t e, std::uint32_t modulus) {
  const auto m = static_cast<std::int64_t>(modulus);
  return static_cast<std::uint32_t>(((e % m) + m) % m);
}

std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw ConfigError("not an integer: '" + std::string(text) + "'");
  return value;
}

}  // namespace

std::string_view family_name(Family family) {
  return family == Family::Dihedral ? "dihedral" : "quaternion";
}

Family parse_family(std::string_view text) {
  if (text == "dihedral" || text == "D") return Family::Dihedral;
  if (text == "quaternion" || text == "Q" || text == "H") return Family::Quaternion;
  throw ConfigError("unknown family '" + std::string(text) + "'");
}

std::string class_name(Family family, ClassLabel label) {
  const char a = family == Family::Dihedral ? 'r' : 'x';
  const char b = family == Family::Dihedral ? 's' : 'y';
  switch (label.kind) {
    case ClassLabel::Kind::One: return "C1";
    case ClassLabel::Kind::MinusOne: return "C-1";
    case ClassLabel::Kind::Power: return std::string("C") + a + "^" + std::to_string(label.k);
    case ClassLabel::Kind::FlipEven: return std::string("C") + b;
    case ClassLabel::Kind::FlipOdd: return std::string("C") + a + b;
  }
  return "?";
}

ClassLabel parse_class(Family family, std::string_view text) {
  if (text.starts_with("C")) text.remove_prefix(1);
  const char a = family == Family::Dihedral ? 'r' : 'x';
  const char b = family == Family::Dihedral ? 's' : 'y';
  if (text == "1") return ClassLabel::one();
  if (text == "-1") return ClassLabel::minus_one();
  if (text.size() == 1 && text[0] == b) return ClassLabel::flip_even();
  if (text.size() == 2 && text[0] == a && text[1] == b) return ClassLabel::flip_odd();
  if (!text.empty() && text[0] == a) {
    text.remove_prefix(1);
    if (text.empty()) return ClassLabel::power(1);
    if (text[0] == '^') {
      const auto k = parse_int(text.substr(1));
      if (k >= 1) return ClassLabel::power(static_cast<std::uint32_t>(k));
    }
  }
  throw ConfigError("cannot parse class label '" + std::string(text) + "'");
}

Group::Group(GroupKind kind) : kind_(kind) {
  if (kind.n < 3) throw ConfigError("group exponent n must be >= 3");
  if (kind.n > kMaxGroupExponent) throw ConfigError("group exponent n must be <= 20");
  rotation_order_ = std::uint32_t{1} << (kind.n - 1);
  classes_.reserve(rotation_order_ / 4 + 3);
  classes_.push_back(ClassLabel::one());
  classes_.push_back(ClassLabel::minus_one());
  for (std::uint32_t k = 1; k < rotation_order_ / 2; ++k) classes_.push_back(ClassLabel::power(k));
  classes_.push_back(ClassLabel::flip_even());
  classes_.push_back(ClassLabel::flip_odd());
}

Element Group::rotation(std::int64_t e) const { return {reduce(e, rotation_order_), false}; }
Element Group::flip(std::int64_t e) const { return {reduce(e, rotation_order_), true}; }

Element Group::multiply(Element g, Element h) const {
  // a^e b^f a^g b^h = a^{e + (-1)^f g} b^f b^h, and b^2 = 1 (dihedral) or a^{2^{n-2}} (quaternion).
  std::int64_t e = static_cast<std::int64_t>(g.exponent) +
                   (g.flip ? -static_cast<std::int64_t>(h.exponent) : static_cast<std::int64_t>(h.exponent));
  bool f = g.flip != h.flip;
  if (g.flip && h.flip && kind_.family == Family::Quaternion) e += half_rotation();
  return {reduce(e, rotation_order_), f};
}

Element Group::inverse(Element g) const {
  if (!g.flip) return rotation(-static_cast<std::int64_t>(g.exponent));
  // (a^e b)^{-1} = b^{-1} a^{-e} = a^e b^{-1}; b^{-1} = b for dihedral, b^3 = a^{2^{n-2}} b for quaternion.
  if (kind_.family == Family::Dihedral) return g;
  return flip(static_cast<std::int64_t>(g.exponent) + half_rotation());
}

Element Group::power(Element g, std::int64_t e) const {
  if (e < 0) return power(inverse(g), -e);
  Element result = identity();
  Element base = g;
  while (e > 0) {
    if (e & 1) result = multiply(result, base);
    base = multiply(base, base);
    e >>= 1;
  }
  return result;
}

std::uint64_t Group::element_order(Element g) const {
  std::uint64_t order = 1;
  Element h = g;
  while (h != identity()) {
    h = multiply(h, g);
    ++order;
  }
  return order;
}

std::vector<Element> Group::elements() const {
  std::vector<Element> out;
  out.reserve(order());
  for (std::uint32_t f = 0; f < 2; ++f)
    for (std::uint32_t e = 0; e < rotation_order_; ++e) out.push_back({e, f == 1});
  return out;
}

bool Group::is_valid(ClassLabel label) const {
  if (label.kind != ClassLabel::Kind::Power) return label.k == 0;
  return label.k >= 1 && label.k < half_rotation();
}

std::size_t Group::class_index(ClassLabel label) const {
  if (!is_valid(label)) throw ConfigError("class label not valid for this group");
  switch (label.kind) {
    case ClassLabel::Kind::One: return 0;
    case ClassLabel::Kind::MinusOne: return 1;
    case ClassLabel::Kind::Power: return 1 + label.k;
    case ClassLabel::Kind::FlipEven: return classes_.size() - 2;
    case ClassLabel::Kind::FlipOdd: return classes_.size() - 1;
  }
  return 0;
}

ClassLabel Group::class_of(Element g) const {
  if (g.flip) return (g.exponent % 2 == 0) ? ClassLabel::flip_even() : ClassLabel::flip_odd();
  if (g.exponent == 0) return ClassLabel::one();
  if (g.exponent == half_rotation()) return ClassLabel::minus_one();
  return ClassLabel::power(std::min(g.exponent, rotation_order_ - g.exponent));
}

std::uint64_t Group::class_size(ClassLabel label) const {
  switch (label.kind) {
    case ClassLabel::Kind::One:
    case ClassLabel::Kind::MinusOne: return 1;
    case ClassLabel::Kind::Power: return 2;
    case ClassLabel::Kind::FlipEven:
    case ClassLabel::Kind::FlipOdd: return rotation_order_ / 2;
  }
  return 0;
}

Element Group::representative(ClassLabel label) const {
  switch (label.kind) {
    case ClassLabel::Kind::One: return identity();
    case ClassLabel::Kind::MinusOne: return minus_one();
    case ClassLabel::Kind::Power: return rotation(label.k);
    case ClassLabel::Kind::FlipEven: return flip(0);
    case ClassLabel::Kind::FlipOdd: return flip(1);
  }
  return identity();
}

std::vector<Element> Group::class_members(ClassLabel label) const {
  switch (label.kind) {
    case ClassLabel::Kind::One:
    case ClassLabel::Kind::MinusOne: return {representative(label)};
    case ClassLabel::Kind::Power:
      return {rotation(label.k), rotation(-static_cast<std::int64_t>(label.k))};
    case ClassLabel::Kind::FlipEven:
    case ClassLabel::Kind::FlipOdd: {
      // Full range 0 <= k <= 2^{n-1}-1 of matching parity.
      std::vector<Element> out;
      const std::uint32_t start = label.kind == ClassLabel::Kind::FlipEven ? 0 : 1;
      for (std::uint32_t e = start; e < rotation_order_; e += 2) out.push_back({e, true});
      return out;
    }
  }
  return {};
}

std::uint64_t Group::square_root_count(ClassLabel label) const {
  // Squares: (a^m)^2 = a^{2m}; (a^m b)^2 = 1 (dihedral) or -1 (quaternion).
  const std::uint64_t flips = rotation_order_;
  const bool dihedral = kind_.family == Family::Dihedral;
  switch (label.kind) {
    case ClassLabel::Kind::One: return 2 + (dihedral ? flips : 0);
    case ClassLabel::Kind::MinusOne: return 2 + (dihedral ? 0 : flips);
    case ClassLabel::Kind::Power: return label.k % 2 == 0 ? 4 : 0;
    case ClassLabel::Kind::FlipEven:
    case ClassLabel::Kind::FlipOdd: return 0;
  }
  return 0;
}

std::string Group::element_name(Element g) const {
  const char a = kind_.family == Family::Dihedral ? 'r' : 'x';
  const char b = kind_.family == Family::Dihedral ? 's' : 'y';
  std::string out;
  if (g.exponent == 1) out += a;
  else if (g.exponent > 1) out += std::string(1, a) + "^" + std::to_string(g.exponent);
  if (g.flip) out += b;
  if (out.empty()) out = "1";
  return out;
}

Element Group::parse_element(std::string_view text) const {
  const char a = kind_.family == Family::Dihedral ? 'r' : 'x';
  const char b = kind_.family == Family::Dihedral ? 's' : 'y';
  if (text == "1") return identity();
  Element g;
  if (!text.empty() && text.back() == b) {
    g.flip = true;
    text.remove_suffix(1);
  }
  if (!text.empty()) {
    if (text[0] != a) throw ConfigError("cannot parse element '" + std::string(text) + "'");
    text.remove_prefix(1);
    std::int64_t e = 1;
    if (!text.empty()) {
      if (text[0] != '^') throw ConfigError("cannot parse element exponent");
      e = parse_int(text.substr(1));
    }
    g.exponent = reduce(e, rotation_order_);
  }
  return g;
}

Tower::Tower(GroupKind top) {
  if (top.n < 3) throw ConfigError("group exponent n must be >= 3");
  if (top.n > kMaxGroupExponent) throw ConfigError("group exponent n must be <= 20");
  for (int i = 3; i <= top.n; ++i) levels_.emplace_back(GroupKind{top.family, i});
}

const Group& Tower::level(int i) const {
  if (i < 3 || i > n()) throw ConfigError("tower level must satisfy 3 <= i <= n");
  return levels_[static_cast<std::size_t>(i - 3)];
}

Element Tower::embed(int i, Element g) const {
  const Group& sub = level(i);
  if (!sub.contains(g)) throw ConfigError("element not in level group");
  return {g.exponent << (n() - i), g.flip};
}

std::optional<Element> Tower::to_level(int i, Element g) const {
  (void)level(i);
  const std::uint32_t step = std::uint32_t{1} << (n() - i);
  if (g.exponent % step != 0) return std::nullopt;
  return Element{g.exponent / step, g.flip};
}

ClassLabel Tower::fuse(int i, ClassLabel label) const {
  const Group& sub = level(i);
  if (!sub.is_valid(label)) throw ConfigError("class label not valid at this level");
  switch (label.kind) {
    case ClassLabel::Kind::One:
    case ClassLabel::Kind::MinusOne:
    case ClassLabel::Kind::FlipEven: return label;
    case ClassLabel::Kind::Power: return ClassLabel::power(label.k << (n() - i));
    case ClassLabel::Kind::FlipOdd: return i < n() ? ClassLabel::flip_even() : label;
  }
  return label;
}

}  // namespace cbias
