#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbias/cyclotomic.hpp"
#include "cbias/group.hpp"

namespace cbias {

/// chi_0..chi_3 (degree 1) or psi_j, 1 <= j <= 2^{n-2}-1 (degree 2).
struct CharacterId {
  enum class Kind : std::uint8_t { Chi, Psi };
  Kind kind = Kind::Chi;
  std::uint32_t index = 0;

  static CharacterId chi(std::uint32_t i) { return {Kind::Chi, i}; }
  static CharacterId psi(std::uint32_t j) { return {Kind::Psi, j}; }
  bool is_trivial() const { return kind == Kind::Chi && index == 0; }

  friend auto operator<=>(const CharacterId&, const CharacterId&) = default;
};

std::string character_name(CharacterId id);
CharacterId parse_character(std::string_view text);

enum class FsType { Orthogonal, Unitary, Symplectic };
std::string_view fs_type_name(FsType type);

/// General class function, values indexed by the owning group's canonical class order.
using ClassFunction = std::vector<CyclotomicInt>;

/// constant + (zeta^a + zeta^{-a}) with zeta = exp(2 pi i / 2^{log2_order}); every irreducible
/// value of both families has this shape.
struct CharacterValue {
  std::int64_t constant = 0;
  std::optional<std::int64_t> cos_arg;
  int log2_order = 2;

  CyclotomicInt exact() const;
  double to_double() const;
  friend bool operator==(const CharacterValue& a, const CharacterValue& b) { return a.exact() == b.exact(); }
};

struct Character {
  CharacterId id;
  int degree = 1;
  std::vector<CharacterValue> values;
  FsType fs_type = FsType::Orthogonal;
  bool faithful = false;

  const CharacterValue& value(const Group& group, ClassLabel label) const {
    return values[group.class_index(label)];
  }
  ClassFunction exact_values() const;
};

/// Irreducible characters of a dihedral or generalized quaternion 2-group, values exact in
/// Z[zeta_{2^{n-1}}]. Rows: chi_0..chi_3 then psi_1..psi_{2^{n-2}-1}.
class CharacterTable {
 public:
  explicit CharacterTable(const Group& group);

  const Group& group() const { return group_; }
  const std::vector<Character>& characters() const { return characters_; }
  const Character& operator[](CharacterId id) const;
  std::size_t index_of(CharacterId id) const;
  /// Ring exponent m such that all values live in Z[zeta_{2^m}].
  int ring() const { return ring_; }

  /// CSV: header "character,<class names>", one row per character, float values.
  std::string to_csv() const;

 private:
  Group group_;
  int ring_;
  std::vector<Character> characters_;
};

/// Closed-form value chi(g) for any element, straight from the defining representations.
CharacterValue character_value(const Group& group, CharacterId id, Element g);
/// Same value as a double (2 cos(2 pi j e / 2^{n-1}) for psi_j); no table needed, any n.
double character_value_double(const Group& group, CharacterId id, Element g);
/// Number of irreducible characters, 2^{n-2} + 3.
std::size_t irreducible_count(const Group& group);
/// All irreducible ids in table order.
std::vector<CharacterId> irreducible_ids(const Group& group);
int character_degree(CharacterId id);

/// (1/|G|) sum_g chi(g^2), summed over all elements.
int frobenius_schur_brute_force(const Group& group, const Character& chi);
/// Closed-form classification: +1 everywhere except quaternion psi_j with j odd (-1).
int frobenius_schur_closed_form(Family family, CharacterId id);
FsType fs_type_from_index(int index);

/// chi(g) == chi(1) only for g == 1, checked over class representatives.
bool is_faithful(const Group& group, const Character& chi);

/// (1/|G|) sum_C |C| a(C) conj(b(C)), exact.
Rational inner_product(const Group& group, const ClassFunction& a, const ClassFunction& b);

/// Multiset of top-group characters with multiplicities.
struct InducedDecomposition {
  int source_level = 3;
  CharacterId source;
  std::map<CharacterId, int> components;

  int degree() const;
  friend bool operator==(const InducedDecomposition&, const InducedDecomposition&) = default;
};

/// Ind_{G_i}^{G_n} of a level-i irreducible, closed form.
InducedDecomposition induce(const Tower& tower, int level, CharacterId source);

/// Ind_{G_i}^{G_n} evaluated on top-group classes by summing conjugates over the whole group.
ClassFunction induce_class_function(const Tower& tower, int level, const Character& source);
/// Decomposition of a top-group class function against the top character table.
InducedDecomposition decompose(const CharacterTable& top, int level, CharacterId source,
                               const ClassFunction& induced);

/// Res_{G_i} of a top-group class function, evaluated on level-i class representatives.
ClassFunction restrict_to_level(const Tower& tower, int level, const ClassFunction& top_values);

/// The character partition used by the lower large-deviation bound.
struct SrPartition {
  std::vector<CharacterId> s;
  std::vector<CharacterId> r;
  int b1 = 0;  // max degree over R (0 when R is empty)
  int b2 = 0;  // |R|
  /// The values quoted for tower levels i < n in the monotonicity argument (b1 = b2 = 2).
  std::optional<std::pair<int, int>> paper_quoted;
};

SrPartition sr_partition(const Tower& tower, int level);

/// sum over odd j in [1, 2^{i-2}-1] of zeta_i^{jk} + zeta_i^{-jk}, exact.
CyclotomicInt symplectic_value_sum(int level, std::int64_t k);

}  // namespace cbias
