#include "cbias/race.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cbias/claims.hpp"
#include "cbias/errors.hpp"

namespace cbias {

namespace {

// Canonical (constant, folded angle) form of a real character value; two values are equal
// iff their keys are.
std::pair<std::int64_t, std::int64_t> value_key(const CharacterValue& v) {
  if (!v.cos_arg) return {v.constant, -1};
  const std::int64_t order = std::int64_t{1} << v.log2_order;
  std::int64_t a = ((*v.cos_arg % order) + order) % order;
  a = std::min(a, order - a);
  if (a == 0) return {v.constant + 2, -1};
  if (2 * a == order) return {v.constant - 2, -1};
  if (4 * a == order) return {v.constant, -1};
  return {v.constant, a};
}

double value_difference(const CharacterValue& a, const CharacterValue& b) {
  if (value_key(a) == value_key(b)) return 0.0;
  return std::abs(a.to_double() - b.to_double());
}

double tail_variance_of(double weight, int degree, const ZeroSet& zs) {
  // Variance carried by zeros past t_max: 2 w^2 sum_{gamma > T} 1/gamma^2 against the main-term density.
  const double T = zs.t_max;
  if (!(T > 0.0)) return 0.0;
  const double L = zs.log_conductor.value_or(0.0);
  const double tail = (L + degree * (std::log(T / (2.0 * std::numbers::pi)) + 1.0)) / (2.0 * std::numbers::pi * T);
  return 2.0 * weight * weight * std::max(tail, 0.0);
}

}  // namespace

std::map<CharacterId, int> RaceSpec::vanishing() const {
  if (orders) return *orders;
  return vanishing_orders(scenario.kind.family, scenario.W, level, scenario.kind.n);
}

void RaceSpec::validate() const {
  if (level < 3 || level > scenario.kind.n) throw ConfigError("level must satisfy 3 <= i <= n");
  const Group g({scenario.kind.family, level});
  if (!g.is_valid(c1) || !g.is_valid(c2)) throw ConfigError("class label not valid at this level");
  if (c1 == c2) throw ConfigError("a race needs two distinct classes");
}

RaceSpec make_race(GroupKind kind, int level, ClassLabel c1, ClassLabel c2, int W) {
  RaceSpec spec;
  spec.scenario.kind = kind;
  spec.scenario.W = kind.family == Family::Dihedral ? 1 : W;
  spec.level = level;
  spec.c1 = c1;
  spec.c2 = c2;
  return spec;
}

std::int64_t z_value(const Group& group, ClassLabel c, const std::map<CharacterId, int>& orders) {
  const Element g = group.representative(c);
  std::optional<SparseCyclotomic> sum;
  int ring = -1;
  for (const auto& [id, ord] : orders) {
    if (ord == 0 || id.is_trivial()) continue;
    const CharacterValue v = character_value(group, id, g);
    if (!sum) {
      ring = v.log2_order;
      sum.emplace(ring);
    } else if (v.log2_order != ring) {
      throw InternalError("character values from different rings");
    }
    sum->add_integer(v.constant * ord);
    if (v.cos_arg) {
      sum->add_root(*v.cos_arg, ord);
      sum->add_root(-*v.cos_arg, ord);
    }
  }
  if (!sum) return 0;
  if (!sum->is_integer()) throw InternalError("z(C) is not an integer");
  return 2 * sum->constant();
}

std::int64_t square_root_ratio(const Group& group, ClassLabel c) {
  const std::uint64_t roots = group.square_root_count(c);
  const std::uint64_t size = group.class_size(c);
  if (roots % size != 0) throw InternalError("square root count not divisible by class size");
  return static_cast<std::int64_t>(roots / size);
}

bool race_defined(const Tower& tower, int level, ClassLabel c1, ClassLabel c2) {
  return tower.fuse(level, c1) != tower.fuse(level, c2);
}

std::int64_t race_mean(const RaceSpec& spec) {
  spec.validate();
  const Tower tower(spec.kind());
  if (!race_defined(tower, spec.level, spec.c1, spec.c2)) throw RaceUndefined();
  const Group& g = tower.level(spec.level);
  const auto orders = spec.vanishing();
  return square_root_ratio(g, spec.c2) - square_root_ratio(g, spec.c1) + z_value(g, spec.c2, orders) -
         z_value(g, spec.c1, orders);
}

std::map<CharacterId, double> race_weights(const Tower& tower, int level, ClassLabel c1, ClassLabel c2) {
  if (!race_defined(tower, level, c1, c2)) throw RaceUndefined();
  const Group& top = tower.top();
  const Element g1 = top.representative(tower.fuse(level, c1));
  const Element g2 = top.representative(tower.fuse(level, c2));
  std::map<CharacterId, double> out;
  for (const CharacterId id : irreducible_ids(top))
    out[id] = value_difference(character_value(top, id, g2), character_value(top, id, g1));
  return out;
}

std::map<CharacterId, double> race_weights(const RaceSpec& spec) {
  spec.validate();
  return race_weights(Tower(spec.kind()), spec.level, spec.c1, spec.c2);
}

double race_variance(const std::map<CharacterId, double>& weights, const std::map<CharacterId, double>& b0) {
  double v = 0.0;
  for (const auto& [id, w] : weights) {
    if (w == 0.0) continue;
    const auto it = b0.find(id);
    if (it == b0.end()) throw ConfigError("no B0 value for " + character_name(id));
    v += 2.0 * w * w * it->second;
  }
  return v;
}

double race_variance(const RaceSpec& spec, const std::map<CharacterId, double>& b0) {
  return race_variance(race_weights(spec), b0);
}

double bias_factor(double mean, double variance) {
  if (!(variance > 0.0)) throw ConfigError("bias factor needs a positive variance");
  return mean / std::sqrt(variance);
}

double RaceModel::explicit_variance() const {
  double s = 0.0;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) s += *it * *it;
  return 0.5 * s;
}

RaceModel RaceModel::from_terms(std::int64_t mean, std::vector<double> terms, double tail_variance) {
  for (const double r : terms)
    if (!(r > 0.0)) throw ConfigError("amplitudes must be positive");
  RaceModel m;
  m.mean = mean;
  std::sort(terms.begin(), terms.end(), std::greater<>());
  m.terms = std::move(terms);
  m.tail_variance = tail_variance;
  m.variance = m.explicit_variance() + tail_variance;
  m.bias_factor = m.variance > 0.0 ? static_cast<double>(mean) / std::sqrt(m.variance) : 0.0;
  return m;
}

RaceModel term_list(std::int64_t mean, const std::map<CharacterId, double>& weights,
                    const std::map<CharacterId, ZeroSet>& zero_sets) {
  std::vector<double> terms;
  double tail = 0.0;
  for (const auto& [id, w] : weights) {
    if (w == 0.0) continue;
    const auto it = zero_sets.find(id);
    if (it == zero_sets.end()) throw ConfigError("missing zero set for " + character_name(id));
    for (const double gamma : it->second.ordinates) terms.push_back(2.0 * w / std::sqrt(0.25 + gamma * gamma));
    tail += tail_variance_of(w, character_degree(id), it->second);
  }
  RaceModel m = RaceModel::from_terms(mean, std::move(terms), tail);
  m.weights = weights;
  return m;
}

RaceModel term_list(const RaceSpec& spec, const std::map<CharacterId, ZeroSet>& zero_sets) {
  return term_list(race_mean(spec), race_weights(spec), zero_sets);
}

std::map<CharacterId, double> b0_map(const std::map<CharacterId, ZeroSet>& zero_sets) {
  std::map<CharacterId, double> out;
  for (const auto& [id, zs] : zero_sets) out[id] = b0(zs);
  return out;
}

std::string_view row_status_name(RowStatus status) {
  switch (status) {
    case RowStatus::Match: return "match";
    case RowStatus::OpenQuestion: return "open-question";
    case RowStatus::Mismatch: return "mismatch";
    case RowStatus::Undefined: return "undefined";
  }
  return "?";
}

std::vector<MeanRow> mean_table(Family family, int n, int level, int W) {
  const Tower tower({family, n});
  const Group& g = tower.level(level);
  if (family == Family::Dihedral) W = 1;
  const auto orders = vanishing_orders(family, W, level, n);
  std::vector<MeanRow> rows;
  const auto& classes = g.classes();
  for (std::size_t a = 0; a < classes.size(); ++a)
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      MeanRow row;
      row.c1 = classes[a];
      row.c2 = classes[b];
      row.paper = printed_tower_mean(family, n, level, W, row.c1, row.c2);
      if (!race_defined(tower, level, row.c1, row.c2)) {
        row.status = RowStatus::Undefined;
        rows.push_back(row);
        continue;
      }
      row.formula = square_root_ratio(g, row.c2) - square_root_ratio(g, row.c1) + z_value(g, row.c2, orders) -
                    z_value(g, row.c1, orders);
      if (row.paper && *row.paper == *row.formula) row.status = RowStatus::Match;
      else if (known_open_question(family, row.c1, row.c2)) row.status = RowStatus::OpenQuestion;
      else row.status = RowStatus::Mismatch;
      rows.push_back(row);
    }
  return rows;
}

}  // namespace cbias
