#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "drape/geometry.hpp"

namespace drape {

inline constexpr std::size_t kPointCount = 49;

enum class GarmentCategory : std::uint8_t { top, bottom, skirt, outerwear, dress };
inline constexpr std::array kAllCategories = {GarmentCategory::top, GarmentCategory::bottom, GarmentCategory::skirt,
                                              GarmentCategory::outerwear, GarmentCategory::dress};

enum class PointGroup : std::uint8_t {
  collar,
  shoulder,
  sleeve_outer,
  sleeve_inner,
  torso_side,
  waistline,
  hem,
  split_edge,
  leg
};

enum class Side : std::uint8_t { left, right, center };

std::string_view to_string(GarmentCategory c);
std::string_view to_string(PointGroup g);
std::string_view to_string(Side s);
std::optional<GarmentCategory> parse_category(std::string_view s);
std::optional<PointGroup> parse_group(std::string_view s);
std::optional<Side> parse_side(std::string_view s);

/// Set of garment categories, one bit per category.
class CategorySet {
public:
  constexpr CategorySet() = default;
  constexpr CategorySet(std::initializer_list<GarmentCategory> cats) {
    for (auto c : cats)
      insert(c);
  }
  constexpr void insert(GarmentCategory c) { bits_ |= bit(c); }
  constexpr bool contains(GarmentCategory c) const { return (bits_ & bit(c)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  friend constexpr bool operator==(CategorySet, CategorySet) = default;

private:
  static constexpr std::uint8_t bit(GarmentCategory c) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c)); }
  std::uint8_t bits_ = 0;
};

struct PointDef {
  int id = 0;
  std::string name;
  PointGroup group = PointGroup::collar;
  Side side = Side::center;
  CategorySet categories;
  // Center points flagged here are copied into both halves when outerwear is split.
  bool shared_on_split = false;
};

using PresenceMask = std::bitset<kPointCount>;

/// The control-point schema: exactly 49 points with category-level meaning.
/// Immutable after construction.
class ControlPointSchema {
public:
  /// Validates and takes ownership. Throws SchemaError naming the offending entry.
  ControlPointSchema(std::string version, std::vector<PointDef> points);

  const std::string &version() const { return version_; }
  std::span<const PointDef> points() const { return points_; }
  const PointDef &point(int id) const { return points_.at(static_cast<std::size_t>(id)); }
  std::optional<int> find(std::string_view name) const;
  /// Ids whose names match a glob pattern (`*` matches any run of characters), in id order.
  std::vector<int> match(std::string_view pattern) const;
  PresenceMask applicability(GarmentCategory c) const;

private:
  std::string version_;
  std::vector<PointDef> points_;
  std::unordered_map<std::string, int> by_name_;
};

/// Parses a schema document (JSON text with `version` and `points`).
ControlPointSchema load_schema(std::string_view text);

/// The schema shipped with the engine (data/schema/default.json, compiled in).
const ControlPointSchema &default_schema();

bool glob_match(std::string_view pattern, std::string_view name);

enum class Tuck : std::uint8_t { full_tuck = 0, untuck = 1, front_tuck, side_tuck, half_tuck };
enum class Closure : std::uint8_t { closed = 0, open = 1 };

std::string_view to_string(Tuck t);
std::string_view to_string(Closure c);
std::optional<Tuck> parse_tuck(std::string_view s);
std::optional<Closure> parse_closure(std::string_view s);

/// Discrete drape controls. `closure` only matters for outerwear.
struct StyleVector {
  Tuck tuck = Tuck::untuck;
  Closure closure = Closure::closed;

  static constexpr std::array<std::string_view, 2> kEntryNames = {"tuck", "closure"};

  /// Sets an entry by name; throws ValidationError for unknown names or values.
  void set(std::string_view entry, std::string_view value);
  std::string get(std::string_view entry) const;
  static bool valid(std::string_view entry, std::string_view value);

  friend bool operator==(const StyleVector &, const StyleVector &) = default;
};

/// Partial style assignment: the entries a canonical template (or an
/// override) pins down. Unset entries match anything.
struct StyleKey {
  std::optional<Tuck> tuck;
  std::optional<Closure> closure;

  bool matches(const StyleVector &s) const;
  int specificity() const { return int(tuck.has_value()) + int(closure.has_value()); }
  StyleVector apply_to(StyleVector s) const;
  void set(std::string_view entry, std::string_view value);

  friend bool operator==(const StyleKey &, const StyleKey &) = default;
};

/// On-body (or garment-image) control points in normalized [0,1] units,
/// origin top-left, y down. Coordinates of absent points are ignored.
struct ControlPointSet {
  std::string schema_version;
  std::array<Vec2, kPointCount> coords{};
  PresenceMask present;
  StyleVector style;

  friend bool operator==(const ControlPointSet &, const ControlPointSet &) = default;
};

struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;

  void validate() const;
};

struct DistanceMatrix {
  Eigen::MatrixXd d; // kPointCount x kPointCount, computed for every pair
  PresenceMask present;
};

struct PointLosses {
  double l1 = 0.0;
  double l2 = 0.0;
  double ls = 0.0;
  double total = 0.0;
};

DistanceMatrix distance_matrix(const ControlPointSet &k);

/// Frobenius norm of D - D' over the points present in both sets.
/// Throws ValidationError("empty intersection") when no point is shared.
double structural_loss(const ControlPointSet &k, const ControlPointSet &k_prime);

/// l1/l2 are per-coordinate means over shared points; total = λ1·l1 + λ2·l2 + λ3·ls.
PointLosses point_losses(const ControlPointSet &k, const ControlPointSet &k_prime, const LossWeights &weights);

} // namespace drape
