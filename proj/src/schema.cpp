#include "drape/schema.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "drape/error.hpp"

namespace drape {

namespace {

constexpr std::array<std::string_view, 5> kCategoryNames = {"top", "bottom", "skirt", "outerwear", "dress"};
constexpr std::array<std::string_view, 9> kGroupNames = {"collar",     "shoulder",  "sleeve_outer",
                                                         "sleeve_inner", "torso_side", "waistline",
                                                         "hem",        "split_edge", "leg"};
constexpr std::array<std::string_view, 3> kSideNames = {"left", "right", "center"};
constexpr std::array<std::string_view, 5> kTuckNames = {"full_tuck", "untuck", "front_tuck", "side_tuck",
                                                        "half_tuck"};
constexpr std::array<std::string_view, 2> kClosureNames = {"closed", "open"};

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N> &names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s)
      return static_cast<E>(i);
  return std::nullopt;
}

} // namespace

std::string_view to_string(GarmentCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }
std::string_view to_string(PointGroup g) { return kGroupNames[static_cast<std::size_t>(g)]; }
std::string_view to_string(Side s) { return kSideNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(Tuck t) { return kTuckNames[static_cast<std::size_t>(t)]; }
std::string_view to_string(Closure c) { return kClosureNames[static_cast<std::size_t>(c)]; }

std::optional<GarmentCategory> parse_category(std::string_view s) { return lookup<GarmentCategory>(kCategoryNames, s); }
std::optional<PointGroup> parse_group(std::string_view s) { return lookup<PointGroup>(kGroupNames, s); }
std::optional<Side> parse_side(std::string_view s) { return lookup<Side>(kSideNames, s); }
std::optional<Tuck> parse_tuck(std::string_view s) { return lookup<Tuck>(kTuckNames, s); }
std::optional<Closure> parse_closure(std::string_view s) { return lookup<Closure>(kClosureNames, s); }

bool glob_match(std::string_view pattern, std::string_view name) {
  // Iterative wildcard match with single-star backtracking.
  std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
  while (n < name.size()) {
    if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = n;
    } else if (p < pattern.size() && pattern[p] == name[n]) {
      ++p;
      ++n;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      n = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*')
    ++p;
  return p == pattern.size();
}

ControlPointSchema::ControlPointSchema(std::string version, std::vector<PointDef> points)
    : version_(std::move(version)), points_(std::move(points)) {
  if (points_.size() != kPointCount)
    throw SchemaError(fmt::format("expected {} points, got {}", kPointCount, points_.size()));

  std::vector<bool> seen(kPointCount, false);
  for (const PointDef &p : points_) {
    if (p.id < 0 || p.id >= static_cast<int>(kPointCount))
      throw SchemaError(fmt::format("point \"{}\": id {} out of range 0..{}", p.name, p.id, kPointCount - 1));
    if (seen[static_cast<std::size_t>(p.id)])
      throw SchemaError(fmt::format("duplicate id {} (\"{}\")", p.id, p.name));
    seen[static_cast<std::size_t>(p.id)] = true;
    if (p.name.empty())
      throw SchemaError(fmt::format("point id {} has an empty name", p.id));
    if (!by_name_.emplace(p.name, p.id).second)
      throw SchemaError(fmt::format("duplicate name \"{}\"", p.name));
    if (p.categories.empty())
      throw SchemaError(fmt::format("point \"{}\" applies to no category", p.name));
  }
  std::sort(points_.begin(), points_.end(), [](const PointDef &a, const PointDef &b) { return a.id < b.id; });

  for (GarmentCategory c : kAllCategories)
    if (applicability(c).none())
      throw SchemaError(fmt::format("category \"{}\" has no applicable points", to_string(c)));
}

std::optional<int> ControlPointSchema::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end())
    return std::nullopt;
  return it->second;
}

std::vector<int> ControlPointSchema::match(std::string_view pattern) const {
  std::vector<int> ids;
  for (const PointDef &p : points_)
    if (glob_match(pattern, p.name))
      ids.push_back(p.id);
  return ids;
}

PresenceMask ControlPointSchema::applicability(GarmentCategory c) const {
  PresenceMask mask;
  for (const PointDef &p : points_)
    if (p.categories.contains(c))
      mask.set(static_cast<std::size_t>(p.id));
  return mask;
}

ControlPointSchema load_schema(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("malformed schema document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
    throw SchemaError("schema document needs a \"points\" array");

  std::vector<PointDef> points;
  for (const auto &entry : doc["points"]) {
    PointDef p;
    const std::string label = entry.value("name", std::string("<unnamed>"));
    try {
      p.id = entry.at("id").get<int>();
      p.name = entry.at("name").get<std::string>();
      const auto group = entry.at("group").get<std::string>();
      const auto side = entry.at("side").get<std::string>();
      auto g = parse_group(group);
      if (!g)
        throw SchemaError(fmt::format("point \"{}\": unknown group \"{}\"", label, group));
      auto s = parse_side(side);
      if (!s)
        throw SchemaError(fmt::format("point \"{}\": unknown side \"{}\"", label, side));
      p.group = *g;
      p.side = *s;
      for (const auto &c : entry.at("categories")) {
        auto cat = parse_category(c.get<std::string>());
        if (!cat)
          throw SchemaError(fmt::format("point \"{}\": unknown category \"{}\"", label, c.get<std::string>()));
        p.categories.insert(*cat);
      }
      p.shared_on_split = entry.value("shared_on_split", false);
    } catch (const nlohmann::json::exception &e) {
      throw SchemaError(fmt::format("point \"{}\": {}", label, e.what()));
    }
    points.push_back(std::move(p));
  }
  return ControlPointSchema(doc.value("version", std::string("unversioned")), std::move(points));
}

// --- style ------------------------------------------------------------------

bool StyleVector::valid(std::string_view entry, std::string_view value) {
  if (entry == "tuck")
    return parse_tuck(value).has_value();
  if (entry == "closure")
    return parse_closure(value).has_value();
  return false;
}

void StyleVector::set(std::string_view entry, std::string_view value) {
  if (entry == "tuck") {
    if (auto t = parse_tuck(value)) {
      tuck = *t;
      return;
    }
  } else if (entry == "closure") {
    if (auto c = parse_closure(value)) {
      closure = *c;
      return;
    }
  } else {
    throw ValidationError(fmt::format("unknown style entry \"{}\"", entry));
  }
  throw ValidationError(fmt::format("invalid value \"{}\" for style entry \"{}\"", value, entry));
}

std::string StyleVector::get(std::string_view entry) const {
  if (entry == "tuck")
    return std::string(to_string(tuck));
  if (entry == "closure")
    return std::string(to_string(closure));
  throw ValidationError(fmt::format("unknown style entry \"{}\"", entry));
}

bool StyleKey::matches(const StyleVector &s) const {
  return (!tuck || *tuck == s.tuck) && (!closure || *closure == s.closure);
}

StyleVector StyleKey::apply_to(StyleVector s) const {
  if (tuck)
    s.tuck = *tuck;
  if (closure)
    s.closure = *closure;
  return s;
}

void StyleKey::set(std::string_view entry, std::string_view value) {
  StyleVector probe;
  probe.set(entry, value);
  if (entry == "tuck")
    tuck = probe.tuck;
  else
    closure = probe.closure;
}

// --- metrics ----------------------------------------------------------------

void LossWeights::validate() const {
  if (!(lambda1 >= 0.0 && lambda2 >= 0.0 && lambda3 >= 0.0))
    throw ValidationError("loss weights must be non-negative");
  if (lambda1 == 0.0 && lambda2 == 0.0 && lambda3 == 0.0)
    throw ValidationError("at least one loss weight must be positive");
}

DistanceMatrix distance_matrix(const ControlPointSet &k) {
  DistanceMatrix out{Eigen::MatrixXd::Zero(kPointCount, kPointCount), k.present};
  for (std::size_t i = 0; i < kPointCount; ++i)
    for (std::size_t j = i + 1; j < kPointCount; ++j) {
      const double dx = k.coords[i].x - k.coords[j].x;
      const double dy = k.coords[i].y - k.coords[j].y;
      const double d = std::sqrt(dx * dx + dy * dy);
      out.d(i, j) = d;
      out.d(j, i) = d;
    }
  return out;
}

namespace {

std::vector<std::size_t> shared_indices(const ControlPointSet &a, const ControlPointSet &b) {
  const PresenceMask both = a.present & b.present;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < kPointCount; ++i)
    if (both.test(i))
      idx.push_back(i);
  if (idx.empty())
    throw ValidationError("empty intersection: the point sets share no present point");
  return idx;
}

} // namespace

double structural_loss(const ControlPointSet &k, const ControlPointSet &k_prime) {
  const auto idx = shared_indices(k, k_prime);
  const DistanceMatrix d = distance_matrix(k);
  const DistanceMatrix dp = distance_matrix(k_prime);
  double sum = 0.0;
  for (std::size_t i : idx)
    for (std::size_t j : idx) {
      const double diff = d.d(i, j) - dp.d(i, j);
      sum += diff * diff;
    }
  return std::sqrt(sum);
}

PointLosses point_losses(const ControlPointSet &k, const ControlPointSet &k_prime, const LossWeights &weights) {
  weights.validate();
  const auto idx = shared_indices(k, k_prime);
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i : idx) {
    const Vec2 d = k.coords[i] - k_prime.coords[i];
    abs_sum += std::abs(d.x) + std::abs(d.y);
    sq_sum += d.x * d.x + d.y * d.y;
  }
  const double count = 2.0 * static_cast<double>(idx.size());
  PointLosses out;
  out.l1 = abs_sum / count;
  out.l2 = sq_sum / count;
  out.ls = structural_loss(k, k_prime);
  out.total = weights.lambda1 * out.l1 + weights.lambda2 * out.l2 + weights.lambda3 * out.ls;
  return out;
}

} // namespace drape
