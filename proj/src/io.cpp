#include "drape/io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "drape/error.hpp"

namespace drape::io {

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw RenderError("cannot write " + path.string());
  out << text;
}

json read_json(const std::filesystem::path &path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception &e) {
    throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

json to_json(const StyleVector &s) {
  return json{{"tuck", std::string(to_string(s.tuck))}, {"closure", std::string(to_string(s.closure))}};
}

StyleVector style_from_json(const json &j) {
  StyleVector s;
  if (j.is_null())
    return s;
  if (!j.is_object())
    throw ValidationError("style must be an object");
  for (const auto &[k, v] : j.items())
    s.set(k, v.get<std::string>());
  return s;
}

json to_json(const StyleKey &k) {
  json j = json::object();
  if (k.tuck)
    j["tuck"] = std::string(to_string(*k.tuck));
  if (k.closure)
    j["closure"] = std::string(to_string(*k.closure));
  return j;
}

StyleKey style_key_from_json(const json &j) {
  StyleKey k;
  if (j.is_null())
    return k;
  if (!j.is_object())
    throw ValidationError("style key must be an object");
  for (const auto &[name, v] : j.items())
    k.set(name, v.get<std::string>());
  return k;
}

json to_json(const ControlPointSet &k, const ControlPointSchema &schema) {
  json pts = json::array();
  for (const PointDef &p : schema.points()) {
    const auto i = static_cast<std::size_t>(p.id);
    pts.push_back({{"id", p.id}, {"name", p.name}, {"x", k.coords[i].x}, {"y", k.coords[i].y},
                   {"present", k.present.test(i)}});
  }
  return json{{"schema_version", k.schema_version}, {"points", std::move(pts)}, {"style", to_json(k.style)}};
}

ControlPointSet points_from_json(const json &j, const ControlPointSchema &schema) {
  ControlPointSet k;
  try {
    k.schema_version = j.value("schema_version", schema.version());
    if (k.schema_version != schema.version())
      throw ValidationError(
          fmt::format("point set schema \"{}\" does not match \"{}\"", k.schema_version, schema.version()));
    const auto &pts = j.at("points");
    if (pts.size() != kPointCount)
      throw ValidationError(fmt::format("expected {} point records, got {}", kPointCount, pts.size()));
    std::bitset<kPointCount> seen;
    for (const auto &rec : pts) {
      const int id = rec.at("id").get<int>();
      if (id < 0 || id >= static_cast<int>(kPointCount) || seen.test(static_cast<std::size_t>(id)))
        throw ValidationError(fmt::format("bad or duplicate point id {}", id));
      if (rec.contains("name") && rec["name"].get<std::string>() != schema.point(id).name)
        throw ValidationError(fmt::format("point id {} is named \"{}\" in the schema, not \"{}\"", id,
                                          schema.point(id).name, rec["name"].get<std::string>()));
      const auto i = static_cast<std::size_t>(id);
      seen.set(i);
      k.coords[i] = {rec.at("x").get<double>(), rec.at("y").get<double>()};
      if (!std::isfinite(k.coords[i].x) || !std::isfinite(k.coords[i].y))
        throw ValidationError(fmt::format("point id {} has non-finite coordinates", id));
      k.present.set(i, rec.value("present", true));
    }
    k.style = style_from_json(j.value("style", json()));
  } catch (const json::exception &e) {
    throw ValidationError(std::string("malformed point set: ") + e.what());
  }
  return k;
}

json to_json(const BodyPose &pose) {
  json joints = json::object();
  for (std::size_t i = 0; i < kJointCount; ++i) {
    const auto j = static_cast<Joint>(i);
    joints[std::string(to_string(j))] = {
        {"x", pose.joints[i].x}, {"y", pose.joints[i].y}, {"confidence", pose.confidence[i]}};
  }
  return json{{"canvas_aspect", pose.canvas_aspect}, {"joints", std::move(joints)}};
}

BodyPose pose_from_json(const json &j) {
  BodyPose pose;
  try {
    pose.canvas_aspect = j.value("canvas_aspect", 1.0);
    if (!(pose.canvas_aspect > 0.0))
      throw ValidationError("canvas_aspect must be positive");
    for (const auto &[name, rec] : j.at("joints").items()) {
      auto joint = parse_joint(name);
      if (!joint)
        throw ValidationError(fmt::format("unknown joint \"{}\"", name));
      const double conf = rec.value("confidence", 1.0);
      if (conf < 0.0 || conf > 1.0)
        throw ValidationError(fmt::format("joint \"{}\" confidence {} outside [0,1]", name, conf));
      pose.set(*joint, {rec.at("x").get<double>(), rec.at("y").get<double>()}, conf);
    }
  } catch (const json::exception &e) {
    throw ValidationError(std::string("malformed pose: ") + e.what());
  }
  return pose;
}

json to_json(const GarmentMeta &m) {
  return json{{"id", m.id},
              {"category", std::string(to_string(m.category))},
              {"tags", json(std::vector<std::string>(m.tags.begin(), m.tags.end()))},
              {"gender", std::string(to_string(m.gender))}};
}

GarmentMeta meta_from_json(const json &j) {
  GarmentMeta m;
  try {
    m.id = j.at("id").get<std::string>();
    const auto cat = j.at("category").get<std::string>();
    auto c = parse_category(cat);
    if (!c)
      throw ValidationError(fmt::format("garment \"{}\": unknown category \"{}\"", m.id, cat));
    m.category = *c;
    for (const auto &t : j.value("tags", json::array()))
      m.tags.insert(t.get<std::string>());
    const auto gender = j.value("gender", std::string("unisex"));
    auto g = parse_gender(gender);
    if (!g)
      throw ValidationError(fmt::format("garment \"{}\": unknown gender \"{}\"", m.id, gender));
    m.gender = *g;
  } catch (const json::exception &e) {
    throw ValidationError(std::string("malformed garment metadata: ") + e.what());
  }
  return m;
}

json schema_to_json(const ControlPointSchema &schema) {
  json pts = json::array();
  for (const PointDef &p : schema.points()) {
    json cats = json::array();
    for (GarmentCategory c : kAllCategories)
      if (p.categories.contains(c))
        cats.push_back(std::string(to_string(c)));
    json rec = {{"id", p.id},
                {"name", p.name},
                {"group", std::string(to_string(p.group))},
                {"side", std::string(to_string(p.side))},
                {"categories", std::move(cats)}};
    if (p.shared_on_split)
      rec["shared_on_split"] = true;
    pts.push_back(std::move(rec));
  }
  return json{{"version", schema.version()}, {"points", std::move(pts)}};
}

} // namespace drape::io
