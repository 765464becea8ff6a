#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "drape/asset.hpp"
#include "drape/pose_fit.hpp"
#include "drape/schema.hpp"

// JSON mappings for the engine's structured-text documents.
namespace drape::io {

using nlohmann::json;

std::string read_text(const std::filesystem::path &path);
void write_text(const std::filesystem::path &path, std::string_view text);
json read_json(const std::filesystem::path &path);

json to_json(const StyleVector &s);
StyleVector style_from_json(const json &j);
json to_json(const StyleKey &k);
StyleKey style_key_from_json(const json &j);

/// {schema_version, points: [{id, name, x, y, present}], style}
json to_json(const ControlPointSet &k, const ControlPointSchema &schema);
ControlPointSet points_from_json(const json &j, const ControlPointSchema &schema);

/// {canvas_aspect, joints: {name: {x, y, confidence}}}
json to_json(const BodyPose &pose);
BodyPose pose_from_json(const json &j);

json to_json(const GarmentMeta &m);
GarmentMeta meta_from_json(const json &j);

json schema_to_json(const ControlPointSchema &schema);

} // namespace drape::io
