#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drape/asset.hpp"
#include "drape/geometry.hpp"
#include "drape/schema.hpp"

namespace drape {

enum class Joint : std::uint8_t {
  head,
  neck,
  left_shoulder,
  right_shoulder,
  left_elbow,
  right_elbow,
  left_wrist,
  right_wrist,
  left_hip,
  right_hip,
  left_knee,
  right_knee,
  left_ankle,
  right_ankle,
  left_eye,
  right_eye,
  left_ear,
  right_ear
};
inline constexpr std::size_t kJointCount = 18;

std::string_view to_string(Joint j);
std::optional<Joint> parse_joint(std::string_view s);

/// 2D body keypoints in normalized canvas units. "left" is the image-left
/// side, matching the control-point schema.
struct BodyPose {
  std::array<Vec2, kJointCount> joints{};
  std::array<double, kJointCount> confidence{};
  double canvas_aspect = 1.0; // width / height

  const Vec2 &at(Joint j) const { return joints[static_cast<std::size_t>(j)]; }
  bool has(Joint j) const { return confidence[static_cast<std::size_t>(j)] > 0.0; }
  void set(Joint j, Vec2 p, double conf = 1.0);
  /// Neck, both shoulders and both hips must be detected.
  void validate() const;
  /// Hip-to-neck distance in normalized units (mean hip to neck).
  double body_height() const;
};

/// dst ≈ scale · R(rotation) · src + translation
struct Similarity {
  double scale = 1.0;
  double rotation = 0.0;
  Vec2 translation{};

  Vec2 apply(Vec2 p) const;
};

/// Closed-form least-squares 2D similarity (Procrustes without reflection).
/// Throws FitError when the source points are all coincident.
Similarity fit_similarity(std::span<const Vec2> src, std::span<const Vec2> dst);

/// Points whose names match `pattern` follow the similarity fitted on `joints`.
struct AnchorRule {
  std::string pattern;
  std::vector<Joint> joints;
};

/// Category/style canonical garment placement in a reference pose.
struct CanonicalTemplate {
  std::string name;
  GarmentCategory category = GarmentCategory::top;
  StyleKey style_key;
  BodyPose reference;
  ControlPointSet points;
  std::vector<AnchorRule> anchors; // first matching rule wins

  /// Anchor rule index for a point, if any rule matches its name.
  std::optional<std::size_t> anchor_for(std::string_view point_name) const;
};

CanonicalTemplate load_canonical_template(const std::filesystem::path &path, const ControlPointSchema &schema);
void save_canonical_template(const CanonicalTemplate &t, const std::filesystem::path &path,
                             const ControlPointSchema &schema);

/// Collection of canonical templates; one per (category, discrete style).
class TemplateLibrary {
public:
  void add(CanonicalTemplate t);
  /// Loads every *.json file under `dir` (recursively).
  static TemplateLibrary load_dir(const std::filesystem::path &dir, const ControlPointSchema &schema);

  /// The most specific template whose style key matches `style`.
  /// Throws ValidationError "no template for category/style" or on ambiguity.
  const CanonicalTemplate &select(GarmentCategory category, const StyleVector &style) const;
  std::span<const CanonicalTemplate> templates() const { return templates_; }

  /// Consistency problems, empty when clean: presence outside category
  /// applicability, present points without anchors, and tuck variants that
  /// move points outside the waistline/hem/torso_side groups.
  std::vector<std::string> lint(const ControlPointSchema &schema) const;

private:
  std::vector<CanonicalTemplate> templates_;
};

/// Deterministic stand-in for a learned control-point regressor: fits the
/// (category, style) template to the pose group by group.
ControlPointSet predict_control_points(const TemplateLibrary &library, const ControlPointSchema &schema,
                                       const GarmentMeta &garment, const BodyPose &pose, const StyleVector &style);

inline ControlPointSet predict_control_points(const TemplateLibrary &library, const ControlPointSchema &schema,
                                              const GarmentAsset &asset, const BodyPose &pose,
                                              const StyleVector &style) {
  return predict_control_points(library, schema, asset.meta, pose, style);
}

} // namespace drape
