#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "drape/asset.hpp"
#include "drape/error.hpp"
#include "drape/schema.hpp"

namespace drape {

/// 1-based; {0, 0} for nodes built in code.
struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class Axis : std::uint8_t { x, y };
enum class CondKey : std::uint8_t { category, tag, gender };

std::string_view to_string(Axis a);
std::string_view to_string(CondKey k);

// Equality on AST nodes is structural: source positions are ignored.

struct Condition {
  CondKey key = CondKey::category;
  std::string value;
  SourcePos pos;
  friend bool operator==(const Condition &a, const Condition &b) { return a.key == b.key && a.value == b.value; }
};

/// Conjunction of metadata conditions.
struct Selector {
  std::vector<Condition> conditions;
  bool matches(const GarmentMeta &meta) const;
  friend bool operator==(const Selector &, const Selector &) = default;
};

struct OtherRef {
  std::string point;
  Axis axis = Axis::y;
  SourcePos pos;
  friend bool operator==(const OtherRef &a, const OtherRef &b) { return a.point == b.point && a.axis == b.axis; }
};

/// `constant` alone, or `other.point(p).axis + constant`.
struct Expr {
  std::optional<OtherRef> ref;
  double constant = 0.0;
  friend bool operator==(const Expr &, const Expr &) = default;
};

struct Offset {
  std::string pattern;
  double dx = 0.0;
  double dy = 0.0;
  bool body_scaled = false; // `by (dx, dy) * body_height`
  friend bool operator==(const Offset &, const Offset &) = default;
};

struct SetAxis {
  std::string point;
  Axis axis = Axis::y;
  Expr value;
  friend bool operator==(const SetAxis &, const SetAxis &) = default;
};

struct Align {
  std::string pattern;
  OtherRef target;
  friend bool operator==(const Align &, const Align &) = default;
};

struct Disable {
  std::string pattern;
  friend bool operator==(const Disable &, const Disable &) = default;
};

struct Enable {
  std::string pattern;
  friend bool operator==(const Enable &, const Enable &) = default;
};

struct SetStyle {
  std::string entry;
  std::string value;
  friend bool operator==(const SetStyle &, const SetStyle &) = default;
};

struct ClampWithin {
  std::string pattern;
  friend bool operator==(const ClampWithin &, const ClampWithin &) = default;
};

using StatementKind = std::variant<Offset, SetAxis, Align, Disable, Enable, SetStyle, ClampWithin>;

struct Statement {
  StatementKind kind;
  SourcePos pos;     // keyword
  SourcePos arg_pos; // point name, pattern or style entry
  friend bool operator==(const Statement &a, const Statement &b) { return a.kind == b.kind; }
};

struct EditTemplate {
  std::string name;
  Selector selector;
  std::optional<Selector> required_other;
  std::vector<Statement> statements;
  SourcePos pos;
  SourcePos require_pos;
  friend bool operator==(const EditTemplate &a, const EditTemplate &b) {
    return a.name == b.name && a.selector == b.selector && a.required_other == b.required_other &&
           a.statements == b.statements;
  }

  bool uses_other() const;
};

/// Syntax only. Throws DslError.
std::vector<EditTemplate> parse_templates_unchecked(std::string_view source);

/// Every lint finding against the schema, in source order.
std::vector<DslError> lint_template(const EditTemplate &t, const ControlPointSchema &schema);

/// Parses one or more templates and lints them; throws the first DslError.
std::vector<EditTemplate> parse_templates(std::string_view source, const ControlPointSchema &schema);

/// Exactly one template in `source`.
EditTemplate parse_template(std::string_view source, const ControlPointSchema &schema);

/// Canonical text: `require` first, one statement per line, two-space indent.
std::string print_template(const EditTemplate &t);
std::string print_statement(const Statement &s);
std::string print_selector(const Selector &s);
/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

/// Selector match against the garment's category, tags and gender.
bool applicable(const EditTemplate &t, const GarmentMeta &garment);

/// Named template collection loaded from `.drape` files.
class EditLibrary {
public:
  /// Throws ValidationError on duplicate names.
  void add(EditTemplate t);
  /// Scans `dir` recursively for `*.drape`; DslError messages are prefixed with the file.
  void load_dir(const std::filesystem::path &dir, const ControlPointSchema &schema);
  void load_file(const std::filesystem::path &file, const ControlPointSchema &schema);
  const EditTemplate *find(std::string_view name) const;
  /// Throws ValidationError naming the missing template.
  const EditTemplate &get(std::string_view name) const;
  std::vector<std::string> names() const;
  std::size_t size() const { return templates_.size(); }

private:
  std::map<std::string, EditTemplate, std::less<>> templates_;
};

struct EditContext {
  const ControlPointSchema *schema = nullptr;
  /// Hip-to-neck height of the target body, for `* body_height` offsets.
  std::optional<double> body_height;
  /// Re-predicts the target's points for a new style vector. Required when
  /// a template changes a style entry.
  std::function<ControlPointSet(const StyleVector &)> repredict;
  /// Distance `clamp ... within other` leaves inside the other hull.
  double clamp_margin = 0.01;
};

struct OtherGarment {
  const ControlPointSet *points = nullptr;
  const GarmentMeta *meta = nullptr;
};

struct StatementOutcome {
  std::size_t index = 0; // into EditTemplate::statements
  std::string text;      // canonical form
  bool applied = false;
  std::string reason; // why skipped, or a note on an applied statement
};

struct PointMove {
  int id = 0;
  Vec2 before{};
  Vec2 after{};
  std::size_t statement = 0;
};

struct EditReport {
  std::string template_name;
  std::string garment;
  std::vector<StatementOutcome> statements; // one entry per statement, in order
  std::vector<PointMove> moves;
  std::vector<int> disabled;
  std::vector<int> enabled;
  std::vector<std::string> conflicts;
  bool repredicted = false;

  std::size_t applied_count() const;
};

struct EditResult {
  ControlPointSet points;
  EditReport report;
};

/// Applies `t` to a copy of `target`. Style statements take effect first
/// (through re-prediction); point statements then run in source order.
/// Throws EditError when the template does not apply, `require` is unmet,
/// or an expression reads a point absent from `other`.
EditResult apply_template(const EditTemplate &t, const ControlPointSet &target, const GarmentMeta &target_meta,
                          std::optional<OtherGarment> other, const EditContext &context);

} // namespace drape
