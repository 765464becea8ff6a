#include "drape/edit_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "drape/error.hpp"
#include "drape/geometry.hpp"
#include "drape/io.hpp"

namespace drape {

std::string_view to_string(Axis a) { return a == Axis::x ? "x" : "y"; }

std::string_view to_string(CondKey k) {
  switch (k) {
  case CondKey::category:
    return "category";
  case CondKey::tag:
    return "tag";
  case CondKey::gender:
    return "gender";
  }
  return "?";
}

bool Selector::matches(const GarmentMeta &meta) const {
  for (const Condition &c : conditions) {
    switch (c.key) {
    case CondKey::category:
      if (to_string(meta.category) != c.value)
        return false;
      break;
    case CondKey::tag:
      if (!meta.tags.contains(c.value))
        return false;
      break;
    case CondKey::gender:
      if (to_string(meta.gender) != c.value)
        return false;
      break;
    }
  }
  return true;
}

bool EditTemplate::uses_other() const {
  for (const Statement &s : statements) {
    if (const auto *set = std::get_if<SetAxis>(&s.kind); set && set->value.ref)
      return true;
    if (std::holds_alternative<Align>(s.kind) || std::holds_alternative<ClampWithin>(s.kind))
      return true;
  }
  return false;
}

bool applicable(const EditTemplate &t, const GarmentMeta &garment) { return t.selector.matches(garment); }

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { word, number, string, punct, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

bool word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '*'; }
bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '*'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::string describe(const Token &t) {
  switch (t.kind) {
  case Tok::end:
    return "end of input";
  case Tok::string:
    return "string";
  default:
    return fmt::format("\"{}\"", t.text);
  }
}

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = src_[i_];
      if (c == '"') {
        t.kind = Tok::string;
        t.text = read_string();
      } else if (digit(c) || ((c == '-' || c == '+' || c == '.') && number_follows())) {
        t.kind = Tok::number;
        t.text = read_number(t.number, t.pos);
      } else if (word_start(c)) {
        t.kind = Tok::word;
        while (i_ < src_.size() && word_char(src_[i_]))
          t.text += advance();
      } else if (std::string_view("{}(),;.=+-").find(c) != std::string_view::npos) {
        t.kind = Tok::punct;
        t.text = std::string(1, advance());
      } else {
        throw DslError(line_, col_, fmt::format("unexpected character '{}'", c));
      }
      out.push_back(std::move(t));
    }
  }

private:
  char advance() {
    const char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  bool number_follows() const {
    std::size_t j = i_;
    if (src_[j] == '-' || src_[j] == '+')
      ++j;
    if (j < src_.size() && src_[j] == '.')
      ++j;
    return j < src_.size() && digit(src_[j]);
  }

  std::string read_string() {
    const int line = line_, col = col_;
    advance();
    std::string s;
    for (;;) {
      if (i_ >= src_.size() || src_[i_] == '\n')
        throw DslError(line, col, "unterminated string");
      const char c = advance();
      if (c == '"')
        return s;
      if (c == '\\') {
        if (i_ >= src_.size())
          throw DslError(line, col, "unterminated string");
        const char e = advance();
        if (e != '"' && e != '\\')
          throw DslError(line_, col_ - 2, fmt::format("unknown escape '\\{}'", e));
        s += e;
      } else {
        s += c;
      }
    }
  }

  std::string read_number(double &value, SourcePos pos) {
    std::string s;
    if (src_[i_] == '-' || src_[i_] == '+')
      s += advance();
    while (i_ < src_.size() && (digit(src_[i_]) || src_[i_] == '.'))
      s += advance();
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < src_.size() && (src_[j] == '-' || src_[j] == '+'))
        ++j;
      if (j < src_.size() && digit(src_[j])) {
        while (i_ < j)
          s += advance();
        while (i_ < src_.size() && digit(src_[i_]))
          s += advance();
      }
    }
    if (i_ < src_.size() && word_char(src_[i_]))
      throw DslError(pos.line, pos.column, fmt::format("malformed number \"{}{}\"", s, src_[i_]));
    std::string_view body = s;
    if (!body.empty() && body.front() == '+')
      body.remove_prefix(1);
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || end != body.data() + body.size() || !std::isfinite(value))
      throw DslError(pos.line, pos.column, fmt::format("malformed number \"{}\"", s));
    return s;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  std::vector<EditTemplate> run() {
    std::vector<EditTemplate> out;
    while (peek().kind != Tok::end)
      out.push_back(parse_template());
    if (out.empty())
      throw DslError(peek().pos.line, peek().pos.column, "expected \"template\", found end of input");
    return out;
  }

private:
  const Token &peek() const { return toks_[k_]; }
  const Token &next() {
    const Token &t = toks_[k_];
    if (t.kind != Tok::end)
      ++k_;
    return t;
  }

  [[noreturn]] void fail(const Token &t, std::string_view expected) const {
    throw DslError(t.pos.line, t.pos.column, fmt::format("expected {}, found {}", expected, describe(t)));
  }

  bool is_word(std::string_view w) const { return peek().kind == Tok::word && peek().text == w; }
  bool is_punct(char c) const { return peek().kind == Tok::punct && peek().text[0] == c; }

  const Token &keyword(std::string_view w) {
    if (!is_word(w))
      fail(peek(), fmt::format("\"{}\"", w));
    return next();
  }

  void punct(char c) {
    if (!is_punct(c))
      fail(peek(), fmt::format("\"{}\"", c));
    next();
  }

  const Token &ident(std::string_view what) {
    if (peek().kind != Tok::word || peek().text.find('*') != std::string::npos)
      fail(peek(), what);
    return next();
  }

  double number() {
    if (peek().kind != Tok::number)
      fail(peek(), "number");
    return next().number;
  }

  Axis axis() {
    if (is_word("x")) {
      next();
      return Axis::x;
    }
    if (is_word("y")) {
      next();
      return Axis::y;
    }
    fail(peek(), "axis \"x\" or \"y\"");
  }

  Selector selector() {
    Selector s;
    for (;;) {
      Condition c;
      const Token &key = peek();
      c.pos = key.pos;
      if (is_word("category"))
        c.key = CondKey::category;
      else if (is_word("tag"))
        c.key = CondKey::tag;
      else if (is_word("gender"))
        c.key = CondKey::gender;
      else
        fail(key, "\"category\", \"tag\" or \"gender\"");
      next();
      punct('=');
      c.value = ident("identifier").text;
      s.conditions.push_back(std::move(c));
      if (!is_punct(','))
        return s;
      next();
    }
  }

  // "points" "(" PATTERN ")"
  std::string pset(SourcePos &pos) {
    keyword("points");
    punct('(');
    if (peek().kind != Tok::word)
      fail(peek(), "point pattern");
    pos = peek().pos;
    std::string p = next().text;
    punct(')');
    return p;
  }

  // "point" "(" IDENT ")"
  std::string pref(SourcePos &pos) {
    keyword("point");
    punct('(');
    pos = peek().pos;
    std::string p = ident("point name").text;
    punct(')');
    return p;
  }

  // "other" "." pref "." axis
  OtherRef other_ref() {
    OtherRef r;
    r.pos = keyword("other").pos;
    punct('.');
    SourcePos ignored;
    r.point = pref(ignored);
    punct('.');
    r.axis = axis();
    return r;
  }

  Expr expr() {
    Expr e;
    if (peek().kind == Tok::number) {
      e.constant = number();
      return e;
    }
    if (!is_word("other"))
      fail(peek(), "number or \"other\"");
    e.ref = other_ref();
    if (is_punct('+')) {
      next();
      e.constant = number();
    } else if (is_punct('-')) {
      next();
      e.constant = -number();
    } else if (peek().kind == Tok::number && (peek().text[0] == '+' || peek().text[0] == '-')) {
      e.constant = number();
    }
    return e;
  }

  EditTemplate parse_template() {
    EditTemplate t;
    t.pos = keyword("template").pos;
    if (peek().kind != Tok::string)
      fail(peek(), "template name string");
    t.name = next().text;
    keyword("for");
    t.selector = selector();
    punct('{');
    while (!is_punct('}')) {
      if (peek().kind == Tok::end)
        fail(peek(), "\"}\"");
      statement(t);
    }
    next();
    return t;
  }

  void statement(EditTemplate &t) {
    const Token &head = peek();
    Statement s;
    s.pos = head.pos;
    if (is_word("require")) {
      next();
      keyword("other");
      punct('(');
      Selector sel = selector();
      punct(')');
      punct(';');
      if (t.required_other)
        throw DslError(head.pos.line, head.pos.column,
                       fmt::format("duplicate require (first at {}:{})", t.require_pos.line, t.require_pos.column));
      t.required_other = std::move(sel);
      t.require_pos = head.pos;
      return;
    }
    if (is_word("offset")) {
      next();
      Offset o;
      o.pattern = pset(s.arg_pos);
      keyword("by");
      punct('(');
      o.dx = number();
      punct(',');
      o.dy = number();
      punct(')');
      if (is_word("*")) {
        next();
        keyword("body_height");
        o.body_scaled = true;
      } else if (is_word("*body_height")) {
        next();
        o.body_scaled = true;
      }
      s.kind = o;
    } else if (is_word("set")) {
      next();
      if (is_word("style")) {
        next();
        SetStyle st;
        s.arg_pos = peek().pos;
        st.entry = ident("style entry").text;
        punct('=');
        st.value = ident("style value").text;
        s.kind = st;
      } else {
        SetAxis sa;
        sa.point = pref(s.arg_pos);
        punct('.');
        sa.axis = axis();
        punct('=');
        sa.value = expr();
        s.kind = sa;
      }
    } else if (is_word("align")) {
      next();
      Align a;
      a.pattern = pset(s.arg_pos);
      keyword("with");
      a.target = other_ref();
      s.kind = a;
    } else if (is_word("disable")) {
      next();
      Disable d;
      d.pattern = pset(s.arg_pos);
      s.kind = d;
    } else if (is_word("enable")) {
      next();
      Enable e;
      e.pattern = pset(s.arg_pos);
      s.kind = e;
    } else if (is_word("clamp")) {
      next();
      ClampWithin c;
      c.pattern = pset(s.arg_pos);
      keyword("within");
      keyword("other");
      s.kind = c;
    } else {
      fail(head, "statement");
    }
    punct(';');
    t.statements.push_back(std::move(s));
  }

  std::vector<Token> toks_;
  std::size_t k_ = 0;
};

} // namespace

std::vector<EditTemplate> parse_templates_unchecked(std::string_view source) {
  return Parser(Lexer(source).run()).run();
}

// ---------------------------------------------------------------------------
// Lint

namespace {

void lint_selector(const Selector &s, std::string_view where, std::vector<DslError> &out) {
  for (const Condition &c : s.conditions) {
    if (c.key == CondKey::category && !parse_category(c.value))
      out.emplace_back(c.pos.line, c.pos.column, fmt::format("unknown category \"{}\" in {}", c.value, where));
    if (c.key == CondKey::gender && !parse_gender(c.value))
      out.emplace_back(c.pos.line, c.pos.column, fmt::format("unknown gender \"{}\" in {}", c.value, where));
  }
}

std::optional<GarmentCategory> selected_category(const std::optional<Selector> &s) {
  if (!s)
    return std::nullopt;
  for (const Condition &c : s->conditions)
    if (c.key == CondKey::category)
      return parse_category(c.value);
  return std::nullopt;
}

} // namespace

std::vector<DslError> lint_template(const EditTemplate &t, const ControlPointSchema &schema) {
  std::vector<DslError> out;
  if (t.name.empty())
    out.emplace_back(t.pos.line, t.pos.column, "template name is empty");
  lint_selector(t.selector, "selector", out);
  if (t.required_other)
    lint_selector(*t.required_other, "require", out);

  const auto own = selected_category(t.selector);
  const auto others = selected_category(t.required_other);

  auto check_pattern = [&](const std::string &pattern, SourcePos pos) {
    const bool literal = pattern.find('*') == std::string::npos;
    const auto ids = schema.match(pattern);
    if (ids.empty()) {
      out.emplace_back(pos.line, pos.column,
                       literal ? fmt::format("unknown point \"{}\"", pattern)
                               : fmt::format("pattern \"{}\" matches no point", pattern));
      return;
    }
    if (own) {
      const PresenceMask app = schema.applicability(*own);
      if (std::none_of(ids.begin(), ids.end(), [&](int id) { return app.test(static_cast<std::size_t>(id)); }))
        out.emplace_back(pos.line, pos.column,
                         fmt::format("\"{}\" matches no point used by category {}", pattern, to_string(*own)));
    }
  };

  auto check_other = [&](const OtherRef *ref, SourcePos pos) {
    if (!t.required_other)
      out.emplace_back(pos.line, pos.column, "\"other\" used without a require clause");
    if (!ref)
      return;
    const auto id = schema.find(ref->point);
    if (!id) {
      out.emplace_back(ref->pos.line, ref->pos.column, fmt::format("unknown point \"{}\"", ref->point));
    } else if (others && !schema.applicability(*others).test(static_cast<std::size_t>(*id))) {
      out.emplace_back(ref->pos.line, ref->pos.column,
                       fmt::format("point \"{}\" is not used by category {}", ref->point, to_string(*others)));
    }
  };

  for (const Statement &s : t.statements) {
    std::visit(
        [&](const auto &st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, SetAxis>) {
            check_pattern(st.point, s.arg_pos);
            if (st.value.ref)
              check_other(&*st.value.ref, st.value.ref->pos);
          } else if constexpr (std::is_same_v<T, SetStyle>) {
            if (std::find(StyleVector::kEntryNames.begin(), StyleVector::kEntryNames.end(), st.entry) ==
                StyleVector::kEntryNames.end())
              out.emplace_back(s.arg_pos.line, s.arg_pos.column, fmt::format("unknown style entry \"{}\"", st.entry));
            else if (!StyleVector::valid(st.entry, st.value))
              out.emplace_back(s.arg_pos.line, s.arg_pos.column,
                               fmt::format("invalid value \"{}\" for style {}", st.value, st.entry));
          } else if constexpr (std::is_same_v<T, Align>) {
            check_pattern(st.pattern, s.arg_pos);
            check_other(&st.target, st.target.pos);
          } else if constexpr (std::is_same_v<T, ClampWithin>) {
            check_pattern(st.pattern, s.arg_pos);
            check_other(nullptr, s.pos);
          } else {
            check_pattern(st.pattern, s.arg_pos);
          }
        },
        s.kind);
  }
  std::stable_sort(out.begin(), out.end(), [](const DslError &a, const DslError &b) {
    return std::pair(a.line(), a.column()) < std::pair(b.line(), b.column());
  });
  return out;
}

std::vector<EditTemplate> parse_templates(std::string_view source, const ControlPointSchema &schema) {
  auto templates = parse_templates_unchecked(source);
  std::set<std::string> names;
  for (const EditTemplate &t : templates) {
    if (!names.insert(t.name).second)
      throw DslError(t.pos.line, t.pos.column, fmt::format("duplicate template name \"{}\"", t.name));
    auto issues = lint_template(t, schema);
    if (!issues.empty())
      throw issues.front();
  }
  return templates;
}

EditTemplate parse_template(std::string_view source, const ControlPointSchema &schema) {
  auto templates = parse_templates(source, schema);
  if (templates.size() != 1)
    throw DslError(templates[1].pos.line, templates[1].pos.column, "expected exactly one template");
  return std::move(templates.front());
}

// ---------------------------------------------------------------------------
// Printer

std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{})
    throw ValidationError("format_number: value does not fit");
  return std::string(buf, end);
}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string print_ref(const OtherRef &r) { return fmt::format("other.point({}).{}", r.point, to_string(r.axis)); }

} // namespace

std::string print_selector(const Selector &s) {
  std::string out;
  for (std::size_t i = 0; i < s.conditions.size(); ++i) {
    if (i)
      out += ", ";
    out += fmt::format("{}={}", to_string(s.conditions[i].key), s.conditions[i].value);
  }
  return out;
}

std::string print_statement(const Statement &s) {
  return std::visit(
      [](const auto &st) -> std::string {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, Offset>) {
          return fmt::format("offset points({}) by ({}, {}){};", st.pattern, format_number(st.dx),
                             format_number(st.dy), st.body_scaled ? " * body_height" : "");
        } else if constexpr (std::is_same_v<T, SetAxis>) {
          std::string rhs;
          if (!st.value.ref) {
            rhs = format_number(st.value.constant);
          } else {
            rhs = print_ref(*st.value.ref);
            if (st.value.constant != 0.0)
              rhs += std::signbit(st.value.constant) ? " - " + format_number(-st.value.constant)
                                                     : " + " + format_number(st.value.constant);
          }
          return fmt::format("set point({}).{} = {};", st.point, to_string(st.axis), rhs);
        } else if constexpr (std::is_same_v<T, Align>) {
          return fmt::format("align points({}) with {};", st.pattern, print_ref(st.target));
        } else if constexpr (std::is_same_v<T, Disable>) {
          return fmt::format("disable points({});", st.pattern);
        } else if constexpr (std::is_same_v<T, Enable>) {
          return fmt::format("enable points({});", st.pattern);
        } else if constexpr (std::is_same_v<T, SetStyle>) {
          return fmt::format("set style {} = {};", st.entry, st.value);
        } else {
          return fmt::format("clamp points({}) within other;", st.pattern);
        }
      },
      s.kind);
}

std::string print_template(const EditTemplate &t) {
  std::string out = fmt::format("template {} for {} {{\n", quote(t.name), print_selector(t.selector));
  if (t.required_other)
    out += fmt::format("  require other({});\n", print_selector(*t.required_other));
  for (const Statement &s : t.statements)
    out += "  " + print_statement(s) + "\n";
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Library

void EditLibrary::add(EditTemplate t) {
  if (templates_.contains(t.name))
    throw ValidationError(fmt::format("edit template \"{}\" defined twice", t.name));
  std::string name = t.name;
  templates_.emplace(std::move(name), std::move(t));
}

void EditLibrary::load_file(const std::filesystem::path &file, const ControlPointSchema &schema) {
  std::vector<EditTemplate> parsed;
  try {
    parsed = parse_templates(io::read_text(file), schema);
  } catch (const DslError &e) {
    throw DslError(file.string(), e);
  }
  for (EditTemplate &t : parsed) {
    if (templates_.contains(t.name))
      throw ValidationError(fmt::format("{}: edit template \"{}\" defined twice", file.string(), t.name));
    add(std::move(t));
  }
}

void EditLibrary::load_dir(const std::filesystem::path &dir, const ControlPointSchema &schema) {
  if (!std::filesystem::is_directory(dir))
    throw ValidationError(fmt::format("template directory \"{}\" does not exist", dir.string()));
  std::vector<std::filesystem::path> files;
  for (const auto &entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".drape")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto &f : files)
    load_file(f, schema);
}

const EditTemplate *EditLibrary::find(std::string_view name) const {
  const auto it = templates_.find(name);
  return it == templates_.end() ? nullptr : &it->second;
}

const EditTemplate &EditLibrary::get(std::string_view name) const {
  if (const auto *t = find(name))
    return *t;
  throw ValidationError(fmt::format("unknown edit template \"{}\"", name));
}

std::vector<std::string> EditLibrary::names() const {
  std::vector<std::string> out;
  for (const auto &[name, t] : templates_)
    out.push_back(name);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

std::size_t EditReport::applied_count() const {
  return static_cast<std::size_t>(
      std::count_if(statements.begin(), statements.end(), [](const StatementOutcome &s) { return s.applied; }));
}

namespace {

double &coord(Vec2 &p, Axis a) { return a == Axis::x ? p.x : p.y; }
double read_axis(Vec2 p, Axis a) { return a == Axis::x ? p.x : p.y; }

class Evaluator {
public:
  Evaluator(const EditTemplate &t, const GarmentMeta &meta, std::optional<OtherGarment> other,
            const EditContext &ctx)
      : t_(t), meta_(meta), other_(other), ctx_(ctx), schema_(*ctx.schema) {}

  EditResult run(const ControlPointSet &target) {
    EditResult r;
    r.points = target;
    r.report.template_name = t_.name;
    r.report.garment = meta_.id;
    r.report.statements.resize(t_.statements.size());
    for (std::size_t i = 0; i < t_.statements.size(); ++i) {
      r.report.statements[i].index = i;
      r.report.statements[i].text = print_statement(t_.statements[i]);
    }

    // Styles first: a discrete style change re-predicts the points.
    StyleVector style = target.style;
    for (std::size_t i = 0; i < t_.statements.size(); ++i)
      if (const auto *st = std::get_if<SetStyle>(&t_.statements[i].kind)) {
        style.set(st->entry, st->value);
        auto &o = r.report.statements[i];
        o.applied = true;
        o.reason = target.style.get(st->entry) == st->value ? "style already set" : "";
      }
    if (style != target.style) {
      if (!ctx_.repredict)
        throw EditError(fmt::format("template \"{}\" changes the style of \"{}\" but no re-prediction is available",
                                    t_.name, meta_.id));
      r.points = ctx_.repredict(style);
      r.points.style = style;
      r.report.repredicted = true;
    }

    for (std::size_t i = 0; i < t_.statements.size(); ++i) {
      index_ = i;
      std::visit([&](const auto &st) { step(st, r); }, t_.statements[i].kind);
    }
    return r;
  }

private:
  void skip(EditResult &r, std::string reason) {
    r.report.statements[index_].applied = false;
    r.report.statements[index_].reason = std::move(reason);
  }
  void done(EditResult &r) { r.report.statements[index_].applied = true; }

  void move(EditResult &r, int id, Vec2 to) {
    Vec2 &p = r.points.coords[static_cast<std::size_t>(id)];
    if (p.x != to.x || p.y != to.y)
      r.report.moves.push_back({id, p, to, index_});
    p = to;
  }

  void wrote(EditResult &r, int id, Axis axis) {
    const auto key = std::pair(id, axis);
    if (const auto it = writers_.find(key); it != writers_.end())
      r.report.conflicts.push_back(fmt::format("{}.{} set by statements {} and {}; statement {} wins",
                                               schema_.point(id).name, to_string(axis), it->second, index_, index_));
    writers_[key] = index_;
  }

  std::vector<int> present_matches(const EditResult &r, const std::string &pattern) const {
    std::vector<int> out;
    for (int id : schema_.match(pattern))
      if (r.points.present.test(static_cast<std::size_t>(id)))
        out.push_back(id);
    return out;
  }

  const ControlPointSet &other_points() const {
    if (!other_ || !other_->points)
      throw EditError(fmt::format("template \"{}\" reads \"other\" but no other garment was given", t_.name));
    return *other_->points;
  }

  double read_other(const OtherRef &ref) const {
    const ControlPointSet &o = other_points();
    const auto id = schema_.find(ref.point);
    if (!id)
      throw EditError(fmt::format("template \"{}\": unknown point \"{}\"", t_.name, ref.point));
    if (!o.present.test(static_cast<std::size_t>(*id)))
      throw EditError(fmt::format("template \"{}\": point \"{}\" is absent on the other garment{}", t_.name,
                                  ref.point, other_->meta ? fmt::format(" \"{}\"", other_->meta->id) : ""));
    return read_axis(o.coords[static_cast<std::size_t>(*id)], ref.axis);
  }

  void step(const SetStyle &, EditResult &) {}

  void step(const Offset &st, EditResult &r) {
    Vec2 d{st.dx, st.dy};
    if (st.body_scaled) {
      if (!ctx_.body_height)
        throw EditError(fmt::format("template \"{}\" scales by body_height but the body height is unknown", t_.name));
      d = *ctx_.body_height * d;
    }
    const auto ids = present_matches(r, st.pattern);
    if (ids.empty())
      return skip(r, fmt::format("no present point matches \"{}\"", st.pattern));
    for (int id : ids)
      move(r, id, r.points.coords[static_cast<std::size_t>(id)] + d);
    done(r);
  }

  void step(const SetAxis &st, EditResult &r) {
    const auto id = schema_.find(st.point);
    if (!id)
      throw EditError(fmt::format("template \"{}\": unknown point \"{}\"", t_.name, st.point));
    double value = st.value.constant;
    if (st.value.ref)
      value += read_other(*st.value.ref);
    if (!r.points.present.test(static_cast<std::size_t>(*id)))
      return skip(r, fmt::format("point \"{}\" is absent", st.point));
    Vec2 p = r.points.coords[static_cast<std::size_t>(*id)];
    coord(p, st.axis) = value;
    move(r, *id, p);
    wrote(r, *id, st.axis);
    done(r);
  }

  void step(const Align &st, EditResult &r) {
    const double value = read_other(st.target);
    const auto ids = present_matches(r, st.pattern);
    if (ids.empty())
      return skip(r, fmt::format("no present point matches \"{}\"", st.pattern));
    for (int id : ids) {
      Vec2 p = r.points.coords[static_cast<std::size_t>(id)];
      coord(p, st.target.axis) = value;
      move(r, id, p);
      wrote(r, id, st.target.axis);
    }
    done(r);
  }

  void step(const Disable &st, EditResult &r) {
    const auto ids = present_matches(r, st.pattern);
    if (ids.empty())
      return skip(r, fmt::format("no present point matches \"{}\"", st.pattern));
    for (int id : ids) {
      r.points.present.reset(static_cast<std::size_t>(id));
      r.report.disabled.push_back(id);
    }
    done(r);
  }

  void step(const Enable &st, EditResult &r) {
    const PresenceMask app = schema_.applicability(meta_.category);
    std::vector<int> ids;
    for (int id : schema_.match(st.pattern))
      if (app.test(static_cast<std::size_t>(id)) && !r.points.present.test(static_cast<std::size_t>(id)))
        ids.push_back(id);
    if (ids.empty())
      return skip(r, fmt::format("no absent {} point matches \"{}\"", to_string(meta_.category), st.pattern));
    for (int id : ids) {
      r.points.present.set(static_cast<std::size_t>(id));
      r.report.enabled.push_back(id);
    }
    done(r);
  }

  void step(const ClampWithin &st, EditResult &r) {
    const ControlPointSet &o = other_points();
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < kPointCount; ++i)
      if (o.present.test(i))
        pts.push_back(o.coords[i]);
    const ConvexHull hull = convex_hull(pts);
    if (hull.degenerate())
      throw EditError(fmt::format("template \"{}\": other garment hull is degenerate", t_.name));
    const auto ids = present_matches(r, st.pattern);
    if (ids.empty())
      return skip(r, fmt::format("no present point matches \"{}\"", st.pattern));
    for (int id : ids) {
      const Vec2 p = r.points.coords[static_cast<std::size_t>(id)];
      if (outside_distance(hull, p) > 0.0)
        move(r, id, pull_inside(hull, p, ctx_.clamp_margin));
    }
    done(r);
  }

  const EditTemplate &t_;
  const GarmentMeta &meta_;
  std::optional<OtherGarment> other_;
  const EditContext &ctx_;
  const ControlPointSchema &schema_;
  std::size_t index_ = 0;
  std::map<std::pair<int, Axis>, std::size_t> writers_;
};

} // namespace

EditResult apply_template(const EditTemplate &t, const ControlPointSet &target, const GarmentMeta &target_meta,
                          std::optional<OtherGarment> other, const EditContext &context) {
  if (!context.schema)
    throw EditError("apply_template: no schema in the edit context");
  if (!applicable(t, target_meta))
    throw EditError(fmt::format("template \"{}\" ({}) does not apply to garment \"{}\"", t.name,
                                print_selector(t.selector), target_meta.id));
  if (t.uses_other() && !t.required_other)
    throw EditError(fmt::format("template \"{}\" reads \"other\" without a require clause", t.name));
  if (t.required_other) {
    if (!other || !other->points || !other->meta)
      throw EditError(fmt::format("template \"{}\" requires other({}), none given", t.name,
                                  print_selector(*t.required_other)));
    if (!t.required_other->matches(*other->meta))
      throw EditError(fmt::format("template \"{}\" requires other({}), \"{}\" does not match", t.name,
                                  print_selector(*t.required_other), other->meta->id));
  }
  return Evaluator(t, target_meta, t.required_other ? other : std::nullopt, context).run(target);
}

} // namespace drape
