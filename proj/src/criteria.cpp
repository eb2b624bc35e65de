#include "chatharvest/criteria.hpp"

#include <charconv>
#include <cmath>
#include <optional>

#include "chatharvest/errors.hpp"
#include "text_util.hpp"

namespace chatharvest {

// ---------------------------------------------------------------------------
// construction

FilterExpr FilterExpr::all_of(std::vector<FilterExpr> children) {
  if (children.size() < 2) {
    throw InvalidArgument("'and' needs at least two operands");
  }
  return FilterExpr(expr::And{std::move(children)});
}

FilterExpr FilterExpr::any_of(std::vector<FilterExpr> children) {
  if (children.size() < 2) {
    throw InvalidArgument("'or' needs at least two operands");
  }
  return FilterExpr(expr::Or{std::move(children)});
}

FilterExpr FilterExpr::negate(FilterExpr child) {
  return FilterExpr(
      expr::Not{std::make_shared<const FilterExpr>(std::move(child))});
}

FilterExpr FilterExpr::exists(std::string code) {
  return FilterExpr(expr::Exists{std::move(code)});
}

FilterExpr FilterExpr::non_empty(std::string code, Field field) {
  return FilterExpr(expr::NonEmpty{std::move(code), field});
}

FilterExpr FilterExpr::equals(std::string code, Field field,
                              std::string value) {
  return FilterExpr(expr::Equals{std::move(code), field, std::move(value)});
}

FilterExpr FilterExpr::in_set(std::string code, Field field,
                              std::vector<std::string> values) {
  if (values.empty()) throw InvalidArgument("'in' needs at least one value");
  return FilterExpr(expr::InSet{std::move(code), field, std::move(values)});
}

FilterExpr FilterExpr::age_in(std::string code, double lo_months,
                              double hi_months) {
  if (std::isnan(lo_months) || std::isnan(hi_months) || lo_months < 0 ||
      hi_months < 0 || lo_months > hi_months) {
    throw InvalidArgument("age range must satisfy 0 <= lo <= hi");
  }
  return FilterExpr(expr::AgeInRange{std::move(code), lo_months, hi_months});
}

namespace {

bool same_children(const std::vector<FilterExpr>& a,
                   const std::vector<FilterExpr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] == b[i])) return false;
  }
  return true;
}

struct NodeEqual {
  bool operator()(const expr::And& a, const expr::And& b) const {
    return same_children(a.children, b.children);
  }
  bool operator()(const expr::Or& a, const expr::Or& b) const {
    return same_children(a.children, b.children);
  }
  bool operator()(const expr::Not& a, const expr::Not& b) const {
    return *a.child == *b.child;
  }
  bool operator()(const expr::Exists& a, const expr::Exists& b) const {
    return a.code == b.code;
  }
  bool operator()(const expr::NonEmpty& a, const expr::NonEmpty& b) const {
    return a.code == b.code && a.field == b.field;
  }
  bool operator()(const expr::Equals& a, const expr::Equals& b) const {
    return a.code == b.code && a.field == b.field && a.value == b.value;
  }
  bool operator()(const expr::InSet& a, const expr::InSet& b) const {
    return a.code == b.code && a.field == b.field && a.values == b.values;
  }
  bool operator()(const expr::AgeInRange& a, const expr::AgeInRange& b) const {
    return a.code == b.code && a.lo_months == b.lo_months &&
           a.hi_months == b.hi_months;
  }
  template <typename A, typename B>
  bool operator()(const A&, const B&) const {
    return false;
  }
};

}  // namespace

bool operator==(const FilterExpr& a, const FilterExpr& b) {
  return std::visit(NodeEqual{}, a.node_, b.node_);
}

// ---------------------------------------------------------------------------
// lexer

namespace {

enum class Tok { ident, number, string, lparen, rparen, comma, dot, end };

struct Token {
  Tok kind;
  std::string text;
  double number = 0;
  std::size_t line;
  std::size_t column;
};

bool ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}

bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t{Tok::end, {}, 0, line_, column_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == '.') {
        t.kind = c == '('   ? Tok::lparen
                 : c == ')' ? Tok::rparen
                 : c == ',' ? Tok::comma
                            : Tok::dot;
        t.text = std::string(1, c);
        advance();
      } else if (c == '"') {
        t.kind = Tok::string;
        t.text = lex_string(t);
      } else if (digit(c) || c == '-') {
        t.kind = Tok::number;
        t.number = lex_number(t);
      } else if (ident_start(c)) {
        auto start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
        t.text = std::string(src_.substr(start, pos_ - start));
        if (t.text == "inf") {
          t.kind = Tok::number;
          t.number = kAgeUnbounded;
        } else {
          t.kind = Tok::ident;
        }
      } else {
        throw ExprError(std::string("unexpected character '") + c + "'", line_,
                        column_);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && text::is_space(src_[pos_])) advance();
  }

  std::string lex_string(const Token& start) {
    std::string out;
    advance();  // opening quote
    while (true) {
      if (pos_ >= src_.size()) {
        throw ExprError("unterminated string", start.line, start.column);
      }
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) {
          throw ExprError("unterminated string", start.line, start.column);
        }
        char e = src_[pos_];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default:
            throw ExprError(std::string("unknown escape '\\") + e + "'", line_,
                            column_);
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
  }

  double lex_number(const Token& start) {
    auto begin = pos_;
    if (src_[pos_] == '-') advance();
    while (pos_ < src_.size() && (digit(src_[pos_]) || src_[pos_] == '.')) {
      advance();
    }
    auto lexeme = src_.substr(begin, pos_ - begin);
    double value = 0;
    auto [ptr, ec] = std::from_chars(lexeme.data(),
                                     lexeme.data() + lexeme.size(), value,
                                     std::chars_format::fixed);
    if (ec != std::errc{} || ptr != lexeme.data() + lexeme.size()) {
      throw ExprError("malformed number '" + std::string(lexeme) + "'",
                      start.line, start.column);
    }
    return value;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// parser

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  FilterExpr parse() {
    auto e = parse_or();
    if (peek().kind != Tok::end) fail("expected end of expression", peek());
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  const Token& take() { return toks_[pos_++]; }

  bool at_keyword(std::string_view kw) const {
    return peek().kind == Tok::ident && peek().text == kw;
  }

  [[noreturn]] static void fail(const std::string& what, const Token& at) {
    throw ExprError(what, at.line, at.column);
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) {
      fail("expected " + std::string(what) + describe(peek()), peek());
    }
    return take();
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::end) return " but reached end of input";
    if (t.kind == Tok::number) return " but found a number";
    return " but found '" + t.text + "'";
  }

  FilterExpr parse_or() {
    std::vector<FilterExpr> parts;
    parts.push_back(parse_and());
    while (at_keyword("or")) {
      take();
      parts.push_back(parse_and());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return FilterExpr::any_of(std::move(parts));
  }

  FilterExpr parse_and() {
    std::vector<FilterExpr> parts;
    parts.push_back(parse_atom());
    while (at_keyword("and")) {
      take();
      parts.push_back(parse_atom());
    }
    if (parts.size() == 1) return std::move(parts.front());
    return FilterExpr::all_of(std::move(parts));
  }

  FilterExpr parse_atom() {
    if (at_keyword("not")) {
      take();
      return FilterExpr::negate(parse_atom());
    }
    if (peek().kind == Tok::lparen) {
      take();
      auto inner = parse_or();
      expect(Tok::rparen, "')'");
      return inner;
    }
    return parse_predicate();
  }

  std::string parse_code() {
    const auto& t = peek();
    if (t.kind != Tok::ident || t.text == "and" || t.text == "or" ||
        t.text == "not") {
      fail("expected speaker code" + describe(t), t);
    }
    return take().text;
  }

  std::pair<std::string, Field> parse_field_path() {
    auto code = parse_code();
    expect(Tok::dot, "'.'");
    const auto& f = expect(Tok::ident, "field name");
    auto field = field_from_string(f.text);
    if (!field) fail("unknown field '" + f.text + "'", f);
    return {std::move(code), *field};
  }

  FilterExpr parse_predicate() {
    const auto& name = peek();
    if (name.kind != Tok::ident) fail("expected predicate" + describe(name), name);
    take();
    if (name.text == "and" || name.text == "or") {
      fail("expected predicate but found '" + name.text + "'", name);
    }
    if (peek().kind != Tok::lparen) {
      fail("expected '(' after '" + name.text + "'", peek());
    }
    static const char* const kPredicates[] = {"exists", "nonempty", "equals",
                                              "in", "age_in"};
    bool known = false;
    for (auto p : kPredicates) known = known || name.text == p;
    if (!known) fail("unknown predicate '" + name.text + "'", name);
    take();  // (

    std::optional<FilterExpr> out;
    if (name.text == "exists") {
      out = FilterExpr::exists(parse_code());
    } else if (name.text == "nonempty") {
      auto [code, field] = parse_field_path();
      out = FilterExpr::non_empty(std::move(code), field);
    } else if (name.text == "equals") {
      auto [code, field] = parse_field_path();
      expect(Tok::comma, "','");
      auto value = expect(Tok::string, "string literal").text;
      out = FilterExpr::equals(std::move(code), field, std::move(value));
    } else if (name.text == "in") {
      auto [code, field] = parse_field_path();
      std::vector<std::string> values;
      do {
        expect(Tok::comma, "','");
        values.push_back(expect(Tok::string, "string literal").text);
      } while (peek().kind == Tok::comma);
      out = FilterExpr::in_set(std::move(code), field, std::move(values));
    } else {
      auto code = parse_code();
      expect(Tok::comma, "','");
      const auto& lo = expect(Tok::number, "number");
      expect(Tok::comma, "','");
      const auto& hi = expect(Tok::number, "number");
      if (lo.number < 0 || hi.number < 0 || lo.number > hi.number) {
        fail("malformed age range: need 0 <= lo <= hi", lo);
      }
      out = FilterExpr::age_in(std::move(code), lo.number, hi.number);
    }
    expect(Tok::rparen, "')'");
    return std::move(*out);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// printing

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

std::string number(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, ptr);
}

std::string field_path(const std::string& code, Field f) {
  return code + "." + std::string(to_string(f));
}

void print(const FilterExpr& e, std::string& out);

bool is_junction(const FilterExpr& e) {
  return std::holds_alternative<expr::And>(e.node()) ||
         std::holds_alternative<expr::Or>(e.node());
}

void print_operand(const FilterExpr& e, bool parenthesize, std::string& out) {
  if (parenthesize) out += '(';
  print(e, out);
  if (parenthesize) out += ')';
}

struct Printer {
  std::string& out;

  void operator()(const expr::And& n) const {
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += " and ";
      print_operand(n.children[i], is_junction(n.children[i]), out);
    }
  }
  void operator()(const expr::Or& n) const {
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += " or ";
      // an unparenthesized `and` child would still parse back correctly, but
      // a nested `or` would be flattened
      print_operand(n.children[i], is_junction(n.children[i]), out);
    }
  }
  void operator()(const expr::Not& n) const {
    out += "not ";
    print_operand(*n.child, is_junction(*n.child), out);
  }
  void operator()(const expr::Exists& n) const {
    out += "exists(" + n.code + ")";
  }
  void operator()(const expr::NonEmpty& n) const {
    out += "nonempty(" + field_path(n.code, n.field) + ")";
  }
  void operator()(const expr::Equals& n) const {
    out += "equals(" + field_path(n.code, n.field) + ", " + quote(n.value) + ")";
  }
  void operator()(const expr::InSet& n) const {
    out += "in(" + field_path(n.code, n.field);
    for (const auto& v : n.values) out += ", " + quote(v);
    out += ")";
  }
  void operator()(const expr::AgeInRange& n) const {
    out += "age_in(" + n.code + ", " + number(n.lo_months) + ", " +
           number(n.hi_months) + ")";
  }
};

void print(const FilterExpr& e, std::string& out) {
  std::visit(Printer{out}, e.node());
}

// ---------------------------------------------------------------------------
// evaluation

struct Evaluator {
  const HeaderMetadata& header;

  bool operator()(const expr::And& n) const {
    for (const auto& c : n.children) {
      if (!eval_expr(c, header)) return false;
    }
    return true;
  }
  bool operator()(const expr::Or& n) const {
    for (const auto& c : n.children) {
      if (eval_expr(c, header)) return true;
    }
    return false;
  }
  bool operator()(const expr::Not& n) const {
    return !eval_expr(*n.child, header);
  }
  bool operator()(const expr::Exists& n) const {
    return header.find(n.code) != nullptr;
  }
  bool operator()(const expr::NonEmpty& n) const {
    return get_field(header, n.code, n.field).has_value();
  }
  bool operator()(const expr::Equals& n) const {
    auto v = get_field(header, n.code, n.field);
    return v && text::trim(*v) == text::trim(n.value);
  }
  bool operator()(const expr::InSet& n) const {
    auto v = get_field(header, n.code, n.field);
    if (!v) return false;
    auto value = text::trim(*v);
    for (const auto& candidate : n.values) {
      if (value == text::trim(candidate)) return true;
    }
    return false;
  }
  bool operator()(const expr::AgeInRange& n) const {
    const auto* p = header.find(n.code);
    if (p == nullptr || !p->age_months) return false;
    return n.lo_months <= *p->age_months && *p->age_months <= n.hi_months;
  }
};

}  // namespace

FilterExpr parse_expr(std::string_view source) {
  if (text::is_blank(source)) throw ExprError("empty filter expression", 1, 1);
  return Parser(Lexer(source).run()).parse();
}

std::string to_source(const FilterExpr& e) {
  std::string out;
  print(e, out);
  return out;
}

bool eval_expr(const FilterExpr& e, const HeaderMetadata& header) {
  return std::visit(Evaluator{header}, e.node());
}

}  // namespace chatharvest
