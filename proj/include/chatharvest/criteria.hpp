#pragma once

// Boolean filter expressions over CHAT header metadata.
//
//   exists(CHI) and (nonempty(CHI.ses) or nonempty(MOT.education))
//   equals(CHI.group, "TD") and age_in(CHI, 0, 72)
//
// `and` binds tighter than `or`; `not` applies to the following atom.
// Evaluation is total: a missing participant or field makes an atom false.

#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chatharvest/chat_header.hpp"

namespace chatharvest {

class FilterExpr;

namespace expr {

struct And {
  std::vector<FilterExpr> children;
};
struct Or {
  std::vector<FilterExpr> children;
};
struct Not {
  std::shared_ptr<const FilterExpr> child;
};
struct Exists {
  std::string code;
};
struct NonEmpty {
  std::string code;
  Field field;
};
struct Equals {
  std::string code;
  Field field;
  std::string value;
};
struct InSet {
  std::string code;
  Field field;
  std::vector<std::string> values;
};
struct AgeInRange {
  std::string code;
  double lo_months;
  double hi_months;  // may be +infinity
};

}  // namespace expr

/// Immutable filter AST node. Construct through the factory functions, which
/// enforce the arity and range invariants.
class FilterExpr {
 public:
  using Node = std::variant<expr::And, expr::Or, expr::Not, expr::Exists,
                            expr::NonEmpty, expr::Equals, expr::InSet,
                            expr::AgeInRange>;

  static FilterExpr all_of(std::vector<FilterExpr> children);
  static FilterExpr any_of(std::vector<FilterExpr> children);
  static FilterExpr negate(FilterExpr child);
  static FilterExpr exists(std::string code);
  static FilterExpr non_empty(std::string code, Field field);
  static FilterExpr equals(std::string code, Field field, std::string value);
  static FilterExpr in_set(std::string code, Field field,
                           std::vector<std::string> values);
  static FilterExpr age_in(std::string code, double lo_months,
                           double hi_months);

  const Node& node() const { return node_; }

  friend bool operator==(const FilterExpr& a, const FilterExpr& b);

 private:
  explicit FilterExpr(Node node) : node_(std::move(node)) {}
  Node node_;
};

/// Parses filter source text. Throws ExprError with line/column on syntax
/// errors, unknown predicates or fields, and malformed ranges.
FilterExpr parse_expr(std::string_view source);

/// Canonical source text; parse_expr(to_source(e)) == e.
std::string to_source(const FilterExpr& e);

bool eval_expr(const FilterExpr& e, const HeaderMetadata& header);

constexpr double kAgeUnbounded = std::numeric_limits<double>::infinity();

}  // namespace chatharvest
