#pragma once

// Declarative clean-up of an index table: label standardization rules per
// column plus cross-corpus participant identifiers.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chatharvest/indexer.hpp"

namespace chatharvest {

namespace rule {

/// Exact match `from` -> `to`; a missing `to` deletes the value.
struct Rename {
  std::string from;
  std::optional<std::string> to;
  friend bool operator==(const Rename&, const Rename&) = default;
};
/// Strips any trailing characters from `chars`.
struct TrimTrailing {
  std::string chars;
  friend bool operator==(const TrimTrailing&, const TrimTrailing&) = default;
};
/// Values equal to `canonical` ignoring ASCII case become `canonical`.
struct CaseFoldTo {
  std::string canonical;
  friend bool operator==(const CaseFoldTo&, const CaseFoldTo&) = default;
};
/// Missing values become `value`.
struct FillMissing {
  std::string value;
  friend bool operator==(const FillMissing&, const FillMissing&) = default;
};

}  // namespace rule

using LabelRule =
    std::variant<rule::Rename, rule::TrimTrailing, rule::CaseFoldTo, rule::FillMissing>;

struct ColumnRules {
  std::string column;
  std::vector<LabelRule> rules;  // applied in order
};

/// Ordered rules per column. Construction validates that the columns can be
/// normalized (participants, name, sex, group, ses, study_type) and that every
/// produced label is a fixed point of its column's pipeline; otherwise
/// RuleError.
class LabelRuleSet {
 public:
  LabelRuleSet() = default;
  explicit LabelRuleSet(std::vector<ColumnRules> columns);

  /// JSON document:
  ///   {"columns": {"group": [{"kind": "rename", "from": "typical", "to": "TD"},
  ///                          {"kind": "trim_trailing", "chars": "_"},
  ///                          {"kind": "case_fold_to", "canonical": "MOT_Older"},
  ///                          {"kind": "fill_missing", "default": "unspecified"}]}}
  static LabelRuleSet from_json(std::string_view text);
  static LabelRuleSet load(const std::filesystem::path& file);

  const std::vector<ColumnRules>& columns() const { return columns_; }

  /// Runs one column's pipeline on a single value.
  std::optional<std::string> apply(std::string_view column,
                                   std::optional<std::string> value) const;

  /// Every label a rule can produce for `column` (rename targets, fold
  /// canonicals, fill values).
  std::vector<std::string> canonical_labels(std::string_view column) const;

 private:
  std::vector<ColumnRules> columns_;
};

struct LabelReport {
  std::vector<std::string> labels;  // distinct, sorted
  std::size_t missing = 0;
};

/// Distinct non-missing values of a column. InvalidArgument for an unknown
/// column.
LabelReport get_labels(const IndexTable& table, std::string_view column);

struct Change {
  std::size_t row;
  std::string column;
  std::optional<std::string> before;
  std::optional<std::string> after;

  friend bool operator==(const Change&, const Change&) = default;
};

struct NormalizeResult {
  IndexTable table;
  std::vector<Change> changes;
};

/// Applies `rules` to a copy of `table`. Row order, file_path and corpus are
/// never touched. Throws RuleError when a rule set would not be idempotent on
/// some value present in the table.
NormalizeResult apply_rules(const IndexTable& table, const LabelRuleSet& rules);

/// Fills participant_id = corpus + separator + name. Rows without a name get
/// no id and a warning in the returned table's warnings.
IndexTable add_participant_id(const IndexTable& table, std::string_view separator = "/");

/// "row,column,before,after" CSV; row is the 0-based data row index.
std::string render_change_log(const std::vector<Change>& changes);

}  // namespace chatharvest
