#include "chatharvest/curator.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chatharvest/csv.hpp"
#include "chatharvest/errors.hpp"
#include "text_util.hpp"

namespace chatharvest {

namespace {

constexpr std::string_view kNormalizable[] = {"participants", "name",       "sex",
                                              "group",        "ses", "study_type"};

bool normalizable(std::string_view column) {
  return std::find(std::begin(kNormalizable), std::end(kNormalizable), column) !=
         std::end(kNormalizable);
}

using Value = std::optional<std::string>;

struct Step {
  Value& v;

  void operator()(const rule::Rename& r) const {
    if (v && *v == r.from) v = r.to;
  }
  void operator()(const rule::TrimTrailing& r) const {
    if (!v) return;
    auto end = v->find_last_not_of(r.chars);
    if (end == std::string::npos) {
      v.reset();
    } else {
      v->erase(end + 1);
    }
  }
  void operator()(const rule::CaseFoldTo& r) const {
    if (v && text::to_lower_ascii(*v) == text::to_lower_ascii(r.canonical)) {
      v = r.canonical;
    }
  }
  void operator()(const rule::FillMissing& r) const {
    if (!v) v = r.value;
  }
};

Value run(const std::vector<LabelRule>& rules, Value v) {
  for (const auto& r : rules) std::visit(Step{v}, r);
  if (v && v->empty()) v.reset();
  return v;
}

std::string show(const Value& v) { return v ? "'" + *v + "'" : "<missing>"; }

void check_fixed_point(const ColumnRules& c, const Value& seed) {
  auto once = run(c.rules, seed);
  auto twice = run(c.rules, once);
  if (once != twice) {
    throw RuleError("rules for column '" + c.column + "' are not idempotent: " +
                    show(seed) + " -> " + show(once) + " -> " + show(twice));
  }
}

}  // namespace

LabelRuleSet::LabelRuleSet(std::vector<ColumnRules> columns)
    : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (!is_index_column(c.column)) {
      throw RuleError("rule references unknown column '" + c.column + "'");
    }
    if (!normalizable(c.column)) {
      throw RuleError("column '" + c.column + "' cannot be normalized");
    }
    if (!seen.insert(c.column).second) {
      throw RuleError("column '" + c.column + "' has two rule sections");
    }
    std::vector<Value> seeds = {std::nullopt};
    for (const auto& r : c.rules) {
      if (const auto* x = std::get_if<rule::Rename>(&r)) {
        seeds.push_back(x->from);
        seeds.push_back(x->to);
      } else if (const auto* x = std::get_if<rule::CaseFoldTo>(&r)) {
        seeds.push_back(x->canonical);
      } else if (const auto* x = std::get_if<rule::FillMissing>(&r)) {
        seeds.push_back(x->value);
      }
    }
    for (const auto& s : seeds) check_fixed_point(c, s);
  }
}

LabelRuleSet LabelRuleSet::from_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw RuleError(std::string("rule file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") || !doc["columns"].is_object()) {
    throw RuleError("rule file needs a \"columns\" object");
  }
  std::vector<ColumnRules> columns;
  for (const auto& [column, list] : doc["columns"].items()) {
    if (!list.is_array()) {
      throw RuleError("rules for column '" + column + "' must be an array");
    }
    ColumnRules c{column, {}};
    for (const auto& entry : list) {
      try {
        auto kind = entry.at("kind").get<std::string>();
        if (kind == "rename") {
          rule::Rename r{entry.at("from").get<std::string>(), std::nullopt};
          if (entry.contains("to") && !entry["to"].is_null()) {
            r.to = entry["to"].get<std::string>();
          }
          c.rules.emplace_back(std::move(r));
        } else if (kind == "trim_trailing") {
          c.rules.emplace_back(rule::TrimTrailing{entry.at("chars").get<std::string>()});
        } else if (kind == "case_fold_to") {
          c.rules.emplace_back(rule::CaseFoldTo{entry.at("canonical").get<std::string>()});
        } else if (kind == "fill_missing") {
          c.rules.emplace_back(rule::FillMissing{entry.at("default").get<std::string>()});
        } else {
          throw RuleError("unknown rule kind '" + kind + "' for column '" + column + "'");
        }
      } catch (const json::exception& e) {
        throw RuleError("bad rule for column '" + column + "': " + e.what());
      }
    }
    columns.push_back(std::move(c));
  }
  return LabelRuleSet(std::move(columns));
}

LabelRuleSet LabelRuleSet::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open rule file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::optional<std::string> LabelRuleSet::apply(std::string_view column,
                                               std::optional<std::string> value) const {
  for (const auto& c : columns_) {
    if (c.column == column) return run(c.rules, std::move(value));
  }
  return value;
}

std::vector<std::string> LabelRuleSet::canonical_labels(std::string_view column) const {
  std::set<std::string> out;
  for (const auto& c : columns_) {
    if (c.column != column) continue;
    for (const auto& r : c.rules) {
      if (const auto* x = std::get_if<rule::Rename>(&r); x && x->to) out.insert(*x->to);
      if (const auto* x = std::get_if<rule::CaseFoldTo>(&r)) out.insert(x->canonical);
      if (const auto* x = std::get_if<rule::FillMissing>(&r)) out.insert(x->value);
    }
  }
  return {out.begin(), out.end()};
}

LabelReport get_labels(const IndexTable& table, std::string_view column) {
  if (!is_index_column(column)) {
    throw InvalidArgument("unknown index column '" + std::string(column) + "'");
  }
  std::set<std::string> labels;
  LabelReport report;
  for (const auto& row : table.rows) {
    if (auto v = cell(row, column)) {
      labels.insert(std::move(*v));
    } else {
      ++report.missing;
    }
  }
  report.labels.assign(labels.begin(), labels.end());
  return report;
}

NormalizeResult apply_rules(const IndexTable& table, const LabelRuleSet& rules) {
  NormalizeResult out{table, {}};
  for (const auto& c : rules.columns()) {
    std::map<Value, Value> memo;
    for (std::size_t i = 0; i < out.table.rows.size(); ++i) {
      auto& row = out.table.rows[i];
      auto before = cell(row, c.column);
      auto it = memo.find(before);
      if (it == memo.end()) {
        auto after = run(c.rules, before);
        if (run(c.rules, after) != after) {
          throw RuleError("rules for column '" + c.column +
                          "' are not idempotent on " + show(before));
        }
        it = memo.emplace(before, std::move(after)).first;
      }
      if (it->second != before) {
        set_cell(row, c.column, it->second);
        out.changes.push_back({i, c.column, before, it->second});
      }
    }
  }
  std::sort(out.changes.begin(), out.changes.end(), [](const Change& a, const Change& b) {
    return std::tie(a.row, a.column) < std::tie(b.row, b.column);
  });
  return out;
}

IndexTable add_participant_id(const IndexTable& table, std::string_view separator) {
  IndexTable out = table;
  for (auto& row : out.rows) {
    if (row.name && !row.name->empty()) {
      row.participant_id = row.corpus + std::string(separator) + *row.name;
    } else {
      row.participant_id.reset();
      out.warnings.push_back(row.file_path + ": no participant name, id left empty");
    }
  }
  return out;
}

std::string render_change_log(const std::vector<Change>& changes) {
  std::string out = csv::format_record({"row", "column", "before", "after"});
  for (const auto& c : changes) {
    out += csv::format_record({std::to_string(c.row), c.column,
                               c.before.value_or(""), c.after.value_or("")});
  }
  return out;
}

}  // namespace chatharvest
