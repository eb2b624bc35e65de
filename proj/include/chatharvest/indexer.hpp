#pragma once

// Second level of the search: every local transcript is inspected and the
// matching ones become rows of a deterministic index table.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chatharvest/chat_header.hpp"
#include "chatharvest/criteria.hpp"

namespace chatharvest {

/// One indexed transcript. Optional fields are never present-but-empty.
struct IndexRow {
  std::string file_path;     // '/'-separated
  std::string corpus;
  std::string participants;  // "CHI, MOT"
  std::optional<std::string> name;
  std::optional<double> age_m;
  std::optional<std::string> sex;
  std::optional<std::string> group;
  std::optional<std::string> ses;
  std::string study_type;    // "cross, toyplay, TD"; empty when no @Types
  std::optional<std::string> participant_id;

  friend bool operator==(const IndexRow&, const IndexRow&) = default;
};

struct Provenance {
  std::string criteria;
  std::string mirror_root;
  std::string focus;
  std::string created;  // UTC ISO 8601
};

struct IndexTable {
  std::vector<IndexRow> rows;  // sorted by (corpus, file_path)
  Provenance provenance;
  std::vector<std::string> warnings;
};

inline constexpr std::array<std::string_view, 10> kIndexColumns = {
    "file_path", "corpus", "participants", "name",       "age_m",
    "sex",       "group",  "ses",          "study_type", "participant_id"};

/// Cell accessors by column name. `cell` renders age_m with one decimal and
/// returns nullopt for missing values (empty strings count as missing).
/// Both throw InvalidArgument for an unknown column.
std::optional<std::string> cell(const IndexRow& row, std::string_view column);
void set_cell(IndexRow& row, std::string_view column,
              std::optional<std::string> value);
bool is_index_column(std::string_view column);

/// Builds a row from a parsed header. Focus-participant fields (name, age_m,
/// sex, group) come from `focus`; ses falls back to MOT when the focus has
/// none. When the focus has no name the role stands in for it. A missing
/// focus participant leaves those fields empty and adds a warning.
IndexRow row_from_header(const HeaderMetadata& header, std::string_view focus,
                         std::vector<std::string>* warnings = nullptr);

struct IndexOptions {
  std::string focus = "CHI";
  std::size_t parallelism = 1;
  ParseMode mode = ParseMode::lenient;
  // Render file_path relative to this directory instead of the mirror root.
  std::optional<std::filesystem::path> paths_relative_to;
};

/// Parses and filters every `.cha` file under `root` (directories starting
/// with '.' are skipped). Unreadable or unparsable files become warnings;
/// in strict mode a malformed header throws HeaderError naming the file.
IndexTable index_files(const std::filesystem::path& root,
                       const FilterExpr& criteria,
                       const IndexOptions& options = {});

/// RFC 4180 rendering with the fixed column header line.
std::string render_index_csv(const IndexTable& table);
IndexTable parse_index_csv(std::string_view text);

/// Writes the CSV to `path` and the provenance record to
/// `<path>.provenance.json`. Throws IoError when either cannot be written.
void write_index(const IndexTable& table, const std::filesystem::path& path);
IndexTable read_index(const std::filesystem::path& path);

/// Sorts rows by (corpus, file_path).
void sort_rows(std::vector<IndexRow>& rows);

}  // namespace chatharvest
