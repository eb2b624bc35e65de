#pragma once

// Typed view of the header block of a CHAT transcript.
//
// Only the lines that carry per-file metadata are interpreted
// (@Participants, @ID, @Types, @Languages); everything else in the header
// block is accepted or reported as a warning. Utterance tiers are never read.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chatharvest {

enum class ParseMode { lenient, strict };

enum class SexKind { male, female, other };

/// Sex slot of an @ID line. `raw` keeps the source text when it is not one of
/// the two recognized values.
struct Sex {
  SexKind kind = SexKind::other;
  std::string raw;

  friend bool operator==(const Sex&, const Sex&) = default;
};

struct ParticipantRecord {
  std::string code;
  std::optional<std::string> name;
  std::string role;
  std::optional<std::string> language;
  std::optional<std::string> corpus;
  std::optional<std::string> age;  // raw token, e.g. "1;08.15"
  std::optional<double> age_months;
  std::optional<Sex> sex;
  std::optional<std::string> group;
  std::optional<std::string> ses;
  std::optional<std::string> education;
  std::optional<std::string> custom;
  // True when an @ID line declared this participant. Without it every @ID
  // field is absent from the source; with it, absent fields were empty slots.
  bool has_id_line = false;

  friend bool operator==(const ParticipantRecord&,
                         const ParticipantRecord&) = default;
};

struct HeaderMetadata {
  std::string file_path;
  std::string corpus;
  std::vector<ParticipantRecord> participants;  // declaration order
  std::vector<std::string> types;
  std::vector<std::string> languages;
  std::vector<std::string> raw_warnings;

  const ParticipantRecord* find(std::string_view code) const;

  friend bool operator==(const HeaderMetadata&,
                         const HeaderMetadata&) = default;
};

/// Field names accepted by get_field and by the filter language.
enum class Field { name, role, age, sex, group, ses, education, language, custom };

std::optional<Field> field_from_string(std::string_view name);
std::string_view to_string(Field field);
const std::vector<std::string_view>& field_names();

/// Parses the header block (leading `@` lines) of a transcript.
///
/// Throws HeaderError when the text has no @Participants line, is not valid
/// UTF-8, or (strict mode only) contains a malformed @ID/@Participants line
/// or age token. In lenient mode malformed lines are skipped and described
/// in raw_warnings.
HeaderMetadata parse_header(std::string_view text,
                            ParseMode mode = ParseMode::lenient);

/// Converts a CHAT age token (`Y;M.D`, `Y;M.`, `Y;M`, `Y;`) to months,
/// rounded half-up to one decimal. Empty token gives nullopt.
///
/// Malformed tokens give nullopt in lenient mode (with `warning` filled in
/// when provided) and throw HeaderError in strict mode.
std::optional<double> parse_age(std::string_view token,
                                ParseMode mode = ParseMode::lenient,
                                std::string* warning = nullptr);

/// Raw string value of `field` for participant `code`. Absent when the
/// participant is missing or the value is absent or blank.
std::optional<std::string> get_field(const HeaderMetadata& header,
                                     std::string_view code, Field field);

/// Overload taking the field by name; throws InvalidArgument on an unknown
/// field name.
std::optional<std::string> get_field(const HeaderMetadata& header,
                                     std::string_view code,
                                     std::string_view field);

}  // namespace chatharvest
