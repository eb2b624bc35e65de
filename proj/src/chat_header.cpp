#include "chatharvest/chat_header.hpp"

#include <algorithm>
#include <iterator>
#include <charconv>
#include <cmath>

#include "chatharvest/errors.hpp"
#include "text_util.hpp"

namespace chatharvest {

namespace {

constexpr double kDaysPerMonth = 30.4375;

// Header keywords from the CHAT manual that carry no metadata we index.
constexpr std::string_view kKnownKeywords[] = {
    "UTF8",          "Begin",           "End",          "Languages",
    "Participants",  "ID",              "Types",        "Options",
    "Media",         "PID",             "Font",         "ColorWords",
    "Window",        "Date",            "Location",     "Situation",
    "Comment",       "Activities",      "Bck",          "Blank",
    "Coder",         "Time Duration",   "Time Start",   "Transcriber",
    "Transcription", "Warning",         "Recording Quality",
    "Room Layout",   "Tape Location",   "Number",       "New Episode",
    "Videos",        "Page"};

constexpr std::string_view kKnownPrefixes[] = {
    "Birth of ", "Birthplace of ", "L1 of "};

bool known_keyword(std::string_view keyword) {
  if (std::find(std::begin(kKnownKeywords), std::end(kKnownKeywords),
                keyword) != std::end(kKnownKeywords)) {
    return true;
  }
  return std::any_of(std::begin(kKnownPrefixes), std::end(kKnownPrefixes),
                     [&](std::string_view p) { return keyword.starts_with(p); });
}

struct HeaderLine {
  std::size_t line_no;
  std::string text;  // continuation lines folded in
};

bool valid_code(std::string_view code) {
  if (code.empty()) return false;
  return std::none_of(code.begin(), code.end(),
                      [](char c) { return c == '|' || text::is_space(c); });
}

std::optional<std::string> non_blank(std::string_view s) {
  auto t = text::trim(s);
  if (t.empty()) return std::nullopt;
  return std::string(t);
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  for (auto part : text::split(value, ',')) {
    auto t = text::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

class HeaderParser {
 public:
  explicit HeaderParser(ParseMode mode) : mode_(mode) {}

  HeaderMetadata parse(std::string_view input) {
    if (!text::is_valid_utf8(input)) {
      throw HeaderError("transcript text is not valid UTF-8");
    }
    if (input.starts_with("\xEF\xBB\xBF")) input.remove_prefix(3);

    std::vector<HeaderLine> participant_lines;
    std::vector<HeaderLine> id_lines;

    for (const auto& line : collect_header_lines(input)) {
      auto body = std::string_view(line.text).substr(1);
      auto colon = body.find(':');
      std::string_view keyword = body;
      std::string_view value;
      if (colon != std::string_view::npos) {
        keyword = body.substr(0, colon);
        auto rest = body.substr(colon + 1);
        if (!rest.empty() && rest.front() != '\t' && rest.front() != ' ') {
          malformed(line, "missing tab or space after ':'",
                    keyword == "ID" || keyword == "Participants");
          continue;
        }
        value = text::trim(rest);
      } else {
        keyword = text::trim(keyword);
      }

      if (keyword == "Participants") {
        participant_lines.push_back({line.line_no, std::string(value)});
      } else if (keyword == "ID") {
        id_lines.push_back({line.line_no, std::string(value)});
      } else if (keyword == "Types") {
        auto labels = split_list(value);
        out_.types.insert(out_.types.end(), labels.begin(), labels.end());
      } else if (keyword == "Languages") {
        auto langs = split_list(value);
        out_.languages.insert(out_.languages.end(), langs.begin(), langs.end());
      } else if (!known_keyword(keyword)) {
        warn(line.line_no, "unrecognized header keyword @" + std::string(keyword));
      }
    }

    if (participant_lines.empty()) {
      throw HeaderError("no @Participants line in header");
    }
    for (const auto& line : participant_lines) parse_participants(line);
    for (const auto& line : id_lines) parse_id(line);

    for (const auto& p : out_.participants) {
      if (p.corpus) {
        out_.corpus = *p.corpus;
        break;
      }
    }
    return std::move(out_);
  }

 private:
  std::vector<HeaderLine> collect_header_lines(std::string_view input) {
    std::vector<HeaderLine> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < input.size()) {
      auto nl = input.find('\n', pos);
      auto raw = input.substr(pos, nl == std::string_view::npos
                                       ? std::string_view::npos
                                       : nl - pos);
      pos = nl == std::string_view::npos ? input.size() : nl + 1;
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

      if (raw.starts_with('@')) {
        lines.push_back({line_no, std::string(raw)});
      } else if (raw.starts_with('\t') && !lines.empty()) {
        lines.back().text += ' ';
        lines.back().text += text::trim(raw);
      } else {
        break;
      }
    }
    return lines;
  }

  void parse_participants(const HeaderLine& line) {
    for (auto entry : text::split(line.text, ',')) {
      auto tokens = text::split_whitespace(entry);
      if (tokens.size() < 2 || tokens.size() > 3) {
        malformed(line, "participant entry '" + std::string(text::trim(entry)) +
                            "' is not 'CODE [Name] Role'");
        continue;
      }
      if (!valid_code(tokens[0])) {
        malformed(line, "invalid speaker code '" + std::string(tokens[0]) + "'");
        continue;
      }
      if (out_.find(tokens[0]) != nullptr) {
        malformed(line, "duplicate speaker code '" + std::string(tokens[0]) + "'");
        continue;
      }
      ParticipantRecord rec;
      rec.code = std::string(tokens[0]);
      if (tokens.size() == 3) rec.name = std::string(tokens[1]);
      rec.role = std::string(tokens.back());
      out_.participants.push_back(std::move(rec));
    }
  }

  void parse_id(const HeaderLine& line) {
    auto slots = text::split(line.text, '|');
    // ten slots, each terminated by '|', so the final piece is empty
    if (slots.size() != 11 || !text::trim(slots[10]).empty()) {
      malformed(line, "@ID line does not have ten '|'-terminated fields");
      return;
    }
    auto code = text::trim(slots[2]);
    auto it = std::find_if(out_.participants.begin(), out_.participants.end(),
                           [&](const auto& p) { return p.code == code; });
    if (it == out_.participants.end()) {
      malformed(line, "@ID for undeclared participant '" + std::string(code) + "'");
      return;
    }
    if (it->has_id_line) {
      malformed(line, "second @ID line for '" + std::string(code) + "'");
      return;
    }

    std::string age_warning;
    auto months = parse_age(slots[3], mode_, &age_warning);
    auto& rec = *it;
    rec.has_id_line = true;
    rec.language = non_blank(slots[0]);
    rec.corpus = non_blank(slots[1]);
    if (age_warning.empty()) {
      rec.age = non_blank(slots[3]);
      rec.age_months = months;
    } else {
      warn(line.line_no, age_warning);
    }
    if (auto sex = non_blank(slots[4])) {
      Sex s;
      s.kind = *sex == "male"     ? SexKind::male
               : *sex == "female" ? SexKind::female
                                  : SexKind::other;
      s.raw = *sex;
      rec.sex = std::move(s);
    }
    rec.group = non_blank(slots[5]);
    rec.ses = non_blank(slots[6]);
    rec.education = non_blank(slots[8]);
    rec.custom = non_blank(slots[9]);
  }

  void malformed(const HeaderLine& line, const std::string& what,
                 bool fatal_in_strict = true) {
    auto message = "line " + std::to_string(line.line_no) + ": " + what;
    if (mode_ == ParseMode::strict && fatal_in_strict) {
      throw HeaderError(message);
    }
    out_.raw_warnings.push_back(message);
  }

  void warn(std::size_t line_no, const std::string& what) {
    out_.raw_warnings.push_back("line " + std::to_string(line_no) + ": " + what);
  }

  ParseMode mode_;
  HeaderMetadata out_;
};

bool parse_uint(std::string_view s, long& value) {
  if (s.empty() || s.size() > 4) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size() && value >= 0;
}

}  // namespace

const ParticipantRecord* HeaderMetadata::find(std::string_view code) const {
  for (const auto& p : participants) {
    if (p.code == code) return &p;
  }
  return nullptr;
}

HeaderMetadata parse_header(std::string_view text, ParseMode mode) {
  return HeaderParser(mode).parse(text);
}

std::optional<double> parse_age(std::string_view token, ParseMode mode,
                                std::string* warning) {
  auto t = text::trim(token);
  if (t.empty()) return std::nullopt;

  auto fail = [&](const std::string& why) -> std::optional<double> {
    auto message = "malformed age '" + std::string(t) + "': " + why;
    if (mode == ParseMode::strict) throw HeaderError(message);
    if (warning) *warning = message;
    return std::nullopt;
  };

  auto semi = t.find(';');
  if (semi == std::string_view::npos) return fail("missing ';'");
  long years = 0;
  long months = 0;
  long days = 0;
  if (!parse_uint(t.substr(0, semi), years)) return fail("bad year");

  auto rest = t.substr(semi + 1);
  auto dot_it = std::find(rest.begin(), rest.end(), '.');
  auto dot = dot_it == rest.end() ? std::string_view::npos
                                  : static_cast<std::size_t>(dot_it - rest.begin());
  auto month_part = rest.substr(0, dot);
  if (!month_part.empty() && !parse_uint(month_part, months)) {
    return fail("bad month");
  }
  if (dot != std::string_view::npos) {
    if (month_part.empty()) return fail("day without month");
    auto day_part = rest.substr(dot + 1);
    if (!day_part.empty() && !parse_uint(day_part, days)) {
      return fail("bad day");
    }
  }
  if (months >= 12) return fail("month must be below 12");
  if (days > 31) return fail("day must not exceed 31");

  double total = static_cast<double>(years) * 12.0 +
                 static_cast<double>(months) +
                 static_cast<double>(days) / kDaysPerMonth;
  return std::floor(total * 10.0 + 0.5) / 10.0;
}

const std::vector<std::string_view>& field_names() {
  static const std::vector<std::string_view> names = {
      "name", "role",      "age",      "sex",   "group",
      "ses",  "education", "language", "custom"};
  return names;
}

std::optional<Field> field_from_string(std::string_view name) {
  const auto& names = field_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Field>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Field field) {
  return field_names()[static_cast<std::size_t>(field)];
}

std::optional<std::string> get_field(const HeaderMetadata& header,
                                     std::string_view code, Field field) {
  const auto* p = header.find(code);
  if (p == nullptr) return std::nullopt;

  std::optional<std::string> value;
  switch (field) {
    case Field::name: value = p->name; break;
    case Field::role: value = p->role; break;
    case Field::age: value = p->age; break;
    case Field::sex:
      if (p->sex) value = p->sex->raw;
      break;
    case Field::group: value = p->group; break;
    case Field::ses: value = p->ses; break;
    case Field::education: value = p->education; break;
    case Field::language: value = p->language; break;
    case Field::custom: value = p->custom; break;
  }
  if (value && text::is_blank(*value)) return std::nullopt;
  return value;
}

std::optional<std::string> get_field(const HeaderMetadata& header,
                                     std::string_view code,
                                     std::string_view field) {
  auto f = field_from_string(field);
  if (!f) throw InvalidArgument("unknown header field '" + std::string(field) + "'");
  return get_field(header, code, *f);
}

}  // namespace chatharvest
