#include "chatharvest/csv.hpp"

#include "chatharvest/errors.hpp"

namespace chatharvest::csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_record(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += escape(fields[i]);
  }
  line += "\r\n";
  return line;
}

std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  std::size_t i = 0;
  const auto n = text.size();
  std::size_t line = 1;
  bool started = false;

  auto end_record = [&] {
    started = false;
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    ++line;
  };

  while (i < n) {
    started = true;
    if (text[i] == '"') {
      ++i;
      while (true) {
        if (i >= n) {
          throw Error("CSV: unterminated quoted field starting on line " +
                      std::to_string(line));
        }
        if (text[i] == '"') {
          if (i + 1 < n && text[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        field += text[i++];
      }
      if (i < n && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
        throw Error("CSV: unexpected character after closing quote on line " +
                    std::to_string(line));
      }
    }
    while (i < n && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
      if (text[i] == '"') {
        throw Error("CSV: bare quote inside unquoted field on line " +
                    std::to_string(line));
      }
      field += text[i++];
    }
    if (i >= n) break;
    if (text[i] == ',') {
      record.push_back(std::move(field));
      field.clear();
      ++i;
      continue;
    }
    // line break
    if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') ++i;
    ++i;
    end_record();
  }
  if (started) end_record();
  return records;
}

}  // namespace chatharvest::csv
