#include "chatharvest/indexer.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include "chatharvest/csv.hpp"
#include "chatharvest/errors.hpp"
#include "chatharvest/log.hpp"
#include "chatharvest/manifest.hpp"
#include "text_util.hpp"

namespace chatharvest {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> present(std::optional<std::string> v) {
  if (v && v->empty()) return std::nullopt;
  return v;
}

std::string format_age(double months) {
  char buf[32];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, months, std::chars_format::fixed, 1);
  return std::string(buf, ptr);
}

std::optional<double> parse_age_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v,
                                   std::chars_format::fixed);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) {
    throw Error("index: invalid age_m value '" + s + "'");
  }
  return v;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

std::vector<fs::path> transcript_files(const fs::path& root) {
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root);
       it != fs::recursive_directory_iterator(); ++it) {
    const auto name = it->path().filename().string();
    if (it->is_directory()) {
      if (name.starts_with('.')) it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && text::ends_with(name, ".cha")) {
      files.push_back(it->path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

bool is_index_column(std::string_view column) {
  return std::find(kIndexColumns.begin(), kIndexColumns.end(), column) !=
         kIndexColumns.end();
}

std::optional<std::string> cell(const IndexRow& row, std::string_view column) {
  auto str = [](const std::string& s) -> std::optional<std::string> {
    if (s.empty()) return std::nullopt;
    return s;
  };
  if (column == "file_path") return str(row.file_path);
  if (column == "corpus") return str(row.corpus);
  if (column == "participants") return str(row.participants);
  if (column == "name") return present(row.name);
  if (column == "age_m") {
    if (!row.age_m) return std::nullopt;
    return format_age(*row.age_m);
  }
  if (column == "sex") return present(row.sex);
  if (column == "group") return present(row.group);
  if (column == "ses") return present(row.ses);
  if (column == "study_type") return str(row.study_type);
  if (column == "participant_id") return present(row.participant_id);
  throw InvalidArgument("unknown index column '" + std::string(column) + "'");
}

void set_cell(IndexRow& row, std::string_view column,
              std::optional<std::string> value) {
  value = present(std::move(value));
  if (column == "file_path") row.file_path = value.value_or("");
  else if (column == "corpus") row.corpus = value.value_or("");
  else if (column == "participants") row.participants = value.value_or("");
  else if (column == "name") row.name = value;
  else if (column == "age_m") row.age_m = value ? parse_age_cell(*value) : std::nullopt;
  else if (column == "sex") row.sex = value;
  else if (column == "group") row.group = value;
  else if (column == "ses") row.ses = value;
  else if (column == "study_type") row.study_type = value.value_or("");
  else if (column == "participant_id") row.participant_id = value;
  else throw InvalidArgument("unknown index column '" + std::string(column) + "'");
}

IndexRow row_from_header(const HeaderMetadata& header, std::string_view focus,
                         std::vector<std::string>* warnings) {
  IndexRow row;
  row.file_path = header.file_path;
  row.corpus = header.corpus;
  std::vector<std::string> codes;
  for (const auto& p : header.participants) codes.push_back(p.code);
  row.participants = text::join(codes, ", ");
  row.study_type = text::join(header.types, ", ");

  const auto* who = header.find(focus);
  if (who == nullptr) {
    if (warnings) {
      warnings->push_back(header.file_path + ": focus participant " +
                          std::string(focus) + " not declared");
    }
  } else {
    row.name = get_field(header, focus, Field::name);
    if (!row.name) row.name = get_field(header, focus, Field::role);
    row.age_m = who->age_months;
    row.sex = get_field(header, focus, Field::sex);
    row.group = get_field(header, focus, Field::group);
    row.ses = get_field(header, focus, Field::ses);
    if (!row.ses) row.ses = get_field(header, "MOT", Field::ses);
  }
  return row;
}

void sort_rows(std::vector<IndexRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const IndexRow& a, const IndexRow& b) {
    return std::tie(a.corpus, a.file_path) < std::tie(b.corpus, b.file_path);
  });
}

IndexTable index_files(const fs::path& root, const FilterExpr& criteria,
                       const IndexOptions& options) {
  if (!fs::is_directory(root)) {
    throw IoError("mirror root is not a directory: " + root.string());
  }
  if (options.parallelism < 1) {
    throw InvalidArgument("parallelism must be at least 1");
  }
  const auto abs_root = fs::absolute(root).lexically_normal();
  const auto base = options.paths_relative_to
                        ? fs::absolute(*options.paths_relative_to).lexically_normal()
                        : abs_root;

  auto files = transcript_files(abs_root);

  struct Slot {
    std::optional<IndexRow> row;
    std::vector<std::string> warnings;
    std::optional<std::string> fatal;
  };
  std::vector<Slot> slots(files.size());
  std::atomic<std::size_t> next{0};

  auto work = [&](std::size_t i) {
    auto& slot = slots[i];
    auto rel = files[i].lexically_relative(base).generic_string();
    std::string content;
    try {
      content = read_file(files[i]);
    } catch (const IoError& e) {
      slot.warnings.push_back(e.what());
      return;
    }
    HeaderMetadata header;
    try {
      header = parse_header(content, options.mode);
    } catch (const HeaderError& e) {
      if (options.mode == ParseMode::strict) {
        slot.fatal = rel + ": " + e.what();
      } else {
        slot.warnings.push_back(rel + ": " + e.what());
      }
      return;
    }
    for (const auto& w : header.raw_warnings) slot.warnings.push_back(rel + ": " + w);
    header.file_path = rel;
    if (header.corpus.empty()) {
      header.corpus = files[i].parent_path().filename().string();
    }
    if (eval_expr(criteria, header)) {
      slot.row = row_from_header(header, options.focus, &slot.warnings);
    }
  };

  auto worker = [&] {
    for (auto i = next++; i < files.size(); i = next++) work(i);
  };
  {
    std::vector<std::jthread> pool;
    auto n = std::min(options.parallelism, std::max<std::size_t>(files.size(), 1));
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  IndexTable table;
  for (auto& slot : slots) {
    if (slot.fatal) throw HeaderError(*slot.fatal);
    if (slot.row) table.rows.push_back(std::move(*slot.row));
    for (auto& w : slot.warnings) {
      log::warn("index", "", "", w);
      table.warnings.push_back(std::move(w));
    }
  }
  sort_rows(table.rows);
  table.provenance.criteria = to_source(criteria);
  table.provenance.mirror_root = abs_root.generic_string();
  table.provenance.focus = options.focus;
  table.provenance.created = utc_timestamp();
  log::info("index", "", "",
            std::to_string(table.rows.size()) + " of " +
                std::to_string(files.size()) + " file(s) matched");
  return table;
}

std::string render_index_csv(const IndexTable& table) {
  std::string out = csv::format_record(
      std::vector<std::string>(kIndexColumns.begin(), kIndexColumns.end()));
  for (const auto& row : table.rows) {
    std::vector<std::string> fields;
    fields.reserve(kIndexColumns.size());
    for (auto column : kIndexColumns) fields.push_back(cell(row, column).value_or(""));
    out += csv::format_record(fields);
  }
  return out;
}

IndexTable parse_index_csv(std::string_view text) {
  auto records = csv::parse(text);
  if (records.empty()) throw Error("index CSV is empty (no header line)");
  const auto& header = records.front();
  if (header != std::vector<std::string>(kIndexColumns.begin(), kIndexColumns.end())) {
    throw Error("index CSV header does not match the index schema");
  }
  IndexTable table;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != kIndexColumns.size()) {
      throw Error("index CSV record " + std::to_string(r) + " has " +
                  std::to_string(rec.size()) + " fields");
    }
    IndexRow row;
    for (std::size_t c = 0; c < kIndexColumns.size(); ++c) {
      set_cell(row, kIndexColumns[c], rec[c]);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_index(const IndexTable& table, const fs::path& path) {
  write_text(path, render_index_csv(table));
  nlohmann::json prov = {{"criteria", table.provenance.criteria},
                         {"mirror_root", table.provenance.mirror_root},
                         {"focus", table.provenance.focus},
                         {"created", table.provenance.created},
                         {"rows", table.rows.size()}};
  auto sidecar = path;
  sidecar += ".provenance.json";
  write_text(sidecar, prov.dump(2) + "\n");
}

IndexTable read_index(const fs::path& path) {
  auto table = parse_index_csv(read_file(path));
  auto sidecar = path;
  sidecar += ".provenance.json";
  std::ifstream in(sidecar);
  if (in) {
    try {
      auto prov = nlohmann::json::parse(in);
      table.provenance.criteria = prov.value("criteria", "");
      table.provenance.mirror_root = prov.value("mirror_root", "");
      table.provenance.focus = prov.value("focus", "");
      table.provenance.created = prov.value("created", "");
    } catch (const nlohmann::json::exception&) {
      table.warnings.push_back("unreadable provenance file " + sidecar.string());
    }
  }
  return table;
}

}  // namespace chatharvest
