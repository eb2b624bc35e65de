#include "chatharvest/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "chatharvest/errors.hpp"
#include "text_util.hpp"

namespace chatharvest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& file, std::string_view what) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + std::string(what) + " " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

template <class T>
T get(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key) || doc[key].is_null()) return fallback;
  try {
    return doc[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

// Inline text wins over the *_file variant.
std::string criteria_text(const json& doc, const char* key, const fs::path& base) {
  std::string file_key = std::string(key) + "_file";
  if (doc.contains(key) && !doc[key].is_null()) return get<std::string>(doc, key, "");
  if (doc.contains(file_key) && !doc[file_key].is_null()) {
    auto path = resolve(base, get<std::string>(doc, file_key.c_str(), ""));
    auto text = read_text(path, "criteria file");
    if (text::is_blank(text)) throw ConfigError("criteria file is empty: " + path.string());
    return text;
  }
  return "";
}

FilterExpr parse_criteria(const std::string& text, std::string_view what) {
  if (text::is_blank(text)) {
    throw ConfigError(std::string(what) + " criteria are empty");
  }
  try {
    return parse_expr(text);
  } catch (const ExprError& e) {
    throw ConfigError(std::string(what) + " criteria: " + e.what());
  }
}

}  // namespace

fs::path PipelineConfig::collection_root() const { return mirror_root / collection; }

fs::path PipelineConfig::manifest_path() const {
  return collection_root() / "manifest.json";
}

PipelineConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  static const char* const known[] = {
      "collection",        "datasets",        "base_host",
      "mirror_root",       "screening_criteria", "screening_criteria_file",
      "target_criteria",   "target_criteria_file", "focus",
      "parallelism",       "retry",           "timeout_s",
      "max_depth",         "rules",           "participant_ids",
      "id_separator",      "strict",          "paths_relative_to",
      "outputs"};
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }

  PipelineConfig c;
  c.collection = get<std::string>(doc, "collection", c.collection);
  c.datasets = get<std::vector<std::string>>(doc, "datasets", {});
  c.base_host = get<std::string>(doc, "base_host", "");
  c.mirror_root = resolve(base_dir, get<std::string>(doc, "mirror_root", "mirror"));
  c.screening_criteria = criteria_text(doc, "screening_criteria", base_dir);
  c.target_criteria = criteria_text(doc, "target_criteria", base_dir);
  c.focus = get<std::string>(doc, "focus", c.focus);
  auto parallelism = get<long long>(doc, "parallelism", 4);
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  c.parallelism = static_cast<std::size_t>(parallelism);
  if (doc.contains("retry")) {
    const auto& r = doc["retry"];
    if (!r.is_object()) throw ConfigError("config field 'retry' must be an object");
    c.retry.attempts = get<int>(r, "attempts", c.retry.attempts);
    c.retry.initial_backoff = std::chrono::milliseconds(get<long long>(
        r, "initial_backoff_ms", c.retry.initial_backoff.count()));
    if (c.retry.attempts < 1) throw ConfigError("retry.attempts must be at least 1");
    if (c.retry.initial_backoff.count() < 0) {
      throw ConfigError("retry.initial_backoff_ms must not be negative");
    }
  }
  c.timeout_s = get<int>(doc, "timeout_s", c.timeout_s);
  if (c.timeout_s < 1) throw ConfigError("timeout_s must be at least 1");
  c.max_depth = get<int>(doc, "max_depth", c.max_depth);
  if (c.max_depth < 0) throw ConfigError("max_depth must not be negative");
  if (auto rules = get<std::string>(doc, "rules", ""); !rules.empty()) {
    c.rules = resolve(base_dir, rules);
  }
  c.participant_ids = get<bool>(doc, "participant_ids", c.participant_ids);
  c.id_separator = get<std::string>(doc, "id_separator", c.id_separator);
  c.strict = get<bool>(doc, "strict", c.strict);
  if (auto rel = get<std::string>(doc, "paths_relative_to", ""); !rel.empty()) {
    c.paths_relative_to = resolve(base_dir, rel);
  }
  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    if (!o.is_object()) throw ConfigError("config field 'outputs' must be an object");
    auto out = [&](const char* key) -> fs::path {
      auto v = get<std::string>(o, key, "");
      return v.empty() ? fs::path() : resolve(base_dir, v);
    };
    c.outputs = {out("screen"), out("index"), out("normalized"), out("changelog")};
  }
  return c;
}

PipelineConfig load_config(const fs::path& file) {
  auto base = fs::absolute(file).parent_path();
  return parse_config(read_text(file, "config file"), base);
}

void finalize(PipelineConfig& c, const ConfigOverrides& o) {
  const auto cwd = fs::current_path();
  if (o.collection) c.collection = *o.collection;
  if (!o.datasets.empty()) c.datasets = o.datasets;
  if (o.base_host) c.base_host = *o.base_host;
  if (o.mirror_root) c.mirror_root = resolve(cwd, *o.mirror_root);
  if (o.screening_criteria) c.screening_criteria = *o.screening_criteria;
  if (o.target_criteria) c.target_criteria = *o.target_criteria;
  if (o.focus) c.focus = *o.focus;
  if (o.parallelism) {
    if (*o.parallelism < 1) throw ConfigError("parallelism must be at least 1");
    c.parallelism = *o.parallelism;
  }
  if (o.rules) c.rules = resolve(cwd, *o.rules);
  if (o.index_output) c.outputs.index = resolve(cwd, *o.index_output);
  if (o.strict) c.strict = true;

  if (c.collection.empty()) throw ConfigError("collection must not be empty");
  if (c.focus.empty()) throw ConfigError("focus must not be empty");
  c.mirror_root = fs::absolute(c.mirror_root).lexically_normal();

  const auto root = c.mirror_root;
  if (c.outputs.screen.empty()) c.outputs.screen = root / "screen.json";
  if (c.outputs.index.empty()) c.outputs.index = root / "index.csv";
  if (c.outputs.normalized.empty()) c.outputs.normalized = root / "index.normalized.csv";
  if (c.outputs.changelog.empty()) c.outputs.changelog = root / "changes.csv";

  c.screening.reset();
  c.target.reset();
  if (!c.screening_criteria.empty()) {
    c.screening = parse_criteria(c.screening_criteria, "screening");
  }
  if (c.target_criteria.empty()) c.target_criteria = c.screening_criteria;
  if (!c.target_criteria.empty()) c.target = parse_criteria(c.target_criteria, "target");
}

}  // namespace chatharvest
