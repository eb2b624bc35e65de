#include "chatharvest/commands.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "chatharvest/curator.hpp"
#include "chatharvest/errors.hpp"
#include "chatharvest/harvester.hpp"
#include "chatharvest/http_fetcher.hpp"
#include "chatharvest/indexer.hpp"
#include "chatharvest/log.hpp"
#include "chatharvest/manifest.hpp"

namespace chatharvest {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Resolves the per-call defaults of CommandOptions.
class Context {
 public:
  Context(const PipelineConfig& config, const CommandOptions& options)
      : config(config), dry_run(options.dry_run),
        out(options.out ? *options.out : std::cout) {
    if (options.fetcher) {
      fetcher_ = options.fetcher;
    } else {
      HttpOptions http;
      http.timeout = std::chrono::seconds(config.timeout_s);
      owned_ = std::make_unique<HttpFetcher>(http);
      fetcher_ = owned_.get();
    }
  }

  PageFetcher& fetcher() { return *fetcher_; }

  const PipelineConfig& config;
  bool dry_run;
  std::ostream& out;

 private:
  std::unique_ptr<HttpFetcher> owned_;
  PageFetcher* fetcher_ = nullptr;
};

template <class F>
int guarded(std::string_view step, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    log::error(step, "", "", e.what());
    return exit_code_for(e);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

// ---- step 1: scan --------------------------------------------------------

std::vector<CorpusSource> do_scan(Context& ctx) {
  const auto& c = ctx.config;
  if (c.datasets.empty()) throw ConfigError("no datasets configured");
  ScanOptions scan;
  scan.max_depth = c.max_depth;
  scan.collection = c.collection;
  std::vector<CorpusSource> all;
  for (const auto& dataset : c.datasets) {
    auto url = dataset_url(c.collection, dataset, c.base_host);
    auto found = scan_zip_urls(url, ctx.fetcher(), scan);
    log::info("scan", dataset, "", std::to_string(found.size()) + " archive(s) at " + url);
    all.insert(all.end(), found.begin(), found.end());
  }
  return all;
}

// ---- step 2: screen ------------------------------------------------------

json screen_key(const PipelineConfig& c) {
  return {{"collection", c.collection},
          {"datasets", c.datasets},
          {"base_host", c.base_host},
          {"criteria", c.screening_criteria}};
}

json to_json(const ScreenResult& r) {
  json j = {{"collection", r.source.collection},
            {"dataset", r.source.dataset},
            {"corpus", r.source.corpus},
            {"archive_url", r.source.archive_url},
            {"selected", r.selected},
            {"files_inspected", r.files_inspected},
            {"first_match", r.first_match ? json(*r.first_match) : json(nullptr)},
            {"error", r.error ? json(*r.error) : json(nullptr)}};
  return j;
}

ScreenResult from_json(const json& j) {
  ScreenResult r;
  r.source = {j.at("collection").get<std::string>(), j.at("dataset").get<std::string>(),
              j.at("corpus").get<std::string>(), j.at("archive_url").get<std::string>()};
  r.selected = j.at("selected").get<bool>();
  r.files_inspected = j.at("files_inspected").get<std::size_t>();
  if (!j.at("first_match").is_null()) r.first_match = j["first_match"].get<std::string>();
  if (!j.at("error").is_null()) r.error = j["error"].get<std::string>();
  return r;
}

const FilterExpr& screening_criteria(const PipelineConfig& c) {
  if (!c.screening) throw ConfigError("no screening criteria configured");
  return *c.screening;
}

const FilterExpr& target_criteria(const PipelineConfig& c) {
  if (!c.target) throw ConfigError("no target criteria configured");
  return *c.target;
}

// Screens and reports; returns the results and whether every corpus was
// screened cleanly.
std::pair<std::vector<ScreenResult>, bool> do_screen(Context& ctx,
                                                     const std::vector<CorpusSource>& sources) {
  const auto& c = ctx.config;
  auto results = screen_dataset(sources, screening_criteria(c), ctx.fetcher(), c.parallelism);
  std::size_t selected = 0;
  bool clean = true;
  for (const auto& r : results) {
    const auto name = r.source.dataset + "/" + r.source.corpus;
    if (r.error) {
      clean = false;
      ctx.out << "error     " << name << "  " << *r.error << "\n";
    } else if (r.selected) {
      ++selected;
      ctx.out << "selected  " << name << "  inspected=" << r.files_inspected
              << "  match=" << *r.first_match << "\n";
    } else {
      ctx.out << "rejected  " << name << "  inspected=" << r.files_inspected << "\n";
    }
  }
  ctx.out << selected << " of " << results.size() << " corpora selected\n";

  if (!ctx.dry_run) {
    json doc = screen_key(c);
    doc["results"] = json::array();
    for (const auto& r : results) doc["results"].push_back(to_json(r));
    write_text(c.outputs.screen, doc.dump(2) + "\n");
  }
  return {std::move(results), clean};
}

// The saved screen selection, when it was produced by the same settings.
std::optional<std::vector<ScreenResult>> load_screen(const PipelineConfig& c) {
  std::ifstream in(c.outputs.screen);
  if (!in) return std::nullopt;
  try {
    auto doc = json::parse(in);
    const auto expected = screen_key(c);
    for (const auto& [key, value] : expected.items()) {
      if (!doc.contains(key) || doc[key] != value) return std::nullopt;
    }
    std::vector<ScreenResult> results;
    for (const auto& j : doc.at("results")) results.push_back(from_json(j));
    return results;
  } catch (const json::exception& e) {
    log::warn("fetch", "", c.outputs.screen.string(),
              std::string("ignoring unreadable screen selection: ") + e.what());
    return std::nullopt;
  }
}

// ---- step 3: fetch -------------------------------------------------------

bool do_fetch(Context& ctx, const std::vector<ScreenResult>& screened) {
  const auto& c = ctx.config;
  std::vector<CorpusSource> selected;
  for (const auto& r : screened) {
    if (r.selected) selected.push_back(r.source);
  }
  if (ctx.dry_run) {
    for (const auto& s : selected) {
      ctx.out << "would fetch  " << s.dataset << "/" << s.corpus << "  " << s.archive_url
              << "\n";
    }
    return true;
  }

  auto manifest = Manifest::load(c.manifest_path());
  std::vector<std::optional<FetchOutcome>> outcomes(selected.size());
  std::vector<std::optional<std::string>> errors(selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < selected.size(); i = next++) {
      try {
        outcomes[i] = fetch_corpus(selected[i], c.collection_root(), ctx.fetcher(),
                                   manifest, c.retry);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        log::error("fetch", selected[i].dataset + "/" + selected[i].corpus, "", e.what());
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    auto n = std::min(c.parallelism, std::max<std::size_t>(selected.size(), 1));
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  bool clean = true;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const auto name = selected[i].dataset + "/" + selected[i].corpus;
    if (errors[i]) {
      clean = false;
      ctx.out << "failed     " << name << "  " << *errors[i] << "\n";
    } else {
      ctx.out << (outcomes[i]->skipped ? "unchanged  " : "fetched    ") << name
              << "  files=" << outcomes[i]->file_count << "\n";
    }
  }
  return clean;
}

// ---- step 4: index -------------------------------------------------------

void do_index(Context& ctx) {
  const auto& c = ctx.config;
  const auto& criteria = target_criteria(c);
  IndexOptions opts;
  opts.focus = c.focus;
  opts.parallelism = c.parallelism;
  opts.mode = c.strict ? ParseMode::strict : ParseMode::lenient;
  opts.paths_relative_to = c.paths_relative_to;

  IndexTable table;
  if (fs::is_directory(c.collection_root())) {
    table = index_files(c.collection_root(), criteria, opts);
  } else {
    log::warn("index", "", "", "mirror " + c.collection_root().string() +
                                   " does not exist; writing an empty index");
    table.provenance = {to_source(criteria), c.collection_root().generic_string(),
                        c.focus, utc_timestamp()};
  }
  ctx.out << table.rows.size() << " file(s) indexed";
  if (ctx.dry_run) {
    ctx.out << " (dry run, nothing written)\n";
    return;
  }
  write_index(table, c.outputs.index);
  ctx.out << " -> " << c.outputs.index.string() << "\n";
}

// ---- steps 5 and 6: labels, normalize --------------------------------------

IndexTable read_table(const fs::path& path) {
  if (!fs::exists(path)) {
    throw IoError("index " + path.string() + " does not exist; run index first");
  }
  return read_index(path);
}

void do_normalize(Context& ctx) {
  const auto& c = ctx.config;
  std::optional<LabelRuleSet> rules;
  if (c.rules) rules = LabelRuleSet::load(*c.rules);
  auto table = read_table(c.outputs.index);

  std::vector<Change> changes;
  if (rules) {
    auto result = apply_rules(table, *rules);
    table = std::move(result.table);
    changes = std::move(result.changes);
  }
  if (c.participant_ids) table = add_participant_id(table, c.id_separator);
  for (const auto& w : table.warnings) log::warn("normalize", "", "", w);

  ctx.out << changes.size() << " cell(s) changed";
  if (ctx.dry_run) {
    ctx.out << " (dry run, nothing written)\n";
    return;
  }
  write_index(table, c.outputs.normalized);
  write_text(c.outputs.changelog, render_change_log(changes));
  ctx.out << " -> " << c.outputs.normalized.string() << "\n";
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e) ||
      dynamic_cast<const ExprError*>(&e) || dynamic_cast<const RuleError*>(&e)) {
    return 2;
  }
  return 1;
}

int cmd_scan(const PipelineConfig& config, const CommandOptions& options) {
  return guarded("scan", [&] {
    Context ctx(config, options);
    for (const auto& s : do_scan(ctx)) {
      ctx.out << s.dataset << "\t" << s.corpus << "\t" << s.archive_url << "\n";
    }
    return 0;
  });
}

int cmd_screen(const PipelineConfig& config, const CommandOptions& options) {
  return guarded("screen", [&] {
    Context ctx(config, options);
    screening_criteria(config);
    auto sources = do_scan(ctx);
    return do_screen(ctx, sources).second ? 0 : 1;
  });
}

int cmd_fetch(const PipelineConfig& config, const CommandOptions& options) {
  return guarded("fetch", [&] {
    Context ctx(config, options);
    screening_criteria(config);
    auto screened = load_screen(config);
    if (screened) {
      log::info("fetch", "", config.outputs.screen.string(), "reusing screen selection");
    } else {
      auto [results, clean] = do_screen(ctx, do_scan(ctx));
      if (!clean) return 1;
      screened = std::move(results);
    }
    return do_fetch(ctx, *screened) ? 0 : 1;
  });
}

int cmd_index(const PipelineConfig& config, const CommandOptions& options) {
  return guarded("index", [&] {
    Context ctx(config, options);
    do_index(ctx);
    return 0;
  });
}

int cmd_labels(const PipelineConfig& config, const std::string& column, bool normalized,
               const CommandOptions& options) {
  return guarded("labels", [&] {
    Context ctx(config, options);
    if (!is_index_column(column)) {
      throw InvalidArgument("unknown index column '" + column + "'");
    }
    auto table = read_table(normalized ? config.outputs.normalized : config.outputs.index);
    auto report = get_labels(table, column);
    for (const auto& label : report.labels) ctx.out << label << "\n";
    ctx.out << "# " << report.labels.size() << " distinct, " << report.missing
            << " missing\n";
    return 0;
  });
}

int cmd_normalize(const PipelineConfig& config, const CommandOptions& options) {
  return guarded("normalize", [&] {
    Context ctx(config, options);
    do_normalize(ctx);
    return 0;
  });
}

int cmd_run(const PipelineConfig& config, const CommandOptions& options) {
  return guarded("run", [&] {
    Context ctx(config, options);
    screening_criteria(config);
    target_criteria(config);
    if (config.rules) LabelRuleSet::load(*config.rules);  // fail before any download

    auto [screened, clean] = do_screen(ctx, do_scan(ctx));
    if (!clean) return 1;
    if (!do_fetch(ctx, screened)) return 1;
    if (ctx.dry_run) {
      // Nothing was downloaded, so indexing would only see an older mirror.
      ctx.out << "dry run: index and normalize skipped\n";
      return 0;
    }
    do_index(ctx);
    if (config.rules || config.participant_ids) do_normalize(ctx);
    return 0;
  });
}

}  // namespace chatharvest
