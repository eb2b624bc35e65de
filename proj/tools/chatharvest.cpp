// chatharvest: harvest and index CHAT transcript corpora.
//
//   chatharvest [global flags] scan|screen|fetch|index|normalize|run
//   chatharvest [global flags] labels <column> [--normalized]

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "chatharvest/commands.hpp"
#include "chatharvest/config.hpp"
#include "chatharvest/errors.hpp"
#include "chatharvest/log.hpp"

using namespace chatharvest;

int main(int argc, char** argv) {
  CLI::App app{"Harvest TalkBank CHAT corpora into a deterministic index table"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  ConfigOverrides o;
  std::string mirror, base_host, rules, index_out;
  std::size_t parallelism = 0;
  bool dry_run = false, quiet = false, verbose = false;

  app.add_option("--config", config_path,
                 std::string("JSON config file (default: $") + kConfigEnvVar + ")");
  app.add_option("--mirror", mirror, "local mirror root");
  app.add_option("--base-host", base_host, "serve datasets from <url>/<collection>/data/...");
  app.add_option("--parallelism", parallelism, "concurrent corpora / files")
      ->check(CLI::PositiveNumber);
  app.add_flag("--strict", o.strict, "treat malformed headers as errors");
  app.add_flag("--dry-run", dry_run, "no writes and no downloads");
  app.add_option("--collection", o.collection, "collection, e.g. childes");
  app.add_option("--dataset", o.datasets, "dataset, e.g. Eng-NA (repeatable)")
      ->allow_extra_args(false);
  app.add_option("--screen-criteria", o.screening_criteria, "screening filter expression");
  app.add_option("--target-criteria", o.target_criteria, "indexing filter expression");
  app.add_option("--focus", o.focus, "focus participant code (default CHI)");
  app.add_option("--rules", rules, "label rule file (JSON)");
  app.add_option("--index-out", index_out, "index CSV path");
  app.add_flag("-q,--quiet", quiet, "only log errors");
  app.add_flag("-v,--verbose", verbose, "log debug messages");

  auto* scan = app.add_subcommand("scan", "list corpus archives of the datasets");
  auto* screen = app.add_subcommand("screen", "select corpora with a matching file");
  auto* fetch = app.add_subcommand("fetch", "download selected corpora into the mirror");
  auto* index = app.add_subcommand("index", "index every matching file of the mirror");
  auto* labels = app.add_subcommand("labels", "distinct values of an index column");
  std::string column;
  bool normalized = false;
  labels->add_option("column", column, "index column")->required();
  labels->add_flag("--normalized", normalized, "read the normalized index");
  auto* normalize = app.add_subcommand("normalize", "apply label rules and participant ids");
  auto* run = app.add_subcommand("run", "scan, screen, fetch, index and normalize");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  log::set_level(quiet ? log::Level::error : verbose ? log::Level::debug : log::Level::info);
  if (!mirror.empty()) o.mirror_root = mirror;
  if (!base_host.empty()) o.base_host = base_host;
  if (!rules.empty()) o.rules = rules;
  if (!index_out.empty()) o.index_output = index_out;
  if (parallelism > 0) o.parallelism = parallelism;

  PipelineConfig config;
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar); env && *env) config_path = env;
    }
    if (!config_path.empty()) config = load_config(config_path);
    finalize(config, o);
  } catch (const std::exception& e) {
    std::cerr << "chatharvest: " << e.what() << "\n";
    return 2;
  }

  CommandOptions options;
  options.dry_run = dry_run;
  if (*scan) return cmd_scan(config, options);
  if (*screen) return cmd_screen(config, options);
  if (*fetch) return cmd_fetch(config, options);
  if (*index) return cmd_index(config, options);
  if (*labels) return cmd_labels(config, column, normalized, options);
  if (*normalize) return cmd_normalize(config, options);
  if (*run) return cmd_run(config, options);
  return 2;
}
