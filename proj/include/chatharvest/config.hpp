#pragma once

// Shared pipeline configuration: one JSON document, every field overridable
// from the command line.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chatharvest/criteria.hpp"
#include "chatharvest/harvester.hpp"

namespace chatharvest {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "CHATHARVEST_CONFIG";

struct OutputPaths {
  std::filesystem::path screen;      // selection from the last screen
  std::filesystem::path index;       // raw index CSV
  std::filesystem::path normalized;  // index CSV after rules and ids
  std::filesystem::path changelog;   // per-cell change log of normalize
};

struct PipelineConfig {
  std::string collection = "childes";
  std::vector<std::string> datasets;
  std::string base_host;  // empty: the public TalkBank hosts
  std::filesystem::path mirror_root = "mirror";
  std::string screening_criteria;
  std::string target_criteria;  // empty: same as screening_criteria
  std::string focus = "CHI";
  std::size_t parallelism = 4;
  RetryPolicy retry;
  int timeout_s = 30;
  int max_depth = 1;
  std::optional<std::filesystem::path> rules;
  bool participant_ids = true;
  std::string id_separator = "/";
  bool strict = false;
  std::optional<std::filesystem::path> paths_relative_to;
  OutputPaths outputs;  // empty entries default into the mirror root

  // Filled by finalize().
  std::optional<FilterExpr> screening;
  std::optional<FilterExpr> target;

  /// Collection-level mirror directory: <mirror_root>/<collection>.
  std::filesystem::path collection_root() const;
  std::filesystem::path manifest_path() const;
};

/// Command-line values that win over the file.
struct ConfigOverrides {
  std::optional<std::string> collection;
  std::vector<std::string> datasets;
  std::optional<std::string> base_host;
  std::optional<std::filesystem::path> mirror_root;
  std::optional<std::string> screening_criteria;
  std::optional<std::string> target_criteria;
  std::optional<std::string> focus;
  std::optional<std::size_t> parallelism;
  std::optional<std::filesystem::path> rules;
  std::optional<std::filesystem::path> index_output;
  bool strict = false;
};

/// Parses a config document. Relative paths (mirror root, rule and criteria
/// files, outputs) are resolved against `base_dir`. Throws ConfigError.
PipelineConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& file);

/// Applies overrides (relative paths against the working directory), makes
/// the mirror root absolute, fills default output paths and parses both
/// criteria texts. Throws ConfigError or ExprError.
void finalize(PipelineConfig& config, const ConfigOverrides& overrides = {});

}  // namespace chatharvest
