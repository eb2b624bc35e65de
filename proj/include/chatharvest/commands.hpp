#pragma once

// The pipeline steps as composable commands. Each returns a process exit
// code: 0 success, 1 runtime failure, 2 configuration or usage error.
//
//   scan      dataset listing -> corpus archives
//   screen    early-exit screening, selection saved to outputs.screen
//   fetch     download + extract selected corpora into the mirror
//   index     exhaustive filtering of the mirror -> outputs.index
//   labels    distinct values of one index column
//   normalize label rules + participant ids -> outputs.normalized
//   run       all of the above in order

#include <iosfwd>
#include <string>

#include "chatharvest/config.hpp"
#include "chatharvest/remote_source.hpp"

namespace chatharvest {

struct CommandOptions {
  bool dry_run = false;          // no writes, no downloads
  PageFetcher* fetcher = nullptr;  // default: HttpFetcher from the config
  std::ostream* out = nullptr;     // default: std::cout
};

int cmd_scan(const PipelineConfig& config, const CommandOptions& options = {});
int cmd_screen(const PipelineConfig& config, const CommandOptions& options = {});
int cmd_fetch(const PipelineConfig& config, const CommandOptions& options = {});
int cmd_index(const PipelineConfig& config, const CommandOptions& options = {});
/// Reads the normalized table when `normalized` is set, else the raw index.
int cmd_labels(const PipelineConfig& config, const std::string& column,
               bool normalized = false, const CommandOptions& options = {});
int cmd_normalize(const PipelineConfig& config, const CommandOptions& options = {});
int cmd_run(const PipelineConfig& config, const CommandOptions& options = {});

/// Maps an exception to the exit-code contract (2 for configuration and
/// usage errors, 1 otherwise).
int exit_code_for(const std::exception& e);

}  // namespace chatharvest
