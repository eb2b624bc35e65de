#pragma once

// First level of the search: cheap per-corpus screening that stops at the
// first matching transcript, followed by whole-archive download of the
// corpora that passed.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chatharvest/criteria.hpp"
#include "chatharvest/manifest.hpp"
#include "chatharvest/remote_source.hpp"

namespace chatharvest {

struct ScreenResult {
  CorpusSource source;
  bool selected = false;
  std::size_t files_inspected = 0;
  std::optional<std::string> first_match;  // entry name inside the archive
  std::vector<std::string> warnings;
  // Set when the corpus could not be screened at all (network, corrupt
  // archive); such a corpus is never selected.
  std::optional<std::string> error;
};

/// Screens one corpus archive: walks `.cha` entries in central-directory
/// order, lenient-parses each header and stops at the first entry matching
/// `criteria`. Non-`.cha` members are neither read nor counted. An entry that
/// cannot be read or parsed becomes a warning and still counts as inspected.
///
/// Throws NetworkError / ArchiveError (naming the corpus) when the archive
/// itself cannot be fetched or opened.
ScreenResult screen_corpus(const CorpusSource& source, const FilterExpr& criteria,
                           PageFetcher& fetcher);

/// Screens every source with up to `parallelism` concurrent workers. The
/// result is sorted by corpus name (then URL) whatever the completion order.
/// Per-source failures are reported in ScreenResult::error; throws Error when
/// every source failed.
std::vector<ScreenResult> screen_dataset(const std::vector<CorpusSource>& sources,
                                         const FilterExpr& criteria,
                                         PageFetcher& fetcher,
                                         std::size_t parallelism);

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};  // doubled after each failure
};

/// Fetches `url` and returns the body, retrying transport errors and 5xx/429
/// responses per `policy`. Protected collections and other 4xx are not
/// retried.
std::string fetch_with_retry(PageFetcher& fetcher, const std::string& url,
                             const RetryPolicy& policy);

struct FetchOutcome {
  std::filesystem::path extraction_root;
  bool skipped = false;  // digest matched an existing extraction
  std::size_t file_count = 0;
};

/// Downloads a corpus archive and extracts it under
/// `dest_root/<dataset>/<corpus>/`, keeping the archive's internal paths, then
/// records it in `manifest` (and saves the manifest when it is bound to a
/// file).
///
/// If the manifest already holds the same digest and the extraction root
/// exists, nothing is extracted and only the manifest timestamp changes.
/// Entries that would escape the extraction root abort the whole fetch before
/// anything is written (ArchiveError). Any failure during extraction removes
/// the partial output.
FetchOutcome fetch_corpus(const CorpusSource& source,
                          const std::filesystem::path& dest_root,
                          PageFetcher& fetcher, Manifest& manifest,
                          const RetryPolicy& retry = {});

}  // namespace chatharvest
