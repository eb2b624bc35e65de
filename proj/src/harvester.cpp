#include "chatharvest/harvester.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>
#include <tuple>

#include "chatharvest/chat_header.hpp"
#include "chatharvest/digest.hpp"
#include "chatharvest/errors.hpp"
#include "chatharvest/zip_archive.hpp"
#include "chatharvest/log.hpp"
#include "text_util.hpp"

namespace chatharvest {

namespace fs = std::filesystem;

namespace {

bool is_transcript(const ZipEntry& entry) {
  return !entry.is_directory() && text::ends_with(entry.name, ".cha");
}

bool retryable(int status) { return status == 0 || status == 429 || status >= 500; }

std::string label(const CorpusSource& s) { return s.dataset + "/" + s.corpus; }

void write_file(const fs::path& path, const std::string& data) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

ScreenResult screen_corpus(const CorpusSource& source, const FilterExpr& criteria,
                           PageFetcher& fetcher) {
  ScreenResult result;
  result.source = source;

  auto bytes = fetch_body(fetcher, source.archive_url);
  std::optional<ZipArchive> archive;
  try {
    archive.emplace(std::move(bytes));
  } catch (const ArchiveError& e) {
    throw ArchiveError("corpus " + source.corpus + ": " + e.what());
  }

  for (const auto& entry : archive->entries()) {
    if (!is_transcript(entry)) continue;
    ++result.files_inspected;
    try {
      auto header = parse_header(archive->read(entry), ParseMode::lenient);
      if (eval_expr(criteria, header)) {
        result.selected = true;
        result.first_match = entry.name;
        break;
      }
    } catch (const Error& e) {
      result.warnings.push_back(entry.name + ": " + e.what());
    }
  }
  log::info("screen", label(source),
            result.first_match.value_or(""),
            (result.selected ? "selected after " : "rejected after ") +
                std::to_string(result.files_inspected) + " file(s)");
  return result;
}

std::vector<ScreenResult> screen_dataset(const std::vector<CorpusSource>& sources,
                                         const FilterExpr& criteria,
                                         PageFetcher& fetcher,
                                         std::size_t parallelism) {
  if (parallelism < 1) throw InvalidArgument("parallelism must be at least 1");
  std::vector<ScreenResult> results(sources.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (auto i = next++; i < sources.size(); i = next++) {
      try {
        results[i] = screen_corpus(sources[i], criteria, fetcher);
      } catch (const std::exception& e) {
        results[i] = ScreenResult{};
        results[i].source = sources[i];
        results[i].error = e.what();
        log::error("screen", label(sources[i]), "", e.what());
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    auto n = std::min(parallelism, std::max<std::size_t>(sources.size(), 1));
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }

  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::tie(a.source.corpus, a.source.archive_url) <
           std::tie(b.source.corpus, b.source.archive_url);
  });
  if (!results.empty() &&
      std::all_of(results.begin(), results.end(),
                  [](const auto& r) { return r.error.has_value(); })) {
    throw Error("screening failed for every corpus (first error: " +
                *results.front().error + ")");
  }
  return results;
}

std::string fetch_with_retry(PageFetcher& fetcher, const std::string& url,
                             const RetryPolicy& policy) {
  auto backoff = policy.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return fetch_body(fetcher, url);
    } catch (const ProtectedCollectionError&) {
      throw;
    } catch (const NetworkError& e) {
      if (!retryable(e.status()) || attempt >= policy.attempts) throw;
      log::warn("fetch", "", url,
                std::string(e.what()) + "; retry " + std::to_string(attempt) +
                    " of " + std::to_string(policy.attempts - 1));
    }
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
}

FetchOutcome fetch_corpus(const CorpusSource& source, const fs::path& dest_root,
                          PageFetcher& fetcher, Manifest& manifest,
                          const RetryPolicy& retry) {
  auto dataset_dir = safe_entry_path(source.dataset);
  auto corpus_dir = safe_entry_path(source.corpus);
  if (dataset_dir.empty() || corpus_dir.empty() ||
      corpus_dir.find('/') != std::string::npos) {
    throw InvalidArgument("unsafe dataset/corpus name: " + label(source));
  }
  auto relative_root = dataset_dir + "/" + corpus_dir;
  auto root = dest_root / fs::path(relative_root);
  auto key = Manifest::key(source.dataset, source.corpus);

  auto bytes = fetch_with_retry(fetcher, source.archive_url, retry);
  auto digest = sha256_hex(bytes);
  auto byte_size = static_cast<std::uint64_t>(bytes.size());

  if (auto known = manifest.get(key);
      known && known->digest == digest && fs::is_directory(root)) {
    known->timestamp = utc_timestamp();
    manifest.put(key, *known);
    manifest.save();
    log::info("fetch", label(source), "", "unchanged (sha256 " + digest.substr(0, 12) + "), skipped");
    return {root, true, static_cast<std::size_t>(known->file_count)};
  }

  std::optional<ZipArchive> archive;
  try {
    archive.emplace(std::move(bytes));
  } catch (const ArchiveError& e) {
    throw ArchiveError("corpus " + source.corpus + ": " + e.what());
  }
  std::vector<std::pair<const ZipEntry*, std::string>> plan;
  for (const auto& entry : archive->entries()) {
    auto path = safe_entry_path(entry.name);
    if (path.empty()) {
      throw ArchiveError("corpus " + source.corpus +
                         ": entry escapes extraction root: " + entry.name);
    }
    plan.emplace_back(&entry, std::move(path));
  }

  auto staging = root.parent_path() / ("." + corpus_dir + ".partial");
  std::size_t files = 0;
  try {
    fs::remove_all(staging);
    fs::create_directories(staging);
    for (const auto& [entry, path] : plan) {
      if (entry->is_directory()) {
        fs::create_directories(staging / fs::path(path));
        continue;
      }
      write_file(staging / fs::path(path), archive->read(*entry));
      ++files;
    }
    fs::remove_all(root);
    fs::rename(staging, root);
  } catch (const fs::filesystem_error& e) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw IoError("extracting " + label(source) + ": " + e.what());
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw;
  }

  ManifestEntry entry;
  entry.archive_url = source.archive_url;
  entry.digest = digest;
  entry.byte_size = byte_size;
  entry.extraction_root = relative_root;
  entry.timestamp = utc_timestamp();
  entry.file_count = files;
  manifest.put(key, std::move(entry));
  manifest.save();
  log::info("fetch", label(source), "", "extracted " + std::to_string(files) + " file(s)");
  return {root, false, files};
}

}  // namespace chatharvest
