#pragma once

// Shared helpers: fixture paths, temp dirs, in-memory fetcher and the stub
// TalkBank layout served from tests/data.

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "chatharvest/remote_source.hpp"
#include "stub_server.hpp"

namespace testsupport {

std::filesystem::path data_dir();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// PageFetcher answering from a map; unknown URLs give 404.
class MemoryFetcher : public chatharvest::PageFetcher {
 public:
  void set(const std::string& url, chatharvest::FetchResponse response);
  void set_body(const std::string& url, std::string body);
  /// The next `n` requests for `url` fail with NetworkError(status 0).
  void fail_transport(const std::string& url, int n);
  chatharvest::FetchResponse fetch(const std::string& url) override;
  int hits(const std::string& url) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, chatharvest::FetchResponse> responses_;
  std::map<std::string, int> transport_failures_;
  std::map<std::string, int> hits_;
};

/// Apache-style directory listing page with the given hrefs.
std::string listing_html(const std::string& title, const std::vector<std::string>& hrefs);

/// Serves every sub-directory of `corpora_dir` as `<Name>.zip` in the
/// listing `/<collection>/data/<dataset>/` of `server`.
void serve_dataset(StubServer& server, const std::string& collection,
                   const std::string& dataset, const std::filesystem::path& corpora_dir);

/// Filter that selects transcripts with a child and some SES information.
inline constexpr const char* kListing1 =
    "exists(CHI) and (nonempty(CHI.ses) or (exists(MOT) and nonempty(MOT.ses)) "
    "or (exists(MOT) and nonempty(MOT.education)))";

}  // namespace testsupport
