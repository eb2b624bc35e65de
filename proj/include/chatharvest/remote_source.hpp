#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chatharvest {

/// A downloadable corpus archive in a remote collection.
struct CorpusSource {
  std::string collection;
  std::string dataset;  // may be nested, e.g. "Eng-NA/Sub"
  std::string corpus;   // archive basename without ".zip"
  std::string archive_url;

  friend bool operator==(const CorpusSource&, const CorpusSource&) = default;
};

struct FetchResponse {
  int status = 0;
  std::string body;
  bool auth_challenge = false;  // a WWW-Authenticate header was present
};

/// Fetches a URL. Transport failures (DNS, connect, timeout) throw
/// NetworkError with status 0; HTTP statuses are reported, not thrown.
/// Implementations must be safe to call from several threads.
class PageFetcher {
 public:
  virtual ~PageFetcher() = default;
  virtual FetchResponse fetch(const std::string& url) = 0;
};

/// Fetches and checks the status: auth challenge -> ProtectedCollectionError,
/// any other non-2xx -> NetworkError carrying the status.
std::string fetch_body(PageFetcher& fetcher, const std::string& url);

/// `https://<collection>.talkbank.org/data/<dataset>`, or
/// `<base_host>/<collection>/data/<dataset>` when a base host is given
/// (`http://` is assumed when it has no scheme). Throws InvalidArgument on an
/// empty name or characters outside [A-Za-z0-9._-].
std::string dataset_url(std::string_view collection, std::string_view dataset,
                        std::string_view base_host = {});

struct ScanOptions {
  int max_depth = 1;  // subdirectory levels followed below the dataset
  // Overrides the collection name inferred from the URL.
  std::optional<std::string> collection;
};

/// Every `.zip` link in a dataset's HTML directory listing, as sorted,
/// de-duplicated CorpusSources. Links to other hosts are ignored. A failing
/// sub-listing is logged and skipped; a failing top listing throws.
std::vector<CorpusSource> scan_zip_urls(const std::string& url,
                                        PageFetcher& fetcher,
                                        const ScanOptions& options = {});

/// href attribute values of the <a> tags in an HTML page, in document order,
/// with character references (&amp; &quot; ...) decoded.
std::vector<std::string> extract_hrefs(std::string_view html);

}  // namespace chatharvest
