#pragma once

#include <chrono>
#include <string>

#include "chatharvest/remote_source.hpp"

namespace chatharvest {

struct HttpOptions {
  std::string user_agent = "chatharvest/1.0 (corpus harvester)";
  std::chrono::seconds timeout{30};
  int max_redirects = 5;
};

/// PageFetcher over plain HTTP GET (http and https). Follows up to
/// `max_redirects` redirects. Each call opens its own connection, so one
/// instance can be shared between threads.
class HttpFetcher final : public PageFetcher {
 public:
  explicit HttpFetcher(HttpOptions options = {});

  FetchResponse fetch(const std::string& url) override;

 private:
  HttpOptions options_;
};

}  // namespace chatharvest
