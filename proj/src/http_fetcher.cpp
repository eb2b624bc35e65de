#include "chatharvest/http_fetcher.hpp"

#include <httplib.h>

#include "chatharvest/errors.hpp"
#include "chatharvest/url.hpp"

namespace chatharvest {

HttpFetcher::HttpFetcher(HttpOptions options) : options_(std::move(options)) {}

FetchResponse HttpFetcher::fetch(const std::string& url) {
  auto current = parse_url(url);
  if (!current) throw InvalidArgument("unsupported URL: " + url);

  for (int hop = 0;; ++hop) {
    httplib::Client client(current->scheme + "://" + current->authority);
    client.set_follow_location(false);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    httplib::Headers headers = {{"User-Agent", options_.user_agent}};

    auto result = client.Get(current->target(), headers);
    if (!result) {
      throw NetworkError("request to " + current->str() +
                             " failed: " + httplib::to_string(result.error()),
                         0);
    }
    const auto& res = result.value();
    bool redirect = res.status >= 300 && res.status < 400 &&
                    res.status != 304 && res.has_header("Location");
    if (!redirect) {
      FetchResponse out;
      out.status = res.status;
      out.body = res.body;
      out.auth_challenge = res.has_header("WWW-Authenticate");
      return out;
    }
    if (hop >= options_.max_redirects) {
      throw NetworkError("too many redirects fetching " + url, res.status);
    }
    auto next = resolve_url(*current, res.get_header_value("Location"));
    if (!next) {
      throw NetworkError("bad redirect target from " + current->str(), res.status);
    }
    current = std::move(next);
  }
}

}  // namespace chatharvest
