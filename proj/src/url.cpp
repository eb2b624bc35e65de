#include "chatharvest/url.hpp"

#include <charconv>
#include <vector>

#include "text_util.hpp"

namespace chatharvest {

namespace {

std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string_view> out;
  bool trailing_slash = path.ends_with('/') || path.ends_with("/.") ||
                        path.ends_with("/..") || path == "." || path == "..";
  for (auto seg : text::split(path, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!out.empty()) out.pop_back();
      continue;
    }
    out.push_back(seg);
  }
  std::string result = "/";
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) result += '/';
    result += out[i];
  }
  if (trailing_slash && !out.empty()) result += '/';
  return result;
}

std::string_view strip_fragment(std::string_view s) {
  auto hash = s.find('#');
  return hash == std::string_view::npos ? s : s.substr(0, hash);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string Url::str() const {
  auto out = scheme + "://" + authority + path;
  if (!query.empty()) out += "?" + query;
  return out;
}

std::string Url::host() const {
  auto colon = authority.rfind(':');
  if (colon == std::string::npos || authority.find(']', colon) != std::string::npos) {
    return authority;
  }
  return authority.substr(0, colon);
}

int Url::port() const {
  auto h = host();
  if (h.size() == authority.size()) return 0;
  int port = 0;
  auto digits = std::string_view(authority).substr(h.size() + 1);
  std::from_chars(digits.data(), digits.data() + digits.size(), port);
  return port;
}

std::string Url::target() const {
  return query.empty() ? path : path + "?" + query;
}

std::optional<Url> parse_url(std::string_view text) {
  text = strip_fragment(text::trim(text));
  auto sep = text.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  auto scheme = text::to_lower_ascii(text.substr(0, sep));
  if (scheme != "http" && scheme != "https") return std::nullopt;
  auto rest = text.substr(sep + 3);
  auto path_start = rest.find_first_of("/?");
  Url url;
  url.scheme = scheme;
  url.authority = std::string(rest.substr(0, path_start));
  if (url.authority.empty()) return std::nullopt;
  if (path_start != std::string_view::npos) {
    auto tail = rest.substr(path_start);
    auto q = tail.find('?');
    auto path = tail.substr(0, q);
    url.path = path.empty() ? "/" : std::string(path);
    if (q != std::string_view::npos) url.query = std::string(tail.substr(q + 1));
  }
  return url;
}

std::optional<Url> resolve_url(const Url& base, std::string_view href) {
  href = strip_fragment(text::trim(href));
  auto colon = href.find(':');
  auto slash = href.find('/');
  if (colon != std::string_view::npos &&
      (slash == std::string_view::npos || colon < slash)) {
    return parse_url(href);  // has a scheme
  }
  if (href.starts_with("//")) return parse_url(base.scheme + ":" + std::string(href));

  Url out;
  out.scheme = base.scheme;
  out.authority = base.authority;
  if (href.empty()) {
    out.path = base.path;
    out.query = base.query;
    return out;
  }
  auto q = href.find('?');
  auto ref_path = href.substr(0, q);
  if (q != std::string_view::npos) out.query = std::string(href.substr(q + 1));

  if (ref_path.empty()) {
    out.path = base.path;
  } else if (ref_path.starts_with('/')) {
    out.path = remove_dot_segments(ref_path);
  } else {
    auto dir = base.path.substr(0, base.path.rfind('/') + 1);
    out.path = remove_dot_segments(dir + std::string(ref_path));
  }
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = hex_value(s[i + 1]);
      int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

}  // namespace chatharvest
