#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace chatharvest {

/// Minimal absolute http(s) URL. `authority` keeps host and optional port.
struct Url {
  std::string scheme;
  std::string authority;
  std::string path = "/";
  std::string query;  // without '?'

  std::string str() const;
  /// Host and port split out of the authority; port 0 when not given.
  std::string host() const;
  int port() const;
  /// Path plus query, as sent in a request line.
  std::string target() const;

  friend bool operator==(const Url&, const Url&) = default;
};

/// Parses an absolute http/https URL; nullopt otherwise.
std::optional<Url> parse_url(std::string_view text);

/// Resolves `href` (absolute, scheme-relative, root-relative or relative)
/// against `base`. Fragments are dropped. nullopt for non-http(s) schemes
/// such as mailto: or javascript:.
std::optional<Url> resolve_url(const Url& base, std::string_view href);

/// Decodes %XX escapes; malformed escapes are kept verbatim.
std::string percent_decode(std::string_view s);

}  // namespace chatharvest
