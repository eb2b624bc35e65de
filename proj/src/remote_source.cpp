#include "chatharvest/remote_source.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "chatharvest/errors.hpp"
#include "chatharvest/log.hpp"
#include "chatharvest/url.hpp"
#include "text_util.hpp"

namespace chatharvest {

namespace {

bool valid_name(std::string_view name) {
  if (name.empty() || name == "." || name == "..") return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
  });
}

std::vector<std::string> path_segments(std::string_view path) {
  std::vector<std::string> out;
  for (auto seg : text::split(path, '/')) {
    if (!seg.empty()) out.push_back(percent_decode(seg));
  }
  return out;
}

std::string decode_entities(std::string_view s) {
  static const std::pair<std::string_view, char> kEntities[] = {
      {"&amp;", '&'}, {"&quot;", '"'}, {"&apos;", '\''},
      {"&#39;", '\''}, {"&lt;", '<'},  {"&gt;", '>'}};
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    bool replaced = false;
    if (s[i] == '&') {
      for (auto [entity, ch] : kEntities) {
        if (s.substr(i).starts_with(entity)) {
          out += ch;
          i += entity.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += s[i++];
  }
  return out;
}

bool is_name_char(char c) {
  return !text::is_space(c) && c != '=' && c != '>' && c != '/' && c != '"' &&
         c != '\'';
}

class ListingScanner {
 public:
  ListingScanner(PageFetcher& fetcher, const ScanOptions& options,
                 const Url& root)
      : fetcher_(fetcher), options_(options), root_(root) {
    root_segments_ = path_segments(root_.path);
    if (options_.collection) {
      collection_ = *options_.collection;
    } else {
      auto data = std::find(root_segments_.begin(), root_segments_.end(), "data");
      if (data != root_segments_.end() && data != root_segments_.begin()) {
        collection_ = *(data - 1);
      } else {
        auto host = root_.host();
        collection_ = host.substr(0, host.find('.'));
      }
    }
    dataset_ = root_segments_.empty() ? collection_ : root_segments_.back();
  }

  std::vector<CorpusSource> run() {
    visit(root_, 0);
    std::vector<CorpusSource> out;
    out.reserve(found_.size());
    for (auto& [url, source] : found_) out.push_back(std::move(source));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      return std::tie(a.corpus, a.archive_url) < std::tie(b.corpus, b.archive_url);
    });
    return out;
  }

 private:
  void visit(const Url& listing, int depth) {
    if (!visited_.insert(listing.str()).second) return;
    std::string html;
    try {
      html = fetch_body(fetcher_, listing.str());
    } catch (const ProtectedCollectionError&) {
      throw;
    } catch (const NetworkError& e) {
      if (depth == 0) throw;
      // a broken sub-listing loses only its own archives
      log::warn("scan", dataset_, listing.str(), e.what());
      return;
    }
    for (const auto& href : extract_hrefs(html)) {
      auto target = resolve_url(listing, href);
      if (!target || target->authority != root_.authority) continue;

      if (text::ends_with(text::to_lower_ascii(target->path), ".zip")) {
        add_zip(*target);
      } else if (depth < options_.max_depth && target->query.empty() &&
                 target->path.ends_with('/') &&
                 target->path.size() > listing.path.size() &&
                 target->path.starts_with(listing.path)) {
        visit(*target, depth + 1);
      }
    }
  }

  void add_zip(const Url& target) {
    auto segments = path_segments(target.path);
    if (segments.empty()) return;
    auto file = segments.back();
    auto corpus = file.substr(0, file.size() - 4);
    if (corpus.empty()) return;

    std::string dataset = dataset_;
    segments.pop_back();
    bool nested = segments.size() > root_segments_.size() &&
                  std::equal(root_segments_.begin(), root_segments_.end(),
                             segments.begin());
    if (nested) {
      for (auto i = root_segments_.size(); i < segments.size(); ++i) {
        dataset += "/" + segments[i];
      }
    }
    auto key = target.str();
    found_.emplace(key, CorpusSource{collection_, dataset, corpus, key});
  }

  PageFetcher& fetcher_;
  const ScanOptions& options_;
  Url root_;
  std::vector<std::string> root_segments_;
  std::string collection_;
  std::string dataset_;
  std::set<std::string> visited_;
  std::map<std::string, CorpusSource> found_;
};

}  // namespace

std::string fetch_body(PageFetcher& fetcher, const std::string& url) {
  auto response = fetcher.fetch(url);
  if (response.status == 401 || response.auth_challenge) {
    throw ProtectedCollectionError(url);
  }
  if (response.status < 200 || response.status >= 300) {
    throw NetworkError("HTTP " + std::to_string(response.status) + " for " + url,
                       response.status);
  }
  return std::move(response.body);
}

std::string dataset_url(std::string_view collection, std::string_view dataset,
                        std::string_view base_host) {
  if (!valid_name(collection)) {
    throw InvalidArgument("invalid collection name '" + std::string(collection) + "'");
  }
  if (!valid_name(dataset)) {
    throw InvalidArgument("invalid dataset name '" + std::string(dataset) + "'");
  }
  auto base = text::trim(base_host);
  if (base.empty()) {
    return "https://" + text::to_lower_ascii(collection) + ".talkbank.org/data/" +
           std::string(dataset);
  }
  while (base.ends_with('/')) base.remove_suffix(1);
  std::string prefix = base.find("://") == std::string_view::npos
                           ? "http://" + std::string(base)
                           : std::string(base);
  return prefix + "/" + std::string(collection) + "/data/" + std::string(dataset);
}

std::vector<CorpusSource> scan_zip_urls(const std::string& url,
                                        PageFetcher& fetcher,
                                        const ScanOptions& options) {
  auto parsed = parse_url(url);
  if (!parsed) throw InvalidArgument("not an http(s) URL: " + url);
  // listings are directories; relative links resolve below them
  if (!parsed->path.ends_with('/')) parsed->path += '/';
  return ListingScanner(fetcher, options, *parsed).run();
}

std::vector<std::string> extract_hrefs(std::string_view html) {
  std::vector<std::string> out;
  std::size_t i = 0;
  const auto n = html.size();
  while (i < n) {
    auto lt = html.find('<', i);
    if (lt == std::string_view::npos) break;
    i = lt + 1;
    if (html.substr(i).starts_with("!--")) {
      auto end = html.find("-->", i);
      i = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    if (i >= n || (html[i] != 'a' && html[i] != 'A')) continue;
    if (i + 1 < n && is_name_char(html[i + 1])) continue;  // <abbr>, <area>...
    ++i;

    // attributes until '>'
    while (i < n && html[i] != '>') {
      while (i < n && (text::is_space(html[i]) || html[i] == '/')) ++i;
      auto name_start = i;
      while (i < n && is_name_char(html[i])) ++i;
      auto name = text::to_lower_ascii(html.substr(name_start, i - name_start));
      if (name.empty()) {
        if (i < n && html[i] != '>') ++i;
        continue;
      }
      while (i < n && text::is_space(html[i])) ++i;
      if (i >= n || html[i] != '=') continue;
      ++i;
      while (i < n && text::is_space(html[i])) ++i;
      std::string_view value;
      if (i < n && (html[i] == '"' || html[i] == '\'')) {
        char q = html[i++];
        auto close = html.find(q, i);
        if (close == std::string_view::npos) close = n;
        value = html.substr(i, close - i);
        i = close < n ? close + 1 : n;
      } else {
        auto start = i;
        while (i < n && !text::is_space(html[i]) && html[i] != '>') ++i;
        value = html.substr(start, i - start);
      }
      if (name == "href") out.push_back(decode_entities(value));
    }
  }
  return out;
}

}  // namespace chatharvest
