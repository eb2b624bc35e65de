#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "chatharvest/errors.hpp"
#include "zip_writer.hpp"

namespace testsupport {

namespace fs = std::filesystem;

fs::path data_dir() { return CHATHARVEST_TEST_DATA; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  for (;;) {
    path_ = fs::temp_directory_path() /
            ("chatharvest-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    if (fs::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ignored;
  fs::remove_all(path_, ignored);
}

void MemoryFetcher::set(const std::string& url, chatharvest::FetchResponse response) {
  std::lock_guard lock(mutex_);
  responses_[url] = std::move(response);
}

void MemoryFetcher::set_body(const std::string& url, std::string body) {
  set(url, {200, std::move(body), false});
}

void MemoryFetcher::fail_transport(const std::string& url, int n) {
  std::lock_guard lock(mutex_);
  transport_failures_[url] = n;
}

chatharvest::FetchResponse MemoryFetcher::fetch(const std::string& url) {
  std::lock_guard lock(mutex_);
  ++hits_[url];
  if (auto it = transport_failures_.find(url); it != transport_failures_.end() && it->second > 0) {
    --it->second;
    throw chatharvest::NetworkError("connection refused: " + url, 0);
  }
  auto it = responses_.find(url);
  if (it == responses_.end()) return {404, "not found", false};
  return it->second;
}

int MemoryFetcher::hits(const std::string& url) const {
  std::lock_guard lock(mutex_);
  auto it = hits_.find(url);
  return it == hits_.end() ? 0 : it->second;
}

std::string listing_html(const std::string& title, const std::vector<std::string>& hrefs) {
  std::string html =
      "<!DOCTYPE HTML PUBLIC \"-//W3C//DTD HTML 3.2 Final//EN\">\n<html>\n<head>\n"
      "<title>Index of " + title + "</title>\n</head>\n<body>\n<h1>Index of " + title +
      "</h1>\n<table>\n"
      "<tr><th><a href=\"?C=N;O=D\">Name</a></th><th><a href=\"?C=M;O=A\">Last "
      "modified</a></th></tr>\n"
      "<tr><td><a href=\"../\">Parent Directory</a></td></tr>\n";
  for (const auto& h : hrefs) {
    html += "<tr><td><a href=\"" + h + "\">" + h + "</a></td><td>2024-01-01 00:00</td></tr>\n";
  }
  html += "</table>\n</body></html>\n";
  return html;
}

void serve_dataset(StubServer& server, const std::string& collection,
                   const std::string& dataset, const fs::path& corpora_dir) {
  std::set<std::string> names;
  for (const auto& item : fs::directory_iterator(corpora_dir)) {
    if (item.is_directory()) names.insert(item.path().filename().string());
  }
  const std::string prefix = "/" + collection + "/data/" + dataset + "/";
  std::vector<std::string> hrefs;
  for (const auto& name : names) {
    hrefs.push_back(name + ".zip");
    StubRoute zip;
    zip.body = zip_directory(corpora_dir / name);
    zip.content_type = "application/zip";
    server.route(prefix + name + ".zip", std::move(zip));
  }
  server.route(prefix, {200, listing_html(prefix, hrefs)});
}

}  // namespace testsupport
