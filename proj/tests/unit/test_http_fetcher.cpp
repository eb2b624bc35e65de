#include <gtest/gtest.h>

#include "chatharvest/errors.hpp"
#include "chatharvest/http_fetcher.hpp"
#include "stub_server.hpp"

using namespace chatharvest;
using testsupport::StubRoute;
using testsupport::StubServer;

TEST(HttpFetcher, FetchesBodyAndStatus) {
  StubServer server;
  server.route("/a", {200, "hello"});
  HttpFetcher http;
  auto r = http.fetch(server.base_url() + "/a");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, "hello");
  EXPECT_FALSE(r.auth_challenge);
  EXPECT_EQ(http.fetch(server.base_url() + "/missing").status, 404);
}

TEST(HttpFetcher, FollowsRelativeAndAbsoluteRedirects) {
  StubServer server;
  server.route("/start", {302, "", "text/plain", {{"Location", "/middle"}}});
  server.route("/middle",
               {301, "", "text/plain", {{"Location", server.base_url() + "/end"}}});
  server.route("/end", {200, "done"});
  HttpFetcher http;
  auto r = http.fetch(server.base_url() + "/start");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, "done");
}

TEST(HttpFetcher, RedirectLoopIsBounded) {
  StubServer server;
  server.route("/loop", {302, "", "text/plain", {{"Location", "/loop"}}});
  HttpOptions opts;
  opts.max_redirects = 5;
  HttpFetcher http(opts);
  EXPECT_THROW(http.fetch(server.base_url() + "/loop"), NetworkError);
  EXPECT_EQ(server.hits("/loop"), 6);
}

TEST(HttpFetcher, AuthChallengeIsReported) {
  StubServer server;
  server.route("/private", {401, "", "text/plain", {{"WWW-Authenticate", "Basic realm=\"tb\""}}});
  HttpFetcher http;
  auto r = http.fetch(server.base_url() + "/private");
  EXPECT_EQ(r.status, 401);
  EXPECT_TRUE(r.auth_challenge);
  EXPECT_THROW(fetch_body(http, server.base_url() + "/private"), ProtectedCollectionError);
}

TEST(HttpFetcher, TransportFailureHasStatusZero) {
  int port;
  {
    StubServer server;  // grab a free port, then release it
    port = std::stoi(server.base_url().substr(server.base_url().rfind(':') + 1));
  }
  HttpOptions opts;
  opts.timeout = std::chrono::seconds(2);
  HttpFetcher http(opts);
  try {
    http.fetch("http://127.0.0.1:" + std::to_string(port) + "/x");
    FAIL() << "expected NetworkError";
  } catch (const NetworkError& e) {
    EXPECT_EQ(e.status(), 0);
  }
}

TEST(HttpFetcher, RejectsNonHttpUrls) {
  HttpFetcher http;
  EXPECT_THROW(http.fetch("ftp://example.org/x"), InvalidArgument);
}
