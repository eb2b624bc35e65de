#include <gtest/gtest.h>

#include <random>

#include "chatharvest/csv.hpp"
#include "chatharvest/errors.hpp"

using namespace chatharvest;

TEST(Csv, EscapeOnlyWhenNeeded) {
  EXPECT_EQ(csv::escape("Bates"), "Bates");
  EXPECT_EQ(csv::escape(""), "");
  EXPECT_EQ(csv::escape("CHI, MOT"), "\"CHI, MOT\"");
  EXPECT_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv::escape("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv::escape("cr\r"), "\"cr\r\"");
}

TEST(Csv, RecordsEndWithCrLf) {
  EXPECT_EQ(csv::format_record({"a", "b, c", ""}), "a,\"b, c\",\r\n");
}

TEST(Csv, ParseHandlesQuotesAndLineEndings) {
  auto rows = csv::parse("a,\"b, c\",\r\n\"x\"\"y\",\"multi\nline\",z\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b, c", ""}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"x\"y", "multi\nline", "z"}));
}

TEST(Csv, ParseWithoutTrailingNewline) {
  auto rows = csv::parse("a,b\r\nc,d");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"c", "d"}));
  EXPECT_TRUE(csv::parse("").empty());
}

TEST(Csv, ParseRejectsBrokenQuoting) {
  EXPECT_THROW(csv::parse("\"open"), Error);
  EXPECT_THROW(csv::parse("\"a\"b,c\r\n"), Error);
  EXPECT_THROW(csv::parse("a\"b\r\n"), Error);
}

TEST(Csv, RandomRecordsRoundTrip) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "ab ,\"\r\n;|\t\xc3\xa9";
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<std::vector<std::string>> records;
    std::string text;
    int width = 1 + static_cast<int>(rng() % 5);
    for (int r = 0, n = 1 + static_cast<int>(rng() % 6); r < n; ++r) {
      std::vector<std::string> rec;
      for (int c = 0; c < width; ++c) {
        std::string field;
        for (int k = 0, len = static_cast<int>(rng() % 8); k < len; ++k) {
          field += alphabet[rng() % alphabet.size()];
        }
        rec.push_back(field);
      }
      // a single empty field renders as an empty line, which is not a record
      if (width == 1 && rec[0].empty()) rec[0] = "x";
      text += csv::format_record(rec);
      records.push_back(std::move(rec));
    }
    EXPECT_EQ(csv::parse(text), records) << text;
  }
}
