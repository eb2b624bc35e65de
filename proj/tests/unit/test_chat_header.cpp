#include <gtest/gtest.h>
#include <json.hpp>

#include <random>

#include "chatharvest/chat_header.hpp"
#include "chatharvest/errors.hpp"
#include "fixtures.hpp"
#include "random_expr.hpp"

using namespace chatharvest;
using testsupport::data_dir;
using testsupport::read_file;

namespace {

const char* kAmy =
    "@UTF8\n@Begin\n@Languages:\teng\n"
    "@Participants:\tCHI Target_Child , MOT Mother\n"
    "@ID:\teng|Bates|CHI|1;8.|female|TD|MC|Target_Child|||\n"
    "@ID:\teng|Bates|MOT|||||Mother|||\n"
    "@Types:\tcross, toyplay, TD\n"
    "*CHI:\tmore cookie .\n@End\n";

std::string with_lines(const std::string& participants, const std::string& ids) {
  return "@UTF8\n@Begin\n@Participants:\t" + participants + "\n" + ids + "@End\n";
}

}  // namespace

TEST(ParseAge, ExamplesFromTheFormat) {
  EXPECT_DOUBLE_EQ(*parse_age("1;8."), 20.0);
  EXPECT_DOUBLE_EQ(*parse_age("0;0."), 0.0);
  EXPECT_DOUBLE_EQ(*parse_age("2;6.15"), 30.5);  // 30 + 15/30.4375 = 30.49 -> 30.5
  EXPECT_DOUBLE_EQ(*parse_age("1;06.00"), 18.0);
  EXPECT_DOUBLE_EQ(*parse_age("34;"), 408.0);
  EXPECT_DOUBLE_EQ(*parse_age("2;4"), 28.0);
}

TEST(ParseAge, RoundsHalfUpToOneDecimal) {
  // 1;0.16 -> 12 + 16/30.4375 = 12.5257 -> 12.5
  EXPECT_DOUBLE_EQ(*parse_age("1;0.16"), 12.5);
  // 0;0.3 -> 0.0986 -> 0.1
  EXPECT_DOUBLE_EQ(*parse_age("0;0.3"), 0.1);
}

TEST(ParseAge, EmptyIsAbsent) { EXPECT_FALSE(parse_age("")); }

TEST(ParseAge, MalformedLenientWarnsStrictThrows) {
  for (const char* bad : {"1;13.", "x;1.", "1.8", ";5.", "1;2.40", "-1;2."}) {
    std::string warning;
    EXPECT_FALSE(parse_age(bad, ParseMode::lenient, &warning)) << bad;
    EXPECT_FALSE(warning.empty()) << bad;
    EXPECT_THROW(parse_age(bad, ParseMode::strict), HeaderError) << bad;
  }
}

TEST(ParseHeader, TableTwoRowZeroFixture) {
  auto h = parse_header(kAmy);
  EXPECT_EQ(h.corpus, "Bates");
  ASSERT_EQ(h.participants.size(), 2u);
  const auto& chi = h.participants[0];
  EXPECT_EQ(chi.code, "CHI");
  EXPECT_FALSE(chi.name);
  EXPECT_EQ(chi.role, "Target_Child");
  EXPECT_EQ(chi.age, "1;8.");
  EXPECT_DOUBLE_EQ(*chi.age_months, 20.0);
  ASSERT_TRUE(chi.sex);
  EXPECT_EQ(chi.sex->kind, SexKind::female);
  EXPECT_EQ(chi.group, "TD");
  EXPECT_EQ(chi.ses, "MC");
  EXPECT_FALSE(chi.education);
  EXPECT_TRUE(chi.has_id_line);
  EXPECT_EQ(h.types, (std::vector<std::string>{"cross", "toyplay", "TD"}));
  EXPECT_EQ(h.languages, (std::vector<std::string>{"eng"}));
  EXPECT_TRUE(h.raw_warnings.empty());
}

TEST(ParseHeader, EmptySlotsAreAbsent) {
  auto h = parse_header(kAmy);
  const auto* mot = h.find("MOT");
  ASSERT_NE(mot, nullptr);
  EXPECT_FALSE(mot->age);
  EXPECT_FALSE(mot->sex);
  EXPECT_FALSE(mot->ses);
  EXPECT_FALSE(get_field(h, "MOT", Field::ses));
  EXPECT_EQ(get_field(h, "MOT", Field::role), "Mother");
}

TEST(ParseHeader, ParticipantWithoutIdLine) {
  auto h = parse_header(with_lines("CHI Target_Child, MOT Mother",
                                   "@ID:\teng|X|CHI|2;0.|male|||Target_Child|||\n"));
  const auto* mot = h.find("MOT");
  ASSERT_NE(mot, nullptr);
  EXPECT_FALSE(mot->has_id_line);
  EXPECT_TRUE(h.find("CHI")->has_id_line);
}

TEST(ParseHeader, ThreeTokenEntryCarriesName) {
  auto h = parse_header(with_lines("CHI Eve Target_Child , MOT Sue Mother", ""));
  EXPECT_EQ(h.find("CHI")->name, "Eve");
  EXPECT_EQ(h.find("MOT")->name, "Sue");
  EXPECT_EQ(h.find("MOT")->role, "Mother");
}

TEST(ParseHeader, UnknownSexKeptRaw) {
  auto h = parse_header(with_lines("CHI Target_Child",
                                   "@ID:\teng|X|CHI|2;0.|unknown|||Target_Child|||\n"));
  ASSERT_TRUE(h.find("CHI")->sex);
  EXPECT_EQ(h.find("CHI")->sex->kind, SexKind::other);
  EXPECT_EQ(h.find("CHI")->sex->raw, "unknown");
  EXPECT_EQ(get_field(h, "CHI", Field::sex), "unknown");
}

TEST(ParseHeader, ContinuationLinesAreFolded) {
  auto h = parse_header(
      "@Begin\n@Participants:\tCHI Target_Child ,\n\tMOT Mother\n"
      "@ID:\teng|X|MOT||||WC|Mother|||\n@End\n");
  ASSERT_EQ(h.participants.size(), 2u);
  EXPECT_EQ(get_field(h, "MOT", Field::ses), "WC");
}

TEST(ParseHeader, StopsAtFirstUtterance) {
  auto h = parse_header(
      "@Begin\n@Participants:\tCHI Target_Child\n*CHI:\thi .\n"
      "@ID:\teng|X|CHI|||||Target_Child|||\n@End\n");
  EXPECT_FALSE(h.find("CHI")->has_id_line);
}

TEST(ParseHeader, ByteOrderMarkAndCrLf) {
  std::string text = "\xEF\xBB\xBF@UTF8\r\n@Begin\r\n@Participants:\tCHI Target_Child\r\n"
                     "@ID:\teng|X|CHI|1;0.|female||MC|Target_Child|||\r\n@End\r\n";
  auto h = parse_header(text);
  EXPECT_EQ(get_field(h, "CHI", Field::ses), "MC");
  EXPECT_EQ(get_field(h, "CHI", Field::role), "Target_Child");
}

TEST(ParseHeader, MissingParticipantsThrows) {
  EXPECT_THROW(parse_header("@UTF8\n@Begin\n@End\n"), HeaderError);
  EXPECT_THROW(parse_header(""), HeaderError);
}

TEST(ParseHeader, InvalidUtf8Throws) {
  EXPECT_THROW(parse_header("@Begin\n@Participants:\tCHI Target\xff_Child\n"), HeaderError);
}

TEST(ParseHeader, MalformedIdLenientVersusStrict) {
  const auto text = with_lines("CHI Target_Child",
                               "@ID:\teng|X|CHI|2;0.|male|TD||Target_Child\n");
  auto h = parse_header(text);
  EXPECT_FALSE(h.raw_warnings.empty());
  EXPECT_FALSE(h.find("CHI")->has_id_line);
  EXPECT_THROW(parse_header(text, ParseMode::strict), HeaderError);
}

TEST(ParseHeader, IdForUndeclaredCodeIsMalformed) {
  const auto text = with_lines("CHI Target_Child", "@ID:\teng|X|MOT|||||Mother|||\n");
  auto h = parse_header(text);
  EXPECT_EQ(h.find("MOT"), nullptr);
  EXPECT_FALSE(h.raw_warnings.empty());
  EXPECT_THROW(parse_header(text, ParseMode::strict), HeaderError);
}

TEST(ParseHeader, BadAgeLenientDropsAgeStrictThrows) {
  const auto text = with_lines("CHI Target_Child",
                               "@ID:\teng|X|CHI|1;20.|male|||Target_Child|||\n");
  auto h = parse_header(text);
  EXPECT_FALSE(h.find("CHI")->age);
  EXPECT_FALSE(h.find("CHI")->age_months);
  EXPECT_FALSE(h.raw_warnings.empty());
  EXPECT_THROW(parse_header(text, ParseMode::strict), HeaderError);
}

TEST(ParseHeader, DuplicateParticipantCode) {
  const auto text = with_lines("CHI Target_Child, CHI Target_Child", "");
  EXPECT_FALSE(parse_header(text).raw_warnings.empty());
  EXPECT_THROW(parse_header(text, ParseMode::strict), HeaderError);
}

TEST(ParseHeader, UnknownKeywordIsOnlyAWarning) {
  auto h = parse_header(with_lines("CHI Target_Child", "@Flavour:\tvanilla\n"));
  EXPECT_EQ(h.participants.size(), 1u);
  EXPECT_FALSE(h.raw_warnings.empty());
  EXPECT_NO_THROW(parse_header(with_lines("CHI Target_Child", "@Flavour:\tvanilla\n"),
                               ParseMode::strict));
}

TEST(GetField, ByNameAndErrors) {
  auto h = parse_header(kAmy);
  EXPECT_EQ(get_field(h, "CHI", "ses"), "MC");
  EXPECT_EQ(get_field(h, "CHI", "age"), "1;8.");
  EXPECT_FALSE(get_field(h, "FAT", "ses"));
  EXPECT_THROW(get_field(h, "CHI", "shoe_size"), InvalidArgument);
}

TEST(Field, NamesRoundTrip) {
  for (auto name : field_names()) {
    auto f = field_from_string(name);
    ASSERT_TRUE(f) << name;
    EXPECT_EQ(to_string(*f), name);
  }
  EXPECT_FALSE(field_from_string("SES"));
}

// Frozen output of the reference reader (see tests/oracle) for real CHAT
// headers: every participant field must agree.
TEST(ReferenceReader, AgreesOnRealHeaders) {
  const auto dir = data_dir() / "real_headers";
  auto golden = nlohmann::json::parse(read_file(dir / "golden.json"));
  ASSERT_GE(golden.size(), 10u);

  auto opt = [](const nlohmann::json& v) -> std::optional<std::string> {
    if (v.is_null()) return std::nullopt;
    return v.get<std::string>();
  };

  std::size_t checked = 0;
  for (const auto& [file, expected] : golden.items()) {
    SCOPED_TRACE(file);
    auto h = parse_header(read_file(dir / file));
    EXPECT_EQ(h.languages, expected["languages"].get<std::vector<std::string>>());
    EXPECT_EQ(h.types, expected["types"].get<std::vector<std::string>>());
    const auto& people = expected["participants"];
    ASSERT_EQ(h.participants.size(), people.size());
    for (std::size_t i = 0; i < people.size(); ++i) {
      const auto& want = people[i];
      const auto& got = h.participants[i];
      const auto code = want["code"].get<std::string>();
      SCOPED_TRACE(code);
      EXPECT_EQ(got.code, code);
      EXPECT_EQ(got.name, opt(want["name"]));
      EXPECT_EQ(got.role, want["role"].get<std::string>());
      EXPECT_EQ(got.language, opt(want["language"]));
      EXPECT_EQ(got.corpus, opt(want["corpus"]));
      EXPECT_EQ(got.age, opt(want["age"]));
      if (want["age_months"].is_null()) {
        EXPECT_FALSE(got.age_months);
      } else {
        ASSERT_TRUE(got.age_months);
        EXPECT_NEAR(*got.age_months, want["age_months"].get<double>(), 0.05);
      }
      EXPECT_EQ(get_field(h, code, Field::sex), opt(want["sex"]));
      EXPECT_EQ(got.group, opt(want["group"]));
      EXPECT_EQ(got.ses, opt(want["ses"]));
      EXPECT_EQ(got.education, opt(want["education"]));
      EXPECT_EQ(got.custom, opt(want["custom"]));
      ++checked;
    }
  }
  EXPECT_GT(checked, 20u);
}

// Property: the parser never throws in lenient mode on generated headers and
// present fields are never blank.
TEST(ParseHeaderProperty, GeneratedHeadersHaveNoBlankFields) {
  std::mt19937_64 rng(20240601);
  for (int i = 0; i < 2000; ++i) {
    auto text = testsupport::random_header_text(rng);
    HeaderMetadata h;
    ASSERT_NO_THROW(h = parse_header(text)) << text;
    for (const auto& p : h.participants) {
      for (auto name : field_names()) {
        auto v = get_field(h, p.code, name);
        if (v) {
          EXPECT_FALSE(v->empty()) << text;
        }
      }
      EXPECT_EQ(p.age.has_value(), p.age_months.has_value()) << text;
    }
  }
}
