#include <gtest/gtest.h>

#include <random>

#include "chatharvest/criteria.hpp"
#include "chatharvest/errors.hpp"
#include "fixtures.hpp"
#include "random_expr.hpp"

using namespace chatharvest;
using testsupport::kListing1;

namespace {

HeaderMetadata header(const std::string& participants, const std::string& ids) {
  return parse_header("@Begin\n@Participants:\t" + participants + "\n" + ids + "@End\n");
}

}  // namespace

TEST(ParseExpr, ListingOneShape) {
  auto e = parse_expr(kListing1);
  auto expected = FilterExpr::all_of(
      {FilterExpr::exists("CHI"),
       FilterExpr::any_of(
           {FilterExpr::non_empty("CHI", Field::ses),
            FilterExpr::all_of({FilterExpr::exists("MOT"), FilterExpr::non_empty("MOT", Field::ses)}),
            FilterExpr::all_of(
                {FilterExpr::exists("MOT"), FilterExpr::non_empty("MOT", Field::education)})})});
  EXPECT_EQ(e, expected);
}

TEST(ParseExpr, AndBindsTighterThanOr) {
  auto e = parse_expr("exists(A) or exists(B) and exists(C)");
  auto expected = FilterExpr::any_of(
      {FilterExpr::exists("A"),
       FilterExpr::all_of({FilterExpr::exists("B"), FilterExpr::exists("C")})});
  EXPECT_EQ(e, expected);
}

TEST(ParseExpr, AllPredicates) {
  auto e = parse_expr(
      "not equals(CHI.group, \"TD\") and in(MOT.ses, \"MC\", \"UC\") and "
      "age_in(CHI, 0, 72) and age_in(CHI, 12.5, inf)");
  auto expected = FilterExpr::all_of({
      FilterExpr::negate(FilterExpr::equals("CHI", Field::group, "TD")),
      FilterExpr::in_set("MOT", Field::ses, {"MC", "UC"}),
      FilterExpr::age_in("CHI", 0, 72),
      FilterExpr::age_in("CHI", 12.5, kAgeUnbounded),
  });
  EXPECT_EQ(e, expected);
}

TEST(ParseExpr, StringEscapes) {
  auto e = parse_expr(R"(equals(CHI.custom, "a \"b\" \\ c"))");
  EXPECT_EQ(e, FilterExpr::equals("CHI", Field::custom, "a \"b\" \\ c"));
}

TEST(ParseExpr, ErrorsCarryPosition) {
  try {
    parse_expr("exists(CHI) and\n  nonempty(CHI.shoe)");
    FAIL() << "expected ExprError";
  } catch (const ExprError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GE(e.column(), 3u);
  }
  try {
    parse_expr("exists(CHI) and (");
    FAIL() << "expected ExprError";
  } catch (const ExprError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(ParseExpr, Rejections) {
  for (const char* bad : {"", "exists()", "exists(CHI", "frobnicate(CHI)",
                          "nonempty(CHI)", "age_in(CHI, 10, 5)", "age_in(CHI, -1, 5)",
                          "exists(CHI) exists(MOT)", "equals(CHI.ses, MC)",
                          "in(CHI.ses)", "exists(CHI) and", "not", "\"unterminated",
                          "exists(and)"}) {
    EXPECT_THROW(parse_expr(bad), ExprError) << bad;
  }
}

TEST(Factories, EnforceInvariants) {
  EXPECT_THROW(FilterExpr::all_of({FilterExpr::exists("A")}), InvalidArgument);
  EXPECT_THROW(FilterExpr::any_of({}), InvalidArgument);
  EXPECT_THROW(FilterExpr::age_in("CHI", 5, 1), InvalidArgument);
  EXPECT_THROW(FilterExpr::age_in("CHI", -1, 1), InvalidArgument);
}

TEST(ToSource, RoundTripsListingOne) {
  auto e = parse_expr(kListing1);
  EXPECT_EQ(parse_expr(to_source(e)), e);
  EXPECT_EQ(to_source(parse_expr(to_source(e))), to_source(e));
}

TEST(EvalExpr, ListingOneDisjuncts) {
  auto e = parse_expr(kListing1);
  EXPECT_TRUE(eval_expr(e, header("CHI Target_Child", "@ID:\teng|X|CHI||||MC|Target_Child|||\n")));
  EXPECT_TRUE(eval_expr(e, header("CHI Target_Child, MOT Mother",
                                  "@ID:\teng|X|MOT||||WC|Mother|||\n")));
  EXPECT_TRUE(eval_expr(e, header("CHI Target_Child, MOT Mother",
                                  "@ID:\teng|X|MOT|||||Mother|College||\n")));
  EXPECT_FALSE(eval_expr(e, header("CHI Target_Child, MOT Mother", "")));
  EXPECT_FALSE(eval_expr(e, header("MOT Mother", "@ID:\teng|X|MOT||||MC|Mother|||\n")));
}

TEST(EvalExpr, EqualsTrimsAndIsCaseSensitive) {
  auto h = header("CHI Target_Child", "@ID:\teng|X|CHI|||| MC |Target_Child|||\n");
  EXPECT_TRUE(eval_expr(parse_expr("equals(CHI.ses, \"MC\")"), h));
  EXPECT_FALSE(eval_expr(parse_expr("equals(CHI.ses, \"mc\")"), h));
  EXPECT_TRUE(eval_expr(parse_expr("in(CHI.ses, \"WC\", \"MC\")"), h));
}

TEST(EvalExpr, MissingThingsAreFalse) {
  auto h = header("CHI Target_Child", "");
  EXPECT_FALSE(eval_expr(parse_expr("nonempty(MOT.ses)"), h));
  EXPECT_FALSE(eval_expr(parse_expr("equals(MOT.ses, \"MC\")"), h));
  EXPECT_FALSE(eval_expr(parse_expr("age_in(CHI, 0, inf)"), h));
  EXPECT_TRUE(eval_expr(parse_expr("not nonempty(MOT.ses)"), h));
}

TEST(EvalExpr, AgeRangeIsInclusive) {
  auto h = header("CHI Target_Child", "@ID:\teng|X|CHI|6;0.|||||||\n");
  EXPECT_TRUE(eval_expr(parse_expr("age_in(CHI, 0, 72)"), h));
  EXPECT_TRUE(eval_expr(parse_expr("age_in(CHI, 72, 72)"), h));
  EXPECT_FALSE(eval_expr(parse_expr("age_in(CHI, 0, 71.9)"), h));
}

// Randomized algebraic properties of the evaluator and printer.
class CriteriaProperty : public ::testing::Test {
 protected:
  std::mt19937_64 rng{7};
};

TEST_F(CriteriaProperty, DoubleNegation) {
  for (int i = 0; i < 2000; ++i) {
    auto e = testsupport::random_expr(rng);
    auto h = testsupport::random_header(rng);
    EXPECT_EQ(eval_expr(FilterExpr::negate(FilterExpr::negate(e)), h), eval_expr(e, h));
  }
}

TEST_F(CriteriaProperty, DeMorgan) {
  for (int i = 0; i < 2000; ++i) {
    auto a = testsupport::random_expr(rng, 3);
    auto b = testsupport::random_expr(rng, 3);
    auto h = testsupport::random_header(rng);
    EXPECT_EQ(eval_expr(FilterExpr::negate(FilterExpr::all_of({a, b})), h),
              eval_expr(FilterExpr::any_of({FilterExpr::negate(a), FilterExpr::negate(b)}), h));
    EXPECT_EQ(eval_expr(FilterExpr::negate(FilterExpr::any_of({a, b})), h),
              eval_expr(FilterExpr::all_of({FilterExpr::negate(a), FilterExpr::negate(b)}), h));
  }
}

TEST_F(CriteriaProperty, PrintParseRoundTrip) {
  for (int i = 0; i < 2000; ++i) {
    auto e = testsupport::random_expr(rng);
    auto text = to_source(e);
    FilterExpr back = FilterExpr::exists("X");
    ASSERT_NO_THROW(back = parse_expr(text)) << text;
    EXPECT_EQ(back, e) << text;
  }
}

TEST_F(CriteriaProperty, UnboundedAgeRangeMeansNonEmptyAge) {
  for (int i = 0; i < 2000; ++i) {
    auto h = testsupport::random_header(rng);
    for (const char* code : {"CHI", "MOT", "FAT", "INV"}) {
      EXPECT_EQ(eval_expr(FilterExpr::age_in(code, 0, kAgeUnbounded), h),
                eval_expr(FilterExpr::non_empty(code, Field::age), h));
    }
  }
}
