#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "peakheight/curve.hpp"

using namespace peakheight;

TEST(ParseRange, Basic) {
  const auto xs = parse_range("-4:4:0.01");
  ASSERT_EQ(xs.size(), 801u);
  EXPECT_EQ(xs.front(), -4.0);
  EXPECT_NEAR(xs.back(), 4.0, 1e-12);
  EXPECT_NEAR(xs[400], 0.0, 1e-12);

  EXPECT_EQ(parse_range("0:1:0.1").size(), 11u);
  EXPECT_EQ(parse_range("0:1:0.3").size(), 4u);
  EXPECT_EQ(parse_range("2:2:1").size(), 1u);
  EXPECT_EQ(parse_range("1e-1:3e-1:1e-1").size(), 3u);
}

TEST(ParseRange, Rejects) {
  for (const char* bad : {"", "1:2", "1:2:3:4", "a:2:0.1", "0:1:0", "0:1:-0.1", "1:0:0.1", "0:1e9:1e-3", "0:inf:1",
                          "0 :1:0.1"})
    EXPECT_THROW(parse_range(bad), std::invalid_argument) << bad;
}

TEST(CurveTable, Validate) {
  CurveTable t;
  t.xs = {0, 1, 2};
  t.values = {0.1, 0.2, 0.05};
  EXPECT_NO_THROW(t.validate());
  t.kind = CurveKind::exceedance;
  EXPECT_THROW(t.validate(), DomainError);
  t.values = {1.0, 0.5, 0.5};
  EXPECT_NO_THROW(t.validate());
  t.values = {1.1, 0.5, 0.5};
  EXPECT_THROW(t.validate(), DomainError);
  t.values = {1.0, 0.5};
  EXPECT_THROW(t.validate(), DomainError);
  t.values = {1.0, -0.5, -0.6};
  EXPECT_THROW(t.validate(), DomainError);
  t.kind = CurveKind::density;
  t.values = {0.1, std::nan(""), 0.1};
  EXPECT_THROW(t.validate(), DomainError);
  t.values = {0.1, 0.1, 0.1};
  t.xs = {0, 0, 1};
  EXPECT_THROW(t.validate(), DomainError);
}

TEST(CurveTable, CsvRoundTrip) {
  CurveTable t;
  t.xs = {-4.0, -3.99, 0.1 + 0.2, 1e-300};
  t.values = {1.3383022576488537e-4, 0.0, 1.0 / 3.0, 5e-324};
  std::ostringstream os;
  write_csv(os, t);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,value");
  for (std::size_t i = 0; i < t.xs.size(); ++i) {
    ASSERT_TRUE(std::getline(is, line));
    const auto comma = line.find(',');
    ASSERT_NE(comma, std::string::npos);
    EXPECT_EQ(std::strtod(line.substr(0, comma).c_str(), nullptr), t.xs[i]);
    EXPECT_EQ(std::strtod(line.substr(comma + 1).c_str(), nullptr), t.values[i]);
  }
  EXPECT_FALSE(std::getline(is, line));
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(to_string(Geometry::sphere), "sphere");
  EXPECT_EQ(to_string(CurveKind::exceedance), "exceedance");
}
