#include <gtest/gtest.h>

#include <filesystem>

#include "netcage/core/angles.hpp"
#include "netcage/core/archive.hpp"
#include "netcage/core/rng.hpp"
#include "netcage/core/table.hpp"

namespace netcage {
namespace {

TEST(Angles, WrapIntoHalfOpenRange) {
  EXPECT_EQ(wrap_degrees(360.0), 0.0);
  EXPECT_EQ(wrap_degrees(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(-90.0), 270.0);
  EXPECT_DOUBLE_EQ(wrap_degrees(725.0), 5.0);
}

TEST(Angles, EncodingIdentifiesFullTurn) {
  Vector a = encode_current(0.4, 0.0);
  Vector b = encode_current(0.4, 360.0);
  EXPECT_NEAR((a - b).norm(), 0.0, 1e-12);
  EXPECT_EQ(a.size(), 3);
}

TEST(Rng, SeedsAreReproducibleAndStreamsDiffer) {
  Rng a = make_rng(7, 1), b = make_rng(7, 1), c = make_rng(7, 2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
  EXPECT_NE(make_rng(7, 1)(), c());
}

TEST(Rng, NormalMomentsAreSane) {
  Rng r = make_rng(3);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = standard_normal(r);
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

Table sample_table() {
  Table t;
  t.add_column("current_speed", "m/s");
  t.add_column("load", "kN");
  t.values.resize(3, 2);
  t.values << 0.1, 1.0 / 3.0, 0.25, -2e-300, 1.0, 12345.678;
  t.comments.push_back("kind=test");
  return t;
}

TEST(Table, TextAndBinaryRoundTripExactly) {
  const Table t = sample_table();
  for (const char* ext : {".csv", ".ncb"}) {
    auto path = std::filesystem::temp_directory_path() / (std::string("netcage_table") + ext);
    write_table(t, path);
    Table u = read_table(path);
    EXPECT_EQ(u.names, t.names);
    EXPECT_EQ(u.units, t.units);
    EXPECT_EQ(u.comments, t.comments);
    EXPECT_TRUE(u.values == t.values) << ext;
    std::filesystem::remove(path);
  }
}

TEST(Table, RejectsRaggedRowsAndMissingColumns) {
  EXPECT_THROW(parse_table_text("a[m],b\n1,2\n3\n"), Error);
  Table t = parse_table_text("a[m],b\n1,2\n");
  EXPECT_EQ(t.units[0], "m");
  EXPECT_EQ(t.units[1], "");
  try {
    t.column("c");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
  }
}

TEST(Container, DetectsTruncationChecksumAndVersion) {
  constexpr std::array<char, 8> magic{'T', 'E', 'S', 'T', 'M', 'A', 'G', '1'};
  Container c;
  c.magic = magic;
  c.version = 2;
  c.add("ABCD", std::string(100, 'x'));
  const std::string bytes = serialize(c);
  EXPECT_EQ(deserialize(bytes, magic, 2).section("ABCD"), std::string(100, 'x'));

  auto code_of = [&](std::string_view b, std::uint32_t maxv) {
    try {
      deserialize(b, magic, maxv);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of(std::string_view(bytes).substr(0, bytes.size() - 7), 2), ErrorCode::CorruptBundle);
  std::string flipped = bytes;
  flipped[40] ^= 0x01;
  EXPECT_EQ(code_of(flipped, 2), ErrorCode::CorruptBundle);
  EXPECT_EQ(code_of(bytes, 1), ErrorCode::VersionUnsupported);
}

}  // namespace
}  // namespace netcage
