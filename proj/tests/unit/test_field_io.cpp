#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "cmaflow/errors.hpp"
#include "cmaflow/field_io.hpp"

using namespace cmaflow;

TEST_CASE("CMAF1 round trip is bit exact") {
  const Grid g(2, 8);
  ScalarField u = ScalarField::sample(g, [](std::span<const double> x) {
    return std::sin(12.3 * x[0]) * std::exp(x[1]) - x[2] / 3.0 + x[3] * 1e-300;
  });
  u[5] = -0.0;
  u[6] = std::numeric_limits<double>::denorm_min();
  std::stringstream buf;
  write_field(buf, u);
  const ScalarField back = read_field(buf);
  REQUIRE(back.grid() == g);
  CHECK(std::memcmp(back.values().data(), u.values().data(), u.size() * sizeof(double)) == 0);
}

TEST_CASE("CMAF1 header layout") {
  const Grid g(1, 64);
  std::stringstream buf;
  write_field(buf, ScalarField(g, 1.0));
  const std::string bytes = buf.str();
  REQUIRE(bytes.size() == 5 + 4 + 4 + 8 + 4096 * 8);
  CHECK(bytes.substr(0, 4) == "CMAF");
  CHECK(bytes[4] == '\x01');
  CHECK(static_cast<unsigned char>(bytes[5]) == 1);    // n, little endian
  CHECK(static_cast<unsigned char>(bytes[9]) == 64);   // N
  CHECK(static_cast<unsigned char>(bytes[13]) == 0);   // count = 4096 = 0x1000
  CHECK(static_cast<unsigned char>(bytes[14]) == 0x10);
  // 1.0 = 0x3FF0000000000000, little endian: last byte of the first value is 0x3F.
  CHECK(static_cast<unsigned char>(bytes[21 + 7]) == 0x3F);

  std::stringstream again(bytes);
  const FieldHeader h = read_field_header(again);
  CHECK(h.n == 1);
  CHECK(h.N == 64);
  CHECK(h.count == 4096);
}

TEST_CASE("CMAF1 rejects malformed input") {
  std::stringstream bad_magic("CMAX\x01");
  CHECK_THROWS_AS(read_field(bad_magic), InvalidInput);

  std::stringstream buf;
  write_field(buf, ScalarField(Grid(1, 8), 2.0));
  std::string bytes = buf.str();

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_field(truncated), InvalidInput);

  std::string wrong_count = bytes;
  wrong_count[13] = 65;
  std::stringstream wc(wrong_count);
  CHECK_THROWS_AS(read_field(wc), InvalidInput);

  std::stringstream short_header(bytes.substr(0, 10));
  CHECK_THROWS_AS(read_field_header(short_header), InvalidInput);
}
