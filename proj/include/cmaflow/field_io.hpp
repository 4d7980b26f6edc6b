#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "cmaflow/grid.hpp"

namespace cmaflow {

/// CMAF1 binary field dump:
///   'C' 'M' 'A' 'F' 0x01, u32 n, u32 N, u64 count = N^{2n},
///   then count float64 values in grid order. All integers and floats are
///   little-endian.
struct FieldHeader {
  std::uint32_t n = 0;
  std::uint32_t N = 0;
  std::uint64_t count = 0;
};

void write_field(std::ostream& out, const ScalarField& u);
void write_field(const std::filesystem::path& path, const ScalarField& u);

FieldHeader read_field_header(std::istream& in);
FieldHeader read_field_header(const std::filesystem::path& path);

ScalarField read_field(std::istream& in);
ScalarField read_field(const std::filesystem::path& path);

}  // namespace cmaflow
