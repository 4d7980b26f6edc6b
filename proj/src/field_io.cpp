#include "cmaflow/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "cmaflow/errors.hpp"

namespace cmaflow {

namespace {

constexpr std::array<char, 5> kMagic = {'C', 'M', 'A', 'F', 0x01};

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> b{};
  for (std::size_t i = 0; i < sizeof(U); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!in) throw InvalidInput("CMAF1: truncated header");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_field(std::ostream& out, const ScalarField& u) {
  const Grid& g = u.grid();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.n()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.N()));
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(g.size()));
  for (double v : u.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw InvalidInput("CMAF1: write failed");
}

void write_field(const std::filesystem::path& path, const ScalarField& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
  write_field(out, u);
}

FieldHeader read_field_header(std::istream& in) {
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw InvalidInput("not a CMAF1 field file (bad magic)");
  FieldHeader h;
  h.n = get_le<std::uint32_t>(in);
  h.N = get_le<std::uint32_t>(in);
  h.count = get_le<std::uint64_t>(in);
  return h;
}

FieldHeader read_field_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_field_header(in);
}

ScalarField read_field(std::istream& in) {
  const FieldHeader h = read_field_header(in);
  const Grid grid(static_cast<int>(h.n), static_cast<int>(h.N));
  if (h.count != grid.size())
    throw InvalidInput("CMAF1: count " + std::to_string(h.count) + " does not match N^{2n} = " +
                       std::to_string(grid.size()));
  std::vector<double> values(h.count);
  for (auto& v : values) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (!in) throw InvalidInput("CMAF1: truncated payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    v = std::bit_cast<double>(bits);
  }
  return ScalarField(grid, std::move(values));
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return read_field(in);
}

}  // namespace cmaflow
