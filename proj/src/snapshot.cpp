#include "nstorus/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace nstorus {
namespace {

constexpr std::array<char, 4> kMagic = {'N', 'S', 'F', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("NSF1: truncated header");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("NSF1: truncated data");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_snapshot(std::ostream& out, const Field& f) {
  const auto& grid = f.grid();
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(grid.resolution()));
  put_u32(out, static_cast<std::uint32_t>(grid.cutoff()));
  put_u32(out, 3);
  for (std::size_t j = 0; j < grid.mode_count(); ++j) {
    for (int c = 0; c < 3; ++c) {
      put_f64(out, f[j][c].real());
      put_f64(out, f[j][c].imag());
    }
  }
  if (!out) throw std::runtime_error("NSF1: write failed");
}

Field read_snapshot(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw std::runtime_error("NSF1: bad magic");
  const auto n = get_u32(in);
  const auto k = get_u32(in);
  const auto components = get_u32(in);
  if (components != 3) throw std::runtime_error("NSF1: expected 3 components");
  if (n > 1u << 16 || k > 1u << 15) throw std::runtime_error("NSF1: implausible grid size");
  Field f(GridSpec(static_cast<int>(n), static_cast<int>(k)));
  for (std::size_t j = 0; j < f.grid().mode_count(); ++j) {
    for (int c = 0; c < 3; ++c) {
      const double re = get_f64(in);
      const double im = get_f64(in);
      f[j][c] = {re, im};
    }
  }
  return f;
}

void write_snapshot(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot(out, f);
}

Field read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace nstorus
