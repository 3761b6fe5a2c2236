#pragma once

#include <filesystem>
#include <iosfwd>

#include "nstorus/spectral_field.hpp"

namespace nstorus {

/// NSF1 binary snapshot.
///
///   offset  size  content
///   0       4     magic "NSF1"
///   4       4     N, uint32 little-endian
///   8       4     K, uint32 little-endian
///   12      4     component count, uint32 little-endian, always 3
///   16      ...   (2K+1)^3 modes in coefficient order (k1 slowest, k3
///                 fastest); per mode components 0,1,2, each as two
///                 IEEE-754 binary64 little-endian values (re, im)
///
/// The k = 0 slot is stored. Reading restores the two-thirds dealias mode.
void write_snapshot(std::ostream& out, const Field& f);
Field read_snapshot(std::istream& in);

void write_snapshot(const std::filesystem::path& path, const Field& f);
Field read_snapshot(const std::filesystem::path& path);

}  // namespace nstorus
