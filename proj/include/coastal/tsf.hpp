#pragma once

// "TSF1" binary field snapshots.
//
// Layout (all little-endian):
//   4 bytes  magic "TSF1"
//   u32 nx, u32 ny, u32 component count
//   f64 Lx, f64 Ly, f64 time
//   components one after another, each nx*ny f64 values in row-major order
//   (rows along y, index j*nx + i).

#include "coastal/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace coastal::tsf {

std::vector<std::uint8_t> encode(const Snapshot& snapshot);
Snapshot decode(const std::vector<std::uint8_t>& bytes);

void write(const std::filesystem::path& path, const Snapshot& snapshot);
Snapshot read(const std::filesystem::path& path);

}  // namespace coastal::tsf
