#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace wavekit::cli {

class PgmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 8-bit grayscale image, row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Binary PGM (P5) with maxval ≤ 255; '#' comments allowed in the header.
/// Rejects other magic numbers, 16-bit data, short payloads and images with
/// either side larger than max_dim.
GrayImage read_pgm(const std::filesystem::path& path, std::size_t max_dim);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

}  // namespace wavekit::cli
