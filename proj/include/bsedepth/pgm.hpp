#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace bsedepth::pgm {

class PgmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary (P5) greymap. Samples wider than 8 bits are big-endian on disk.
struct Image {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> samples;
};

/// Header "P5\n<w> <h>\n<maxval>\n" followed by the raster.
std::vector<std::uint8_t> encode(const Image& image);
Image decode(std::span<const std::uint8_t> bytes);

void write(const std::filesystem::path& path, const Image& image);
Image read(const std::filesystem::path& path);

}  // namespace bsedepth::pgm
