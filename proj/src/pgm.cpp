#include "bsedepth/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace bsedepth::pgm {

std::vector<std::uint8_t> encode(const Image& image) {
  if (image.width <= 0 || image.height <= 0) throw PgmError("PGM: non-positive dimensions");
  if (image.maxval < 1 || image.maxval > 65535) throw PgmError("PGM: maxval out of range");
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  if (image.samples.size() != n) throw PgmError("PGM: sample count does not match dimensions");

  const std::string header = "P5\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n" + std::to_string(image.maxval) + "\n";
  const bool wide = image.maxval > 255;
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + n * (wide ? 2 : 1));
  for (auto s : image.samples) {
    if (s > image.maxval) throw PgmError("PGM: sample " + std::to_string(s) + " exceeds maxval");
    if (wide) {
      out.push_back(static_cast<std::uint8_t>(s >> 8));
      out.push_back(static_cast<std::uint8_t>(s & 0xFF));
    } else {
      out.push_back(static_cast<std::uint8_t>(s));
    }
  }
  return out;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  int number(const char* what) {
    skip_space_and_comments();
    long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000) throw PgmError(std::string("PGM: ") + what + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw PgmError(std::string("PGM: malformed header, expected ") + what);
    return static_cast<int>(value);
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw PgmError("PGM: malformed header, expected magic P5");
  }
  HeaderReader reader(bytes.subspan(2));
  Image image;
  image.width = reader.number("width");
  image.height = reader.number("height");
  image.maxval = reader.number("maxval");
  if (image.width <= 0 || image.height <= 0) throw PgmError("PGM: non-positive dimensions");
  if (image.maxval < 1 || image.maxval > 65535) throw PgmError("PGM: maxval out of range");
  // Exactly one whitespace byte separates the header from the raster.
  if (2 + reader.pos() >= bytes.size() || !std::isspace(bytes[2 + reader.pos()])) {
    throw PgmError("PGM: malformed header, missing raster separator");
  }
  const std::size_t start = 2 + reader.pos() + 1;
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  const bool wide = image.maxval > 255;
  const std::size_t need = n * (wide ? 2 : 1);
  if (bytes.size() - start != need) {
    throw PgmError("PGM: raster has " + std::to_string(bytes.size() - start) + " bytes, expected " +
                   std::to_string(need));
  }
  image.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t v = wide ? static_cast<std::uint16_t>((bytes[start + 2 * i] << 8) | bytes[start + 2 * i + 1])
                                 : bytes[start + i];
    if (v > image.maxval) throw PgmError("PGM: sample exceeds maxval");
    image.samples[i] = v;
  }
  return image;
}

void write(const std::filesystem::path& path, const Image& image) {
  const auto bytes = encode(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PgmError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PgmError("write failed: " + path.string());
}

Image read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode(bytes);
  } catch (const PgmError& e) {
    throw PgmError(path.string() + ": " + e.what());
  }
}

}  // namespace bsedepth::pgm
