#include "wavekit/cli/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

namespace wavekit::cli {
namespace {

// Next whitespace-delimited header token, skipping comments.
std::string token(const std::vector<char>& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(buf[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  std::string t;
  while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos])) && buf[pos] != '#') {
    t.push_back(buf[pos++]);
  }
  return t;
}

std::size_t number(const std::vector<char>& buf, std::size_t& pos, const char* what) {
  const std::string t = token(buf, pos);
  if (t.empty() || t.size() > 9 || t.find_first_not_of("0123456789") != std::string::npos) {
    throw PgmError(std::string("pgm: bad ") + what + " '" + t + "'");
  }
  return std::stoul(t);
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path, std::size_t max_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError("pgm: cannot open " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  const std::string magic = token(buf, pos);
  if (magic != "P5") throw PgmError("pgm: " + path.string() + " is not binary PGM (magic '" + magic + "')");
  GrayImage img;
  img.width = number(buf, pos, "width");
  img.height = number(buf, pos, "height");
  const std::size_t maxval = number(buf, pos, "maxval");
  if (img.width == 0 || img.height == 0) throw PgmError("pgm: empty image");
  if (maxval == 0 || maxval > 255) throw PgmError("pgm: only 8-bit maxval (1..255) is supported");
  if (img.width > max_dim || img.height > max_dim) {
    throw PgmError("pgm: " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                   " exceeds the " + std::to_string(max_dim) + " pixel cap");
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos]))) {
    throw PgmError("pgm: truncated header");
  }
  ++pos;
  const std::size_t n = img.width * img.height;
  if (buf.size() - pos < n) {
    throw PgmError("pgm: payload has " + std::to_string(buf.size() - pos) + " bytes, expected " +
                   std::to_string(n));
  }
  img.pixels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = std::min<std::size_t>(static_cast<std::uint8_t>(buf[pos + i]), maxval);
    img.pixels[i] = static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  if (img.pixels.size() != img.width * img.height) throw PgmError("pgm: pixel count mismatch");
  std::ofstream out(path, std::ios::binary);
  out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw PgmError("pgm: cannot write " + path.string());
}

}  // namespace wavekit::cli
