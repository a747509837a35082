#include "rtc/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "rtc/error.hpp"

namespace rtc {

ImagePlane::ImagePlane(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ConfigError("negative image size");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

ImagePlane::ImagePlane(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), data_(std::move(pixels)) {
  if (width < 0 || height < 0 ||
      data_.size() != static_cast<std::size_t>(width) * height) {
    throw ConfigError("pixel buffer does not match image size");
  }
}

std::vector<std::uint8_t> ImagePlane::to_8bit() const {
  std::vector<std::uint8_t> out(data_.size());
  std::transform(data_.begin(), data_.end(), out.begin(), [](double v) {
    if (!std::isfinite(v)) return std::uint8_t{0};
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  });
  return out;
}

namespace {

// Skips whitespace and '#' comments between PGM header tokens.
int next_header_int(std::istream& in, const std::filesystem::path& path) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  if (!(in >> value)) throw IoError("malformed PGM header in " + path.string());
  return value;
}

}  // namespace

ImagePlane read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5') {
    throw IoError(path.string() + " is not a binary PGM (P5)");
  }
  const int width = next_header_int(in, path);
  const int height = next_header_int(in, path);
  const int maxval = next_header_int(in, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
    throw IoError("unsupported PGM geometry in " + path.string());
  }
  in.get();  // single whitespace after maxval
  std::vector<char> raw(static_cast<std::size_t>(width) * height);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw IoError("truncated PGM " + path.string());
  }
  std::vector<double> pixels(raw.size());
  std::transform(raw.begin(), raw.end(), pixels.begin(),
                 [](char c) { return static_cast<double>(static_cast<unsigned char>(c)); });
  return ImagePlane(width, height, std::move(pixels));
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_pgm(const std::filesystem::path& path, const ImagePlane& image) {
  std::ostringstream header;
  header << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  const auto pixels = image.to_8bit();
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());
  write_file_atomic(path, bytes);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace rtc
