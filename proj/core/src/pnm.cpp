#include "pdsplit/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pdsplit {

namespace {

class Cursor {
 public:
  Cursor(const std::string& s, std::size_t start) : s_(s), pos_(start) {}

  // Skips whitespace and '#' comments, then reads an unsigned decimal.
  unsigned long next_uint(const char* what) {
    skip_space_and_comments();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      throw io_error(std::string("PNM: expected ") + what);
    }
    unsigned long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + static_cast<unsigned long>(s_[pos_] - '0');
      if (v > 1'000'000'000UL) throw io_error(std::string("PNM: ") + what + " too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates the header from binary data.
  void single_whitespace() {
    if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      throw io_error("PNM: malformed header");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::size_t pos_;
};

}  // namespace

Image parse_pnm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw io_error("PNM: missing magic number");
  const char kind = bytes[1];
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw io_error(std::string("PNM: unsupported format P") + kind);
  }
  const bool color = kind == '3' || kind == '6';
  const bool binary = kind == '5' || kind == '6';

  Cursor cur(bytes, 2);
  const auto width = cur.next_uint("width");
  const auto height = cur.next_uint("height");
  const auto maxval = cur.next_uint("maxval");
  if (width == 0 || height == 0) throw io_error("PNM: empty image");
  if (maxval == 0 || maxval > 65535) throw io_error("PNM: maxval must be in [1, 65535]");

  Image img;
  img.shape = GridShape{height, width, color ? 3u : 1u};
  img.pixels.assign(img.shape.size(), 0.0);
  const std::size_t ch = img.shape.channels;
  const std::size_t count = width * height * ch;
  const double scale = static_cast<double>(maxval);

  std::size_t binary_pos = 0;
  if (binary) {
    cur.single_whitespace();
    binary_pos = cur.pos();
    const std::size_t bps = maxval > 255 ? 2 : 1;
    if (bytes.size() < binary_pos + count * bps) throw io_error("PNM: truncated pixel data");
  }

  // Sample k in file order is (row, col, channel) with channel fastest.
  for (std::size_t k = 0; k < count; ++k) {
    unsigned long raw = 0;
    if (binary) {
      if (maxval > 255) {
        const auto hi = static_cast<unsigned char>(bytes[binary_pos + 2 * k]);
        const auto lo = static_cast<unsigned char>(bytes[binary_pos + 2 * k + 1]);
        raw = (static_cast<unsigned long>(hi) << 8) | lo;
      } else {
        raw = static_cast<unsigned char>(bytes[binary_pos + k]);
      }
    } else {
      raw = cur.next_uint("pixel value");
    }
    if (raw > maxval) throw io_error("PNM: sample exceeds maxval");
    const std::size_t c = k % ch;
    const std::size_t pix = k / ch;
    const std::size_t row = pix / width;
    const std::size_t col = pix % width;
    img.pixels[img.shape.index(row, col, c)] = static_cast<double>(raw) / scale;
  }
  return img;
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("error reading '" + path.string() + "'");
  try {
    return parse_pnm(ss.str());
  } catch (const io_error& e) {
    throw io_error(path.string() + ": " + e.what());
  }
}

std::string encode_pnm(const Image& img) {
  img.shape.validate();
  require_same_size(img.shape.size(), img.pixels.size(), "encode_pnm");
  const auto& s = img.shape;
  std::string out = (s.channels == 3 ? "P6\n" : "P5\n") + std::to_string(s.cols) + " " +
                    std::to_string(s.rows) + "\n255\n";
  out.reserve(out.size() + s.size());
  for (std::size_t row = 0; row < s.rows; ++row) {
    for (std::size_t col = 0; col < s.cols; ++col) {
      for (std::size_t c = 0; c < s.channels; ++c) {
        double v = img.pixels[s.index(row, col, c)];
        v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
      }
    }
  }
  return out;
}

void write_pnm(const std::filesystem::path& path, const Image& img) {
  const std::string data = encode_pnm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open '" + path.string() + "' for writing");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw io_error("error writing '" + path.string() + "'");
}

}  // namespace pdsplit
