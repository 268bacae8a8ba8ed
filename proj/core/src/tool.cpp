#include "texlayer/tool.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "texlayer/error.hpp"

namespace texlayer {

void EditingTool::validate() const {
  if (shape.width < 1 || shape.height < 1 || shape.count() == 0) {
    fail(ErrorCode::kInvalidArgument, "tool shape is empty");
  }
  if (kernel_radius < 0) fail(ErrorCode::kInvalidArgument, "kernel radius must be >= 0");
  if (!std::isfinite(x) || !std::isfinite(y)) {
    fail(ErrorCode::kInvalidArgument, "tool position must be finite");
  }
}

BoolGrid circle_shape(int radius) {
  if (radius < 0) fail(ErrorCode::kInvalidArgument, "radius must be >= 0");
  const int n = 2 * radius + 1;
  BoolGrid g(n, n);
  const long long r2 = static_cast<long long>(radius) * radius;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const long long di = i - radius;
      const long long dj = j - radius;
      if (di * di + dj * dj <= r2) g.set(i, j);
    }
  }
  return g;
}

BoolGrid square_shape(int radius) {
  if (radius < 0) fail(ErrorCode::kInvalidArgument, "radius must be >= 0");
  const int n = 2 * radius + 1;
  BoolGrid g(n, n);
  std::fill(g.cells.begin(), g.cells.end(), std::uint8_t{1});
  return g;
}

namespace {

class PnmReader {
 public:
  explicit PnmReader(std::string_view s) : s_(s) {}

  void skip_space() {
    while (pos_ < s_.size()) {
      if (s_[pos_] == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number() {
    skip_space();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > (1L << 24)) fail(ErrorCode::kParseError, "image header value too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) fail(ErrorCode::kParseError, "expected a number in image header");
    return v;
  }

  // P1 packs samples without separators when they are single digits.
  int bit() {
    skip_space();
    if (pos_ >= s_.size() || (s_[pos_] != '0' && s_[pos_] != '1')) {
      fail(ErrorCode::kParseError, "bad PBM sample");
    }
    return s_[pos_++] - '0';
  }

  unsigned char byte() {
    if (pos_ >= s_.size()) fail(ErrorCode::kParseError, "image data truncated");
    return static_cast<unsigned char>(s_[pos_++]);
  }

  void single_space() {
    if (pos_ >= s_.size() || !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      fail(ErrorCode::kParseError, "missing separator before binary image data");
    }
    ++pos_;
  }

  std::string_view magic() {
    if (s_.size() < 2) fail(ErrorCode::kParseError, "not a PBM/PGM image");
    pos_ = 2;
    return s_.substr(0, 2);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

BoolGrid load_pgm_mask(std::string_view bytes) {
  PnmReader r(bytes);
  const std::string_view magic = r.magic();
  const bool pbm = magic == "P1" || magic == "P4";
  const bool pgm = magic == "P2" || magic == "P5";
  if (!pbm && !pgm) fail(ErrorCode::kParseError, "not a PBM/PGM image");
  const long w = r.number();
  const long h = r.number();
  if (w < 1 || h < 1) fail(ErrorCode::kParseError, "image has no pixels");
  long maxval = 1;
  if (pgm) {
    maxval = r.number();
    if (maxval < 1 || maxval > 65535) fail(ErrorCode::kParseError, "bad PGM maxval");
  }
  BoolGrid g(static_cast<int>(w), static_cast<int>(h));
  auto put = [&](long col, long row_from_top, bool inside) {
    g.set(static_cast<int>(col), static_cast<int>(h - 1 - row_from_top), inside);
  };
  if (magic == "P1") {
    for (long row = 0; row < h; ++row)
      for (long col = 0; col < w; ++col) put(col, row, r.bit() == 1);
  } else if (magic == "P2") {
    for (long row = 0; row < h; ++row)
      for (long col = 0; col < w; ++col) put(col, row, r.number() > 0);
  } else if (magic == "P4") {
    r.single_space();
    for (long row = 0; row < h; ++row) {
      unsigned char cur = 0;
      for (long col = 0; col < w; ++col) {
        if (col % 8 == 0) cur = r.byte();
        put(col, row, ((cur >> (7 - col % 8)) & 1u) != 0);
      }
    }
  } else {
    r.single_space();
    for (long row = 0; row < h; ++row) {
      for (long col = 0; col < w; ++col) {
        unsigned v = r.byte();
        if (maxval > 255) v = (v << 8) | r.byte();
        put(col, row, v > 0);
      }
    }
  }
  return g;
}

BoolGrid load_png_mask(std::string_view bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
    fail(ErrorCode::kParseError, std::string("PNG: ") + image.message);
  }
  image.format = PNG_FORMAT_GA;
  if (image.width < 1 || image.height < 1 || image.width > (1u << 16) ||
      image.height > (1u << 16)) {
    png_image_free(&image);
    fail(ErrorCode::kParseError, "PNG mask dimensions out of range");
  }
  std::vector<unsigned char> pixels(PNG_IMAGE_SIZE(image));
  if (png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr) == 0) {
    fail(ErrorCode::kParseError, std::string("PNG: ") + image.message);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  BoolGrid g(w, h);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const std::size_t o = (static_cast<std::size_t>(row) * w + col) * 2;
      g.set(col, h - 1 - row, pixels[o] != 0 && pixels[o + 1] != 0);
    }
  }
  return g;
}

BoolGrid load_mask_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  if (bytes.size() >= 8 && bytes.compare(0, 4, "\x89PNG") == 0) return load_png_mask(bytes);
  return load_pgm_mask(bytes);
}

EditingTool make_circle_tool(double x, double y, int radius, double value, int kernel_radius) {
  return {x, y, circle_shape(radius), value, kernel_radius};
}

EditingTool make_square_tool(double x, double y, int radius, double value, int kernel_radius) {
  return {x, y, square_shape(radius), value, kernel_radius};
}

}  // namespace texlayer
