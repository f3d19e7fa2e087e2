#pragma once

// Grayscale rasters (ink = 1, background = 0) and their PGM encoding.
// Pixels are doubles everywhere inside the library; PGM files quantize to
// 8 bit with round-half-away-from-zero.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "glyphforge/error.hpp"

namespace glyphforge {

/// H x W row-major field of doubles. Used for glyph images (values in
/// [0,1]) and distance fields (values in [0, +inf]).
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t height, std::size_t width, double fill = 0.0)
      : height_(height), width_(width), data_(height * width, fill) {}

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& at(std::size_t row, std::size_t col) noexcept { return data_[row * width_ + col]; }
  double at(std::size_t row, std::size_t col) const noexcept { return data_[row * width_ + col]; }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Raster& o) const noexcept { return height_ == o.height_ && width_ == o.width_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> data_;
};

using GlyphImage = Raster;
using DistanceField = Raster;

enum class PgmEncoding { Ascii, Binary };

inline std::uint8_t quantize(double v) noexcept {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(255.0 * c));
}

inline std::string write_pgm(const GlyphImage& img, PgmEncoding enc = PgmEncoding::Binary) {
  std::string out = enc == PgmEncoding::Binary ? "P5\n" : "P2\n";
  out += std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  if (enc == PgmEncoding::Binary) {
    out.reserve(out.size() + img.size());
    for (double v : img.values()) out += static_cast<char>(quantize(v));
    return out;
  }
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      if (c) out += ' ';
      out += std::to_string(quantize(img.at(r, c)));
    }
    out += '\n';
  }
  return out;
}

namespace detail {

class PgmScanner {
 public:
  explicit PgmScanner(std::string_view data) : data_(data) {}

  // Header tokens may be separated by whitespace and '#' comments.
  std::size_t next_uint() {
    skip_space_and_comments();
    std::size_t v = 0;
    std::size_t digits = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(data_[pos_++] - '0');
      if (++digits > 9) throw Error(ErrorKind::Io, "PGM integer too large");
    }
    if (digits == 0) throw Error(ErrorKind::Io, "PGM: expected integer");
    return v;
  }

  std::string_view next_token() {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    return data_.substr(start, pos_ - start);
  }

  /// Exactly one whitespace byte separates maxval from binary raster data.
  std::string_view binary_payload() {
    if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      throw Error(ErrorKind::Io, "PGM: missing separator before raster");
    }
    return data_.substr(pos_ + 1);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      const char ch = data_[pos_];
      if (ch == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Reads P2 or P5 data; sample value v maps to v / maxval.
inline GlyphImage read_pgm(std::string_view data) {
  detail::PgmScanner scan(data);
  const auto magic = scan.next_token();
  if (magic != "P2" && magic != "P5") throw Error(ErrorKind::Io, "not a PGM file (magic " + std::string(magic) + ")");
  const std::size_t width = scan.next_uint();
  const std::size_t height = scan.next_uint();
  const std::size_t maxval = scan.next_uint();
  if (width == 0 || height == 0) throw Error(ErrorKind::Io, "PGM has zero size");
  if (maxval == 0 || maxval > 65535) throw Error(ErrorKind::Io, "PGM maxval out of range");
  GlyphImage img(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (magic == "P2") {
    for (std::size_t i = 0; i < img.size(); ++i) {
      const std::size_t v = scan.next_uint();
      if (v > maxval) throw Error(ErrorKind::Io, "PGM sample exceeds maxval");
      img[i] = static_cast<double>(v) * scale;
    }
    return img;
  }
  const auto payload = scan.binary_payload();
  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  if (payload.size() < img.size() * bytes_per) throw Error(ErrorKind::Io, "PGM raster truncated");
  for (std::size_t i = 0; i < img.size(); ++i) {
    std::size_t v = static_cast<unsigned char>(payload[i * bytes_per]);
    if (bytes_per == 2) v = (v << 8) | static_cast<unsigned char>(payload[i * 2 + 1]);
    if (v > maxval) throw Error(ErrorKind::Io, "PGM sample exceeds maxval");
    img[i] = static_cast<double>(v) * scale;
  }
  return img;
}

/// Debug dump of a distance field: one row per line, "inf" where no visible
/// segment exists.
inline std::string write_field_ascii(const DistanceField& f) {
  std::string out;
  char buf[32];
  for (std::size_t r = 0; r < f.height(); ++r) {
    for (std::size_t c = 0; c < f.width(); ++c) {
      if (c) out += ' ';
      const double v = f.at(r, c);
      if (std::isinf(v)) {
        out += "inf";
      } else {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace glyphforge
