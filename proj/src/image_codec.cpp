// Copyright 2026 The clipscribe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clipscribe/image_codec.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "clipscribe/error.hpp"

namespace clipscribe {

namespace {

[[noreturn]] void undecodable(const std::string& why) {
  throw Error(ErrorCode::kUndecodableImage, why);
}

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    undecodable(std::string("png: ") + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    undecodable("png: " + msg);
  }
  GrayImage out{image.width, image.height, {}};
  out.pixels.resize(static_cast<std::size_t>(out.width) * out.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = bt601_luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
  return out;
}

// Minimal netpbm reader: header tokens may be separated by any whitespace and
// interleaved with '#' comments; binary payload follows a single whitespace.
class PnmCursor {
 public:
  explicit PnmCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  unsigned long next_uint() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      undecodable("pnm: expected integer");
    }
    unsigned long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1UL << 24)) undecodable("pnm: value out of range");
    }
    return v;
  }

  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      undecodable("pnm: missing separator before raster");
    }
    ++pos_;
  }

  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }

  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;  // past the magic
};

GrayImage decode_pnm(std::span<const std::uint8_t> bytes) {
  const char kind = static_cast<char>(bytes[1]);
  const bool color = kind == '6' || kind == '3';
  const bool ascii = kind == '3' || kind == '2';
  PnmCursor cur(bytes);
  const auto width = cur.next_uint();
  const auto height = cur.next_uint();
  const auto maxval = cur.next_uint();
  if (width == 0 || height == 0) undecodable("pnm: zero dimension");
  if (maxval == 0 || maxval > 255) undecodable("pnm: only 8-bit maxval supported");

  const std::size_t channels = color ? 3 : 1;
  const std::size_t count = width * height * channels;
  std::vector<std::uint8_t> samples(count);
  if (ascii) {
    for (auto& s : samples) {
      auto v = cur.next_uint();
      if (v > maxval) undecodable("pnm: sample exceeds maxval");
      s = static_cast<std::uint8_t>(v);
    }
  } else {
    cur.skip_single_space();
    auto raster = cur.rest();
    if (raster.size() < count) undecodable("pnm: truncated raster");
    std::copy_n(raster.begin(), count, samples.begin());
  }
  if (maxval != 255) {
    for (auto& s : samples) {
      s = static_cast<std::uint8_t>(std::lround(s * 255.0 / maxval));
    }
  }

  GrayImage out{static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height), {}};
  out.pixels.resize(width * height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = color ? bt601_luma(samples[3 * i], samples[3 * i + 1], samples[3 * i + 2])
                          : samples[i];
  }
  return out;
}

}  // namespace

std::uint8_t bt601_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::min(255L, std::lround(y)));
}

std::vector<std::uint8_t> encode_png_gray(std::uint32_t width, std::uint32_t height,
                                          std::span<const std::uint8_t> pixels) {
  if (width == 0 || height == 0 ||
      pixels.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kEmptyPlane, "png encode: plane size does not match dimensions");
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = width;
  image.height = height;
  image.format = PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(image, size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoFailure, std::string("png encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIoFailure, std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

GrayImage decode_to_luma(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' &&
      (bytes[1] == '2' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '6')) {
    return decode_pnm(bytes);
  }
  undecodable("unrecognized image format");
}

GrayImage decode_file_to_luma(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) undecodable("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_to_luma(bytes);
  } catch (const Error& e) {
    undecodable(path.filename().string() + ": " + e.what());
  }
}

}  // namespace clipscribe
