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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace clipscribe {

struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, width * height
};

/// BT.601 luma, rounded to nearest: round(0.299 R + 0.587 G + 0.114 B).
std::uint8_t bt601_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Encodes an 8-bit grayscale plane as a PNG file image.
std::vector<std::uint8_t> encode_png_gray(std::uint32_t width, std::uint32_t height,
                                          std::span<const std::uint8_t> pixels);

/// Decodes PNG, binary/ASCII PPM (P6/P3) or PGM (P5/P2) bytes to a luma plane.
/// Throws Error(kUndecodableImage).
GrayImage decode_to_luma(std::span<const std::uint8_t> bytes);
GrayImage decode_file_to_luma(const std::filesystem::path& path);

}  // namespace clipscribe
