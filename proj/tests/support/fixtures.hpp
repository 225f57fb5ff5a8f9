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

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("clipscribe-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<std::uint8_t> flat_plane(std::size_t size, std::uint8_t value) {
  return std::vector<std::uint8_t>(size, value);
}

/// Binary PPM (P6) with every pixel set to the same colour.
inline std::string solid_ppm(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  std::string s = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (int i = 0; i < w * h; ++i) {
    s.push_back(static_cast<char>(r));
    s.push_back(static_cast<char>(g));
    s.push_back(static_cast<char>(b));
  }
  return s;
}

/// Three flat scenes of ten frames each: black, mid-gray, white.
inline std::vector<std::vector<std::uint8_t>> three_scene_planes(std::size_t plane_size) {
  std::vector<std::vector<std::uint8_t>> planes;
  for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{128}, std::uint8_t{255}}) {
    for (int i = 0; i < 10; ++i) planes.push_back(flat_plane(plane_size, v));
  }
  return planes;
}

inline const char* kThreeSceneManifest =
    R"({"0": "a man walks a dog in the park.", "10": "a dog plays with a ball in the park.", "20": "a child throws a ball."})";

}  // namespace fixture
