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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace clipscribe {

enum class Chroma { k420, k422, k444 };
enum class SourceKind { kY4m, kImageSequence };

std::string_view chroma_name(Chroma c);
std::string_view source_kind_name(SourceKind k);

struct StreamMeta {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t fps_num = 0;
  std::uint32_t fps_den = 0;
  Chroma chroma = Chroma::k420;
  SourceKind source_kind = SourceKind::kY4m;

  std::size_t luma_size() const { return std::size_t{width} * height; }
  /// Luma plane plus both chroma planes at the subsampled resolution.
  std::size_t frame_payload_size() const;

  bool operator==(const StreamMeta&) const = default;
};

/// round(index * 1000 * fps_den / fps_num), halves rounded up.
std::int64_t frame_timestamp_ms(std::size_t index, std::uint32_t fps_num, std::uint32_t fps_den);

/// A decoded picture. Only the luma plane is retained.
struct Frame {
  std::size_t index = 0;
  std::int64_t timestamp_ms = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> luma;
};

/// Parses the stream header line. `bytes` must begin at the start of the
/// stream; on success `*consumed` (when given) receives the header length
/// including its terminating 0x0A.
StreamMeta parse_y4m_header(std::string_view bytes, std::size_t* consumed = nullptr);

/// Sequential, single-consumer source of frames.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual const StreamMeta& meta() const = 0;
  /// Next frame, or nullopt at end of stream.
  virtual std::optional<Frame> next() = 0;
};

class Y4mReader final : public FrameSource {
 public:
  /// Reads the header immediately. The stream must outlive the reader.
  explicit Y4mReader(std::istream& in);
  explicit Y4mReader(std::unique_ptr<std::istream> owned);

  const StreamMeta& meta() const override { return meta_; }
  std::optional<Frame> next() override;

 private:
  void read_header();

  std::unique_ptr<std::istream> owned_;
  std::istream* in_;
  StreamMeta meta_;
  std::size_t next_index_ = 0;
};

/// Opens a Y4M file, or standard input when `path` is "-".
std::unique_ptr<Y4mReader> open_y4m(const std::string& path);

/// Writes a Y4M stream carrying the given luma planes; chroma planes are
/// filled with the neutral value 128.
void write_y4m(std::ostream& out, const StreamMeta& meta,
               std::span<const std::vector<std::uint8_t>> luma_planes);

/// Frames decoded from a directory of still images, ordered by natural
/// (numeric-aware) filename order. Fixed at 1 fps.
class ImageSequenceSource final : public FrameSource {
 public:
  ImageSequenceSource(std::vector<std::filesystem::path> files, Frame first);

  const StreamMeta& meta() const override { return meta_; }
  std::optional<Frame> next() override;
  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::vector<std::filesystem::path> files_;
  std::optional<Frame> pending_first_;
  StreamMeta meta_;
  std::size_t next_index_ = 0;
};

/// Lists files in `dir` whose name matches the glob `pattern` and decodes the
/// first. Throws EmptySequence when nothing matches.
std::unique_ptr<ImageSequenceSource> load_image_sequence(const std::filesystem::path& dir,
                                                         const std::string& pattern);

/// Filename comparison that orders embedded digit runs by numeric value.
bool natural_less(std::string_view a, std::string_view b);

}  // namespace clipscribe
