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

#include "clipscribe/ingest.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <istream>
#include <ostream>

#include "clipscribe/error.hpp"
#include "clipscribe/image_codec.hpp"

namespace clipscribe {

namespace {

constexpr std::string_view kMagic = "YUV4MPEG2";
constexpr std::string_view kFrameTag = "FRAME";
// Header and FRAME lines are short; anything longer is not a Y4M stream.
constexpr std::size_t kMaxLine = 4096;

std::uint32_t parse_positive(std::string_view text, char param) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || v == 0) {
    throw Error(ErrorCode::kMalformedParam,
                std::string(1, param) + " must be a positive integer, got '" +
                    std::string(text) + "'");
  }
  return v;
}

Chroma parse_chroma(std::string_view token) {
  // 4:2:0 siting variants share the 4:2:0 plane layout.
  if (token == "420" || token == "420jpeg" || token == "420paldv" || token == "420mpeg2") {
    return Chroma::k420;
  }
  if (token == "422") return Chroma::k422;
  if (token == "444") return Chroma::k444;
  throw Error(ErrorCode::kUnsupportedChroma, "C" + std::string(token));
}

std::pair<int, int> subsampling(Chroma c) {
  switch (c) {
    case Chroma::k420: return {2, 2};
    case Chroma::k422: return {2, 1};
    case Chroma::k444: return {1, 1};
  }
  return {1, 1};
}

StreamMeta parse_header_line(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    auto end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end + 1;
  }
  if (tokens.empty() || tokens.front() != kMagic) {
    throw Error(ErrorCode::kMissingMagic, "stream does not start with YUV4MPEG2");
  }

  StreamMeta meta;
  bool have_w = false, have_h = false, have_f = false;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    auto tok = tokens[i];
    auto value = tok.substr(1);
    switch (tok.front()) {
      case 'W':
        meta.width = parse_positive(value, 'W');
        have_w = true;
        break;
      case 'H':
        meta.height = parse_positive(value, 'H');
        have_h = true;
        break;
      case 'F': {
        auto colon = value.find(':');
        if (colon == std::string_view::npos) {
          throw Error(ErrorCode::kMalformedParam, "F must be num:den");
        }
        meta.fps_num = parse_positive(value.substr(0, colon), 'F');
        meta.fps_den = parse_positive(value.substr(colon + 1), 'F');
        have_f = true;
        break;
      }
      case 'C':
        meta.chroma = parse_chroma(value);
        break;
      default:
        // I (interlacing), A (aspect), X (extensions) and unknown tags.
        break;
    }
  }
  if (!have_w || !have_h || !have_f) {
    throw Error(ErrorCode::kMissingParam, "header requires W, H and F");
  }
  auto [sx, sy] = subsampling(meta.chroma);
  if (meta.width % sx != 0 || meta.height % sy != 0) {
    throw Error(ErrorCode::kMalformedParam,
                "dimensions must be divisible by the chroma subsampling");
  }
  return meta;
}

}  // namespace

std::string_view chroma_name(Chroma c) {
  switch (c) {
    case Chroma::k420: return "420";
    case Chroma::k422: return "422";
    case Chroma::k444: return "444";
  }
  return "?";
}

std::string_view source_kind_name(SourceKind k) {
  return k == SourceKind::kY4m ? "y4m" : "image_sequence";
}

std::size_t StreamMeta::frame_payload_size() const {
  auto [sx, sy] = subsampling(chroma);
  return luma_size() + 2 * (std::size_t{width} / sx) * (std::size_t{height} / sy);
}

std::int64_t frame_timestamp_ms(std::size_t index, std::uint32_t fps_num,
                                std::uint32_t fps_den) {
  const auto num = static_cast<std::int64_t>(fps_num);
  const auto scaled = static_cast<std::int64_t>(index) * 1000 * fps_den;
  return (2 * scaled + num) / (2 * num);
}

StreamMeta parse_y4m_header(std::string_view bytes, std::size_t* consumed) {
  auto nl = bytes.find('\n');
  if (nl == std::string_view::npos) {
    if (bytes.substr(0, kMagic.size()) != kMagic) {
      throw Error(ErrorCode::kMissingMagic, "stream does not start with YUV4MPEG2");
    }
    throw Error(ErrorCode::kMalformedParam, "header line is not terminated");
  }
  auto meta = parse_header_line(bytes.substr(0, nl));
  if (consumed) *consumed = nl + 1;
  return meta;
}

Y4mReader::Y4mReader(std::istream& in) : in_(&in) { read_header(); }

Y4mReader::Y4mReader(std::unique_ptr<std::istream> owned)
    : owned_(std::move(owned)), in_(owned_.get()) {
  read_header();
}

void Y4mReader::read_header() {
  std::string line;
  char c = 0;
  while (line.size() < kMaxLine && in_->get(c)) {
    line.push_back(c);
    if (c == '\n') break;
  }
  meta_ = parse_y4m_header(line);
  meta_.source_kind = SourceKind::kY4m;
}

std::optional<Frame> Y4mReader::next() {
  if (in_->peek() == std::char_traits<char>::eof()) return std::nullopt;

  std::string line;
  char c = 0;
  bool terminated = false;
  while (line.size() < kMaxLine && in_->get(c)) {
    if (c == '\n') {
      terminated = true;
      break;
    }
    line.push_back(c);
  }
  if (!terminated) {
    if (kFrameTag.starts_with(line) || line.starts_with(kFrameTag)) {
      throw Error(ErrorCode::kTruncatedFrame,
                  "stream ends inside FRAME marker of frame " + std::to_string(next_index_));
    }
    throw Error(ErrorCode::kBadFrameMarker,
                "expected FRAME at frame " + std::to_string(next_index_));
  }
  if (!line.starts_with(kFrameTag) ||
      (line.size() > kFrameTag.size() && line[kFrameTag.size()] != ' ')) {
    throw Error(ErrorCode::kBadFrameMarker,
                "expected FRAME at frame " + std::to_string(next_index_));
  }

  Frame frame;
  frame.index = next_index_;
  frame.timestamp_ms = frame_timestamp_ms(next_index_, meta_.fps_num, meta_.fps_den);
  frame.width = meta_.width;
  frame.height = meta_.height;
  frame.luma.resize(meta_.luma_size());
  in_->read(reinterpret_cast<char*>(frame.luma.data()),
            static_cast<std::streamsize>(frame.luma.size()));
  std::size_t got = static_cast<std::size_t>(in_->gcount());
  if (got == frame.luma.size()) {
    const auto chroma = meta_.frame_payload_size() - meta_.luma_size();
    in_->ignore(static_cast<std::streamsize>(chroma));
    got += static_cast<std::size_t>(in_->gcount());
  }
  if (got != meta_.frame_payload_size()) {
    throw Error(ErrorCode::kTruncatedFrame,
                "frame " + std::to_string(next_index_) + " has " + std::to_string(got) +
                    " of " + std::to_string(meta_.frame_payload_size()) + " payload bytes");
  }
  ++next_index_;
  return frame;
}

std::unique_ptr<Y4mReader> open_y4m(const std::string& path) {
  if (path == "-") return std::make_unique<Y4mReader>(std::cin);
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  return std::make_unique<Y4mReader>(std::move(file));
}

void write_y4m(std::ostream& out, const StreamMeta& meta,
               std::span<const std::vector<std::uint8_t>> luma_planes) {
  out << kMagic << " W" << meta.width << " H" << meta.height << " F" << meta.fps_num << ':'
      << meta.fps_den << " Ip A1:1 C" << chroma_name(meta.chroma) << '\n';
  const std::string chroma(meta.frame_payload_size() - meta.luma_size(), static_cast<char>(128));
  for (const auto& plane : luma_planes) {
    if (plane.size() != meta.luma_size()) {
      throw Error(ErrorCode::kMalformedParam, "luma plane size does not match W*H");
    }
    out << kFrameTag << '\n';
    out.write(reinterpret_cast<const char*>(plane.data()),
              static_cast<std::streamsize>(plane.size()));
    out.write(chroma.data(), static_cast<std::streamsize>(chroma.size()));
  }
}

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      auto si = i, sj = j;
      while (i < a.size() && is_digit(a[i])) ++i;
      while (j < b.size() && is_digit(b[j])) ++j;
      auto da = a.substr(si, i - si), db = b.substr(sj, j - sj);
      // Compare by value: strip leading zeros, then length, then digits.
      auto strip = [](std::string_view d) {
        auto nz = d.find_first_not_of('0');
        return nz == std::string_view::npos ? std::string_view{} : d.substr(nz);
      };
      auto va = strip(da), vb = strip(db);
      if (va.size() != vb.size()) return va.size() < vb.size();
      if (va != vb) return va < vb;
      if (da.size() != db.size()) return da.size() < db.size();
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return (a.size() - i) < (b.size() - j);
}

ImageSequenceSource::ImageSequenceSource(std::vector<std::filesystem::path> files, Frame first)
    : files_(std::move(files)), pending_first_(std::move(first)) {
  meta_.width = pending_first_->width;
  meta_.height = pending_first_->height;
  meta_.fps_num = 1;
  meta_.fps_den = 1;
  meta_.chroma = Chroma::k444;
  meta_.source_kind = SourceKind::kImageSequence;
}

std::optional<Frame> ImageSequenceSource::next() {
  if (next_index_ >= files_.size()) return std::nullopt;
  if (pending_first_) {
    Frame f = std::move(*pending_first_);
    pending_first_.reset();
    ++next_index_;
    return f;
  }
  auto img = decode_file_to_luma(files_[next_index_]);
  if (img.width != meta_.width || img.height != meta_.height) {
    throw Error(ErrorCode::kMixedDimensions,
                files_[next_index_].filename().string() + " is " + std::to_string(img.width) +
                    "x" + std::to_string(img.height) + ", sequence is " +
                    std::to_string(meta_.width) + "x" + std::to_string(meta_.height));
  }
  Frame f{next_index_, frame_timestamp_ms(next_index_, 1, 1), img.width, img.height,
          std::move(img.pixels)};
  ++next_index_;
  return f;
}

std::unique_ptr<ImageSequenceSource> load_image_sequence(const std::filesystem::path& dir,
                                                         const std::string& pattern) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot read directory " + dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.starts_with('.')) continue;
    if (fnmatch(pattern.c_str(), name.c_str(), FNM_PERIOD) == 0) files.push_back(entry.path());
  }
  if (files.empty()) {
    throw Error(ErrorCode::kEmptySequence,
                "no files match '" + pattern + "' in " + dir.string());
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return natural_less(a.filename().string(), b.filename().string());
  });

  auto img = decode_file_to_luma(files.front());
  Frame first{0, 0, img.width, img.height, std::move(img.pixels)};
  return std::make_unique<ImageSequenceSource>(std::move(files), std::move(first));
}

}  // namespace clipscribe
