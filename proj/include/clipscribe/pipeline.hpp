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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clipscribe/captioner.hpp"
#include "clipscribe/ingest.hpp"
#include "clipscribe/keyframes.hpp"
#include "clipscribe/summarizer.hpp"
#include "clipscribe/transport.hpp"

namespace clipscribe {

enum class InputKind { kY4m, kImages };

struct InputSpec {
  std::string path;          // file, directory, or "-" for stdin (y4m only)
  InputKind kind = InputKind::kY4m;
  std::string pattern = "*";  // image sequences only
};

struct PipelineConfig {
  InputSpec input;
  KeyframeConfig keyframes;
  BackendSpec captioner;
  AbstractSpec abstract;
  SummarizerConfig summarizer;
  std::optional<std::filesystem::path> output;
  std::optional<std::filesystem::path> cache_dir;
  bool deterministic = false;

  /// Checks value ranges and that referenced files exist.
  /// Throws Error(kInvalidConfig).
  void validate() const;
};

/// Config file schema; the inverse of config_to_json. Keys absent from `doc`
/// keep their value in `base`. Throws Error(kInvalidConfig).
PipelineConfig config_from_json(const nlohmann::json& doc, PipelineConfig base = {});
nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base = {});

struct KeyframeRecord {
  std::size_t frame_index = 0;
  std::int64_t timestamp_ms = 0;
  double distance = 0.0;
};

struct StageTimings {
  double extract_ms = 0.0;  // decode + signatures + selection
  double caption_ms = 0.0;
  double summarize_ms = 0.0;
  double abstract_ms = 0.0;
  double total_ms = 0.0;
};

struct PipelineReport {
  std::string tool_version;
  InputSpec input;
  StreamMeta meta;
  std::size_t frame_count = 0;
  std::vector<KeyframeRecord> keyframes;
  std::vector<Caption> captions;
  Document document;
  std::vector<std::string> sentences;
  RankScores scores;
  std::string title;
  std::string summary;  // top-N extract
  AbstractResult abstract;
  nlohmann::json config_echo;
  StageTimings timings;
};

/// Overrides for the network layer, used by tests.
struct PipelineHooks {
  std::shared_ptr<HttpTransport> transport;
  Sleeper sleep;
};

std::unique_ptr<FrameSource> open_input(const InputSpec& input);

/// ingest -> key-frames -> captions -> document -> rank -> title + abstract.
/// Errors are rethrown tagged with the failing stage.
PipelineReport run_pipeline(const PipelineConfig& config, const PipelineHooks& hooks = {});

// JSON fragments shared by the report and the per-stage subcommands.
nlohmann::json keyframes_to_json(std::span<const KeyframeRecord> keyframes);
std::vector<KeyframeRecord> keyframes_from_json(const nlohmann::json& doc);
std::vector<KeyframeRecord> keyframe_records(std::span<const Keyframe> keyframes);
/// Re-decodes the listed frames from `source` into captionable key-frames.
/// Throws Error(kInvalidConfig) if a listed index is past the end.
std::vector<Keyframe> materialize_keyframes(FrameSource& source,
                                            std::span<const KeyframeRecord> records,
                                            std::size_t bins);
nlohmann::json captions_to_json(std::span<const Caption> captions);
std::vector<Caption> captions_from_json(const nlohmann::json& doc);

struct SummaryFields {
  std::string document;
  std::vector<std::string> sentences;
  RankScores scores;
  std::string title;
  std::string summary;
  AbstractResult abstract;
};

/// Summarizes `document` and produces its abstract.
SummaryFields summarize_document(const std::string& document, const PipelineConfig& config,
                                 const PipelineHooks& hooks = {});
nlohmann::json summary_to_json(const SummaryFields& fields);

nlohmann::json report_to_json(const PipelineReport& report);
void write_report(const PipelineReport& report, const std::filesystem::path& path);

}  // namespace clipscribe
