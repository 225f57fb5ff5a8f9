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

#include "clipscribe/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <set>

#include "clipscribe/canonical_json.hpp"
#include "clipscribe/error.hpp"

namespace clipscribe {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad_config(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    bad_config(std::string("config field '") + key + "' has the wrong type");
  }
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (it->is_null()) {
    out.reset();
    return;
  }
  T value{};
  read_field(obj, key, value);
  out = std::move(value);
}

void read_path(const json& obj, const char* key, std::optional<std::filesystem::path>& out) {
  std::optional<std::string> s;
  if (out) s = out->string();
  read_optional(obj, key, s);
  out = s ? std::optional<std::filesystem::path>(*s) : std::nullopt;
}

const json& section(const json& doc, const char* key) {
  static const json kEmpty = json::object();
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return kEmpty;
  if (!it->is_object()) bad_config(std::string("config section '") + key + "' must be an object");
  return *it;
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

json path_json(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

std::string stage_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingMagic:
    case ErrorCode::kMissingParam:
    case ErrorCode::kMalformedParam:
    case ErrorCode::kUnsupportedChroma:
    case ErrorCode::kTruncatedFrame:
    case ErrorCode::kBadFrameMarker:
    case ErrorCode::kEmptySequence:
    case ErrorCode::kMixedDimensions:
    case ErrorCode::kUndecodableImage:
      return "ingest";
    default:
      return "keyframes";
  }
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

template <typename F>
auto in_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw e.with_stage(stage);
  }
}

}  // namespace

void PipelineConfig::validate() const {
  if (input.path.empty()) bad_config("no input given");
  if (input.path == "-") {
    if (input.kind != InputKind::kY4m) bad_config("standard input is only supported for y4m");
  } else if (!std::filesystem::exists(input.path)) {
    bad_config("input does not exist: " + input.path);
  } else if (input.kind == InputKind::kImages && !std::filesystem::is_directory(input.path)) {
    bad_config("image-sequence input must be a directory: " + input.path);
  }
  keyframes.validate();
  captioner.validate();
  if (captioner.manifest && captioner.kind == BackendKind::kScriptedMock &&
      !std::filesystem::exists(*captioner.manifest)) {
    bad_config("manifest does not exist: " + captioner.manifest->string());
  }
  if (captioner.kind == BackendKind::kHttp) join_endpoint(*captioner.endpoint, "");
  abstract.validate();
  if (abstract.backend == AbstractSpec::Backend::kHttp) join_endpoint(*abstract.endpoint, "");
  summarizer.validate();
  if (summarizer.stopwords && !std::filesystem::exists(*summarizer.stopwords)) {
    bad_config("stop-word list does not exist: " + summarizer.stopwords->string());
  }
}

PipelineConfig config_from_json(const json& doc, PipelineConfig base) {
  if (!doc.is_object()) bad_config("config must be a JSON object");
  auto& c = base;

  const auto& in = section(doc, "input");
  read_field(in, "path", c.input.path);
  read_field(in, "pattern", c.input.pattern);
  if (in.contains("kind")) {
    std::string kind;
    read_field(in, "kind", kind);
    if (kind == "y4m") c.input.kind = InputKind::kY4m;
    else if (kind == "images") c.input.kind = InputKind::kImages;
    else bad_config("input.kind must be y4m or images");
  }

  const auto& kf = section(doc, "keyframes");
  read_field(kf, "threshold", c.keyframes.threshold);
  read_field(kf, "min_gap", c.keyframes.min_gap);
  read_optional(kf, "max_keyframes", c.keyframes.max_keyframes);
  read_field(kf, "uniform_count", c.keyframes.uniform_count);
  read_field(kf, "bins", c.keyframes.bins);
  if (kf.contains("mode")) {
    std::string mode;
    read_field(kf, "mode", mode);
    if (mode == "change_detect") c.keyframes.mode = SelectionMode::kChangeDetect;
    else if (mode == "uniform") c.keyframes.mode = SelectionMode::kUniform;
    else bad_config("keyframes.mode must be change_detect or uniform");
  }

  const auto& cap = section(doc, "captioner");
  if (cap.contains("kind")) {
    std::string kind;
    read_field(cap, "kind", kind);
    if (kind == "http") c.captioner.kind = BackendKind::kHttp;
    else if (kind == "scripted") c.captioner.kind = BackendKind::kScriptedMock;
    else if (kind == "procedural") c.captioner.kind = BackendKind::kProceduralMock;
    else bad_config("captioner.kind must be http, scripted or procedural");
  }
  read_optional(cap, "endpoint", c.captioner.endpoint);
  read_path(cap, "manifest", c.captioner.manifest);
  read_field(cap, "timeout_ms", c.captioner.timeout_ms);
  read_field(cap, "max_retries", c.captioner.max_retries);
  read_field(cap, "parallelism", c.captioner.parallelism);

  const auto& ab = section(doc, "abstract");
  if (ab.contains("backend")) {
    std::string kind;
    read_field(ab, "backend", kind);
    if (kind == "http") c.abstract.backend = AbstractSpec::Backend::kHttp;
    else if (kind == "fallback") c.abstract.backend = AbstractSpec::Backend::kFallback;
    else bad_config("abstract.backend must be http or fallback");
  }
  read_optional(ab, "endpoint", c.abstract.endpoint);
  read_field(ab, "max_words", c.abstract.max_words);
  read_field(ab, "timeout_ms", c.abstract.timeout_ms);
  read_field(ab, "max_retries", c.abstract.max_retries);

  const auto& sm = section(doc, "summarizer");
  read_field(sm, "top_n", c.summarizer.top_n);
  read_field(sm, "damping", c.summarizer.damping);
  read_field(sm, "tolerance", c.summarizer.tolerance);
  read_field(sm, "max_iterations", c.summarizer.max_iterations);
  read_path(sm, "stopwords", c.summarizer.stopwords);

  read_path(doc, "output", c.output);
  read_path(doc, "cache_dir", c.cache_dir);
  read_field(doc, "deterministic", c.deterministic);
  return base;
}

json config_to_json(const PipelineConfig& c) {
  json doc;
  doc["input"] = {{"path", c.input.path},
                  {"kind", c.input.kind == InputKind::kY4m ? "y4m" : "images"},
                  {"pattern", c.input.pattern}};
  doc["keyframes"] = {
      {"threshold", c.keyframes.threshold},
      {"min_gap", c.keyframes.min_gap},
      {"max_keyframes", optional_json(c.keyframes.max_keyframes)},
      {"mode", c.keyframes.mode == SelectionMode::kChangeDetect ? "change_detect" : "uniform"},
      {"uniform_count", c.keyframes.uniform_count},
      {"bins", c.keyframes.bins}};
  doc["captioner"] = {{"kind", std::string(backend_kind_name(c.captioner.kind))},
                      {"endpoint", optional_json(c.captioner.endpoint)},
                      {"manifest", path_json(c.captioner.manifest)},
                      {"timeout_ms", c.captioner.timeout_ms},
                      {"max_retries", c.captioner.max_retries},
                      {"parallelism", c.captioner.parallelism}};
  doc["abstract"] = {
      {"backend", c.abstract.backend == AbstractSpec::Backend::kHttp ? "http" : "fallback"},
      {"endpoint", optional_json(c.abstract.endpoint)},
      {"max_words", c.abstract.max_words},
      {"timeout_ms", c.abstract.timeout_ms},
      {"max_retries", c.abstract.max_retries}};
  doc["summarizer"] = {{"top_n", c.summarizer.top_n},
                       {"damping", c.summarizer.damping},
                       {"tolerance", c.summarizer.tolerance},
                       {"max_iterations", c.summarizer.max_iterations},
                       {"stopwords", path_json(c.summarizer.stopwords)}};
  doc["output"] = path_json(c.output);
  doc["cache_dir"] = path_json(c.cache_dir);
  doc["deterministic"] = c.deterministic;
  return doc;
}

PipelineConfig load_config_file(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad_config("cannot open config file " + path.string());
  auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) bad_config("config file is not valid JSON: " + path.string());
  return config_from_json(doc, std::move(base));
}

std::unique_ptr<FrameSource> open_input(const InputSpec& input) {
  if (input.kind == InputKind::kImages) return load_image_sequence(input.path, input.pattern);
  return open_y4m(input.path);
}

json keyframes_to_json(std::span<const KeyframeRecord> keyframes) {
  json arr = json::array();
  for (const auto& k : keyframes) {
    arr.push_back({{"frame_index", k.frame_index},
                   {"timestamp_ms", k.timestamp_ms},
                   {"distance", k.distance}});
  }
  return arr;
}

std::vector<KeyframeRecord> keyframes_from_json(const json& doc) {
  if (!doc.is_array()) bad_config("key-frame list must be a JSON array");
  std::vector<KeyframeRecord> out;
  try {
    for (const auto& k : doc) {
      out.push_back({k.at("frame_index").get<std::size_t>(),
                     k.at("timestamp_ms").get<std::int64_t>(), k.at("distance").get<double>()});
    }
  } catch (const json::exception& e) {
    bad_config(std::string("malformed key-frame list: ") + e.what());
  }
  return out;
}

std::vector<KeyframeRecord> keyframe_records(std::span<const Keyframe> keyframes) {
  std::vector<KeyframeRecord> out;
  out.reserve(keyframes.size());
  for (const auto& k : keyframes) {
    out.push_back({k.frame_index, k.timestamp_ms, k.distance_from_previous});
  }
  return out;
}

std::vector<Keyframe> materialize_keyframes(FrameSource& source,
                                            std::span<const KeyframeRecord> records,
                                            std::size_t bins) {
  std::set<std::size_t> wanted;
  for (const auto& r : records) wanted.insert(r.frame_index);
  std::map<std::size_t, Keyframe> found;
  while (found.size() < wanted.size()) {
    auto frame = source.next();
    if (!frame) break;
    if (!wanted.contains(frame->index)) continue;
    found.emplace(frame->index, make_keyframe(*frame, frame_signature(frame->luma, bins), 0.0));
  }
  std::vector<Keyframe> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    auto it = found.find(r.frame_index);
    if (it == found.end()) {
      bad_config("key-frame " + std::to_string(r.frame_index) + " is past the end of the input");
    }
    Keyframe k = it->second;
    k.distance_from_previous = r.distance;
    out.push_back(std::move(k));
  }
  return out;
}

json captions_to_json(std::span<const Caption> captions) {
  json arr = json::array();
  for (const auto& c : captions) {
    arr.push_back({{"frame_index", c.frame_index},
                   {"text", c.text},
                   {"score", optional_json(c.score)},
                   {"backend_id", c.backend_id}});
  }
  return arr;
}

std::vector<Caption> captions_from_json(const json& doc) {
  if (!doc.is_array()) bad_config("caption list must be a JSON array");
  std::vector<Caption> out;
  try {
    for (const auto& c : doc) {
      Caption cap;
      cap.frame_index = c.at("frame_index").get<std::size_t>();
      cap.text = c.at("text").get<std::string>();
      if (c.contains("score") && !c["score"].is_null()) cap.score = c["score"].get<double>();
      cap.backend_id = c.value("backend_id", "");
      out.push_back(std::move(cap));
    }
  } catch (const json::exception& e) {
    bad_config(std::string("malformed caption list: ") + e.what());
  }
  return out;
}

SummaryFields summarize_document(const std::string& document, const PipelineConfig& config,
                                 const PipelineHooks& hooks) {
  const auto stopwords = config.summarizer.load_stopword_set();
  auto s = summarize(document, config.summarizer, stopwords);
  SummaryFields out;
  out.document = document;
  for (const auto& sentence : s.sentences) out.sentences.push_back(sentence.raw);
  out.scores = std::move(s.scores);
  out.title = std::move(s.title);
  out.summary = std::move(s.extractive);
  out.abstract = abstract_via_backend(document, config.abstract, config.summarizer, stopwords,
                                      hooks.transport,
                                      hooks.sleep ? hooks.sleep : real_sleeper());
  return out;
}

json summary_to_json(const SummaryFields& f) {
  return {{"document", f.document},
          {"title", f.title},
          {"summary", f.summary},
          {"abstract", f.abstract.text},
          {"abstract_kind", std::string(abstract_kind_name(f.abstract.kind))},
          {"ranking",
           {{"sentences", f.sentences},
            {"scores", f.scores.values},
            {"iterations", f.scores.iterations},
            {"converged", f.scores.converged}}}};
}

PipelineReport run_pipeline(const PipelineConfig& config, const PipelineHooks& hooks) {
  in_stage("config", [&] {
    config.validate();
    return 0;
  });
  const auto start = std::chrono::steady_clock::now();
  PipelineReport report;
  report.tool_version = CLIPSCRIBE_VERSION;
  report.input = config.input;
  report.config_echo = config_to_json(config);

  auto t = std::chrono::steady_clock::now();
  ExtractionResult extracted;
  try {
    auto source = open_input(config.input);
    extracted = extract_keyframes(*source, config.keyframes);
  } catch (const Error& e) {
    throw e.with_stage(stage_for(e.code()));
  }
  report.meta = extracted.meta;
  report.frame_count = extracted.frame_count;
  report.keyframes = keyframe_records(extracted.keyframes);
  report.timings.extract_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  report.captions = in_stage("caption", [&] {
    auto backend = make_caption_backend(config.captioner, config.cache_dir, hooks.transport,
                                        hooks.sleep ? hooks.sleep : real_sleeper());
    return caption_keyframes(*backend, extracted.keyframes, config.captioner.parallelism);
  });
  report.timings.caption_ms = elapsed_ms(t);

  report.document = in_stage("assemble", [&] { return assemble_document(report.captions); });

  t = std::chrono::steady_clock::now();
  auto stopwords = in_stage("summarize", [&] { return config.summarizer.load_stopword_set(); });
  auto summary = in_stage("summarize", [&] {
    return summarize(report.document.text, config.summarizer, stopwords);
  });
  for (const auto& s : summary.sentences) report.sentences.push_back(s.raw);
  report.scores = std::move(summary.scores);
  report.title = std::move(summary.title);
  report.summary = std::move(summary.extractive);
  report.timings.summarize_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  report.abstract = in_stage("abstract", [&] {
    return abstract_via_backend(report.document.text, config.abstract, config.summarizer,
                                stopwords, hooks.transport,
                                hooks.sleep ? hooks.sleep : real_sleeper());
  });
  report.timings.abstract_ms = elapsed_ms(t);
  report.timings.total_ms = elapsed_ms(start);

  if (config.deterministic) report.timings = StageTimings{};
  return report;
}

json report_to_json(const PipelineReport& r) {
  json doc;
  doc["tool_version"] = r.tool_version;
  doc["input"] = {{"path", r.input.path},
                  {"kind", std::string(source_kind_name(r.meta.source_kind))},
                  {"width", r.meta.width},
                  {"height", r.meta.height},
                  {"fps_num", r.meta.fps_num},
                  {"fps_den", r.meta.fps_den},
                  {"chroma", std::string(chroma_name(r.meta.chroma))},
                  {"frame_count", r.frame_count}};
  doc["keyframes"] = keyframes_to_json(r.keyframes);
  doc["captions"] = captions_to_json(r.captions);
  json spans = json::array();
  for (const auto& s : r.document.provenance) {
    spans.push_back({{"frame_index", s.frame_index}, {"offset", s.offset}, {"length", s.length}});
  }
  SummaryFields fields{r.document.text, r.sentences, r.scores, r.title, r.summary, r.abstract};
  const auto summary = summary_to_json(fields);
  for (auto it = summary.begin(); it != summary.end(); ++it) doc[it.key()] = it.value();
  doc["provenance"] = std::move(spans);
  doc["config"] = r.config_echo;
  doc["timings_ms"] = {{"extract", r.timings.extract_ms},
                       {"caption", r.timings.caption_ms},
                       {"summarize", r.timings.summarize_ms},
                       {"abstract", r.timings.abstract_ms},
                       {"total", r.timings.total_ms}};
  return doc;
}

void write_report(const PipelineReport& report, const std::filesystem::path& path) {
  write_canonical_json(report_to_json(report), path);
}

}  // namespace clipscribe
