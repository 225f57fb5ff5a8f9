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

// clipscribe: video -> key-frames -> captions -> title and abstract.
//
//   clipscribe run        full pipeline, writes a JSON report
//   clipscribe keyframes  key-frame selection only
//   clipscribe caption    caption a key-frame list
//   clipscribe summarize  title / extract / abstract of a text or caption list
//   clipscribe score      BLEU and CIDEr of candidate captions
//
// Exit codes: 0 success, 2 config error, 3 input/parse error, 4 backend
// error, 5 I/O error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "clipscribe/canonical_json.hpp"
#include "clipscribe/error.hpp"
#include "clipscribe/metrics.hpp"
#include "clipscribe/pipeline.hpp"

namespace {

using clipscribe::Error;
using clipscribe::ErrorCode;
using json = nlohmann::json;

// Every flag is optional so that only flags actually given override the
// config file, which in turn overrides the built-in defaults.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> input;
  std::optional<std::string> input_kind;
  std::optional<std::string> pattern;
  std::optional<double> threshold;
  std::optional<std::size_t> min_gap;
  std::optional<std::size_t> max_keyframes;
  std::optional<std::string> mode;
  std::optional<std::size_t> uniform_count;
  std::optional<std::size_t> bins;
  std::optional<std::string> captioner;
  std::optional<std::string> endpoint;
  std::optional<std::string> manifest;
  std::optional<int> timeout_ms;
  std::optional<int> max_retries;
  std::optional<std::size_t> parallelism;
  std::optional<std::size_t> top_n;
  std::optional<double> damping;
  std::optional<std::string> stopwords;
  std::optional<std::string> abstract_backend;
  std::optional<std::string> abstract_endpoint;
  std::optional<std::size_t> max_words;
  std::optional<std::string> output;
  std::optional<std::string> cache_dir;
  bool deterministic = false;
};

void add_input_flags(CLI::App& app, Flags& f) {
  app.add_option("--input", f.input, "Y4M file, image directory, or - for stdin");
  app.add_option("--input-kind", f.input_kind, "y4m | images")
      ->check(CLI::IsMember({"y4m", "images"}));
  app.add_option("--pattern", f.pattern, "glob for image-sequence files (default *)");
}

void add_keyframe_flags(CLI::App& app, Flags& f, const std::string& threshold_flag) {
  app.add_option(threshold_flag, f.threshold, "L1 histogram distance in (0, 2]");
  app.add_option("--min-gap", f.min_gap, "minimum frames between key-frames");
  app.add_option("--max-keyframes", f.max_keyframes, "cap on selected key-frames");
  app.add_option("--mode", f.mode, "change_detect | uniform")
      ->check(CLI::IsMember({"change_detect", "uniform"}));
  app.add_option("--uniform-count", f.uniform_count, "k for uniform mode");
  app.add_option("--bins", f.bins, "histogram bins (default 64)");
}

void add_captioner_flags(CLI::App& app, Flags& f) {
  app.add_option("--captioner", f.captioner, "http | scripted | procedural")
      ->check(CLI::IsMember({"http", "scripted", "procedural"}));
  app.add_option("--endpoint", f.endpoint, "captioning service base URL");
  app.add_option("--manifest", f.manifest, "scripted captions (JSON index -> caption)");
  app.add_option("--timeout-ms", f.timeout_ms, "per-request timeout");
  app.add_option("--max-retries", f.max_retries, "retries after the first attempt");
  app.add_option("--parallelism", f.parallelism, "in-flight caption requests");
  app.add_option("--cache-dir", f.cache_dir, "persistent caption cache directory");
}

void add_summarizer_flags(CLI::App& app, Flags& f) {
  app.add_option("--top-n", f.top_n, "sentences in the extractive summary");
  app.add_option("--damping", f.damping, "ranking damping factor in (0, 1)");
  app.add_option("--stopwords", f.stopwords, "stop-word list, one per line");
  app.add_option("--abstract-backend", f.abstract_backend, "http | fallback")
      ->check(CLI::IsMember({"http", "fallback"}));
  app.add_option("--abstract-endpoint", f.abstract_endpoint,
                 "summarization service base URL (defaults to --endpoint)");
  app.add_option("--max-words", f.max_words, "abstract word budget");
}

clipscribe::PipelineConfig resolve_config(const Flags& f) {
  using namespace clipscribe;
  PipelineConfig c;
  if (f.config) c = load_config_file(*f.config, c);

  if (f.input) c.input.path = *f.input;
  if (f.input_kind) c.input.kind = *f.input_kind == "images" ? InputKind::kImages : InputKind::kY4m;
  if (f.pattern) c.input.pattern = *f.pattern;

  if (f.threshold) c.keyframes.threshold = *f.threshold;
  if (f.min_gap) c.keyframes.min_gap = *f.min_gap;
  if (f.max_keyframes) c.keyframes.max_keyframes = *f.max_keyframes;
  if (f.mode) {
    c.keyframes.mode = *f.mode == "uniform" ? SelectionMode::kUniform : SelectionMode::kChangeDetect;
  }
  if (f.uniform_count) c.keyframes.uniform_count = *f.uniform_count;
  if (f.bins) c.keyframes.bins = *f.bins;

  if (f.captioner) {
    c.captioner.kind = *f.captioner == "http"       ? BackendKind::kHttp
                       : *f.captioner == "scripted" ? BackendKind::kScriptedMock
                                                    : BackendKind::kProceduralMock;
  }
  if (f.endpoint) c.captioner.endpoint = *f.endpoint;
  if (f.manifest) c.captioner.manifest = *f.manifest;
  if (f.timeout_ms) c.captioner.timeout_ms = c.abstract.timeout_ms = *f.timeout_ms;
  if (f.max_retries) c.captioner.max_retries = c.abstract.max_retries = *f.max_retries;
  if (f.parallelism) c.captioner.parallelism = *f.parallelism;
  if (f.cache_dir) c.cache_dir = *f.cache_dir;

  if (f.top_n) c.summarizer.top_n = *f.top_n;
  if (f.damping) c.summarizer.damping = *f.damping;
  if (f.stopwords) c.summarizer.stopwords = *f.stopwords;
  if (f.abstract_backend) {
    c.abstract.backend = *f.abstract_backend == "http" ? AbstractSpec::Backend::kHttp
                                                       : AbstractSpec::Backend::kFallback;
  }
  if (f.abstract_endpoint) {
    c.abstract.endpoint = *f.abstract_endpoint;
  } else if (!c.abstract.endpoint && f.endpoint) {
    c.abstract.endpoint = *f.endpoint;
  }
  if (f.max_words) c.abstract.max_words = *f.max_words;

  if (f.output) c.output = *f.output;
  if (f.deterministic) c.deterministic = true;
  return c;
}

std::string read_text(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  auto doc = json::parse(read_text(path), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kInvalidConfig, path + " is not valid JSON");
  return doc;
}

std::string output_path(const clipscribe::PipelineConfig& c) {
  return c.output ? c.output->string() : "-";
}

void require_input(const clipscribe::PipelineConfig& c) {
  if (c.input.path.empty()) throw Error(ErrorCode::kInvalidConfig, "--input is required");
  if (c.input.path != "-" && !std::filesystem::exists(c.input.path)) {
    throw Error(ErrorCode::kInvalidConfig, "input does not exist: " + c.input.path);
  }
}

int cmd_run(const Flags& f) {
  auto config = resolve_config(f);
  auto report = clipscribe::run_pipeline(config);
  clipscribe::write_report(report, output_path(config));
  return 0;
}

int cmd_keyframes(const Flags& f) {
  auto config = resolve_config(f);
  require_input(config);
  config.keyframes.validate();
  auto source = clipscribe::open_input(config.input);
  auto result = clipscribe::extract_keyframes(*source, config.keyframes);
  auto records = clipscribe::keyframe_records(result.keyframes);
  clipscribe::write_canonical_json(clipscribe::keyframes_to_json(records), output_path(config));
  return 0;
}

int cmd_caption(const Flags& f, const std::string& keyframes_path) {
  auto config = resolve_config(f);
  require_input(config);
  config.captioner.validate();
  config.keyframes.validate();
  auto records = clipscribe::keyframes_from_json(read_json(keyframes_path));
  auto source = clipscribe::open_input(config.input);
  auto keyframes = clipscribe::materialize_keyframes(*source, records, config.keyframes.bins);
  auto backend = clipscribe::make_caption_backend(config.captioner, config.cache_dir);
  auto captions =
      clipscribe::caption_keyframes(*backend, keyframes, config.captioner.parallelism);
  clipscribe::write_canonical_json(clipscribe::captions_to_json(captions), output_path(config));
  return 0;
}

int cmd_summarize(const Flags& f, const std::optional<std::string>& text_file,
                  const std::optional<std::string>& captions_file, bool as_json) {
  auto config = resolve_config(f);
  config.summarizer.validate();
  std::string document;
  if (captions_file) {
    auto captions = clipscribe::captions_from_json(read_json(*captions_file));
    document = clipscribe::assemble_document(captions).text;
  } else if (text_file) {
    document = read_text(*text_file);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "one of --text-file or --captions is required");
  }
  auto fields = clipscribe::summarize_document(document, config);
  if (as_json) {
    clipscribe::write_canonical_json(clipscribe::summary_to_json(fields), output_path(config));
    return 0;
  }
  std::ostringstream out;
  out << "title: " << fields.title << '\n' << "summary: " << fields.summary << '\n';
  if (config.output && config.output->string() != "-") {
    std::ofstream file(*config.output, std::ios::binary | std::ios::trunc);
    file << out.str();
    if (!file) throw Error(ErrorCode::kIoFailure, "cannot write " + config.output->string());
  } else {
    std::cout << out.str();
  }
  return 0;
}

int cmd_score(const std::string& candidates_path, const std::string& references_path,
              const std::optional<std::string>& output) {
  auto candidates = read_json(candidates_path);
  auto references = read_json(references_path);
  if (!candidates.is_object() || !references.is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "candidates and references must be JSON objects");
  }
  std::vector<clipscribe::CiderItem> items;
  try {
    for (const auto& [id, text] : candidates.items()) {
      clipscribe::CiderItem item;
      item.id = id;
      item.candidate = clipscribe::metric_tokens(text.get<std::string>());
      auto it = references.find(id);
      if (it == references.end() || !it->is_array()) {
        throw Error(ErrorCode::kEmptyReferences, "no references for item " + id);
      }
      for (const auto& ref : *it) item.references.push_back(clipscribe::metric_tokens(ref.get<std::string>()));
      items.push_back(std::move(item));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("malformed caption file: ") + e.what());
  }

  auto cider = clipscribe::cider(items);
  json per_item = json::object();
  double bleu_total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double b = clipscribe::bleu(items[i].candidate, items[i].references);
    bleu_total += b;
    per_item[items[i].id] = {{"bleu", b}, {"cider", cider.scores[i]}};
  }
  json doc = {{"items", per_item},
              {"mean", {{"bleu", bleu_total / static_cast<double>(items.size())},
                        {"cider", cider.mean}}},
              {"variants",
               {{"bleu", "BLEU-4, clipped precision, brevity penalty, no smoothing"},
                {"cider", "CIDEr n=1..4, tf-idf cosine, no length penalty, no x10 scaling"}}}};
  clipscribe::write_canonical_json(doc, output.value_or("-"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clipscribe: descriptive titles and abstracts for video clips"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CLIPSCRIBE_VERSION));

  Flags f;

  auto* run = app.add_subcommand("run", "full pipeline: video to title and abstract report");
  run->add_option("--config", f.config, "JSON config file (flags take precedence)");
  add_input_flags(*run, f);
  add_keyframe_flags(*run, f, "--keyframe-threshold");
  add_captioner_flags(*run, f);
  add_summarizer_flags(*run, f);
  run->add_option("--output", f.output, "report path (default stdout)");
  run->add_flag("--deterministic", f.deterministic, "zero timings for byte-stable reports");

  auto* kf = app.add_subcommand("keyframes", "select key-frames, emit a JSON list");
  kf->add_option("--config", f.config, "JSON config file");
  add_input_flags(*kf, f);
  add_keyframe_flags(*kf, f, "--threshold");
  kf->add_option("--output", f.output, "output path (default stdout)");

  std::string keyframes_path;
  auto* cap = app.add_subcommand("caption", "caption a key-frame list, emit JSON captions");
  cap->add_option("--config", f.config, "JSON config file");
  add_input_flags(*cap, f);
  cap->add_option("--keyframes", keyframes_path, "output of the keyframes subcommand")
      ->required();
  cap->add_option("--bins", f.bins, "histogram bins (default 64)");
  add_captioner_flags(*cap, f);
  cap->add_option("--output", f.output, "output path (default stdout)");

  std::optional<std::string> text_file, captions_file;
  bool as_json = false;
  auto* sum = app.add_subcommand("summarize", "title and extractive summary of a document");
  sum->add_option("--config", f.config, "JSON config file");
  auto* text_opt = sum->add_option("--text-file", text_file, "plain-text document (- for stdin)");
  sum->add_option("--captions", captions_file, "caption list from the caption subcommand")
      ->excludes(text_opt);
  add_summarizer_flags(*sum, f);
  sum->add_option("--endpoint", f.endpoint, "summarization service base URL");
  sum->add_flag("--json", as_json, "emit JSON with ranking details and abstract");
  sum->add_option("--output", f.output, "output path (default stdout)");

  std::string candidates_path, references_path;
  std::optional<std::string> score_output;
  auto* score = app.add_subcommand("score", "BLEU and CIDEr for candidate captions");
  score->add_option("--candidates", candidates_path, "JSON: item id -> caption")->required();
  score->add_option("--references", references_path, "JSON: item id -> [captions]")->required();
  score->add_option("--output", score_output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(f);
    if (kf->parsed()) return cmd_keyframes(f);
    if (cap->parsed()) return cmd_caption(f, keyframes_path);
    if (sum->parsed()) return cmd_summarize(f, text_file, captions_file, as_json);
    if (score->parsed()) return cmd_score(candidates_path, references_path, score_output);
  } catch (const Error& e) {
    std::cerr << "clipscribe: " << e.what() << '\n';
    return clipscribe::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "clipscribe: internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
