// Copyright 2026 The simulbeam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Replays ASR event logs (or word-by-word sentence feeds) through the
// streaming translator or the retranslation baseline and writes a metrics
// report plus event and display traces.
//
// Exit codes: 0 success, 2 input error, 3 configuration error.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "simulbeam/harness.hpp"

namespace {
constexpr int kInputError = 2;
constexpr int kConfigError = 3;
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming beam-search simultaneous translation: replay and benchmark"};

  std::string mode = "streaming";
  std::string engine_config;
  std::optional<std::size_t> beam;
  std::optional<double> write_threshold;
  std::optional<double> len_a;
  std::optional<double> len_b;
  std::optional<std::size_t> max_expansions;
  std::uint64_t seed = 0;
  bool wall_clock = false;
  simulbeam::RunSpec spec;

  app.add_option("--mode", mode, "streaming or retranslate")
      ->check(CLI::IsMember({"streaming", "retranslate"}));
  app.add_option("--beam", beam, "beam size k (default 4)");
  auto* events = app.add_option("--events", spec.events_path, "JSONL ASR event log");
  auto* sentences = app.add_option("--sentences", spec.sentences_path,
                                   "sentence-per-line text, fed one word per Final event");
  events->excludes(sentences);
  sentences->excludes(events);
  app.add_option("--model", spec.model_config_path, "synthetic model config JSON")->required();
  app.add_option("--refs", spec.references_path, "reference translations, one per sentence");
  app.add_option("--out", spec.output_dir, "output directory")->required();
  app.add_option("--engine-config", engine_config, "engine config JSON");
  app.add_option("--write-threshold", write_threshold, "write probability threshold");
  app.add_option("--len-a", len_a, "output length cap slope");
  app.add_option("--len-b", len_b, "output length cap intercept");
  app.add_option("--max-expansions", max_expansions, "tokens tried per writing hypothesis (0 = all)");
  auto* seed_opt = app.add_option("--seed", seed, "model seed (overrides the model config)");
  app.add_flag("--wall-clock", wall_clock, "record wall-clock time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    spec.mode = simulbeam::mode_from_string(mode);
    if (!engine_config.empty()) spec.engine = simulbeam::load_engine_config(engine_config);
    if (beam) spec.engine.beam_size = *beam;
    if (write_threshold) spec.engine.write_threshold = *write_threshold;
    if (len_a) spec.engine.len_a = *len_a;
    if (len_b) spec.engine.len_b = *len_b;
    if (max_expansions) spec.engine.max_expansions = *max_expansions;
    if (seed_opt->count() > 0) spec.seed = seed;
    spec.record_wall_clock = wall_clock;

    const simulbeam::MetricsReport report = simulbeam::run(spec);
    std::cout << simulbeam::to_json(report) << '\n';
  } catch (const simulbeam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const simulbeam::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const simulbeam::ContractError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
