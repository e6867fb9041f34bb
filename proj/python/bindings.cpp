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

#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "simulbeam/baseline.hpp"
#include "simulbeam/events.hpp"
#include "simulbeam/harness.hpp"
#include "simulbeam/metrics.hpp"
#include "simulbeam/model.hpp"
#include "simulbeam/stream_beam.hpp"
#include "simulbeam/tokenizer.hpp"

namespace py = pybind11;
using namespace simulbeam;

PYBIND11_MODULE(_simulbeam, m) {
  m.doc() = "Streaming beam search for simultaneous machine translation";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", input_error.ptr());

  // events
  py::enum_<EventKind>(m, "EventKind")
      .value("Intermediate", EventKind::Intermediate)
      .value("Final", EventKind::Final);

  py::class_<AsrEvent>(m, "AsrEvent")
      .def(py::init([](EventKind kind, std::string text, std::int64_t seq_no, std::int64_t ts) {
             return AsrEvent{kind, std::move(text), seq_no, ts};
           }),
           py::arg("kind"), py::arg("text"), py::arg("seq_no") = 0, py::arg("timestamp_ms") = 0)
      .def_readwrite("kind", &AsrEvent::kind)
      .def_readwrite("text", &AsrEvent::text)
      .def_readwrite("seq_no", &AsrEvent::seq_no)
      .def_readwrite("timestamp_ms", &AsrEvent::timestamp_ms)
      .def("to_json", [](const AsrEvent& e) { return to_jsonl(e); })
      .def_static("from_json", &asr_event_from_json)
      .def(py::self == py::self)
      .def("__repr__", [](const AsrEvent& e) { return "AsrEvent(" + to_jsonl(e) + ")"; });

  py::class_<TranslationEvent>(m, "TranslationEvent")
      .def(py::init<>())
      .def_readwrite("kind", &TranslationEvent::kind)
      .def_readwrite("text", &TranslationEvent::text)
      .def_readwrite("source_reads", &TranslationEvent::source_reads)
      .def_readwrite("source_words", &TranslationEvent::source_words)
      .def_readwrite("sentence", &TranslationEvent::sentence)
      .def("to_json", [](const TranslationEvent& e) { return to_jsonl(e); })
      .def("__repr__", [](const TranslationEvent& e) { return "TranslationEvent(" + to_jsonl(e) + ")"; });

  py::class_<SourceSplit>(m, "SourceSplit")
      .def_readonly("stable", &SourceSplit::stable)
      .def_readonly("unstable", &SourceSplit::unstable);

  m.def("split_stable_prefix", &split_stable_prefix, py::arg("text"));
  m.def("accumulate_final", &accumulate_final, py::arg("session_buffer"), py::arg("event"));
  m.def("detect_sentence_end", &detect_sentence_end, py::arg("text"));

  // tokenizer
  py::class_<Vocabulary>(m, "Vocabulary")
      .def(py::init<std::vector<std::string>>(), py::arg("entries"))
      .def_static("from_tokens", &Vocabulary::from_tokens, py::arg("tokens"))
      .def_static("load_file", &Vocabulary::load_file, py::arg("path"))
      .def_property_readonly_static("BOS", [](py::object) { return Vocabulary::kBos; })
      .def_property_readonly_static("EOS", [](py::object) { return Vocabulary::kEos; })
      .def_property_readonly_static("UNK", [](py::object) { return Vocabulary::kUnk; })
      .def("__len__", &Vocabulary::size)
      .def("token", &Vocabulary::token, py::arg("id"))
      .def("find", py::overload_cast<std::string_view>(&Vocabulary::find, py::const_), py::arg("text"));

  py::class_<Tokenized>(m, "Tokenized")
      .def_readonly("ids", &Tokenized::ids)
      .def_readonly("has_unk", &Tokenized::has_unk);

  m.def("tokenize", &tokenize, py::arg("vocab"), py::arg("text"));
  m.def("detokenize", &detokenize, py::arg("vocab"), py::arg("ids"));

  // model
  py::class_<DecoderOutput>(m, "DecoderOutput")
      .def_readonly("log_probs", &DecoderOutput::log_probs)
      .def_readonly("write_prob", &DecoderOutput::write_prob)
      .def(py::self == py::self);

  py::class_<ModelState>(m, "ModelState")
      .def(py::init<>())
      .def_property_readonly("read_count", &ModelState::read_count)
      .def_property_readonly("written_count", &ModelState::written_count)
      .def_property_readonly("source_tokens", &ModelState::source_tokens)
      .def_property_readonly("written_tokens", &ModelState::written_tokens)
      .def(py::self == py::self);

  py::class_<SyntheticModelConfig>(m, "SyntheticModelConfig")
      .def(py::init([](std::size_t vocab_size, std::uint64_t seed, int wait_k, double write_sharpness,
                       bool emit_eos) {
             SyntheticModelConfig c;
             c.vocab_size = vocab_size;
             c.seed = seed;
             c.wait_k = wait_k;
             c.write_sharpness = write_sharpness;
             c.emit_eos = emit_eos;
             return c;
           }),
           py::arg("vocab_size"), py::arg("seed") = 0, py::arg("wait_k") = 1,
           py::arg("write_sharpness") = 4.0, py::arg("emit_eos") = true)
      .def_static("load", &load_synthetic_config, py::arg("path"))
      .def_readwrite("seed", &SyntheticModelConfig::seed)
      .def_readwrite("vocab_size", &SyntheticModelConfig::vocab_size)
      .def_readwrite("wait_k", &SyntheticModelConfig::wait_k)
      .def_readwrite("write_sharpness", &SyntheticModelConfig::write_sharpness)
      .def_readwrite("logit_scale", &SyntheticModelConfig::logit_scale)
      .def_readwrite("eos_boost", &SyntheticModelConfig::eos_boost)
      .def_readwrite("eos_penalty", &SyntheticModelConfig::eos_penalty)
      .def_readwrite("emit_eos", &SyntheticModelConfig::emit_eos)
      .def_readwrite("vocab_path", &SyntheticModelConfig::vocab_path);

  py::class_<StreamingModel>(m, "StreamingModel");

  py::class_<SyntheticModel, StreamingModel>(m, "SyntheticModel")
      .def(py::init<SyntheticModelConfig>(), py::arg("config"))
      .def_property_readonly("vocab_size", &SyntheticModel::vocab_size)
      .def("encoder_append", &SyntheticModel::encoder_append, py::arg("state"), py::arg("token"))
      .def("decoder_step",
           [](const SyntheticModel& model, const ModelState& state, TokenId last) {
             auto r = model.decoder_step(state, last);
             return py::make_tuple(r.output, r.state);
           },
           py::arg("state"), py::arg("last_output"))
      .def("decoder_step_batched",
           [](const SyntheticModel& model, const std::vector<ModelState>& states,
              const std::vector<TokenId>& last) {
             py::list out;
             for (auto& r : model.decoder_step_batched(states, last)) {
               out.append(py::make_tuple(r.output, r.state));
             }
             return out;
           },
           py::arg("states"), py::arg("last_outputs"));

  m.def("synthetic_distribution", &synthetic_distribution, py::arg("config"), py::arg("source"),
        py::arg("written"));

  // engine
  py::class_<EngineConfig>(m, "EngineConfig")
      .def(py::init([](std::size_t beam_size, double write_threshold, double len_a, double len_b,
                       std::size_t max_expansions) {
             return EngineConfig{beam_size, write_threshold, len_a, len_b, max_expansions};
           }),
           py::arg("beam_size") = 4, py::arg("write_threshold") = 0.5, py::arg("len_a") = 1.5,
           py::arg("len_b") = 5.0, py::arg("max_expansions") = 0)
      .def_readwrite("beam_size", &EngineConfig::beam_size)
      .def_readwrite("write_threshold", &EngineConfig::write_threshold)
      .def_readwrite("len_a", &EngineConfig::len_a)
      .def_readwrite("len_b", &EngineConfig::len_b)
      .def_readwrite("max_expansions", &EngineConfig::max_expansions)
      .def("to_json", [](const EngineConfig& c) { return to_json(c); });

  m.def("output_cap", &output_cap, py::arg("config"), py::arg("input_tokens"));

  py::class_<CostCounters>(m, "CostCounters")
      .def(py::init<>())
      .def_readonly("decoder_steps", &CostCounters::decoder_steps)
      .def_readonly("encoder_steps", &CostCounters::encoder_steps)
      .def_readonly("batched_calls", &CostCounters::batched_calls)
      .def_readonly("wall_clock_ms", &CostCounters::wall_clock_ms)
      .def("__repr__", [](const CostCounters& c) { return "CostCounters(" + to_json(c) + ")"; });

  py::class_<SentenceResult>(m, "SentenceResult")
      .def_readonly("source", &SentenceResult::source)
      .def_readonly("source_tokens", &SentenceResult::source_tokens)
      .def_readonly("output_tokens", &SentenceResult::output_tokens)
      .def_readonly("translation", &SentenceResult::translation);

  py::class_<StreamingTranslator>(m, "StreamingTranslator")
      .def(py::init<const Vocabulary&, const StreamingModel&, EngineConfig>(), py::arg("vocab"),
           py::arg("model"), py::arg("config") = EngineConfig{}, py::keep_alive<1, 2>(),
           py::keep_alive<1, 3>())
      .def("process_event", &StreamingTranslator::process_event, py::arg("event"))
      .def("finish", &StreamingTranslator::finish)
      .def_property_readonly("counters", &StreamingTranslator::counters)
      .def_property_readonly("sentences", &StreamingTranslator::sentences)
      .def_property_readonly("final_text", &StreamingTranslator::final_text)
      .def_property_readonly("transcript", &StreamingTranslator::transcript);

  py::class_<RetranslationSession>(m, "RetranslationSession")
      .def(py::init<const Vocabulary&, const StreamingModel&, EngineConfig>(), py::arg("vocab"),
           py::arg("model"), py::arg("config") = EngineConfig{}, py::keep_alive<1, 2>(),
           py::keep_alive<1, 3>())
      .def("process_event", &RetranslationSession::process_event, py::arg("event"))
      .def("finish", &RetranslationSession::finish)
      .def_property_readonly("counters", &RetranslationSession::counters)
      .def_property_readonly("sentences", &RetranslationSession::sentences)
      .def_property_readonly("decode_count", &RetranslationSession::decode_count);

  m.def(
      "beam_search_full",
      [](const SyntheticModel& model, const TokenSeq& input, std::size_t k, std::size_t cap) {
        CostCounters counters;
        TokenSeq out = beam_search_full(NonStreamingModel(model), input, k, cap, counters);
        return py::make_tuple(out, counters);
      },
      py::arg("model"), py::arg("input"), py::arg("k"), py::arg("cap"),
      "Returns (tokens, counters).");

  // metrics
  m.def(
      "bleu",
      [](const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
        std::vector<WordSeq> r;
        std::vector<WordSeq> h;
        for (const auto& s : refs) r.push_back(split_words(s));
        for (const auto& s : hyps) h.push_back(split_words(s));
        return bleu(r, h);
      },
      py::arg("references"), py::arg("hypotheses"), "Corpus BLEU over whitespace-split sentences.");
  m.def(
      "average_lag",
      [](const std::vector<double>& delays, std::size_t source_len) {
        return average_lag(LagTrace{delays, source_len, delays.size()});
      },
      py::arg("delays"), py::arg("source_len"));
  m.def(
      "char_flicker", [](const std::vector<std::string>& states) { return char_flicker(DisplayTrace{states}); },
      py::arg("states"));

  // harness
  m.def("simulate_word_feed", &simulate_word_feed, py::arg("sentence"), py::arg("first_seq_no") = 0);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("bleu", &MetricsReport::bleu)
      .def_readonly("average_lag", &MetricsReport::average_lag)
      .def_readonly("char_flicker_pct", &MetricsReport::char_flicker_pct)
      .def_readonly("counters", &MetricsReport::counters)
      .def("to_json", [](const MetricsReport& r) { return to_json(r); });

  m.def(
      "run_session",
      [](const std::string& mode, const Vocabulary& vocab, const SyntheticModel& model,
         const EngineConfig& engine, const std::vector<AsrEvent>& events,
         std::optional<std::vector<std::string>> references) {
        RunOutput out = run_session(mode_from_string(mode), vocab, model, engine, events, references);
        py::list translated;
        for (const auto& [step, ev] : out.events) translated.append(py::make_tuple(step, ev));
        py::dict result;
        result["report"] = out.report;
        result["events"] = translated;
        result["display"] = out.display.states;
        return result;
      },
      py::arg("mode"), py::arg("vocab"), py::arg("model"), py::arg("engine"), py::arg("events"),
      py::arg("references") = py::none());

  py::class_<RunSpec>(m, "RunSpec")
      .def(py::init<>())
      .def_property(
          "mode", [](const RunSpec& s) { return std::string(to_string(s.mode)); },
          [](RunSpec& s, const std::string& v) { s.mode = mode_from_string(v); })
      .def_readwrite("engine", &RunSpec::engine)
      .def_readwrite("events_path", &RunSpec::events_path)
      .def_readwrite("sentences_path", &RunSpec::sentences_path)
      .def_readwrite("model_config_path", &RunSpec::model_config_path)
      .def_readwrite("seed", &RunSpec::seed)
      .def_readwrite("references_path", &RunSpec::references_path)
      .def_readwrite("output_dir", &RunSpec::output_dir)
      .def_readwrite("record_wall_clock", &RunSpec::record_wall_clock);

  m.def("run", &run, py::arg("spec"));
}
