// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>

#include "amity/corpus.hpp"
#include "amity/dazai.hpp"
#include "amity/error.hpp"
#include "amity/evaluation.hpp"
#include "amity/model_io.hpp"
#include "amity/neuralnet.hpp"
#include "amity/textpipe.hpp"

namespace py = pybind11;
using namespace amity;

namespace {

py::dict stats_dict(const corpus::CorpusStats& s) {
  py::dict d;
  d["tags"] = s.tags;
  d["question"] = s.question;
  d["greeting"] = s.greeting;
  d["descriptive"] = s.descriptive;
  d["patterns"] = s.pattern_count;
  d["responses"] = s.response_count;
  d["max_pattern_tokens"] = s.max_pattern_tokens;
  return d;
}

py::dict reply_dict(const dazai::BotReply& r) {
  py::dict d;
  d["tag"] = r.tag;
  d["confidence"] = r.confidence;
  d["reply"] = r.reply;
  d["fallback"] = r.fallback;
  return d;
}

std::vector<nn::EvalItem> to_items(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::vector<nn::EvalItem> items;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    items.push_back({rows[i].first, rows[i].second, i + 1});
  }
  return items;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "AMITY intent model, corpus and evaluation bindings";

  static py::exception<Error> amity_error(m, "AmityError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(amity_error.ptr())(py::str(e.what()));
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(amity_error.ptr(), inst.ptr());
    }
  });

  // ---- text ----
  m.def("tokenize", &textpipe::tokenize, py::arg("text"));

  py::class_<textpipe::Vocabulary>(m, "Vocabulary")
      .def_property_readonly("tokens", &textpipe::Vocabulary::tokens)
      .def_property_readonly("max_len", &textpipe::Vocabulary::max_len)
      .def("__len__", &textpipe::Vocabulary::vocab_size)
      .def("index_of", &textpipe::Vocabulary::index_of, py::arg("token"))
      .def("encode", [](const textpipe::Vocabulary& v, std::string_view text) {
        return textpipe::encode(v, text);
      }, py::arg("text"));
  m.def("fit_vocabulary", [](const std::vector<std::string>& texts) {
    return textpipe::fit_vocabulary(std::span<const std::string>(texts));
  }, py::arg("texts"));

  // ---- corpus ----
  py::class_<corpus::Intent>(m, "Intent")
      .def_readonly("tag", &corpus::Intent::tag)
      .def_readonly("patterns", &corpus::Intent::patterns)
      .def_readonly("responses", &corpus::Intent::responses)
      .def_property_readonly("category",
                             [](const corpus::Intent& i) { return std::string(to_string(i.category)); })
      .def("__repr__", [](const corpus::Intent& i) { return "<Intent " + i.tag + ">"; });

  py::class_<corpus::IntentCorpus>(m, "Corpus")
      .def_readonly("version", &corpus::IntentCorpus::version)
      .def_readonly("intents", &corpus::IntentCorpus::intents)
      .def_property_readonly("tags", [](const corpus::IntentCorpus& c) {
        std::vector<std::string> tags;
        for (const auto& i : c.intents) tags.push_back(i.tag);
        return tags;
      })
      .def("__len__", &corpus::IntentCorpus::tag_count)
      .def("stats", [](const corpus::IntentCorpus& c) { return stats_dict(corpus::corpus_stats(c)); })
      .def("to_json", &corpus::corpus_to_json)
      .def("__eq__", [](const corpus::IntentCorpus& a, const corpus::IntentCorpus& b) { return a == b; });
  m.def("load_corpus", &corpus::load_corpus, py::arg("path"));
  m.def("parse_corpus", &corpus::parse_corpus, py::arg("json_text"));

  // ---- model ----
  py::class_<nn::TrainedModel, std::shared_ptr<nn::TrainedModel>>(m, "Model")
      .def_readonly("tags", &nn::TrainedModel::tags)
      .def_readonly("responses", &nn::TrainedModel::responses)
      .def_readonly("vocab", &nn::TrainedModel::vocab)
      .def_property_readonly("parameter_count",
                             [](const nn::TrainedModel& t) { return t.params.parameter_count(); })
      .def("predict", [](const nn::TrainedModel& t, std::string_view text) {
        const auto p = nn::predict(t, text);
        return py::make_tuple(t.tags[p.tag_index], p.confidence, p.probabilities);
      }, py::arg("text"), "(tag, confidence, probabilities) for one utterance")
      .def("reply", [](const nn::TrainedModel& t, std::string_view text, std::uint64_t seed,
                       double threshold) {
        Rng rng(seed);
        return reply_dict(dazai::compose_reply(t, text, rng, threshold));
      }, py::arg("text"), py::arg("seed") = 0, py::arg("threshold") = dazai::kDefaultThreshold)
      .def("training_accuracy", &nn::training_accuracy, py::arg("corpus"))
      .def("attach_responses", &nn::attach_corpus_responses, py::arg("corpus"))
      .def("save", [](const nn::TrainedModel& t, const std::filesystem::path& p) {
        nn::save_model(t, p);
      }, py::arg("path"))
      .def("to_bytes", [](const nn::TrainedModel& t) { return py::bytes(nn::encode_model(t)); })
      .def("__eq__", [](const nn::TrainedModel& a, const nn::TrainedModel& b) { return a == b; });

  m.def("load_model", [](const std::filesystem::path& p) {
    return std::make_shared<nn::TrainedModel>(nn::load_model(p));
  }, py::arg("path"));
  m.def("model_from_bytes", [](const py::bytes& b) {
    return std::make_shared<nn::TrainedModel>(nn::decode_model(std::string_view(b)));
  }, py::arg("data"));

  m.def("train", [](const corpus::IntentCorpus& c, std::size_t epochs, std::uint64_t seed,
                    std::size_t batch_size, double learning_rate, std::size_t embedding_dim,
                    std::size_t lstm_units, std::size_t dense_units) {
    nn::TrainConfig tc;
    tc.epochs = epochs;
    tc.seed = seed;
    tc.batch_size = batch_size;
    tc.learning_rate = learning_rate;
    nn::ModelConfig mc;
    mc.embedding_dim = embedding_dim;
    mc.lstm_units = lstm_units;
    mc.dense_units = dense_units;
    nn::TrainResult r;
    {
      py::gil_scoped_release release;
      r = nn::train(c, mc, tc);
    }
    std::vector<std::pair<double, double>> history;
    for (const auto& e : r.history) history.emplace_back(e.loss, e.accuracy);
    return py::make_tuple(std::make_shared<nn::TrainedModel>(std::move(r.model)), history);
  }, py::arg("corpus"), py::arg("epochs") = 25, py::arg("seed") = 7, py::arg("batch_size") = 16,
     py::arg("learning_rate") = 1e-3, py::arg("embedding_dim") = 100, py::arg("lstm_units") = 32,
     py::arg("dense_units") = 128,
     "Returns (model, [(loss, accuracy) per epoch]).");

  // ---- evaluation ----
  py::class_<nn::TagScore>(m, "TagScore")
      .def_readonly("tag", &nn::TagScore::tag)
      .def_readonly("correct", &nn::TagScore::correct)
      .def_readonly("total", &nn::TagScore::total);

  py::class_<nn::EvalReport>(m, "EvalReport")
      .def_readonly("correct", &nn::EvalReport::correct)
      .def_readonly("total", &nn::EvalReport::total)
      .def_readonly("accuracy", &nn::EvalReport::accuracy)
      .def_readonly("per_tag", &nn::EvalReport::per_tag)
      .def_readonly("confusion", &nn::EvalReport::confusion)
      .def("overall_line", &nn::EvalReport::overall_line)
      .def("per_tag_table", &nn::EvalReport::per_tag_table);

  m.def("evaluate", [](const nn::TrainedModel& t,
                       const std::vector<std::pair<std::string, std::string>>& rows) {
    const auto items = to_items(rows);
    return nn::evaluate(t, items);
  }, py::arg("model"), py::arg("items"), "items: [(utterance, expected_tag)]");
  m.def("read_evalset", [](const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) fail(ErrorCode::FileNotFound, "evalset not found: " + p.string());
    std::vector<std::pair<std::string, std::string>> rows;
    for (auto& item : nn::parse_evalset(in)) rows.emplace_back(item.utterance, item.expected_tag);
    return rows;
  }, py::arg("path"));
}
