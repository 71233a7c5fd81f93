// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

// amityctl: train and evaluate the intent model, seed content, run the
// server, or chat with a model locally.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "amity/corpus.hpp"
#include "amity/dazai.hpp"
#include "amity/error.hpp"
#include "amity/evaluation.hpp"
#include "amity/gateway/api.hpp"
#include "amity/gateway/server.hpp"
#include "amity/model_io.hpp"
#include "amity/neuralnet.hpp"
#include "amity/store.hpp"

namespace fs = std::filesystem;
using namespace amity;

namespace {

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) fail(ErrorCode::FileNotFound, std::string(what) + " not found: " + path);
}

void require_parent_dir(const std::string& path) {
  const fs::path parent = fs::absolute(path).parent_path();
  if (!fs::is_directory(parent)) {
    fail(ErrorCode::FileNotFound, "output directory does not exist: " + parent.string());
  }
}

int cmd_train(const std::string& corpus_path, const std::string& out, std::size_t epochs,
              std::uint64_t seed) {
  require_file(corpus_path, "corpus");
  require_parent_dir(out);
  const auto corpus = corpus::load_corpus(corpus_path);

  nn::TrainConfig tc;
  tc.epochs = epochs;
  tc.seed = seed;
  const auto result = nn::train(corpus, nn::ModelConfig{}, tc);

  std::printf("%5s  %10s  %8s\n", "epoch", "loss", "accuracy");
  for (std::size_t e = 0; e < result.history.size(); ++e) {
    std::printf("%5zu  %10.6f  %8.4f\n", e + 1, result.history[e].loss,
                result.history[e].accuracy);
  }
  const double acc = result.history.empty() ? nn::training_accuracy(result.model, corpus)
                                            : result.history.back().accuracy;
  nn::save_model(result.model, out);
  std::printf("epochs=%zu train_acc=%.4f\n", result.history.size(), acc);
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& evalset_path) {
  require_file(model_path, "model");
  require_file(evalset_path, "evalset");
  const auto model = nn::load_model(model_path);
  std::ifstream in(evalset_path);
  const auto items = nn::parse_evalset(in);
  const auto report = nn::evaluate(model, items);
  std::cout << report.overall_line() << '\n' << report.per_tag_table();
  return 0;
}

std::shared_ptr<const nn::TrainedModel> load_serving_model(const std::string& model_path,
                                                           const std::string& corpus_path) {
  if (model_path.empty()) return nullptr;
  require_file(model_path, "model");
  auto model = nn::load_model(model_path);
  if (!corpus_path.empty()) {
    require_file(corpus_path, "corpus");
    nn::attach_corpus_responses(model, corpus::load_corpus(corpus_path));
  }
  return std::make_shared<const nn::TrainedModel>(std::move(model));
}

int cmd_serve(const std::string& store_dir, const std::string& model_path,
              const std::string& corpus_path, const std::string& addr, int threads,
              bool fast_hash) {
  const auto [host, port] = gateway::parse_listen_address(addr);
  auto model = load_serving_model(model_path, corpus_path);
  auto store = store::Store::open(store_dir);

  gateway::GatewayConfig config;
  if (fast_hash) config.password = gateway::PasswordHasher::minimal();
  gateway::Gateway gw(*store, model, config);
  gateway::Server server(gw, host, port, threads);
  server.handle_signals();
  server.start();
  std::printf("listening on %s:%u\n", host.c_str(), static_cast<unsigned>(server.port()));
  if (!model) std::printf("no model loaded; chatbot requests will get ModelUnavailable\n");
  std::fflush(stdout);
  server.wait();
  std::printf("shutting down after %llu events\n",
              static_cast<unsigned long long>(store->event_count()));
  return 0;
}

int cmd_seed(const std::string& store_dir, const std::string& content_path) {
  require_file(content_path, "content file");
  std::ifstream in(content_path, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto content = store::parse_content(text);
  auto store = store::Store::open(store_dir);
  store->seed_content(content);
  std::printf("seeded %zu suggestion topics and %zu doctors\n", content.suggestions.size(),
              content.doctors.size());
  return 0;
}

int cmd_chat(const std::string& model_path, const std::string& corpus_path, std::uint64_t seed) {
  auto model = load_serving_model(model_path, corpus_path);
  dazai::Chatbot bot(model);
  auto session = dazai::new_session("local", "local");
  Rng rng(seed);
  std::int64_t clock = 0;
  std::string line;
  for (;;) {
    std::cout << "you> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == "quit" || line == "exit") break;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto reply = bot.respond(session, line, rng, ++clock);
    std::cout << "dazai> " << reply.reply << '\n';
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AMITY operations tool"};
  app.require_subcommand(1);

  std::string corpus_path, out, model_path, evalset, store_dir, content, addr = "127.0.0.1:8080";
  std::size_t epochs = 25;
  std::uint64_t seed = 7;
  int threads = 4;
  bool fast_hash = false;

  auto* train = app.add_subcommand("train", "Train a model from an intents corpus");
  train->add_option("--corpus", corpus_path, "Intents JSON file")->required();
  train->add_option("--out", out, "Model artifact to write")->required();
  train->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
  train->add_option("--seed", seed, "Random seed")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Score a model against a tab-separated evalset");
  eval->add_option("--model", model_path, "Model artifact")->required();
  eval->add_option("--evalset", evalset, "Lines of <utterance>\\t<expected tag>")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP/WebSocket gateway");
  serve->add_option("--store", store_dir, "Event store directory")->required();
  serve->add_option("--model", model_path, "Model artifact (chatbot disabled without it)");
  serve->add_option("--corpus", corpus_path, "Corpus whose responses replace the artifact's");
  serve->add_option("--addr", addr, "Listen address host:port")->capture_default_str();
  serve->add_option("--threads", threads, "I/O threads")->capture_default_str();
  serve->add_flag("--fast-hash", fast_hash, "Cheapest password hashing (testing only)");

  auto* seed_cmd = app.add_subcommand("seed", "Load suggestions and doctors into a store");
  seed_cmd->add_option("--store", store_dir, "Event store directory")->required();
  seed_cmd->add_option("--content", content, "Content JSON file")->required();

  auto* chat = app.add_subcommand("chat", "Chat with a model on stdin/stdout");
  chat->add_option("--model", model_path, "Model artifact")->required();
  chat->add_option("--corpus", corpus_path, "Corpus whose responses replace the artifact's");
  chat->add_option("--seed", seed, "Seed for reply selection")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "amityctl: error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(corpus_path, out, epochs, seed);
    if (*eval) return cmd_eval(model_path, evalset);
    if (*serve) return cmd_serve(store_dir, model_path, corpus_path, addr, threads, fast_hash);
    if (*seed_cmd) return cmd_seed(store_dir, content);
    if (*chat) return cmd_chat(model_path, corpus_path, seed);
  } catch (const Error& e) {
    std::cerr << "amityctl: error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "amityctl: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
