// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "amity/gateway/api.hpp"

namespace amity::gateway {

/// HTTP/1.1 + WebSocket front end over a Gateway, run on a small thread pool.
/// Each connection's handlers are serialized on its own strand.
class Server {
 public:
  // Binds immediately; throws AddressInUse when the port is taken.
  Server(Gateway& gateway, const std::string& host, std::uint16_t port, int threads = 4);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const noexcept;
  void start();
  // Routes SIGINT and SIGTERM to stop(); call before start().
  void handle_signals();
  // Joins the pool; returns once the server has stopped.
  void wait();
  // handle_signals(), start(), wait().
  void run_until_signal();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Splits "host:port" (or ":port", or "port"); throws BadRequest.
std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& addr);

}  // namespace amity::gateway
