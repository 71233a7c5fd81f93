// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/gateway/server.hpp"

#include <boost/asio/dispatch.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <charconv>
#include <csignal>
#include <deque>
#include <optional>

namespace amity::gateway {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using nlohmann::json;

constexpr std::size_t kMaxQueuedFrames = 8192;
constexpr auto kReadTimeout = std::chrono::seconds(60);

http::response<http::string_body> make_response(int status, const json& body, unsigned version,
                                                bool keep_alive) {
  http::response<http::string_body> res{static_cast<http::status>(status), version};
  res.set(http::field::server, "amity");
  if (!body.is_null()) {
    res.set(http::field::content_type, "application/json");
    res.body() = body.dump();
  }
  res.keep_alive(keep_alive);
  res.prepare_payload();
  return res;
}

class WsSession : public std::enable_shared_from_this<WsSession>, public Subscriber {
 public:
  WsSession(tcp::socket&& socket, Gateway& gateway, std::string token, std::string user)
      : ws_(std::move(socket)),
        gateway_(gateway),
        token_(std::move(token)),
        user_(std::move(user)) {}

  ~WsSession() override { gateway_.hub().drop(this); }

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.set_option(websocket::stream_base::decorator(
        [](websocket::response_type& res) { res.set(http::field::server, "amity"); }));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void deliver(std::shared_ptr<const std::string> frame) override {
    net::post(ws_.get_executor(),
              [self = shared_from_this(), frame = std::move(frame)] { self->send(frame); });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      gateway_.hub().drop(this);
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());

    if (++frames_in_ > gateway_.config().max_ws_frames) {
      send_json({{"type", "error"}, {"code", "RateLimited"},
                 {"message", "per-connection message cap reached"}});
      close_after_flush_ = true;
      flush_or_close();
      return;
    }
    handle_frame(text);
    if (!close_after_flush_) do_read();
  }

  void handle_frame(const std::string& text) {
    const json frame = json::parse(text, nullptr, false);
    if (frame.is_discarded() || !frame.is_object() || !frame.contains("type") ||
        !frame["type"].is_string()) {
      send_json({{"type", "error"}, {"code", "BadRequest"}, {"message", "malformed frame"}});
      return;
    }
    try {
      gateway_.authenticate(token_);
    } catch (const Error& e) {
      send_json({{"type", "error"}, {"code", to_string(e.code())}, {"message", e.what()}});
      close_after_flush_ = true;
      flush_or_close();
      return;
    }

    const auto type = frame["type"].get<std::string>();
    const auto gid_it = frame.find("group_id");
    if ((type != "subscribe" && type != "unsubscribe") || gid_it == frame.end() ||
        !gid_it->is_string()) {
      send_json({{"type", "error"}, {"code", "BadRequest"},
                 {"message", "expected subscribe or unsubscribe with a group_id"}});
      return;
    }
    const auto gid = gid_it->get<std::string>();
    if (type == "unsubscribe") {
      gateway_.hub().unsubscribe(gid, this);
      send_json({{"type", "unsubscribed"}, {"group_id", gid}});
      return;
    }
    try {
      const auto last = gateway_.hub().subscribe(gateway_.store(), user_, gid, shared_from_this());
      send_json({{"type", "subscribed"}, {"group_id", gid}, {"last_seq", last}});
    } catch (const Error& e) {
      send_json({{"type", "error"}, {"code", to_string(ErrorCode::SubscribeRefused)},
                 {"group_id", gid}, {"message", e.what()}});
    }
  }

  void send_json(const json& j) { send(std::make_shared<const std::string>(j.dump())); }

  // Runs on the connection's strand.
  void send(std::shared_ptr<const std::string> frame) {
    if (closed_) return;
    if (queue_.size() >= kMaxQueuedFrames) {
      // A consumer this far behind is cut off; it recovers via since-seq fetch.
      closed_ = true;
      gateway_.hub().drop(this);
      beast::get_lowest_layer(ws_).close();
      return;
    }
    queue_.push_back(std::move(frame));
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      gateway_.hub().drop(this);
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) {
      do_write();
    } else if (close_after_flush_) {
      flush_or_close();
    }
  }

  void flush_or_close() {
    if (!queue_.empty() || closed_) return;
    closed_ = true;
    gateway_.hub().drop(this);
    ws_.async_close(websocket::close_code::policy_error,
                    [self = shared_from_this()](beast::error_code) {});
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  Gateway& gateway_;
  std::string token_;
  std::string user_;
  std::size_t frames_in_ = 0;
  bool closed_ = false;
  bool close_after_flush_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, Gateway& gateway)
      : stream_(std::move(socket)), gateway_(gateway) {}

  void run() {
    net::dispatch(stream_.get_executor(),
                  beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(gateway_.config().max_body_bytes);
    stream_.expires_after(kReadTimeout);
    http::async_read(stream_, buffer_, *parser_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec == http::error::body_limit) {
      write(make_response(413, error_body(ErrorCode::BodyTooLarge, "request body too large"), 11,
                          false));
      return;
    }
    if (ec) return;

    auto req = parser_->release();
    const std::string target(req.target());
    if (websocket::is_upgrade(req)) {
      upgrade(std::move(req), target);
      return;
    }
    ApiRequest api{std::string(req.method_string()), target,
                   std::string(req[http::field::authorization]), std::move(req.body())};
    const ApiResponse res = gateway_.handle(api);
    write(make_response(res.status, res.body, req.version(), req.keep_alive()));
  }

  void upgrade(http::request<http::string_body> req, const std::string& target) {
    const auto qmark = target.find('?');
    if (target.substr(0, qmark) != "/ws") {
      write(make_response(404, error_body(ErrorCode::NotFound, "no such route"), req.version(),
                          false));
      return;
    }
    const auto query = qmark == std::string::npos
                           ? std::map<std::string, std::string>{}
                           : parse_query(std::string_view(target).substr(qmark + 1));
    std::string token;
    if (auto it = query.find("token"); it != query.end()) token = it->second;
    std::string user;
    try {
      user = gateway_.authenticate(token);
    } catch (const Error& e) {
      write(make_response(http_status(e.code()), error_body(e.code(), e.what()), req.version(),
                          false));
      return;
    }
    stream_.expires_never();
    std::make_shared<WsSession>(stream_.release_socket(), gateway_, std::move(token),
                                std::move(user))
        ->run(std::move(req));
  }

  void write(http::response<http::string_body> response) {
    auto res = std::make_shared<http::response<http::string_body>>(std::move(response));
    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (!res->keep_alive()) {
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
                          return;
                        }
                        self->do_read();
                      });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  Gateway& gateway_;
};

class Listener : public std::enable_shared_from_this<Listener> {
 public:
  Listener(net::io_context& ioc, const tcp::endpoint& endpoint, Gateway& gateway)
      : ioc_(ioc), acceptor_(net::make_strand(ioc)), gateway_(gateway) {
    beast::error_code ec;
    acceptor_.open(endpoint.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(endpoint, ec);
    if (ec) {
      fail(ec == net::error::address_in_use ? ErrorCode::AddressInUse : ErrorCode::IoError,
           "cannot bind " + endpoint.address().to_string() + ":" +
               std::to_string(endpoint.port()) + ": " + ec.message());
    }
    acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) fail(ErrorCode::IoError, "listen failed: " + ec.message());
  }

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }

  void start() { do_accept(); }

 private:
  void do_accept() {
    acceptor_.async_accept(net::make_strand(ioc_),
                           beast::bind_front_handler(&Listener::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec, tcp::socket socket) {
    if (!ec) std::make_shared<HttpSession>(std::move(socket), gateway_)->run();
    if (acceptor_.is_open()) do_accept();
  }

  net::io_context& ioc_;
  tcp::acceptor acceptor_;
  Gateway& gateway_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(int n) : threads(n > 0 ? n : 1), ioc(threads) {}

  int threads;
  net::io_context ioc;
  std::shared_ptr<Listener> listener;
  std::optional<net::signal_set> signals;
  std::vector<std::thread> pool;
  bool started = false;
};

Server::Server(Gateway& gateway, const std::string& host, std::uint16_t port, int threads)
    : impl_(std::make_unique<Impl>(threads)) {
  beast::error_code ec;
  const auto address = net::ip::make_address(host == "localhost" ? "127.0.0.1" : host, ec);
  if (ec) fail(ErrorCode::BadRequest, "not an IP address: " + host);
  impl_->listener = std::make_shared<Listener>(impl_->ioc, tcp::endpoint{address, port}, gateway);
}

Server::~Server() { stop(); }

std::uint16_t Server::port() const noexcept { return impl_->listener->port(); }

void Server::start() {
  if (impl_->started) return;
  impl_->started = true;
  impl_->listener->start();
  for (int i = 0; i < impl_->threads; ++i) {
    impl_->pool.emplace_back([this] { impl_->ioc.run(); });
  }
}

void Server::handle_signals() {
  if (impl_->signals) return;
  impl_->signals.emplace(impl_->ioc, SIGINT, SIGTERM);
  impl_->signals->async_wait([this](beast::error_code ec, int) {
    if (!ec) impl_->ioc.stop();
  });
}

void Server::wait() {
  for (auto& t : impl_->pool) {
    if (t.joinable()) t.join();
  }
}

void Server::run_until_signal() {
  handle_signals();
  start();
  wait();
}

void Server::stop() {
  if (impl_->signals) {
    beast::error_code ec;
    impl_->signals->cancel(ec);
  }
  impl_->ioc.stop();
  for (auto& t : impl_->pool) {
    if (t.joinable()) t.join();
  }
}

std::pair<std::string, std::uint16_t> parse_listen_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  std::string host = colon == std::string::npos ? "127.0.0.1" : addr.substr(0, colon);
  if (host.empty()) host = "0.0.0.0";
  const std::string port_text = colon == std::string::npos ? addr : addr.substr(colon + 1);
  unsigned port = 0;
  const auto r = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (port_text.empty() || r.ec != std::errc() || r.ptr != port_text.data() + port_text.size() ||
      port > 65535) {
    fail(ErrorCode::BadRequest, "invalid listen address \"" + addr + "\"");
  }
  return {host, static_cast<std::uint16_t>(port)};
}

}  // namespace amity::gateway
