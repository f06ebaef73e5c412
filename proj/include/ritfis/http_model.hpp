/* Copyright 2026 The RITFIS Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "ritfis/threat_model.hpp"

namespace ritfis {

// Gates outgoing requests: at most `max_in_flight` concurrent requests and at
// least `min_interval` between consecutive request starts.
class RateLimiter {
 public:
  RateLimiter(std::size_t max_in_flight, std::chrono::milliseconds min_interval)
      : max_in_flight_(max_in_flight == 0 ? 1 : max_in_flight), min_interval_(min_interval) {}

  class Permit {
   public:
    explicit Permit(RateLimiter* owner) : owner_(owner) {}
    Permit(Permit&& o) noexcept : owner_(std::exchange(o.owner_, nullptr)) {}
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    Permit& operator=(Permit&&) = delete;
    ~Permit() {
      if (owner_) owner_->release();
    }

   private:
    RateLimiter* owner_;
  };

  Permit acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
    auto now = std::chrono::steady_clock::now();
    auto start = std::max(now, next_start_);
    next_start_ = start + min_interval_;
    lock.unlock();
    std::this_thread::sleep_until(start);
    return Permit(this);
  }

  std::size_t in_flight() const {
    std::lock_guard lock(mu_);
    return in_flight_;
  }

 private:
  void release() {
    {
      std::lock_guard lock(mu_);
      --in_flight_;
    }
    cv_.notify_one();
  }

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t max_in_flight_;
  std::chrono::milliseconds min_interval_;
  std::size_t in_flight_ = 0;
  std::chrono::steady_clock::time_point next_start_{};
};

struct HttpModelOptions {
  std::string base_url = "http://127.0.0.1:8080";
  std::string path = "/v1/chat/completions";
  std::string model;
  double temperature = 0.0;
  int timeout_seconds = 60;
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds min_interval{0};
  // Environment variable holding the bearer token.
  std::string api_key_env = "RITFIS_API_KEY";
};

// Chat-completion endpoint as a threat model. The whole input goes out as a
// single user message and the first choice's content is run through the
// verbalizer.
class HttpChatModel : public ThreatModel {
 public:
  HttpChatModel(HttpModelOptions opts, LabelSet labels, Verbalizer verbalizer)
      : opts_(std::move(opts)),
        labels_(std::move(labels)),
        verbalizer_(std::move(verbalizer)),
        limiter_(opts_.max_in_flight, opts_.min_interval) {
    verbalizer_.validate(labels_);
    if (const char* key = std::getenv(opts_.api_key_env.c_str())) api_key_ = key;
  }

  static nlohmann::json request_body(const HttpModelOptions& o, const std::string& content) {
    return {{"model", o.model},
            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})},
            {"temperature", o.temperature}};
  }

  static std::string extract_content(const std::string& body) {
    try {
      auto j = nlohmann::json::parse(body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw QueryFailed(std::string("malformed chat-completion response: ") + e.what());
    }
  }

  Prediction predict(const ModelInput& input) const override {
    auto body = request_body(opts_, input.full_text).dump();
    httplib::Result res;
    {
      auto permit = limiter_.acquire();
      auto cli = client();
      res = cli.Post(opts_.path, headers(), body, "application/json");
    }
    if (!res) throw QueryFailed("transport error: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw QueryFailed("HTTP status " + std::to_string(res->status));
    return parse_label(extract_content(res->body), verbalizer_, labels_);
  }

  void check_reachable() const override {
    auto cli = client();
    auto res = cli.Get("/");
    if (!res)
      throw QueryFailed("model endpoint unreachable at " + opts_.base_url + ": " +
                        httplib::to_string(res.error()));
  }

  const LabelSet& labels() const override { return labels_; }
  std::string describe() const override { return "http:" + opts_.base_url + ":" + opts_.model; }
  const Verbalizer& verbalizer() const { return verbalizer_; }
  RateLimiter& limiter() const { return limiter_; }

 private:
  httplib::Client client() const {
    httplib::Client cli(opts_.base_url);
    cli.set_connection_timeout(opts_.timeout_seconds, 0);
    cli.set_read_timeout(opts_.timeout_seconds, 0);
    cli.set_write_timeout(opts_.timeout_seconds, 0);
    return cli;
  }

  httplib::Headers headers() const {
    httplib::Headers h;
    if (!api_key_.empty()) h.emplace("Authorization", "Bearer " + api_key_);
    return h;
  }

  HttpModelOptions opts_;
  LabelSet labels_;
  Verbalizer verbalizer_;
  std::string api_key_;
  mutable RateLimiter limiter_;
};

}  // namespace ritfis
