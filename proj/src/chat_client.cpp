#include "socsim/chat_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace socsim {

// httplib wants the authority part alone when constructing a client.
void split_url(const std::string& url, std::string& base, std::string& path,
               const std::string& default_path) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("endpoint URL must include a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base = url;
    path = default_path;
  } else {
    base = url.substr(0, path_start);
    path = url.substr(path_start);
  }
}

ChatClient::ChatClient(ChatConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw std::invalid_argument("chat endpoint is empty");
  }
  if (config_.max_tokens <= 0) {
    throw std::invalid_argument("max_tokens must be positive");
  }
  if (config_.temperature < 0.0) {
    throw std::invalid_argument("temperature must be non-negative");
  }
  split_url(config_.endpoint, base_, path_, "/v1/chat/completions");
}

std::string ChatClient::complete(const std::string& system_message,
                                 const std::string& user_message) const {
  nlohmann::json body = {
      {"model", config_.model},
      {"max_tokens", config_.max_tokens},
      {"temperature", config_.temperature},
      {"messages",
       {{{"role", "system"}, {"content", system_message}},
        {{"role", "user"}, {"content", user_message}}}},
  };
  const std::string payload = body.dump();

  std::string token;
  if (!config_.api_key_env.empty()) {
    if (const char* v = std::getenv(config_.api_key_env.c_str())) token = v;
  }

  std::string last_error = "no attempts made";
  int attempts = config_.retries < 0 ? 1 : config_.retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
    }
    // A fresh client per attempt keeps this callable from concurrent threads.
    httplib::Client cli(base_);
    cli.set_connection_timeout(0, config_.timeout_ms * 1000LL);
    cli.set_read_timeout(0, config_.timeout_ms * 1000LL);
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    auto res = cli.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport failure: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      // 4xx responses are not going to improve on retry.
      if (res->status >= 400 && res->status < 500) break;
      continue;
    }
    try {
      auto json = nlohmann::json::parse(res->body);
      return json.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("malformed completion body: ") + e.what();
      break;
    }
  }
  throw TransportError("chat completion failed: " + last_error);
}

}  // namespace socsim
