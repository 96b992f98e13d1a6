#pragma once

#include <stdexcept>
#include <string>

namespace socsim {

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Splits "scheme://host[:port]/path" into authority and path parts; a URL
// without a path gets default_path. Throws std::invalid_argument when the
// scheme is missing.
void split_url(const std::string& url, std::string& base, std::string& path,
               const std::string& default_path);

struct ChatConfig {
  // Full URL of an OpenAI-compatible chat-completions endpoint, e.g.
  // "http://127.0.0.1:8080/v1/chat/completions". A URL without a path gets
  // "/v1/chat/completions" appended.
  std::string endpoint;
  std::string model = "gpt-3.5-turbo";
  int max_tokens = 256;
  double temperature = 0.0;
  int timeout_ms = 30000;
  int retries = 3;
  int backoff_ms = 250;  // doubled per retry
  // Bearer token is read from this environment variable, never from config
  // files. Empty value sends no Authorization header.
  std::string api_key_env = "OPENAI_API_KEY";
};

// Minimal chat-completions client: one system + one user message per call.
// Throws TransportError after the retry budget is exhausted or on an
// unusable response body.
class ChatClient {
 public:
  explicit ChatClient(ChatConfig config);

  std::string complete(const std::string& system_message,
                       const std::string& user_message) const;

  const ChatConfig& config() const { return config_; }

 private:
  ChatConfig config_;
  std::string base_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace socsim
