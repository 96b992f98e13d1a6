#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "socsim/chat_client.hpp"

namespace socsim::annotate {

enum class StanceLabel { support, neutral, oppose };
enum class ContentType {
  call_for_action,
  testimony,
  sharing_of_opinion,
  reference_to_third_party,
  other,
};

std::string to_string(StanceLabel label);
std::string to_string(ContentType type);
StanceLabel parse_stance_label(std::string_view text);
ContentType parse_content_type(std::string_view text);

// Lowercased word tokens; apostrophes are kept inside words so "don't"
// survives as one token.
std::vector<std::string> tokenize(std::string_view text);

// Prompt builders used by the remote backends, exposed for testing.
std::string render_stance_prompt(const std::string& text,
                                 const std::string& target);
std::string render_content_prompt(const std::string& text);

// Maps a free-form model reply onto a label. The earliest case-insensitive
// occurrence of a known label name wins. Unrecognized replies fall back to
// neutral / other; `recognized` reports whether a label was found.
StanceLabel map_stance_reply(std::string_view reply,
                             bool* recognized = nullptr);
ContentType map_content_reply(std::string_view reply,
                              bool* recognized = nullptr);

class StanceBackend {
 public:
  virtual ~StanceBackend() = default;
  virtual StanceLabel annotate(const std::string& text,
                               const std::string& target) = 0;
};

// Scores text by mean valence of lexicon hits; mean > +threshold reads as
// support, < -threshold as oppose, anything else neutral. A token preceded by
// a negator within three positions contributes with flipped sign.
class LexiconStanceBackend : public StanceBackend {
 public:
  explicit LexiconStanceBackend(std::map<std::string, double> lexicon,
                                double threshold = 0.05);
  static LexiconStanceBackend with_default_lexicon(double threshold = 0.05);

  StanceLabel annotate(const std::string& text,
                       const std::string& target) override;
  // Mean signed valence of matched tokens, 0 when nothing matches.
  double polarity(const std::string& text) const;

 private:
  std::map<std::string, double> lexicon_;
  double threshold_;
};

class RemoteStanceBackend : public StanceBackend {
 public:
  explicit RemoteStanceBackend(ChatConfig config);
  StanceLabel annotate(const std::string& text,
                       const std::string& target) override;
  // Replies that matched no known label (mapped to neutral).
  std::uint64_t unrecognized_replies() const { return unrecognized_; }

 private:
  ChatClient client_;
  std::uint64_t unrecognized_ = 0;
};

class ContentBackend {
 public:
  virtual ~ContentBackend() = default;
  virtual ContentType classify(const std::string& text) = 0;
};

class RemoteContentBackend : public ContentBackend {
 public:
  explicit RemoteContentBackend(ChatConfig config);
  ContentType classify(const std::string& text) override;
  std::uint64_t unrecognized_replies() const { return unrecognized_; }

 private:
  ChatClient client_;
  std::uint64_t unrecognized_ = 0;
};

// Shared word valences used by sentiment scoring, the lexicon stance backend
// and the deterministic text driver.
const std::map<std::string, double>& default_valence_lexicon();

// Unsigned sentiment strength in [0, 1]: absolute mean valence of lexicon
// hits with the same negation handling as LexiconStanceBackend.
double sentiment_intensity(const std::string& text);
double sentiment_intensity(const std::string& text,
                           const std::map<std::string, double>& lexicon);

// Hashed TF-IDF embedder. Tokens are bucketed by FNV-1a into a fixed-size
// dense vector; document frequencies grow through observe(). observe() and
// embed() may be called from different threads concurrently.
class Embedder {
 public:
  explicit Embedder(std::size_t dim = 512);

  void observe(const std::string& text);
  std::vector<double> embed(const std::string& text) const;

  std::size_t dim() const { return dim_; }
  std::size_t documents() const;

 private:
  double idf_unlocked(const std::string& token) const;

  std::size_t dim_;
  std::size_t documents_ = 0;
  std::unordered_map<std::string, std::size_t> document_frequency_;
  mutable std::shared_mutex mutex_;
};

// Posts {"text": ...} to an external scoring service and reads a summary
// score in [0, 1]. Transport failure after retries yields nullopt; a reply
// outside the valid range is a hard error.
class ToxicityClient {
 public:
  struct Config {
    std::string endpoint;
    int timeout_ms = 10000;
    int retries = 2;
    int backoff_ms = 250;
  };

  explicit ToxicityClient(Config config);
  std::optional<double> score(const std::string& text) const;

 private:
  Config config_;
  std::string base_;
  std::string path_;
};

}  // namespace socsim::annotate
