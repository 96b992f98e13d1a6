#include "socsim/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace socsim::annotate {

namespace {

const std::set<std::string>& negators() {
  static const std::set<std::string> kNegators = {
      "not",      "no",       "never",    "none",      "nothing",
      "neither",  "nor",      "cannot",   "can't",     "don't",
      "doesn't",  "didn't",   "won't",    "wouldn't",  "shouldn't",
      "couldn't", "isn't",    "aren't",   "wasn't",    "weren't",
      "without",  "hardly",   "rarely",   "seldom",
  };
  return kNegators;
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Signed mean valence with a three-token negation window.
double mean_valence(const std::string& text,
                    const std::map<std::string, double>& lexicon) {
  const auto tokens = tokenize(text);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lexicon.find(tokens[i]);
    if (it == lexicon.end()) continue;
    double v = it->second;
    std::size_t start = i >= 3 ? i - 3 : 0;
    for (std::size_t j = start; j < i; ++j) {
      if (negators().count(tokens[j])) {
        v = -v;
        break;
      }
    }
    sum += v;
    ++hits;
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

}  // namespace

std::string to_string(StanceLabel label) {
  switch (label) {
    case StanceLabel::support: return "Support";
    case StanceLabel::neutral: return "Neutral";
    case StanceLabel::oppose: return "Oppose";
  }
  throw std::logic_error("unreachable stance label");
}

std::string to_string(ContentType type) {
  switch (type) {
    case ContentType::call_for_action: return "call for action";
    case ContentType::testimony: return "testimony";
    case ContentType::sharing_of_opinion: return "sharing of opinion";
    case ContentType::reference_to_third_party:
      return "reference to a third party";
    case ContentType::other: return "other";
  }
  throw std::logic_error("unreachable content type");
}

StanceLabel parse_stance_label(std::string_view text) {
  const std::string t = lowercase(text);
  if (t == "support") return StanceLabel::support;
  if (t == "neutral") return StanceLabel::neutral;
  if (t == "oppose") return StanceLabel::oppose;
  throw std::invalid_argument("unknown stance label: " + std::string(text));
}

ContentType parse_content_type(std::string_view text) {
  const std::string t = lowercase(text);
  if (t == "call for action" || t == "call_for_action")
    return ContentType::call_for_action;
  if (t == "testimony") return ContentType::testimony;
  if (t == "sharing of opinion" || t == "sharing_of_opinion")
    return ContentType::sharing_of_opinion;
  if (t == "reference to a third party" || t == "reference_to_a_third_party")
    return ContentType::reference_to_third_party;
  if (t == "other") return ContentType::other;
  throw std::invalid_argument("unknown content type: " + std::string(text));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '\'') {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  for (auto& t : tokens) {
    // Quote characters around a word are not part of it.
    while (!t.empty() && t.front() == '\'') t.erase(t.begin());
    while (!t.empty() && t.back() == '\'') t.pop_back();
  }
  std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
  return tokens;
}

std::string render_stance_prompt(const std::string& text,
                                 const std::string& target) {
  return "What's the author's stance on " + target +
         "? Please choose from Support, Neutral, and Oppose. Only output "
         "your choice.\n\nText: " +
         text + "\nStance: ";
}

std::string render_content_prompt(const std::string& text) {
  return
      "Please classify the text into one of the following categories based "
      "on its content. Only output your choice.\n\n"
      "1. call for action: tweet contained a call for action (e.g. "
      "requesting, challenging, promoting, inviting, summoning someone to do "
      "something).\n"
      "2. testimony: tweet contained a testimony of the victim (e.g. report, "
      "declaration, first-person experience).\n"
      "3. sharing of opinion: e.g. evaluation, appreciation, addition, "
      "analysis of opinions.\n"
      "4. reference to a third party: reporting on something/-one, direct "
      "and indirect quotes.\n"
      "5. other: other content that does not fall into the above "
      "categories.\n\nText: " +
      text + "\nAnswer: ";
}

StanceLabel map_stance_reply(std::string_view reply, bool* recognized) {
  const std::string t = lowercase(reply);
  struct Key {
    std::string_view text;
    StanceLabel label;
  };
  static constexpr Key kKeys[] = {
      {"support", StanceLabel::support},
      {"neutral", StanceLabel::neutral},
      {"oppose", StanceLabel::oppose},
  };
  std::size_t best_pos = std::string::npos;
  StanceLabel best = StanceLabel::neutral;
  for (const auto& key : kKeys) {
    auto pos = t.find(key.text);
    if (pos != std::string::npos && pos < best_pos) {
      best_pos = pos;
      best = key.label;
    }
  }
  if (recognized) *recognized = best_pos != std::string::npos;
  return best;
}

ContentType map_content_reply(std::string_view reply, bool* recognized) {
  const std::string t = lowercase(reply);
  struct Key {
    std::string_view text;
    ContentType type;
    bool standalone_digit;
  };
  static constexpr Key kKeys[] = {
      {"call for action", ContentType::call_for_action, false},
      {"call_for_action", ContentType::call_for_action, false},
      {"testimony", ContentType::testimony, false},
      {"sharing of opinion", ContentType::sharing_of_opinion, false},
      {"sharing_of_opinion", ContentType::sharing_of_opinion, false},
      {"opinion", ContentType::sharing_of_opinion, false},
      {"reference to a third party", ContentType::reference_to_third_party,
       false},
      {"third party", ContentType::reference_to_third_party, false},
      {"other", ContentType::other, false},
      {"1", ContentType::call_for_action, true},
      {"2", ContentType::testimony, true},
      {"3", ContentType::sharing_of_opinion, true},
      {"4", ContentType::reference_to_third_party, true},
      {"5", ContentType::other, true},
  };
  std::size_t best_pos = std::string::npos;
  std::size_t best_len = 0;
  ContentType best = ContentType::other;
  for (const auto& key : kKeys) {
    std::size_t from = 0;
    while (true) {
      auto pos = t.find(key.text, from);
      if (pos == std::string::npos) break;
      from = pos + 1;
      if (key.standalone_digit) {
        bool left_ok = pos == 0 || !std::isalnum((unsigned char)t[pos - 1]);
        std::size_t after = pos + key.text.size();
        bool right_ok =
            after >= t.size() || !std::isalnum((unsigned char)t[after]);
        if (!left_ok || !right_ok) continue;
      }
      if (pos < best_pos ||
          (pos == best_pos && key.text.size() > best_len)) {
        best_pos = pos;
        best_len = key.text.size();
        best = key.type;
      }
      break;
    }
  }
  if (recognized) *recognized = best_pos != std::string::npos;
  return best;
}

LexiconStanceBackend::LexiconStanceBackend(
    std::map<std::string, double> lexicon, double threshold)
    : lexicon_(std::move(lexicon)), threshold_(threshold) {
  if (threshold_ < 0.0) {
    throw std::invalid_argument("stance threshold must be non-negative");
  }
}

LexiconStanceBackend LexiconStanceBackend::with_default_lexicon(
    double threshold) {
  return LexiconStanceBackend(default_valence_lexicon(), threshold);
}

StanceLabel LexiconStanceBackend::annotate(const std::string& text,
                                           const std::string&) {
  const double p = polarity(text);
  if (p > threshold_) return StanceLabel::support;
  if (p < -threshold_) return StanceLabel::oppose;
  return StanceLabel::neutral;
}

double LexiconStanceBackend::polarity(const std::string& text) const {
  return mean_valence(text, lexicon_);
}

RemoteStanceBackend::RemoteStanceBackend(ChatConfig config)
    : client_(std::move(config)) {}

StanceLabel RemoteStanceBackend::annotate(const std::string& text,
                                          const std::string& target) {
  const std::string reply = client_.complete(
      "You are a careful text annotator. Answer with exactly one of the "
      "offered choices.",
      render_stance_prompt(text, target));
  bool recognized = false;
  StanceLabel label = map_stance_reply(reply, &recognized);
  if (!recognized) ++unrecognized_;
  return label;
}

RemoteContentBackend::RemoteContentBackend(ChatConfig config)
    : client_(std::move(config)) {}

ContentType RemoteContentBackend::classify(const std::string& text) {
  const std::string reply = client_.complete(
      "You are a careful text annotator. Answer with exactly one of the "
      "offered choices.",
      render_content_prompt(text));
  bool recognized = false;
  ContentType type = map_content_reply(reply, &recognized);
  if (!recognized) ++unrecognized_;
  return type;
}

const std::map<std::string, double>& default_valence_lexicon() {
  static const std::map<std::string, double> kLexicon = {
      {"good", 0.5},       {"great", 0.7},       {"excellent", 0.8},
      {"amazing", 0.8},    {"wonderful", 0.7},   {"love", 0.8},
      {"hope", 0.5},       {"hopeful", 0.6},     {"happy", 0.6},
      {"proud", 0.6},      {"pride", 0.5},       {"inspiring", 0.6},
      {"inspired", 0.6},   {"courage", 0.6},     {"courageous", 0.7},
      {"brave", 0.6},      {"solidarity", 0.6},  {"support", 0.5},
      {"supportive", 0.6}, {"justice", 0.5},     {"equality", 0.5},
      {"empower", 0.6},    {"empowering", 0.7},  {"progress", 0.5},
      {"victory", 0.6},    {"win", 0.4},         {"safe", 0.4},
      {"safer", 0.5},      {"strong", 0.5},      {"stronger", 0.6},
      {"important", 0.3},  {"beautiful", 0.7},   {"best", 0.7},
      {"incredible", 0.8}, {"momentum", 0.4},    {"thank", 0.5},
      {"thanks", 0.5},     {"grateful", 0.7},    {"celebrate", 0.6},
      {"inclusive", 0.5},  {"equal", 0.4},
      {"bad", -0.5},       {"terrible", -0.8},   {"awful", -0.8},
      {"horrible", -0.8},  {"hate", -0.8},       {"hateful", -0.8},
      {"sad", -0.5},       {"angry", -0.6},      {"anger", -0.5},
      {"outrage", -0.6},   {"outrageous", -0.7}, {"disgusting", -0.8},
      {"disgrace", -0.7},  {"shame", -0.6},      {"shameful", -0.7},
      {"wrong", -0.4},     {"unfair", -0.5},     {"injustice", -0.6},
      {"violence", -0.6},  {"violent", -0.7},    {"abuse", -0.7},
      {"abusive", -0.8},   {"harassment", -0.7}, {"toxic", -0.6},
      {"dangerous", -0.6}, {"danger", -0.5},     {"threat", -0.5},
      {"fear", -0.5},      {"afraid", -0.5},     {"crisis", -0.5},
      {"disaster", -0.7},  {"corrupt", -0.7},    {"liar", -0.7},
      {"lies", -0.5},      {"misguided", -0.5},  {"divisive", -0.5},
      {"troubling", -0.5}, {"disappointing", -0.5}, {"disappointed", -0.5},
      {"reject", -0.4},    {"oppose", -0.5},     {"ridiculous", -0.6},
      {"worst", -0.8},     {"failure", -0.6},    {"fail", -0.5},
      {"broken", -0.4},    {"hysteria", -0.6},   {"overblown", -0.5},
      {"nonsense", -0.6},  {"fake", -0.5},       {"hoax", -0.6},
  };
  return kLexicon;
}

double sentiment_intensity(const std::string& text) {
  return sentiment_intensity(text, default_valence_lexicon());
}

double sentiment_intensity(const std::string& text,
                           const std::map<std::string, double>& lexicon) {
  return std::min(1.0, std::fabs(mean_valence(text, lexicon)));
}

Embedder::Embedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw std::invalid_argument("embedding dim must be positive");
}

void Embedder::observe(const std::string& text) {
  auto tokens = tokenize(text);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  std::unique_lock lock(mutex_);
  ++documents_;
  for (const auto& t : tokens) ++document_frequency_[t];
}

double Embedder::idf_unlocked(const std::string& token) const {
  auto it = document_frequency_.find(token);
  const double df = it == document_frequency_.end()
                        ? 0.0
                        : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(documents_)) / (1.0 + df)) + 1.0;
}

std::vector<double> Embedder::embed(const std::string& text) const {
  std::vector<double> vec(dim_, 0.0);
  const auto tokens = tokenize(text);
  std::shared_lock lock(mutex_);
  // tf * idf per term, accumulated one occurrence at a time in text order so
  // the float sum does not depend on hash-map iteration order.
  for (const auto& t : tokens) {
    vec[fnv1a64(t) % dim_] += idf_unlocked(t);
  }
  return vec;
}

std::size_t Embedder::documents() const {
  std::shared_lock lock(mutex_);
  return documents_;
}

ToxicityClient::ToxicityClient(Config config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw std::invalid_argument("toxicity endpoint is empty");
  }
  split_url(config_.endpoint, base_, path_, "/");
}

std::optional<double> ToxicityClient::score(const std::string& text) const {
  const std::string payload = nlohmann::json{{"text", text}}.dump();
  int attempts = config_.retries < 0 ? 1 : config_.retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.backoff_ms << (attempt - 1)));
    }
    httplib::Client cli(base_);
    cli.set_connection_timeout(0, config_.timeout_ms * 1000LL);
    cli.set_read_timeout(0, config_.timeout_ms * 1000LL);
    auto res = cli.Post(path_, payload, "application/json");
    if (!res || res->status < 200 || res->status >= 300) continue;

    double value = 0.0;
    try {
      auto json = nlohmann::json::parse(res->body);
      if (json.contains("summary_score")) {
        value = json.at("summary_score").get<double>();
      } else {
        value = json.at("attributeScores")
                    .at("TOXICITY")
                    .at("summaryScore")
                    .at("value")
                    .get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(
          std::string("toxicity response missing summary score: ") + e.what());
    }
    if (value < 0.0 || value > 1.0) {
      throw std::runtime_error("toxicity score out of range: " +
                               std::to_string(value));
    }
    return value;
  }
  return std::nullopt;  // service unavailable
}

}  // namespace socsim::annotate
