#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "socsim/annotate.hpp"
#include "socsim/metrics.hpp"

using namespace socsim;
using namespace socsim::annotate;

namespace {

// Loopback HTTP server with one handler; shuts down on destruction.
class StubServer {
 public:
  template <typename Handler>
  StubServer(const std::string& pattern, Handler handler) {
    server_.Post(pattern, handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

std::string chat_reply(const std::string& content) {
  return nlohmann::json{
      {"choices",
       {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}
      .dump();
}

}  // namespace

TEST_CASE("tokenizer lowercases and keeps inner apostrophes") {
  CHECK(tokenize("Hello, World!") ==
        std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("Don't stop") == std::vector<std::string>{"don't", "stop"});
  CHECK(tokenize("'quoted'") == std::vector<std::string>{"quoted"});
  CHECK(tokenize("a1 b2") == std::vector<std::string>{"a1", "b2"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("!!! ...").empty());
}

TEST_CASE("label names round-trip") {
  for (auto label :
       {StanceLabel::support, StanceLabel::neutral, StanceLabel::oppose}) {
    CHECK(parse_stance_label(to_string(label)) == label);
  }
  for (auto type :
       {ContentType::call_for_action, ContentType::testimony,
        ContentType::sharing_of_opinion, ContentType::reference_to_third_party,
        ContentType::other}) {
    CHECK(parse_content_type(to_string(type)) == type);
  }
  CHECK_THROWS_AS(parse_stance_label("maybe"), std::invalid_argument);
  CHECK_THROWS_AS(parse_content_type("spam"), std::invalid_argument);
}

TEST_CASE("stance prompt renders byte for byte") {
  CHECK(render_stance_prompt("I stand with them.", "the movement") ==
        "What's the author's stance on the movement? Please choose from "
        "Support, Neutral, and Oppose. Only output your choice.\n\n"
        "Text: I stand with them.\nStance: ");
}

TEST_CASE("content prompt lists the five categories") {
  const std::string prompt = render_content_prompt("some text");
  CHECK(prompt.find("1. call for action") != std::string::npos);
  CHECK(prompt.find("2. testimony") != std::string::npos);
  CHECK(prompt.find("3. sharing of opinion") != std::string::npos);
  CHECK(prompt.find("4. reference to a third party") != std::string::npos);
  CHECK(prompt.find("5. other") != std::string::npos);
  CHECK(prompt.rfind("\nText: some text\nAnswer: ") ==
        prompt.size() - std::string("\nText: some text\nAnswer: ").size());
}

TEST_CASE("stance replies map by earliest label mention") {
  bool recognized = false;
  CHECK(map_stance_reply("Support", &recognized) == StanceLabel::support);
  CHECK(recognized);
  CHECK(map_stance_reply("  oppose.") == StanceLabel::oppose);
  CHECK(map_stance_reply("The stance is NEUTRAL here") ==
        StanceLabel::neutral);
  CHECK(map_stance_reply("Oppose? No: Support") == StanceLabel::oppose);
  CHECK(map_stance_reply("I cannot answer that", &recognized) ==
        StanceLabel::neutral);
  CHECK(!recognized);
}

TEST_CASE("content replies map by label phrase or category number") {
  bool recognized = false;
  CHECK(map_content_reply("3", &recognized) ==
        ContentType::sharing_of_opinion);
  CHECK(recognized);
  CHECK(map_content_reply("call for action") == ContentType::call_for_action);
  CHECK(map_content_reply("Answer: 4") ==
        ContentType::reference_to_third_party);
  CHECK(map_content_reply("It is a testimony of the victim") ==
        ContentType::testimony);
  CHECK(map_content_reply("this mentions a third party") ==
        ContentType::reference_to_third_party);
  // A digit inside a longer token is not a category answer.
  CHECK(map_content_reply("42 things", &recognized) == ContentType::other);
  CHECK(!recognized);
  CHECK(map_content_reply("no idea", &recognized) == ContentType::other);
  CHECK(!recognized);
}

TEST_CASE("lexicon stance backend scores mean valence against the cut") {
  auto backend = LexiconStanceBackend::with_default_lexicon(0.05);
  CHECK(backend.annotate("What a great and inspiring movement!", "topic") ==
        StanceLabel::support);
  CHECK(backend.annotate("This is toxic nonsense and misguided outrage.",
                         "topic") == StanceLabel::oppose);
  CHECK(backend.annotate("The meeting is on Tuesday.", "topic") ==
        StanceLabel::neutral);
  CHECK(backend.annotate("", "topic") == StanceLabel::neutral);
}

TEST_CASE("negators within three tokens flip a hit") {
  LexiconStanceBackend backend({{"good", 0.5}}, 0.05);
  CHECK(backend.annotate("good", "t") == StanceLabel::support);
  CHECK(backend.annotate("not good", "t") == StanceLabel::oppose);
  CHECK(backend.annotate("not at all good", "t") == StanceLabel::oppose);
  // Four tokens of distance: the negation window has passed.
  CHECK(backend.annotate("not a b c good", "t") == StanceLabel::support);
  CHECK(std::abs(backend.polarity("not good") + 0.5) <= 1e-15);
}

TEST_CASE("sentiment intensity is the absolute mean valence, capped at 1") {
  const std::map<std::string, double> lexicon = {{"justice", 0.6},
                                                 {"bad", -0.5}};
  CHECK(std::abs(sentiment_intensity("Justice!", lexicon) - 0.6) <= 1e-15);
  CHECK(std::abs(sentiment_intensity("bad bad", lexicon) - 0.5) <= 1e-15);
  CHECK(std::abs(sentiment_intensity("justice bad", lexicon) - 0.05) <=
        1e-15);
  CHECK(sentiment_intensity("nothing here", lexicon) == 0.0);
  const std::map<std::string, double> hot = {{"x", 1.0}};
  CHECK(sentiment_intensity("x x x", hot) == 1.0);
}

TEST_CASE("default lexicon is usable and bounded") {
  const auto& lexicon = default_valence_lexicon();
  CHECK(lexicon.size() > 50);
  for (const auto& [word, valence] : lexicon) {
    CHECK(!word.empty());
    CHECK(valence >= -1.0);
    CHECK(valence <= 1.0);
  }
  CHECK(sentiment_intensity("great") > 0.0);
}

TEST_CASE("embedder basics") {
  Embedder embedder(64);
  CHECK(embedder.dim() == 64);
  CHECK(embedder.documents() == 0);
  CHECK_THROWS_AS(Embedder(0), std::invalid_argument);

  const auto a = embedder.embed("alpha beta");
  const auto b = embedder.embed("alpha beta");
  CHECK(a == b);
  REQUIRE(a.size() == 64);

  const auto empty = embedder.embed("");
  for (double v : empty) CHECK(v == 0.0);
}

TEST_CASE("embedder separates disjoint vocabularies") {
  Embedder embedder(512);
  embedder.observe("apple banana");
  embedder.observe("carrot daikon");
  const auto fruit = embedder.embed("apple banana");
  const auto veg = embedder.embed("carrot daikon");
  CHECK(metrics::cosine_similarity(fruit, fruit) == doctest::Approx(1.0));
  CHECK(metrics::cosine_similarity(fruit, veg) == doctest::Approx(0.0));
}

TEST_CASE("common tokens are downweighted by idf") {
  Embedder embedder(512);
  for (int i = 0; i < 50; ++i) embedder.observe("common filler");
  embedder.observe("rare common");
  CHECK(embedder.documents() == 51);
  // "rare common" vs "rare": the shared rare token dominates because
  // "common" carries a small idf after 51 sightings.
  const auto with_common = embedder.embed("rare common");
  const auto alone = embedder.embed("rare");
  CHECK(metrics::cosine_similarity(with_common, alone) > 0.9);
}

TEST_CASE("embedder tolerates concurrent observe and embed") {
  Embedder embedder(128);
  std::atomic<bool> stop{false};
  std::thread reader([&] {
    while (!stop.load()) {
      const auto v = embedder.embed("alpha beta gamma");
      CHECK(v.size() == 128);
    }
  });
  for (int i = 0; i < 2000; ++i) {
    embedder.observe("alpha beta gamma delta " + std::to_string(i % 7));
  }
  stop.store(true);
  reader.join();
  CHECK(embedder.documents() == 2000);
}

TEST_CASE("remote stance backend round-trips through a chat server") {
  std::string seen_body;
  StubServer server("/v1/chat/completions",
                    [&](const httplib::Request& req, httplib::Response& res) {
                      seen_body = req.body;
                      res.set_content(chat_reply("Oppose"),
                                      "application/json");
                    });
  ChatConfig config;
  config.endpoint = server.url("/v1/chat/completions");
  config.retries = 0;
  RemoteStanceBackend backend(config);
  CHECK(backend.annotate("This is terrible.", "the policy") ==
        StanceLabel::oppose);
  CHECK(backend.unrecognized_replies() == 0);

  const auto body = nlohmann::json::parse(seen_body);
  CHECK(body.at("model") == "gpt-3.5-turbo");
  CHECK(body.at("temperature") == 0.0);
  const std::string prompt = body.at("messages").at(1).at("content");
  CHECK(prompt == render_stance_prompt("This is terrible.", "the policy"));
}

TEST_CASE("remote content backend counts unrecognized replies") {
  StubServer server("/v1/chat/completions",
                    [&](const httplib::Request&, httplib::Response& res) {
                      res.set_content(chat_reply("I decline to answer"),
                                      "application/json");
                    });
  ChatConfig config;
  config.endpoint = server.url("/v1/chat/completions");
  config.retries = 0;
  RemoteContentBackend backend(config);
  CHECK(backend.classify("whatever") == ContentType::other);
  CHECK(backend.unrecognized_replies() == 1);
}

TEST_CASE("chat client retries transient failures with backoff") {
  std::atomic<int> hits{0};
  StubServer server("/v1/chat/completions",
                    [&](const httplib::Request&, httplib::Response& res) {
                      if (++hits < 3) {
                        res.status = 503;
                        return;
                      }
                      res.set_content(chat_reply("ok"), "application/json");
                    });
  ChatConfig config;
  config.endpoint = server.url("/v1/chat/completions");
  config.retries = 3;
  config.backoff_ms = 1;
  ChatClient client(config);
  CHECK(client.complete("sys", "user") == "ok");
  CHECK(hits.load() == 3);
}

TEST_CASE("chat client does not retry client errors") {
  std::atomic<int> hits{0};
  StubServer server("/v1/chat/completions",
                    [&](const httplib::Request&, httplib::Response& res) {
                      ++hits;
                      res.status = 401;
                    });
  ChatConfig config;
  config.endpoint = server.url("/v1/chat/completions");
  config.retries = 3;
  config.backoff_ms = 1;
  ChatClient client(config);
  CHECK_THROWS_AS(client.complete("sys", "user"), TransportError);
  CHECK(hits.load() == 1);
}

TEST_CASE("chat client sends the bearer token from the environment") {
  std::string seen_auth = "unset";
  StubServer server("/v1/chat/completions",
                    [&](const httplib::Request& req, httplib::Response& res) {
                      seen_auth = req.get_header_value("Authorization");
                      res.set_content(chat_reply("ok"), "application/json");
                    });
  ChatConfig config;
  config.endpoint = server.url("/v1/chat/completions");
  config.retries = 0;
  config.api_key_env = "SOCSIM_TEST_TOKEN";

  setenv("SOCSIM_TEST_TOKEN", "sk-test-123", 1);
  ChatClient(config).complete("sys", "user");
  CHECK(seen_auth == "Bearer sk-test-123");

  unsetenv("SOCSIM_TEST_TOKEN");
  seen_auth = "unset";
  ChatClient(config).complete("sys", "user");
  CHECK(seen_auth == "");
}

TEST_CASE("url splitting") {
  std::string base, path;
  split_url("http://127.0.0.1:8080/v1/chat/completions", base, path, "/d");
  CHECK(base == "http://127.0.0.1:8080");
  CHECK(path == "/v1/chat/completions");
  split_url("http://example.com", base, path, "/v1/chat/completions");
  CHECK(base == "http://example.com");
  CHECK(path == "/v1/chat/completions");
  CHECK_THROWS_AS(split_url("example.com/x", base, path, "/d"),
                  std::invalid_argument);
}

TEST_CASE("toxicity client reads both response shapes") {
  StubServer server("/score",
                    [&](const httplib::Request& req, httplib::Response& res) {
                      const auto j = nlohmann::json::parse(req.body);
                      const std::string text = j.at("text");
                      if (text == "flat") {
                        res.set_content(
                            nlohmann::json{{"summary_score", 0.7}}.dump(),
                            "application/json");
                      } else {
                        res.set_content(
                            nlohmann::json{
                                {"attributeScores",
                                 {{"TOXICITY",
                                   {{"summaryScore", {{"value", 0.25}}}}}}}}
                                .dump(),
                            "application/json");
                      }
                    });
  ToxicityClient client({server.url("/score"), 2000, 0, 1});
  auto flat = client.score("flat");
  REQUIRE(flat.has_value());
  CHECK(*flat == doctest::Approx(0.7));
  auto nested = client.score("nested");
  REQUIRE(nested.has_value());
  CHECK(*nested == doctest::Approx(0.25));
}

TEST_CASE("toxicity client distinguishes outages from bad replies") {
  SUBCASE("transport failure yields nullopt") {
    ToxicityClient client({"http://127.0.0.1:9/score", 200, 0, 1});
    CHECK(!client.score("x").has_value());
  }
  SUBCASE("out-of-range score is a hard error") {
    StubServer server("/score",
                      [&](const httplib::Request&, httplib::Response& res) {
                        res.set_content(
                            nlohmann::json{{"summary_score", 1.5}}.dump(),
                            "application/json");
                      });
    ToxicityClient client({server.url("/score"), 2000, 0, 1});
    CHECK_THROWS_AS(client.score("x"), std::runtime_error);
  }
  SUBCASE("malformed body is a hard error") {
    StubServer server("/score",
                      [&](const httplib::Request&, httplib::Response& res) {
                        res.set_content("not json", "application/json");
                      });
    ToxicityClient client({server.url("/score"), 2000, 0, 1});
    CHECK_THROWS_AS(client.score("x"), std::runtime_error);
  }
}
