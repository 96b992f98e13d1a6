#include "socsim/actions.hpp"

namespace socsim::agent {

namespace {

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '\\' || c == '"') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string quote_or_none(const std::optional<std::string>& text) {
  return text ? quote(*text) : "None";
}

}  // namespace

std::string format_action(const AgentAction& action) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, DoNothing>) {
          return "do_nothing()";
        } else if constexpr (std::is_same_v<T, Post>) {
          return "post(content=" + quote(a.content) + ")";
        } else if constexpr (std::is_same_v<T, Retweet>) {
          return "retweet(content=" + quote_or_none(a.content) +
                 ", author=" + quote(a.author) +
                 ", original_tweet_id=" + quote(a.original_tweet_id) +
                 ", original_tweet=" + quote(a.original_tweet) + ")";
        } else if constexpr (std::is_same_v<T, Reply>) {
          return "reply(content=" + quote(a.content) +
                 ", author=" + quote(a.author) +
                 ", original_tweet_id=" + quote(a.original_tweet_id) + ")";
        } else {
          static_assert(std::is_same_v<T, Like>);
          return "like(author=" + quote(a.author) +
                 ", original_tweet_id=" + quote(a.original_tweet_id) + ")";
        }
      },
      action);
}

bool operator==(const DoNothing&, const DoNothing&) { return true; }

bool operator==(const Post& a, const Post& b) {
  return a.content == b.content;
}

bool operator==(const Retweet& a, const Retweet& b) {
  return a.content == b.content && a.author == b.author &&
         a.original_tweet_id == b.original_tweet_id &&
         a.original_tweet == b.original_tweet;
}

bool operator==(const Reply& a, const Reply& b) {
  return a.content == b.content && a.author == b.author &&
         a.original_tweet_id == b.original_tweet_id;
}

bool operator==(const Like& a, const Like& b) {
  return a.author == b.author && a.original_tweet_id == b.original_tweet_id;
}

}  // namespace socsim::agent
