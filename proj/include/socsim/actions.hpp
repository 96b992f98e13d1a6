#pragma once

#include <optional>
#include <string>
#include <variant>

namespace socsim::agent {

// The five platform actions a text-driven user can take. Tweet ids are kept
// as raw strings here; the environment resolves them against the store and
// degrades unresolvable references to DoNothing.
struct DoNothing {};

struct Post {
  std::string content;
};

struct Retweet {
  std::optional<std::string> content;  // quote text, absent for a bare share
  std::string author;                  // claimed author of the target
  std::string original_tweet_id;
  std::string original_tweet;  // echoed target text, may be empty
};

struct Reply {
  std::string content;
  std::string author;
  std::string original_tweet_id;
};

struct Like {
  std::string author;
  std::string original_tweet_id;
};

using AgentAction = std::variant<DoNothing, Post, Retweet, Reply, Like>;

// Canonical call syntax, e.g. `post(content="...")`. parse_response() on the
// formatted string reproduces the action exactly.
std::string format_action(const AgentAction& action);

bool operator==(const DoNothing&, const DoNothing&);
bool operator==(const Post& a, const Post& b);
bool operator==(const Retweet& a, const Retweet& b);
bool operator==(const Reply& a, const Reply& b);
bool operator==(const Like& a, const Like& b);

}  // namespace socsim::agent
