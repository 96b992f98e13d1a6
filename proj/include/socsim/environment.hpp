#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "socsim/actions.hpp"

namespace socsim::env {

// Simulated wall clock in epoch seconds, formatted "YYYY-MM-DD HH:MM:SS" UTC.
std::string format_timestamp(std::int64_t epoch_seconds);
std::int64_t parse_timestamp(const std::string& text);

enum class TweetKind { post, retweet, reply };

std::string to_string(TweetKind kind);
TweetKind parse_tweet_kind(std::string_view text);

struct Tweet {
  std::int64_t id = 0;
  std::string author;
  std::string content;  // empty for a bare retweet
  TweetKind kind = TweetKind::post;
  std::optional<std::int64_t> parent_id;  // retweet / reply target
  std::int64_t timestamp = 0;
  int round = 0;  // creation round
  int like_count = 0;
  int retweet_count = 0;

  bool operator==(const Tweet&) const = default;
};

struct NewsItem {
  int round = 0;
  std::string text;
};

// Directed follow edges. Self-loops are rejected at insertion.
class FollowGraph {
 public:
  void add_edge(const std::string& follower, const std::string& followee);
  bool follows(const std::string& follower, const std::string& followee) const;
  const std::vector<std::string>& followees_of(const std::string& user) const;
  std::size_t edge_count() const { return edge_count_; }

 private:
  std::unordered_map<std::string, std::vector<std::string>> followees_;
  std::size_t edge_count_ = 0;
};

enum class FeedMode { none, opposite, neutral, public_hashtag };

std::string to_string(FeedMode mode);
FeedMode parse_feed_mode(std::string_view text);

struct FeedPolicy {
  FeedMode mode = FeedMode::none;
  // Fraction of timeline slots replaced by injected tweets (floor).
  double replace_fraction = 0.3;
  // |score| below this counts as neutral for FeedMode::neutral.
  double neutral_threshold = 0.1;
};

// Outcome of applying one action to the store.
struct MutationRecord {
  enum class Kind { none, new_tweet, like, rejected };
  Kind kind = Kind::none;
  std::optional<std::int64_t> tweet_id;  // created or liked tweet
  std::string diagnostic;                // set when rejected
};

// Append-only tweet store plus the follow graph and user registry. Tweet ids
// are assigned sequentially from 1 in creation order, so a parent always has
// a smaller id than its children and the reference graph stays acyclic.
class Environment {
 public:
  void add_user(const std::string& user_id);
  bool has_user(const std::string& user_id) const;
  std::size_t user_count() const { return users_.size(); }

  FollowGraph& graph() { return graph_; }
  const FollowGraph& graph() const { return graph_; }

  // Invalid references and empty post/reply content degrade to a rejected
  // record; the store is never left half-updated.
  MutationRecord apply_action(const agent::AgentAction& action,
                              const std::string& actor,
                              std::int64_t timestamp, int round);

  // Tweets authored by the user or an account it follows, newest first, ties
  // by descending id, truncated to k. Throws std::invalid_argument for an
  // unknown user.
  std::vector<Tweet> personal_timeline(const std::string& user,
                                       std::size_t k) const;
  // Most recent tweets platform-wide, same ordering rule.
  std::vector<Tweet> public_timeline(std::size_t k) const;
  // Replies by others to this user's tweets created in round >= since_round,
  // newest first.
  std::vector<Tweet> notifications_for(const std::string& user,
                                       int since_round) const;

  const Tweet* find(std::int64_t id) const;
  const std::vector<Tweet>& tweets() const { return tweets_; }

  // Replaces the store with externally loaded tweets (id order enforced).
  void load_tweets(std::vector<Tweet> tweets);

 private:
  std::vector<Tweet> tweets_;
  std::unordered_map<std::int64_t, std::size_t> index_by_id_;
  std::unordered_set<std::string> users_;
  FollowGraph graph_;
  std::int64_t next_id_ = 1;
};

// One JSON object per line, id order.
void write_tweets_jsonl(const Environment& environment, std::ostream& out);
std::vector<Tweet> read_tweets_jsonl(std::istream& in);

// Feed intervention applied to an already-assembled personal timeline.
//   opposite: floor(replace_fraction * k) oldest slots are replaced with
//             recent public tweets whose score opposes the user's attitude.
//   neutral:  same slot rule with |score| < neutral_threshold tweets.
//   none / public_hashtag: timeline unchanged (public_hashtag extends the
//             prompt instead).
// Injected tweets are drawn newest-first from the public store, skipping the
// user's own tweets and anything already present. Fewer candidates than
// slots means fewer replacements.
std::vector<Tweet> apply_feed_policy(
    const FeedPolicy& policy, const std::string& user, double user_attitude,
    std::vector<Tweet> timeline, const Environment& environment,
    const std::function<double(const Tweet&)>& score_of);

}  // namespace socsim::env
