#include "socsim/environment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <istream>
#include <stdexcept>

#include "json.hpp"

namespace socsim::env {

namespace {

// Proleptic Gregorian day arithmetic (no timezone tables needed for UTC).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe =
      (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

bool newer(const Tweet& a, const Tweet& b) {
  if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
  return a.id > b.id;
}

std::optional<std::int64_t> parse_tweet_id(const std::string& raw) {
  std::size_t begin = raw.find_first_not_of(" \t");
  std::size_t end = raw.find_last_not_of(" \t");
  if (begin == std::string::npos) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(raw.data() + begin, raw.data() + end + 1, value);
  if (ec != std::errc() || ptr != raw.data() + end + 1) return std::nullopt;
  return value;
}

}  // namespace

std::string format_timestamp(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u %02lld:%02lld:%02lld", y, m,
                d, static_cast<long long>(rem / 3600),
                static_cast<long long>(rem / 60 % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

std::int64_t parse_timestamp(const std::string& text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%u %u:%u:%u", &y, &mo, &d, &h, &mi,
                  &s) != 6 ||
      mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 59) {
    throw std::invalid_argument("bad timestamp: " + text);
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string to_string(TweetKind kind) {
  switch (kind) {
    case TweetKind::post: return "post";
    case TweetKind::retweet: return "retweet";
    case TweetKind::reply: return "reply";
  }
  throw std::logic_error("unreachable tweet kind");
}

TweetKind parse_tweet_kind(std::string_view text) {
  if (text == "post") return TweetKind::post;
  if (text == "retweet") return TweetKind::retweet;
  if (text == "reply") return TweetKind::reply;
  throw std::invalid_argument("unknown tweet kind: " + std::string(text));
}

std::string to_string(FeedMode mode) {
  switch (mode) {
    case FeedMode::none: return "none";
    case FeedMode::opposite: return "opposite";
    case FeedMode::neutral: return "neutral";
    case FeedMode::public_hashtag: return "public_hashtag";
  }
  throw std::logic_error("unreachable feed mode");
}

FeedMode parse_feed_mode(std::string_view text) {
  if (text == "none") return FeedMode::none;
  if (text == "opposite") return FeedMode::opposite;
  if (text == "neutral") return FeedMode::neutral;
  if (text == "public_hashtag") return FeedMode::public_hashtag;
  throw std::invalid_argument("unknown feed mode: " + std::string(text));
}

void FollowGraph::add_edge(const std::string& follower,
                           const std::string& followee) {
  if (follower == followee) {
    throw std::invalid_argument("self-loop rejected: " + follower);
  }
  auto& list = followees_[follower];
  if (std::find(list.begin(), list.end(), followee) != list.end()) return;
  list.push_back(followee);
  ++edge_count_;
}

bool FollowGraph::follows(const std::string& follower,
                          const std::string& followee) const {
  auto it = followees_.find(follower);
  if (it == followees_.end()) return false;
  return std::find(it->second.begin(), it->second.end(), followee) !=
         it->second.end();
}

const std::vector<std::string>& FollowGraph::followees_of(
    const std::string& user) const {
  static const std::vector<std::string> kEmpty;
  auto it = followees_.find(user);
  return it == followees_.end() ? kEmpty : it->second;
}

void Environment::add_user(const std::string& user_id) {
  if (user_id.empty()) throw std::invalid_argument("empty user id");
  users_.insert(user_id);
}

bool Environment::has_user(const std::string& user_id) const {
  return users_.count(user_id) != 0;
}

MutationRecord Environment::apply_action(const agent::AgentAction& action,
                                         const std::string& actor,
                                         std::int64_t timestamp, int round) {
  if (!has_user(actor)) {
    throw std::invalid_argument("unknown actor: " + actor);
  }

  auto create = [&](std::string content, TweetKind kind,
                    std::optional<std::int64_t> parent) {
    Tweet t;
    t.id = next_id_++;
    t.author = actor;
    t.content = std::move(content);
    t.kind = kind;
    t.parent_id = parent;
    t.timestamp = timestamp;
    t.round = round;
    index_by_id_[t.id] = tweets_.size();
    tweets_.push_back(std::move(t));
    return MutationRecord{MutationRecord::Kind::new_tweet, tweets_.back().id,
                          ""};
  };
  auto reject = [](std::string why) {
    return MutationRecord{MutationRecord::Kind::rejected, std::nullopt,
                          std::move(why)};
  };

  return std::visit(
      [&](const auto& a) -> MutationRecord {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, agent::DoNothing>) {
          return {};
        } else if constexpr (std::is_same_v<T, agent::Post>) {
          if (a.content.empty()) return reject("post with empty content");
          return create(a.content, TweetKind::post, std::nullopt);
        } else if constexpr (std::is_same_v<T, agent::Retweet>) {
          auto id = parse_tweet_id(a.original_tweet_id);
          if (!id) {
            return reject("retweet with unparseable tweet id: " +
                          a.original_tweet_id);
          }
          auto idx = index_by_id_.find(*id);
          if (idx == index_by_id_.end()) {
            return reject("retweet of missing tweet " + a.original_tweet_id);
          }
          auto rec = create(a.content.value_or(""), TweetKind::retweet, *id);
          tweets_[index_by_id_.at(*id)].retweet_count += 1;
          return rec;
        } else if constexpr (std::is_same_v<T, agent::Reply>) {
          if (a.content.empty()) return reject("reply with empty content");
          auto id = parse_tweet_id(a.original_tweet_id);
          if (!id || index_by_id_.find(*id) == index_by_id_.end()) {
            return reject("reply to missing tweet " + a.original_tweet_id);
          }
          return create(a.content, TweetKind::reply, *id);
        } else {
          static_assert(std::is_same_v<T, agent::Like>);
          auto id = parse_tweet_id(a.original_tweet_id);
          if (!id || index_by_id_.find(*id) == index_by_id_.end()) {
            return reject("like of missing tweet " + a.original_tweet_id);
          }
          tweets_[index_by_id_.at(*id)].like_count += 1;
          return MutationRecord{MutationRecord::Kind::like, *id, ""};
        }
      },
      action);
}

std::vector<Tweet> Environment::personal_timeline(const std::string& user,
                                                  std::size_t k) const {
  if (!has_user(user)) throw std::invalid_argument("unknown user: " + user);
  std::vector<Tweet> result;
  for (const auto& t : tweets_) {
    if (t.author == user || graph_.follows(user, t.author)) {
      result.push_back(t);
    }
  }
  std::sort(result.begin(), result.end(), newer);
  if (result.size() > k) result.resize(k);
  return result;
}

std::vector<Tweet> Environment::public_timeline(std::size_t k) const {
  std::vector<Tweet> result = tweets_;
  std::sort(result.begin(), result.end(), newer);
  if (result.size() > k) result.resize(k);
  return result;
}

std::vector<Tweet> Environment::notifications_for(const std::string& user,
                                                  int since_round) const {
  std::vector<Tweet> result;
  for (const auto& t : tweets_) {
    if (t.kind != TweetKind::reply || t.author == user ||
        t.round < since_round || !t.parent_id) {
      continue;
    }
    const Tweet* parent = find(*t.parent_id);
    if (parent && parent->author == user) result.push_back(t);
  }
  std::sort(result.begin(), result.end(), newer);
  return result;
}

const Tweet* Environment::find(std::int64_t id) const {
  auto it = index_by_id_.find(id);
  return it == index_by_id_.end() ? nullptr : &tweets_[it->second];
}

void Environment::load_tweets(std::vector<Tweet> tweets) {
  std::sort(tweets.begin(), tweets.end(),
            [](const Tweet& a, const Tweet& b) { return a.id < b.id; });
  std::unordered_map<std::int64_t, std::size_t> index;
  std::int64_t max_id = 0;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    const Tweet& t = tweets[i];
    if (t.id <= 0 || index.count(t.id)) {
      throw std::runtime_error("tweet store has bad id " +
                               std::to_string(t.id));
    }
    if (t.parent_id && !index.count(*t.parent_id)) {
      throw std::runtime_error("tweet " + std::to_string(t.id) +
                               " references missing parent " +
                               std::to_string(*t.parent_id));
    }
    index[t.id] = i;
    max_id = std::max(max_id, t.id);
  }
  tweets_ = std::move(tweets);
  index_by_id_ = std::move(index);
  next_id_ = max_id + 1;
}

void write_tweets_jsonl(const Environment& environment, std::ostream& out) {
  for (const auto& t : environment.tweets()) {
    nlohmann::json j{
        {"id", t.id},
        {"author", t.author},
        {"content", t.content},
        {"kind", to_string(t.kind)},
        {"parent_id",
         t.parent_id ? nlohmann::json(*t.parent_id) : nlohmann::json()},
        {"time", format_timestamp(t.timestamp)},
        {"round", t.round},
        {"likes", t.like_count},
        {"retweets", t.retweet_count},
    };
    out << j.dump() << '\n';
  }
}

std::vector<Tweet> read_tweets_jsonl(std::istream& in) {
  std::vector<Tweet> tweets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Tweet t;
      t.id = j.at("id").get<std::int64_t>();
      t.author = j.at("author").get<std::string>();
      t.content = j.at("content").get<std::string>();
      t.kind = parse_tweet_kind(j.at("kind").get<std::string>());
      if (j.contains("parent_id") && !j.at("parent_id").is_null()) {
        t.parent_id = j.at("parent_id").get<std::int64_t>();
      }
      t.timestamp = parse_timestamp(j.at("time").get<std::string>());
      t.round = j.value("round", 0);
      t.like_count = j.value("likes", 0);
      t.retweet_count = j.value("retweets", 0);
      tweets.push_back(std::move(t));
    } catch (const std::exception& e) {
      throw std::runtime_error("tweet store line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return tweets;
}

std::vector<Tweet> apply_feed_policy(
    const FeedPolicy& policy, const std::string& user, double user_attitude,
    std::vector<Tweet> timeline, const Environment& environment,
    const std::function<double(const Tweet&)>& score_of) {
  if (policy.replace_fraction < 0.0 || policy.replace_fraction > 1.0) {
    throw std::invalid_argument("replace_fraction outside [0, 1]");
  }
  if (policy.neutral_threshold < 0.0) {
    throw std::invalid_argument("neutral_threshold must be non-negative");
  }
  if (policy.mode == FeedMode::none ||
      policy.mode == FeedMode::public_hashtag) {
    return timeline;
  }
  const std::size_t slots = static_cast<std::size_t>(
      std::floor(policy.replace_fraction *
                 static_cast<double>(timeline.size())));
  if (slots == 0) return timeline;

  std::unordered_set<std::int64_t> present;
  for (const auto& t : timeline) present.insert(t.id);

  std::vector<Tweet> chosen;
  for (const auto& t :
       environment.public_timeline(environment.tweets().size())) {
    if (chosen.size() >= slots) break;
    if (t.author == user || present.count(t.id)) continue;
    const double s = score_of(t);
    const bool eligible = policy.mode == FeedMode::opposite
                              ? s * user_attitude < 0.0
                              : std::fabs(s) < policy.neutral_threshold;
    if (!eligible) continue;
    present.insert(t.id);
    chosen.push_back(t);
  }
  // Oldest slots give way so the freshest organic tweets stay visible.
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    timeline[timeline.size() - 1 - j] = chosen[j];
  }
  return timeline;
}

}  // namespace socsim::env
