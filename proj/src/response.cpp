#include "socsim/response.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <vector>

namespace socsim::agent {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return (char)std::tolower(c); });
  return s;
}

// One raw argument slot: either `key=value` or a bare positional value.
struct RawArg {
  std::string key;  // empty when positional
  std::optional<std::string> value;
};

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      char next = s[i + 1];
      if (next == 'n') {
        out += '\n';
        ++i;
        continue;
      }
      if (next == '\\' || next == '"' || next == '\'') {
        out += next;
        ++i;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

// Parses one value starting at `pos`; advances pos past it. Returns nullopt
// for the literal None/null.
std::optional<std::string> parse_value(const std::string& text,
                                       std::size_t& pos, bool& ok) {
  while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
  if (pos >= text.size()) {
    ok = false;
    return std::nullopt;
  }
  const char c = text[pos];
  if (c == '"' || c == '\'') {
    const char q = c;
    std::string raw;
    ++pos;
    while (pos < text.size()) {
      if (text[pos] == '\\' && pos + 1 < text.size()) {
        raw += text[pos];
        raw += text[pos + 1];
        pos += 2;
        continue;
      }
      if (text[pos] == q) {
        ++pos;
        ok = true;
        return unescape(raw);
      }
      raw += text[pos++];
    }
    ok = false;  // unterminated string
    return std::nullopt;
  }
  // Bare token up to a top-level comma or the closing parenthesis.
  std::string raw;
  while (pos < text.size() && text[pos] != ',' && text[pos] != ')') {
    raw += text[pos++];
  }
  const std::string token = trim(raw);
  ok = true;
  const std::string low = lowercase(token);
  if (low == "none" || low == "null") return std::nullopt;
  return token;
}

// Splits the argument list of `name(args)` starting at the opening
// parenthesis. Returns false on malformed syntax.
bool parse_args(const std::string& text, std::size_t open,
                std::vector<RawArg>& args, std::size_t& close) {
  std::size_t pos = open + 1;
  while (true) {
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
    if (pos >= text.size()) return false;
    if (text[pos] == ')') {
      close = pos;
      return true;
    }
    RawArg arg;
    // Look ahead for `identifier =` to detect a keyword argument.
    std::size_t probe = pos;
    while (probe < text.size() &&
           (std::isalnum((unsigned char)text[probe]) || text[probe] == '_')) {
      ++probe;
    }
    std::size_t eq = probe;
    while (eq < text.size() && std::isspace((unsigned char)text[eq])) ++eq;
    if (probe > pos && eq < text.size() && text[eq] == '=' &&
        (eq + 1 >= text.size() || text[eq + 1] != '=')) {
      arg.key = lowercase(text.substr(pos, probe - pos));
      pos = eq + 1;
    }
    bool ok = false;
    arg.value = parse_value(text, pos, ok);
    if (!ok) return false;
    args.push_back(std::move(arg));
    while (pos < text.size() && std::isspace((unsigned char)text[pos])) ++pos;
    if (pos < text.size() && text[pos] == ',') {
      ++pos;
      continue;
    }
    if (pos < text.size() && text[pos] == ')') {
      close = pos;
      return true;
    }
    return false;
  }
}

constexpr std::array<std::string_view, 5> kFunctionNames = {
    "do_nothing", "post", "retweet", "reply", "like"};

// Positional parameter order per function.
const std::vector<std::string>& positional_names(const std::string& fn) {
  static const std::vector<std::string> kPost = {"content"};
  static const std::vector<std::string> kRetweet = {
      "content", "author", "original_tweet_id", "original_tweet"};
  static const std::vector<std::string> kReply = {"content", "author",
                                                  "original_tweet_id"};
  static const std::vector<std::string> kLike = {"author",
                                                 "original_tweet_id"};
  static const std::vector<std::string> kNone = {};
  if (fn == "post") return kPost;
  if (fn == "retweet") return kRetweet;
  if (fn == "reply") return kReply;
  if (fn == "like") return kLike;
  return kNone;
}

struct CallSite {
  std::string name;
  std::size_t name_pos = 0;
  std::size_t open = 0;  // index of '(' in the text
};

// Finds the first well-formed `name(` occurrence in `text`, if any.
std::optional<CallSite> find_call(const std::string& text) {
  const std::string low = lowercase(text);
  std::optional<CallSite> best;
  for (auto name : kFunctionNames) {
    std::size_t from = 0;
    while (true) {
      auto pos = low.find(name, from);
      if (pos == std::string::npos) break;
      from = pos + 1;
      // Must be a standalone identifier followed by '('.
      if (pos > 0 && (std::isalnum((unsigned char)low[pos - 1]) ||
                      low[pos - 1] == '_')) {
        continue;
      }
      std::size_t after = pos + name.size();
      while (after < low.size() && std::isspace((unsigned char)low[after])) {
        ++after;
      }
      if (after >= low.size() || low[after] != '(') continue;
      if (!best || pos < best->name_pos) {
        best = CallSite{std::string(name), pos, after};
      }
      break;
    }
  }
  return best;
}

ParsedResponse degrade(std::string thought, std::string why) {
  ParsedResponse out;
  out.thought = std::move(thought);
  out.action = DoNothing{};
  out.diagnostic = std::move(why);
  return out;
}

}  // namespace

ParsedResponse parse_response(const std::string& raw) {
  // Line scan: remember the last Action line and the last Thought line
  // appearing before it.
  std::vector<std::pair<std::size_t, std::string>> lines;
  {
    std::size_t start = 0;
    while (start <= raw.size()) {
      auto nl = raw.find('\n', start);
      if (nl == std::string::npos) nl = raw.size();
      lines.emplace_back(start, raw.substr(start, nl - start));
      start = nl + 1;
    }
  }

  std::string action_text;
  std::size_t action_line = std::string::npos;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string t = trim(lines[i].second);
    if (lowercase(t.substr(0, 7)) == "action:") {
      action_text = trim(t.substr(7));
      action_line = i;
    }
  }
  std::string thought;
  for (std::size_t i = 0;
       i < (action_line == std::string::npos ? lines.size() : action_line + 1);
       ++i) {
    const std::string t = trim(lines[i].second);
    if (lowercase(t.substr(0, 8)) == "thought:") thought = trim(t.substr(8));
  }

  // Without an Action line, fall back to scanning the whole response.
  const std::string search_text =
      action_line == std::string::npos ? raw : action_text;
  auto call = find_call(search_text);
  if (!call) return degrade(thought, "no recognizable function call");

  std::vector<RawArg> raw_args;
  std::size_t close = 0;
  if (!parse_args(search_text, call->open, raw_args, close)) {
    return degrade(thought, "malformed argument list for " + call->name);
  }

  // Resolve keyword and positional slots into a single map.
  const auto& order = positional_names(call->name);
  std::vector<std::pair<std::string, std::optional<std::string>>> fields;
  std::size_t next_positional = 0;
  for (auto& arg : raw_args) {
    std::string key = arg.key;
    if (key.empty()) {
      if (next_positional >= order.size()) {
        return degrade(thought,
                       "too many positional arguments for " + call->name);
      }
      key = order[next_positional++];
    }
    fields.emplace_back(std::move(key), std::move(arg.value));
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    for (const auto& [k, v] : fields) {
      if (k == key) return v;
    }
    return std::nullopt;
  };
  auto require = [&](const std::string& key,
                     std::string& out_value) -> bool {
    auto v = get(key);
    if (!v) return false;
    out_value = *v;
    return true;
  };

  ParsedResponse out;
  out.thought = std::move(thought);
  if (call->name == "do_nothing") {
    out.action = DoNothing{};
    return out;
  }
  if (call->name == "post") {
    Post post;
    if (!require("content", post.content)) {
      return degrade(out.thought, "post without content");
    }
    out.action = std::move(post);
    return out;
  }
  if (call->name == "retweet") {
    Retweet rt;
    rt.content = get("content");
    if (!require("author", rt.author) ||
        !require("original_tweet_id", rt.original_tweet_id)) {
      return degrade(out.thought, "retweet missing author or tweet id");
    }
    rt.original_tweet = get("original_tweet").value_or("");
    out.action = std::move(rt);
    return out;
  }
  if (call->name == "reply") {
    Reply reply;
    if (!require("content", reply.content) ||
        !require("author", reply.author) ||
        !require("original_tweet_id", reply.original_tweet_id)) {
      return degrade(out.thought, "reply missing a required argument");
    }
    out.action = std::move(reply);
    return out;
  }
  Like like;
  if (!require("author", like.author) ||
      !require("original_tweet_id", like.original_tweet_id)) {
    return degrade(out.thought, "like missing author or tweet id");
  }
  out.action = std::move(like);
  return out;
}

}  // namespace socsim::agent
