#include "socsim/prompt.hpp"

namespace socsim::agent {

std::string render_tweet_line(const env::Tweet& tweet) {
  return "tweet id: " + std::to_string(tweet.id) + " [" + tweet.author +
         "]: " + tweet.content +
         " --Post Time: " + env::format_timestamp(tweet.timestamp);
}

namespace {

// Header line carries the first item; further items get their own lines.
void append_block(std::string& out, const std::string& header,
                  const std::vector<std::string>& lines) {
  out += header;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out += '\n';
    out += lines[i];
  }
  out += '\n';
}

}  // namespace

std::string assemble_prompt(const PromptContext& context) {
  std::string out;
  out +=
      "You are using the social media Twitter. You might need to perform "
      "reaction to the observation. You need to answer what you will do to "
      "the observations based on the following information:\n";
  out += "(1) You are " + context.name + ". " + context.summary + "\n";
  out += "(2) Current time is " + context.current_time + "\n";
  out += "(3) The news you got is \"" + context.news + "\"\n";
  out += "(4) Your personal experience is " + context.personal_experience +
         "\n";
  append_block(out, "(5) Your recent memory is ", context.recent_memory);

  std::vector<std::string> page_lines;
  page_lines.reserve(context.page.size());
  for (const auto& t : context.page) page_lines.push_back(render_tweet_line(t));
  append_block(out, "(6) The twitter page you can see is ", page_lines);

  append_block(out, "(7) The notifications you can see are ",
               context.notifications);

  if (context.include_public_page) {
    std::vector<std::string> public_lines;
    public_lines.reserve(context.public_page.size());
    for (const auto& t : context.public_page) {
      public_lines.push_back(render_tweet_line(t));
    }
    append_block(out, "(8) The public hashtag page you can see is ",
                 public_lines);
    out +=
        "You are encouraged to share your opinions under the platform's "
        "public hashtag so users outside your circle can see them.\n";
  }

  out +=
      "\n"
      "In terms of how you actually perform the action, you take action by "
      "calling functions. Currently, there are the following functions that "
      "can be called.\n"
      "- do_nothing(): Do nothing. There is nothing that you like to respond "
      "to. \n"
      "- post(content): Post a tweet. `content` is the sentence that you "
      "will post.  \n"
      "- retweet(content, author, original_tweet_id, original_tweet). "
      "Retweet or quote an existing tweet in your Twitter page. `content` is "
      "the statements that you attach when retweeting. If you want to say "
      "nothing, set `content` to None. `author` is the author of the tweet "
      "that you want to retweet, it should be the concrete name. "
      "`original_tweet_id` and `original_tweet` are the id and content of "
      "the retweeted tweet.  \n"
      "- reply(content, author, original_tweet_id). Reply to an existing "
      "tweet in your Twitter page or reply one of replies in your "
      "notifications, but don't reply to yourself and those not in your "
      "Twitter page. `content` is what you will reply to the original tweet "
      "or other comments. `author` is the author of the original tweet or "
      "comment that you want to reply to. `original_tweet_id` is the id of "
      "the original tweet.  \n"
      "- like(author, original_tweet_id). Press like on an existing tweet in "
      "your Twitter page. `author` is the author of the original tweet that "
      "you like. `original_tweet_id` is the id of the original tweet.  \n"
      "\n"
      "Call one function at a time, please give a thought before calling "
      "these actions, i.e., use the following format strictly:\n"
      "\n"
      "[OPTION 1]\n"
      "Thought: None of the observation attract my attention, I need to:\n"
      "Action: do_nothing()\n"
      "\n"
      "[OPTION 2]\n"
      "Thought: due to `xxx`, I need to:\n"
      "Action: post(content=\"yyy\")\n"
      "\n"
      "[OPTION 3]\n"
      "Thought: due to `xxx`, I need to:\n"
      "Action: retweet(content=\"yyy\", author=\"zzz\", "
      "original_tweet_id=\"0\", original_tweet=\"kkk\")\n"
      "\n"
      "[OPTION 4]\n"
      "Thought: due to `xxx`, I need to:\n"
      "Action: reply(content=\"yyy\", author=\"zzz\", "
      "original_tweet_id=\"0\")\n"
      "\n"
      "[OPTION 5]\n"
      "Thought: due to `xxx`, I need to:\n"
      "Action: like(author=\"zzz\", original_tweet_id=\"1\")\n"
      "\n"
      "Now begin your actions. Remember only write one function call after "
      "`Action:`.\n"
      "Based on the above history, what will you, " +
      context.name + ", do next?\n";
  return out;
}

std::vector<PromptTweet> parse_prompt_tweets(const std::string& prompt) {
  // Block (6) ends where block (7) starts; the public page block reuses the
  // tweet line format and must not leak into the result.
  const std::string begin_marker = "(6) The twitter page you can see is ";
  const std::string end_marker = "(7) The notifications you can see are ";
  auto begin = prompt.find(begin_marker);
  auto end = prompt.find(end_marker);
  if (begin == std::string::npos) return {};
  if (end == std::string::npos || end < begin) end = prompt.size();
  const std::string block =
      prompt.substr(begin, end - begin);

  std::vector<PromptTweet> tweets;
  const std::string line_marker = "tweet id: ";
  std::size_t pos = 0;
  while ((pos = block.find(line_marker, pos)) != std::string::npos) {
    std::size_t cursor = pos + line_marker.size();
    std::size_t id_end = block.find(" [", cursor);
    if (id_end == std::string::npos) break;
    std::size_t author_end = block.find("]: ", id_end);
    if (author_end == std::string::npos) break;
    std::size_t content_end = block.find(" --Post Time: ", author_end);
    if (content_end == std::string::npos) break;
    PromptTweet t;
    t.id = block.substr(cursor, id_end - cursor);
    t.author = block.substr(id_end + 2, author_end - id_end - 2);
    t.content = block.substr(author_end + 3, content_end - author_end - 3);
    tweets.push_back(std::move(t));
    pos = content_end;
  }
  return tweets;
}

std::string parse_prompt_name(const std::string& prompt) {
  const std::string marker = "what will you, ";
  auto pos = prompt.rfind(marker);
  if (pos == std::string::npos) return "";
  auto end = prompt.find(", do next?", pos);
  if (end == std::string::npos) return "";
  return prompt.substr(pos + marker.size(), end - pos - marker.size());
}

}  // namespace socsim::agent
