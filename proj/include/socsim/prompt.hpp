#pragma once

#include <string>
#include <vector>

#include "socsim/environment.hpp"
#include "socsim/profile.hpp"

namespace socsim::agent {

// "tweet id: 356 [T***x]: some text --Post Time: 2018-01-07 04:00:00"
std::string render_tweet_line(const env::Tweet& tweet);

// Everything the per-round action prompt carries. Memory and notification
// lines arrive pre-rendered; the assembler only lays out blocks.
struct PromptContext {
  std::string name;
  std::string summary;
  std::string current_time;  // already formatted
  std::string news;          // may be empty
  std::string personal_experience;
  std::vector<std::string> recent_memory;
  std::vector<env::Tweet> page;
  std::vector<std::string> notifications;
  // When set, an extra block shows the platform-wide hashtag page and
  // encourages posting there.
  bool include_public_page = false;
  std::vector<env::Tweet> public_page;
};

// Builds the action prompt. The output is byte-stable: the same context
// always yields the same string, and the layout (numbered observation
// blocks, function catalog, five format options) never varies.
std::string assemble_prompt(const PromptContext& context);

// Extracts the "tweet id: ..." lines of block (6) back out of a prompt.
// Used by the deterministic driver, which sees nothing but the prompt.
struct PromptTweet {
  std::string id;
  std::string author;
  std::string content;
};
std::vector<PromptTweet> parse_prompt_tweets(const std::string& prompt);

// Name extracted from "what will you, {name}, do next?"; empty if absent.
std::string parse_prompt_name(const std::string& prompt);

}  // namespace socsim::agent
