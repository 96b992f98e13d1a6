#include "socsim/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace socsim::agent {

bool valid_account_type(std::string_view text) {
  return std::find(kAccountTypes.begin(), kAccountTypes.end(), text) !=
         kAccountTypes.end();
}

bool valid_communication_role(std::string_view text) {
  return std::find(kCommunicationRoles.begin(), kCommunicationRoles.end(),
                   text) != kCommunicationRoles.end();
}

std::string_view communication_role_description(std::string_view role) {
  if (role == "Idea Starter") {
    return "Start a conversational meme, and tend to be highly engaged with "
           "the media and post original content.";
  }
  if (role == "Amplifier") {
    return "Collect multiple thoughts and share ideas and opinions. Enjoy "
           "being the first one to retweet original content.";
  }
  if (role == "Curator") {
    return "Use a broader context to define ideas. Tend to take ideas of "
           "others and either validate, question, challenge, or dismiss "
           "them.";
  }
  if (role == "Commentator") {
    return "Detail and refine ideas. Take part in something to which he or "
           "she strongly feels about.";
  }
  if (role == "Viewer") {
    return "Take a passive interest in the conversation. Prefer to consume "
           "information rather than create or share information online.";
  }
  throw std::invalid_argument("unknown communication role: " +
                              std::string(role));
}

void validate(const CoreProfile& profile) {
  if (profile.name.empty()) {
    throw std::invalid_argument("profile without a name");
  }
  if (!valid_account_type(profile.account_type)) {
    throw std::invalid_argument("unknown account type: " +
                                profile.account_type);
  }
  if (!valid_communication_role(profile.communication_role)) {
    throw std::invalid_argument("unknown communication role: " +
                                profile.communication_role);
  }
  if (profile.activity_tier < 1 || profile.activity_tier > 3 ||
      profile.influence_tier < 1 || profile.influence_tier > 3) {
    throw std::invalid_argument("social tier outside 1..3 for " +
                                profile.name);
  }
}

std::vector<int> assign_social_tiers(std::span<const double> measure) {
  const std::size_t n = measure.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return measure[a] < measure[b];
                   });
  const auto tier1 = static_cast<std::size_t>(
      std::floor(0.6 * static_cast<double>(n)));
  const auto tier2 = static_cast<std::size_t>(
      std::floor(0.9 * static_cast<double>(n)));
  std::vector<int> tiers(n, 1);
  for (std::size_t rank = 0; rank < n; ++rank) {
    tiers[order[rank]] = rank < tier1 ? 1 : rank < tier2 ? 2 : 3;
  }
  return tiers;
}

std::string render_profile_summary_prompt(const ProfileFacts& facts) {
  if (facts.activity_tier < 1 || facts.activity_tier > 3 ||
      facts.influence_tier < 1 || facts.influence_tier > 3) {
    throw std::invalid_argument("social tier outside 1..3");
  }
  std::string tweets;
  for (std::size_t i = 0; i < facts.sample_tweets.size(); ++i) {
    if (i > 0) tweets += " | ";
    tweets += facts.sample_tweets[i];
  }
  std::string prompt =
      "Given the following observation about an individual " + facts.name +
      ", please summarize the relevant details from the profile. His or her "
      "profile information is as follows:\n\n";
  prompt += "Name: " + facts.name + "\n";
  prompt += "Gender: " + facts.gender + "\n";
  prompt += "Political Leaning: " + facts.political_leaning + "\n";
  prompt += "Activity Level: " +
            std::string(kActivityLevels[facts.activity_tier - 1]) + "\n";
  prompt += "Influence Level: " +
            std::string(kInfluenceLevels[facts.influence_tier - 1]) + "\n";
  prompt += "Feature: " + facts.communication_role + ". " +
            std::string(communication_role_description(
                facts.communication_role)) +
            "\n";
  prompt += "Account Type: " + facts.account_type + "\n";
  prompt += "Short Bio: " + facts.bio + "\n";
  prompt += "A selection of posted tweets: " + tweets + "\n";
  prompt +=
      "You can deduce the preferences and personality from the bio and "
      "tweets, but please avoid repeating the observation in the summary.\n"
      "Summary:";
  return prompt;
}

}  // namespace socsim::agent
