#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace socsim::agent {

inline constexpr std::array<std::string_view, 12> kAccountTypes = {
    "Journalist",
    "Private Person",
    "Celebrity",
    "Media Organization",
    "Activist",
    "Politician",
    "Social Bot",
    "NGO",
    "International Organization",
    "Company",
    "Governmental Organization",
    "Suspended Accounts",
};

inline constexpr std::array<std::string_view, 5> kCommunicationRoles = {
    "Idea Starter", "Amplifier", "Curator", "Commentator", "Viewer",
};

// Index 0 is tier 1, the least active / influential.
inline constexpr std::array<std::string_view, 3> kActivityLevels = {
    "not active", "moderately active", "highly active"};
inline constexpr std::array<std::string_view, 3> kInfluenceLevels = {
    "not influential", "moderately influential", "highly influential"};

bool valid_account_type(std::string_view text);
bool valid_communication_role(std::string_view text);

// One-sentence behavioral description injected next to the role name when
// building profile prompts.
std::string_view communication_role_description(std::string_view role);

struct CoreProfile {
  std::string name;
  std::string gender;
  std::string political_leaning;
  std::string account_type;        // one of kAccountTypes
  std::string communication_role;  // one of kCommunicationRoles
  int activity_tier = 1;           // 1..3
  int influence_tier = 1;          // 1..3
  std::string summary;             // natural-language self description
};

// Rejects out-of-catalog account types / roles and tiers outside 1..3.
void validate(const CoreProfile& profile);

// Splits a population 6:3:1 by ascending measure: the bottom 60% land in
// tier 1, the next 30% in tier 2, the rest in tier 3. Ties keep input order
// (stable sort), a single user lands in the top tier. Returns the tier for
// each input position.
std::vector<int> assign_social_tiers(std::span<const double> measure);

struct ProfileFacts {
  std::string name;
  std::string gender;
  std::string political_leaning;
  std::string account_type;
  std::string communication_role;
  int activity_tier = 1;
  int influence_tier = 1;
  std::string bio;
  std::vector<std::string> sample_tweets;
};

// Instruction asking a text driver to compress the facts into a first-person
// summary paragraph.
std::string render_profile_summary_prompt(const ProfileFacts& facts);

}  // namespace socsim::agent
