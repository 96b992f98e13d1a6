#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "socsim/abm.hpp"
#include "socsim/actions.hpp"
#include "socsim/annotate.hpp"
#include "socsim/environment.hpp"

namespace socsim::bridge {

// Where a per-round core attitude came from.
enum class AttitudeSource {
  generated_content,  // annotated from text the agent wrote this round
  carried_over,       // no usable text; previous value kept
  retweet_target,     // bare retweet; annotated from the shared tweet
};

std::string to_string(AttitudeSource source);
AttitudeSource parse_attitude_source(std::string_view text);

struct CoreAttitudeRecord {
  std::string agent_id;
  int round = 0;
  double attitude = 0.0;
  AttitudeSource source = AttitudeSource::carried_over;
};

// Signed attitude from a stance label and an unsigned intensity in [0, 1]:
// Support maps to +intensity, Oppose to -intensity, Neutral to 0.
double content_to_attitude(annotate::StanceLabel label, double intensity);

struct BridgeOptions {
  std::string topic = "the movement";
  // Valence lexicon for intensity scoring; null means the bundled one.
  const std::map<std::string, double>* valence_lexicon = nullptr;
};

struct SyncOutcome {
  // One record per input action, in input order.
  std::vector<CoreAttitudeRecord> records;
  // Engine-facing messages, same order. Always one per record.
  std::vector<abm::Message> messages;
  // Actions whose text could not be scored (annotator failure or a bare
  // retweet of an unresolvable tweet); their records carry the previous
  // value.
  std::size_t annotation_failures = 0;
};

// Converts one round of core-user actions into attitude scores the opinion
// models can consume. Posts, replies and quote retweets are scored from
// their own text; a bare retweet adopts the score of the shared tweet;
// DoNothing and Like carry the previous attitude forward. previous_attitude
// must hold an entry for every acting agent (the engine seeds round zero
// from the dataset), and engine_ids maps agent ids onto message sources.
SyncOutcome sync_core_into_pool(
    std::span<const std::pair<std::string, agent::AgentAction>> actions,
    int round, annotate::StanceBackend& stance,
    const env::Environment& environment,
    const std::unordered_map<std::string, double>& previous_attitude,
    const std::unordered_map<std::string, abm::AgentId>& engine_ids,
    const BridgeOptions& options = {});

}  // namespace socsim::bridge
