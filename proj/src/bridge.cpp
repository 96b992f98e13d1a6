#include "socsim/bridge.hpp"

#include <charconv>
#include <stdexcept>

namespace socsim::bridge {

std::string to_string(AttitudeSource source) {
  switch (source) {
    case AttitudeSource::generated_content: return "generated_content";
    case AttitudeSource::carried_over: return "carried_over";
    case AttitudeSource::retweet_target: return "retweet_target";
  }
  throw std::logic_error("unreachable attitude source");
}

AttitudeSource parse_attitude_source(std::string_view text) {
  if (text == "generated_content") return AttitudeSource::generated_content;
  if (text == "carried_over") return AttitudeSource::carried_over;
  if (text == "retweet_target") return AttitudeSource::retweet_target;
  throw std::invalid_argument("unknown attitude source: " +
                              std::string(text));
}

double content_to_attitude(annotate::StanceLabel label, double intensity) {
  if (intensity < 0.0 || intensity > 1.0) {
    throw std::invalid_argument("intensity outside [0, 1]: " +
                                std::to_string(intensity));
  }
  switch (label) {
    case annotate::StanceLabel::support: return intensity;
    case annotate::StanceLabel::oppose: return -intensity;
    case annotate::StanceLabel::neutral: return 0.0;
  }
  throw std::logic_error("unreachable stance label");
}

namespace {

const env::Tweet* resolve_tweet(const env::Environment& environment,
                                const std::string& raw_id) {
  std::int64_t id = 0;
  auto [ptr, ec] =
      std::from_chars(raw_id.data(), raw_id.data() + raw_id.size(), id);
  if (ec != std::errc() || ptr != raw_id.data() + raw_id.size()) {
    return nullptr;
  }
  return environment.find(id);
}

}  // namespace

SyncOutcome sync_core_into_pool(
    std::span<const std::pair<std::string, agent::AgentAction>> actions,
    int round, annotate::StanceBackend& stance,
    const env::Environment& environment,
    const std::unordered_map<std::string, double>& previous_attitude,
    const std::unordered_map<std::string, abm::AgentId>& engine_ids,
    const BridgeOptions& options) {
  const auto& lexicon = options.valence_lexicon
                            ? *options.valence_lexicon
                            : annotate::default_valence_lexicon();
  SyncOutcome out;
  out.records.reserve(actions.size());
  out.messages.reserve(actions.size());

  for (const auto& [agent_id, action] : actions) {
    auto prev = previous_attitude.find(agent_id);
    if (prev == previous_attitude.end()) {
      throw std::logic_error("no previous attitude for agent " + agent_id);
    }
    auto engine = engine_ids.find(agent_id);
    if (engine == engine_ids.end()) {
      throw std::logic_error("no engine id for agent " + agent_id);
    }

    CoreAttitudeRecord record;
    record.agent_id = agent_id;
    record.round = round;
    record.attitude = prev->second;
    record.source = AttitudeSource::carried_over;

    // Pick the text this round's attitude should be read from.
    const std::string* text = nullptr;
    AttitudeSource text_source = AttitudeSource::generated_content;
    bool failed = false;
    if (const auto* post = std::get_if<agent::Post>(&action)) {
      text = &post->content;
    } else if (const auto* reply = std::get_if<agent::Reply>(&action)) {
      text = &reply->content;
    } else if (const auto* rt = std::get_if<agent::Retweet>(&action)) {
      if (rt->content && !rt->content->empty()) {
        text = &*rt->content;
      } else if (const env::Tweet* target =
                     resolve_tweet(environment, rt->original_tweet_id)) {
        text = &target->content;
        text_source = AttitudeSource::retweet_target;
      } else {
        failed = true;  // bare retweet of an unresolvable tweet
      }
    }

    if (text != nullptr) {
      try {
        const auto label = stance.annotate(*text, options.topic);
        const double intensity =
            annotate::sentiment_intensity(*text, lexicon);
        record.attitude = content_to_attitude(label, intensity);
        record.source = text_source;
      } catch (const std::exception&) {
        failed = true;  // annotator unavailable; keep previous value
        record.attitude = prev->second;
        record.source = AttitudeSource::carried_over;
      }
    }
    if (failed) ++out.annotation_failures;

    out.messages.push_back(
        abm::Message{engine->second, record.attitude, std::nullopt});
    out.records.push_back(std::move(record));
  }
  return out;
}

}  // namespace socsim::bridge
