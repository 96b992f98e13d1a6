#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "doctest.h"
#include "socsim/bridge.hpp"

using namespace socsim;
using namespace socsim::bridge;

TEST_CASE("stance label and intensity combine into a signed attitude") {
  CHECK(content_to_attitude(annotate::StanceLabel::support, 0.6) == 0.6);
  CHECK(content_to_attitude(annotate::StanceLabel::oppose, 0.6) == -0.6);
  CHECK(content_to_attitude(annotate::StanceLabel::neutral, 0.9) == 0.0);
  CHECK(content_to_attitude(annotate::StanceLabel::support, 0.0) == 0.0);
  CHECK(content_to_attitude(annotate::StanceLabel::oppose, 1.0) == -1.0);
  CHECK_THROWS_AS(content_to_attitude(annotate::StanceLabel::support, -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(content_to_attitude(annotate::StanceLabel::support, 1.01),
                  std::invalid_argument);
}

TEST_CASE("attitude sources round-trip through their names") {
  for (auto source :
       {AttitudeSource::generated_content, AttitudeSource::carried_over,
        AttitudeSource::retweet_target}) {
    CHECK(parse_attitude_source(to_string(source)) == source);
  }
  CHECK_THROWS_AS(parse_attitude_source("telepathy"), std::invalid_argument);
}

namespace {

using ActionList = std::vector<std::pair<std::string, agent::AgentAction>>;

// Environment with one resolvable tweet (id 1, by bob, clearly supportive
// under the test lexicon) plus fixed previous attitudes and engine ids.
struct Fixture {
  std::map<std::string, double> lexicon{{"justice", 0.6}, {"bad", -0.5}};
  annotate::LexiconStanceBackend stance{lexicon};
  env::Environment environment;
  std::unordered_map<std::string, double> previous{{"alice", 0.2},
                                                   {"bob", -0.1}};
  std::unordered_map<std::string, abm::AgentId> engine_ids{{"alice", 10},
                                                           {"bob", 11}};
  BridgeOptions options;

  Fixture() {
    environment.add_user("alice");
    environment.add_user("bob");
    const auto record = environment.apply_action(
        agent::AgentAction{agent::Post{"justice now"}}, "bob", 0, 0);
    REQUIRE(record.tweet_id == 1);
    options.valence_lexicon = &lexicon;
  }

  SyncOutcome sync(const ActionList& actions, int round = 3) {
    return sync_core_into_pool(actions, round, stance, environment, previous,
                               engine_ids, options);
  }
};

struct ThrowingBackend : annotate::StanceBackend {
  annotate::StanceLabel annotate(const std::string&,
                                 const std::string&) override {
    throw std::runtime_error("annotator offline");
  }
};

}  // namespace

TEST_CASE("posts, replies and quote retweets are scored from their text") {
  Fixture f;
  const ActionList actions = {
      {"alice", agent::Post{"Justice!"}},
      {"bob", agent::Reply{"bad bad", "alice", "1"}},
      {"alice",
       agent::Retweet{std::string("justice justice"), "bob", "1",
                      "justice now"}},
  };
  const auto out = f.sync(actions);
  REQUIRE(out.records.size() == 3);
  REQUIRE(out.messages.size() == 3);
  CHECK(out.annotation_failures == 0);

  CHECK(out.records[0].agent_id == "alice");
  CHECK(out.records[0].round == 3);
  CHECK(out.records[0].attitude == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out.records[0].source == AttitudeSource::generated_content);

  CHECK(out.records[1].attitude == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(out.records[1].source == AttitudeSource::generated_content);

  CHECK(out.records[2].attitude == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(out.records[2].source == AttitudeSource::generated_content);

  // Messages mirror the records: engine source id, same score, no segment.
  CHECK(out.messages[0].source == 10);
  CHECK(out.messages[1].source == 11);
  CHECK(out.messages[2].source == 10);
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    CHECK(out.messages[i].score == out.records[i].attitude);
    CHECK(!out.messages[i].segment.has_value());
  }
}

TEST_CASE("a bare retweet adopts the score of the shared tweet") {
  Fixture f;
  const ActionList actions = {
      {"alice", agent::Retweet{std::nullopt, "bob", "1", "justice now"}},
      // An empty quote counts as bare too.
      {"bob", agent::Retweet{std::string(""), "bob", "1", "justice now"}},
  };
  const auto out = f.sync(actions);
  REQUIRE(out.records.size() == 2);
  CHECK(out.annotation_failures == 0);
  for (const auto& record : out.records) {
    CHECK(record.attitude == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(record.source == AttitudeSource::retweet_target);
  }
}

TEST_CASE("doing nothing and liking carry the previous attitude forward") {
  Fixture f;
  const ActionList actions = {
      {"alice", agent::DoNothing{}},
      {"bob", agent::Like{"bob", "1"}},
  };
  const auto out = f.sync(actions);
  REQUIRE(out.records.size() == 2);
  CHECK(out.annotation_failures == 0);
  CHECK(out.records[0].attitude == 0.2);
  CHECK(out.records[0].source == AttitudeSource::carried_over);
  CHECK(out.records[1].attitude == -0.1);
  CHECK(out.records[1].source == AttitudeSource::carried_over);
  CHECK(out.messages[0].score == 0.2);
  CHECK(out.messages[1].score == -0.1);
}

TEST_CASE("unresolvable bare retweets keep the previous value and count") {
  Fixture f;
  const ActionList actions = {
      {"alice", agent::Retweet{std::nullopt, "bob", "999", ""}},
      {"bob", agent::Retweet{std::nullopt, "bob", "not-a-number", ""}},
  };
  const auto out = f.sync(actions);
  REQUIRE(out.records.size() == 2);
  CHECK(out.annotation_failures == 2);
  CHECK(out.records[0].attitude == 0.2);
  CHECK(out.records[0].source == AttitudeSource::carried_over);
  CHECK(out.records[1].attitude == -0.1);
  CHECK(out.records[1].source == AttitudeSource::carried_over);
}

TEST_CASE("a failing annotator degrades to the previous value") {
  Fixture f;
  ThrowingBackend broken;
  const ActionList actions = {
      {"alice", agent::Post{"anything at all"}},
      {"bob", agent::DoNothing{}},
  };
  const auto out = sync_core_into_pool(actions, 1, broken, f.environment,
                                       f.previous, f.engine_ids, f.options);
  REQUIRE(out.records.size() == 2);
  CHECK(out.annotation_failures == 1);
  CHECK(out.records[0].attitude == 0.2);
  CHECK(out.records[0].source == AttitudeSource::carried_over);
  CHECK(out.records[1].attitude == -0.1);
}

TEST_CASE("missing bookkeeping entries are logic errors") {
  Fixture f;
  const ActionList unknown_agent = {{"carol", agent::DoNothing{}}};
  CHECK_THROWS_AS(f.sync(unknown_agent), std::logic_error);

  const ActionList known = {{"alice", agent::DoNothing{}}};
  const std::unordered_map<std::string, abm::AgentId> no_engine_ids;
  CHECK_THROWS_AS(
      sync_core_into_pool(known, 1, f.stance, f.environment, f.previous,
                          no_engine_ids, f.options),
      std::logic_error);
}

TEST_CASE("the bundled lexicon is used when none is supplied") {
  auto stance = annotate::LexiconStanceBackend::with_default_lexicon();
  env::Environment environment;
  environment.add_user("alice");
  const std::unordered_map<std::string, double> previous{{"alice", 0.0}};
  const std::unordered_map<std::string, abm::AgentId> engine_ids{
      {"alice", 0}};
  const ActionList actions = {
      {"alice", agent::Post{"I support this, it gives me hope."}}};
  const auto out = sync_core_into_pool(actions, 1, stance, environment,
                                       previous, engine_ids, {});
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].attitude > 0.0);
  CHECK(out.records[0].attitude <= 1.0);
  CHECK(out.records[0].source == AttitudeSource::generated_content);
}

TEST_CASE("neutral text yields a zero attitude regardless of intensity") {
  Fixture f;
  // "justice bad" averages to 0.05, inside the neutral band.
  const ActionList actions = {{"alice", agent::Post{"justice bad"}}};
  const auto out = f.sync(actions);
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].attitude == 0.0);
  CHECK(out.records[0].source == AttitudeSource::generated_content);
}
