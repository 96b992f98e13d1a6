#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "socsim/abm.hpp"
#include "socsim/annotate.hpp"
#include "socsim/bridge.hpp"
#include "socsim/driver.hpp"
#include "socsim/environment.hpp"
#include "socsim/metrics.hpp"
#include "socsim/profile.hpp"

namespace socsim::run {

inline constexpr std::string_view kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Dataset

struct DatasetUser {
  std::string id;
  bool is_core = false;
  double initial_attitude = 0.0;
  double uncertainty = 0.0;  // optional per-agent override (RA)
  agent::CoreProfile profile;             // core users only
  std::vector<std::string> history;       // core users only; seeds memory
};

struct MicroPairTruth {
  std::string behavior;      // "post" or "retweet"
  std::string stance;        // Support / Neutral / Oppose
  std::string content_type;  // one of the content categories
  std::optional<double> attitude;
  std::string text;  // the real response
};

// A recorded real-world situation plus what the real user did in it.
struct MicroPair {
  std::string user_id;
  std::string time;  // already formatted
  std::string news;
  std::string personal_experience;
  std::vector<std::string> memory_lines;
  std::vector<env::Tweet> page;
  std::vector<std::string> notifications;
  MicroPairTruth truth;
};

struct Dataset {
  std::vector<DatasetUser> users;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<env::NewsItem> news;
  std::vector<MicroPair> micro_pairs;

  const DatasetUser* find_user(const std::string& id) const;
  std::size_t core_count() const;
  std::size_t ordinary_count() const;
};

struct DatasetPaths {
  std::string users;        // required
  std::string edges;        // optional
  std::string news;         // optional
  std::string micro_pairs;  // optional
};

// Loads and cross-validates the dataset files. Errors carry the offending
// file and line. Checks: unique user ids, attitudes within [-1, 1], edge
// endpoints exist, no self-follows, news rounds >= 1, micro pairs reference
// core users and use known labels.
Dataset load_dataset(const DatasetPaths& paths);

// ---------------------------------------------------------------------------
// Configuration

struct AnnotatorConfig {
  enum class Kind { lexicon, remote };
  Kind kind = Kind::lexicon;
  double threshold = 0.05;  // lexicon stance cut
  // Word valences for the lexicon stance backend and intensity scoring;
  // empty means the bundled lexicon.
  std::map<std::string, double> lexicon;
  ChatConfig chat;  // remote only
};

struct RunConfig {
  abm::ModelParams model = abm::BcParams{};
  agent::DriverConfig driver;
  AnnotatorConfig annotator;
  int rounds = 14;
  std::uint64_t seed = 0;
  int workers = 1;
  bool synchronous = true;
  bool repulsive_difference = false;
  std::string topic = "the movement";
  env::FeedPolicy feed;
  std::size_t timeline_tweets = 5;  // visible page size
  std::size_t memory_snippets = 5;  // retrieved memory lines per prompt
  int reflection_period = 5;        // rounds; <= 0 disables
  std::size_t embedding_dim = 512;
  // Driver failures tolerated per round, as a fraction of core users.
  double failure_budget = 0.05;
  std::int64_t start_time = 1577836800;  // 2020-01-01 00:00:00 UTC
  std::int64_t step_seconds = 43200;     // half a day per round
  bool export_agent_attitudes = false;
};

// Strict parse: unknown keys are rejected so config typos fail loudly.
RunConfig config_from_json(const nlohmann::json& json);
nlohmann::json config_to_json(const RunConfig& config);
void validate(const RunConfig& config);

// ---------------------------------------------------------------------------
// Macro simulation (hybrid rounds)

struct RoundDiagnostics {
  int round = 0;
  std::size_t driver_failures = 0;
  std::size_t parse_degradations = 0;
  std::size_t rejected_actions = 0;
  std::size_t annotation_failures = 0;
};

struct MacroResult {
  // One row per completed round: core attitudes (dataset core order)
  // followed by ordinary attitudes (dataset order).
  metrics::AttitudeTrace trace;
  // Per-round core attitude records, round-major, core order within a round.
  std::vector<bridge::CoreAttitudeRecord> core_records;
  env::Environment environment;  // final tweet store and graph
  std::vector<RoundDiagnostics> diagnostics;
  // Mean production-vs-consumption cosine over core users at the end of the
  // run; absent when nobody produced or consumed anything.
  std::optional<double> echo_homogeneity;
  bool aborted = false;
  std::string abort_reason;

  // Column ids for trace rows: core ids then ordinary ids.
  std::vector<std::string> column_ids;
};

// Runs the hybrid loop: per round core users reflect, observe their feeds,
// generate actions through the driver, the bridge scores the new content,
// and the ordinary population takes one opinion-model step with those scores
// injected. Driver failures beyond ceil(failure_budget * core_count) in one
// round abort the run; completed rounds stay in the result.
MacroResult run_macro(const Dataset& dataset, const RunConfig& config);

// ---------------------------------------------------------------------------
// Micro evaluation (one-shot behavior reproduction)

struct MicroCase {
  std::string user_id;
  bool failed = false;  // driver error; excluded from metrics
  std::string diagnostic;
  std::string generated_text;  // empty when the action produced no text
  std::string predicted_behavior;
  std::string truth_behavior;
  std::string predicted_stance;
  std::string truth_stance;
  std::string predicted_content;  // empty without a content backend
  std::string truth_content;
  std::optional<double> predicted_attitude;
  std::optional<double> truth_attitude;
  std::optional<double> content_similarity;
};

struct MicroReport {
  std::vector<MicroCase> cases;
  std::size_t failures = 0;
  metrics::ClassificationMetrics behavior;  // labels {post, retweet}
  metrics::ClassificationMetrics stance;    // labels {Support, Neutral, Oppose}
  std::optional<metrics::ClassificationMetrics> content;
  std::optional<double> stance_mae;
  std::optional<double> mean_content_similarity;
};

// Replays each recorded situation through the configured driver and scores
// the simulated behavior, stance and content against the recorded truth.
// Failed driver calls are excluded from the metrics but counted. Predictions
// outside the {post, retweet} behavior space score as mismatches. Replay
// fixtures for micro runs use round 0; records are consumed in file order
// per agent. Content-type metrics need a remote annotator and are omitted
// otherwise.
MicroReport run_micro(const Dataset& dataset, const RunConfig& config);

// ---------------------------------------------------------------------------
// Frozen replication (recorded core trace, re-randomized ordinary users)

struct ReplicateSummary {
  int replicate = 0;
  std::uint64_t seed = 0;
  metrics::AttitudeTrace trace;  // same row layout as MacroResult::trace
  metrics::SeriesSummary summary;
};

// Re-runs the ordinary population `replicates` times against the fixed core
// attitude records. Replicate k uses derive_seed(config.seed, k), so
// replicate 0 reproduces the original ordinary dynamics. The core segment of
// every trace row is identical across replicates by construction.
std::vector<ReplicateSummary> run_frozen_replicate(
    const Dataset& dataset, const RunConfig& config,
    std::span<const bridge::CoreAttitudeRecord> core_records, int replicates);

// ---------------------------------------------------------------------------
// File formats

// trace.csv: header "round,mean,std", one row per round, full double
// precision.
void write_trace_csv(const metrics::SeriesSummary& summary, std::ostream& out);
metrics::SeriesSummary read_trace_csv(std::istream& in);

// Wide per-agent export: header "round,<id>,...".
void write_wide_trace_csv(const metrics::AttitudeTrace& trace,
                          const std::vector<std::string>& column_ids,
                          std::ostream& out);

// Core attitude records as JSONL, fields agent_id / round / attitude /
// source.
void write_core_trace_jsonl(
    std::span<const bridge::CoreAttitudeRecord> records, std::ostream& out);
std::vector<bridge::CoreAttitudeRecord> read_core_trace_jsonl(
    std::istream& in);

// Reproducibility manifest: version, seed, full config echo.
nlohmann::json run_manifest(const RunConfig& config);

nlohmann::json micro_report_json(const MicroReport& report);
nlohmann::json macro_metrics_json(
    const MacroResult& result,
    const std::optional<metrics::SeriesSummary>& empirical);

}  // namespace socsim::run
