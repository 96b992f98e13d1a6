#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "socsim/rng.hpp"

namespace socsim::abm {

// Attitude space: real in [-1, 1]. Sign is the direction of the opinion,
// magnitude its intensity. Every committed update is clamped back into it.
inline constexpr double kAttitudeMin = -1.0;
inline constexpr double kAttitudeMax = 1.0;

inline double clamp_attitude(double a) {
  if (a < kAttitudeMin) return kAttitudeMin;
  if (a > kAttitudeMax) return kAttitudeMax;
  return a;
}

inline bool attitude_in_range(double a) {
  return a >= kAttitudeMin && a <= kAttitudeMax;
}

using AgentId = std::int64_t;

struct OrdinaryAgent {
  AgentId id = 0;
  double attitude = 0.0;
  // Half-width of the attitude segment. Used by the relative-agreement
  // update; must be > 0 there. Ignored by the other models.
  double uncertainty = 0.0;
};

// Per-model parameters. alpha is the social-influence strength throughout.
struct BcParams {
  double alpha = 0.1;
  double epsilon = 0.3;  // confidence bound
};

struct HkParams {
  // Multi-source bounded confidence: influence strength is the induced
  // function n/(n+1) of the in-bound neighbour count, so only the bound
  // is free.
  double epsilon = 0.1;
};

struct RaParams {
  double alpha = 0.1;
  double init_uncertainty = 0.2;  // segment half-width assigned at setup
};

struct SjParams {
  double alpha = 0.1;
  double acc_thred = 0.1;  // latitude of acceptance
  double rej_thred = 0.9;  // latitude of rejection, > acc_thred
};

struct LorenzParams {
  double alpha = 0.1;
  double lambda = 1.0;  // similarity-bias shape
  double k = 2.0;       // similarity-bias shape
  double rho = 0.9;     // assimilation vs reinforcement weight
  double boundary = 1.0;    // theoretical attitude boundary M
  double credibility = 1.0; // source credibility s(i,j), constant
};

using ModelParams =
    std::variant<BcParams, HkParams, RaParams, SjParams, LorenzParams>;

enum class ModelKind { bc, hk, ra, sj, lorenz };

ModelKind kind_of(const ModelParams& params);
std::string to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

// Throws std::invalid_argument when a parameter violates its range
// (alpha outside [0,1], non-positive bounds, rej_thred <= acc_thred, ...).
void validate(const ModelParams& params);

// What an agent sends when selected: its attitude, unbiased. The
// relative-agreement model additionally carries the uncertainty segment
// [a - u, a + u].
struct Message {
  AgentId source = 0;
  double score = 0.0;
  std::optional<std::pair<double, double>> segment;
};

// One entry of the selection pool: an agent (or an injected external
// message) reduced to what selection looks at.
struct Candidate {
  AgentId id = 0;
  double score = 0.0;
};

struct SelectionResult {
  std::vector<AgentId> targets;            // never contains the focal id
  std::vector<std::size_t> pool_indices;   // positions of targets in the pool
};

// Message function. RA requires uncertainty > 0 (throws std::logic_error).
Message message_of(const ModelParams& params, const OrdinaryAgent& agent);

// Selection function over a pool snapshot. BC draws one uniform agent inside
// the confidence bound (empty result when nobody qualifies); HK takes the
// whole pool except the focal agent; RA/SJ/Lorenz draw one uniform agent
// except the focal one. A pool with no eligible entries yields an empty
// result, not an error.
SelectionResult select_partners(const ModelParams& params,
                                const OrdinaryAgent& focal,
                                std::span<const Candidate> pool,
                                Substream& rng);

// Attitude-change functions. Each returns the raw delta; the caller applies
// it and clamps. The HK and RA difference terms are assimilative by default
// (a_j - a_i, agents drift toward what they hear); `repulsive_difference`
// flips them to (a_i - a_j) for comparison runs.
double update_bc(const OrdinaryAgent& state, const Message& msg,
                 const BcParams& params);
double update_hk(const OrdinaryAgent& state, std::span<const Message> msgs,
                 const HkParams& params, bool repulsive_difference = false);
double update_ra(const OrdinaryAgent& state, const Message& msg,
                 const RaParams& params, bool repulsive_difference = false);
double update_sj(const OrdinaryAgent& state, const Message& msg,
                 const SjParams& params);
double update_lorenz(const OrdinaryAgent& state, const Message& msg,
                     const LorenzParams& params);

struct StepOptions {
  bool repulsive_difference = false;
  // Synchronous: every agent reads the round-start snapshot and all deltas
  // commit together. Asynchronous: agents update sequentially in population
  // order, each seeing earlier commits.
  bool synchronous = true;
  int workers = 1;
};

// One synchronous round over the population. The selection pool is the
// population snapshot plus `externals` (core-user messages), minus the focal
// agent. Each agent draws from substream (seed, agent id, round), so the
// result is independent of iteration order and worker count. External
// messages with |score| > 1 are rejected with std::invalid_argument.
std::vector<OrdinaryAgent> step_round(const ModelParams& params,
                                      const std::vector<OrdinaryAgent>& population,
                                      std::span<const Message> externals,
                                      std::uint64_t seed, int round,
                                      const StepOptions& options = {});

// Multi-round driver used by calibration and the pure-ABM mode. Rounds are
// numbered 1..rounds; externals_per_round[r-1], when provided, is injected
// into round r. Returns one attitude vector per round, population order.
std::vector<std::vector<double>> simulate(
    const ModelParams& params, std::vector<OrdinaryAgent> population,
    int rounds, std::uint64_t seed, const StepOptions& options = {},
    std::span<const std::vector<Message>> externals_per_round = {});

// Populates uncertainty on every agent from RA's init_uncertainty (no-op for
// the other models).
void prepare_population(const ModelParams& params,
                        std::vector<OrdinaryAgent>& population);

}  // namespace socsim::abm
