#include "socsim/abm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace socsim::abm {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

ModelKind kind_of(const ModelParams& params) {
  return static_cast<ModelKind>(params.index());
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::bc: return "bc";
    case ModelKind::hk: return "hk";
    case ModelKind::ra: return "ra";
    case ModelKind::sj: return "sj";
    case ModelKind::lorenz: return "lorenz";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "bc") return ModelKind::bc;
  if (name == "hk") return ModelKind::hk;
  if (name == "ra") return ModelKind::ra;
  if (name == "sj") return ModelKind::sj;
  if (name == "lorenz") return ModelKind::lorenz;
  return std::nullopt;
}

void validate(const ModelParams& params) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BcParams>) {
          require(unit_interval(p.alpha), "bc: alpha must be in [0,1]");
          require(p.epsilon > 0.0, "bc: epsilon must be > 0");
        } else if constexpr (std::is_same_v<T, HkParams>) {
          require(p.epsilon > 0.0, "hk: epsilon must be > 0");
        } else if constexpr (std::is_same_v<T, RaParams>) {
          require(unit_interval(p.alpha), "ra: alpha must be in [0,1]");
          require(p.init_uncertainty > 0.0,
                  "ra: init_uncertainty must be > 0");
        } else if constexpr (std::is_same_v<T, SjParams>) {
          require(unit_interval(p.alpha), "sj: alpha must be in [0,1]");
          require(p.acc_thred > 0.0, "sj: acc_thred must be > 0");
          require(p.rej_thred > p.acc_thred,
                  "sj: rej_thred must be > acc_thred");
        } else if constexpr (std::is_same_v<T, LorenzParams>) {
          require(unit_interval(p.alpha), "lorenz: alpha must be in [0,1]");
          require(p.lambda > 0.0, "lorenz: lambda must be > 0");
          require(p.k > 0.0, "lorenz: k must be > 0");
          require(unit_interval(p.rho), "lorenz: rho must be in [0,1]");
          require(p.boundary > 0.0, "lorenz: boundary must be > 0");
          require(unit_interval(p.credibility),
                  "lorenz: credibility must be in [0,1]");
        }
      },
      params);
}

Message message_of(const ModelParams& params, const OrdinaryAgent& agent) {
  Message msg;
  msg.source = agent.id;
  msg.score = agent.attitude;
  if (kind_of(params) == ModelKind::ra) {
    if (!(agent.uncertainty > 0.0)) {
      throw std::logic_error("ra: agent uncertainty must be > 0");
    }
    msg.segment = {agent.attitude - agent.uncertainty,
                   agent.attitude + agent.uncertainty};
  }
  return msg;
}

SelectionResult select_partners(const ModelParams& params,
                                const OrdinaryAgent& focal,
                                std::span<const Candidate> pool,
                                Substream& rng) {
  SelectionResult result;
  const ModelKind kind = kind_of(params);

  if (kind == ModelKind::hk) {
    result.targets.reserve(pool.size());
    result.pool_indices.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].id == focal.id) continue;
      result.targets.push_back(pool[i].id);
      result.pool_indices.push_back(i);
    }
    return result;
  }

  if (kind == ModelKind::bc) {
    const double eps = std::get<BcParams>(params).epsilon;
    // Two passes: count eligible candidates, then draw the r-th one. One
    // rng draw per agent keeps the substream layout stable.
    std::size_t eligible = 0;
    for (const Candidate& c : pool) {
      if (c.id == focal.id) continue;
      if (std::abs(c.score - focal.attitude) < eps) ++eligible;
    }
    if (eligible == 0) return result;
    std::uint64_t r = rng.uniform_below(eligible);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].id == focal.id) continue;
      if (std::abs(pool[i].score - focal.attitude) < eps) {
        if (r == 0) {
          result.targets.push_back(pool[i].id);
          result.pool_indices.push_back(i);
          break;
        }
        --r;
      }
    }
    return result;
  }

  // RA / SJ / Lorenz: one uniform partner among everyone except the focal
  // agent.
  std::size_t others = 0;
  for (const Candidate& c : pool) {
    if (c.id != focal.id) ++others;
  }
  if (others == 0) return result;
  std::uint64_t r = rng.uniform_below(others);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].id == focal.id) continue;
    if (r == 0) {
      result.targets.push_back(pool[i].id);
      result.pool_indices.push_back(i);
      break;
    }
    --r;
  }
  return result;
}

double update_bc(const OrdinaryAgent& state, const Message& msg,
                 const BcParams& params) {
  const double sim =
      std::abs(msg.score - state.attitude) < params.epsilon ? 1.0 : 0.0;
  return params.alpha * sim * (msg.score - state.attitude);
}

double update_hk(const OrdinaryAgent& state, std::span<const Message> msgs,
                 const HkParams& params, bool repulsive_difference) {
  double sum = 0.0;
  double n_in = 0.0;
  for (const Message& m : msgs) {
    if (std::abs(m.score - state.attitude) < params.epsilon) {
      n_in += 1.0;
      sum += repulsive_difference ? (state.attitude - m.score)
                                 : (m.score - state.attitude);
    }
  }
  if (n_in == 0.0) return 0.0;
  return (n_in / (n_in + 1.0)) * (1.0 / n_in) * sum;
}

double update_ra(const OrdinaryAgent& state, const Message& msg,
                 const RaParams& params, bool repulsive_difference) {
  if (!msg.segment) {
    throw std::logic_error("ra: message is missing its uncertainty segment");
  }
  const auto [lo_j, hi_j] = *msg.segment;
  const double u_j = (hi_j - lo_j) / 2.0;
  // Overlap of the two attitude segments; relative agreement is h/u_j.
  const double h = std::min(state.attitude + state.uncertainty, hi_j) -
                   std::max(state.attitude - state.uncertainty, lo_j);
  const double rel = h / u_j;
  const double sim = rel > 1.0 ? rel - 1.0 : 0.0;
  const double pull = repulsive_difference ? (state.attitude - msg.score)
                                          : (msg.score - state.attitude);
  return params.alpha * sim * pull;
}

double update_sj(const OrdinaryAgent& state, const Message& msg,
                 const SjParams& params) {
  const double diff = msg.score - state.attitude;
  const double sim_term = std::abs(diff) < params.acc_thred ? diff : 0.0;
  const double rep_term = std::abs(diff) > params.rej_thred ? -diff : 0.0;
  return params.alpha * (sim_term + rep_term);
}

double update_lorenz(const OrdinaryAgent& state, const Message& msg,
                     const LorenzParams& params) {
  const double m2 = params.boundary * params.boundary;
  const double pol = (m2 - state.attitude * state.attitude) / m2;
  const double lk = std::pow(params.lambda, params.k);
  const double sim =
      lk / (lk + std::pow(std::abs(msg.score - state.attitude), params.k));
  const double asm_force = msg.score - state.attitude;
  const double ref_force = msg.score;
  return params.alpha * params.credibility * pol * sim *
         (params.rho * asm_force + (1.0 - params.rho) * ref_force);
}

namespace {

// Fetches the message behind a pool entry. Entries below n_agents are
// ordinary agents; the rest are externals. Externals never carry a segment,
// so under RA they get one of the model's init_uncertainty.
Message pool_message(const ModelParams& params,
                     const std::vector<OrdinaryAgent>& snapshot,
                     std::span<const Message> externals, std::size_t index) {
  if (index < snapshot.size()) {
    return message_of(params, snapshot[index]);
  }
  Message msg = externals[index - snapshot.size()];
  if (kind_of(params) == ModelKind::ra && !msg.segment) {
    const double u = std::get<RaParams>(params).init_uncertainty;
    msg.segment = {msg.score - u, msg.score + u};
  }
  return msg;
}

double agent_delta(const ModelParams& params,
                   const std::vector<OrdinaryAgent>& snapshot,
                   std::span<const Candidate> pool,
                   std::span<const Message> externals,
                   const OrdinaryAgent& agent, Substream& rng,
                   const StepOptions& options) {
  const ModelKind kind = kind_of(params);

  if (kind == ModelKind::hk) {
    // Fused select-all + in-bound filter; same arithmetic order as
    // update_hk over the pool, without materialising N messages.
    const double eps = std::get<HkParams>(params).epsilon;
    double sum = 0.0;
    double n_in = 0.0;
    for (const Candidate& c : pool) {
      if (c.id == agent.id) continue;
      if (std::abs(c.score - agent.attitude) < eps) {
        n_in += 1.0;
        sum += options.repulsive_difference ? (agent.attitude - c.score)
                                           : (c.score - agent.attitude);
      }
    }
    if (n_in == 0.0) return 0.0;
    return (n_in / (n_in + 1.0)) * (1.0 / n_in) * sum;
  }

  const SelectionResult sel = select_partners(params, agent, pool, rng);
  if (sel.pool_indices.empty()) return 0.0;
  const Message msg =
      pool_message(params, snapshot, externals, sel.pool_indices.front());
  switch (kind) {
    case ModelKind::bc:
      return update_bc(agent, msg, std::get<BcParams>(params));
    case ModelKind::ra:
      return update_ra(agent, msg, std::get<RaParams>(params),
                       options.repulsive_difference);
    case ModelKind::sj:
      return update_sj(agent, msg, std::get<SjParams>(params));
    case ModelKind::lorenz:
      return update_lorenz(agent, msg, std::get<LorenzParams>(params));
    default:
      return 0.0;
  }
}

}  // namespace

std::vector<OrdinaryAgent> step_round(const ModelParams& params,
                                      const std::vector<OrdinaryAgent>& population,
                                      std::span<const Message> externals,
                                      std::uint64_t seed, int round,
                                      const StepOptions& options) {
  validate(params);
  for (const Message& m : externals) {
    if (!attitude_in_range(m.score)) {
      throw std::invalid_argument(
          "external message score outside the attitude space [-1,1]");
    }
  }

  std::vector<Candidate> pool;
  pool.reserve(population.size() + externals.size());
  for (const OrdinaryAgent& a : population) {
    pool.push_back({a.id, a.attitude});
  }
  for (const Message& m : externals) {
    pool.push_back({m.source, m.score});
  }

  if (!options.synchronous) {
    // Sequential mode: each agent sees earlier commits within the round.
    std::vector<OrdinaryAgent> current = population;
    for (std::size_t i = 0; i < current.size(); ++i) {
      Substream rng = substream(seed, static_cast<std::uint64_t>(current[i].id),
                                static_cast<std::uint64_t>(round));
      const double delta =
          agent_delta(params, current, pool, externals, current[i], rng, options);
      current[i].attitude = clamp_attitude(current[i].attitude + delta);
      pool[i].score = current[i].attitude;
    }
    return current;
  }

  std::vector<OrdinaryAgent> next = population;
  const auto update_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const OrdinaryAgent& agent = population[i];
      Substream rng = substream(seed, static_cast<std::uint64_t>(agent.id),
                                static_cast<std::uint64_t>(round));
      const double delta =
          agent_delta(params, population, pool, externals, agent, rng, options);
      next[i].attitude = clamp_attitude(agent.attitude + delta);
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1 || population.size() < 2) {
    update_range(0, population.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t n = population.size();
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n, static_cast<std::size_t>(w) * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(update_range, begin, end);
    }
    for (auto& t : threads) t.join();
  }
  return next;
}

std::vector<std::vector<double>> simulate(
    const ModelParams& params, std::vector<OrdinaryAgent> population,
    int rounds, std::uint64_t seed, const StepOptions& options,
    std::span<const std::vector<Message>> externals_per_round) {
  prepare_population(params, population);
  std::vector<std::vector<double>> trace;
  trace.reserve(static_cast<std::size_t>(rounds));
  static const std::vector<Message> kNoExternals;
  for (int round = 1; round <= rounds; ++round) {
    const std::vector<Message>& externals =
        static_cast<std::size_t>(round - 1) < externals_per_round.size()
            ? externals_per_round[static_cast<std::size_t>(round - 1)]
            : kNoExternals;
    population = step_round(params, population, externals, seed, round, options);
    std::vector<double> attitudes;
    attitudes.reserve(population.size());
    for (const OrdinaryAgent& a : population) attitudes.push_back(a.attitude);
    trace.push_back(std::move(attitudes));
  }
  return trace;
}

void prepare_population(const ModelParams& params,
                        std::vector<OrdinaryAgent>& population) {
  if (kind_of(params) != ModelKind::ra) return;
  const double u = std::get<RaParams>(params).init_uncertainty;
  for (OrdinaryAgent& a : population) {
    if (!(a.uncertainty > 0.0)) a.uncertainty = u;
  }
}

}  // namespace socsim::abm
