#include "socsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <unordered_map>

#include "socsim/calibrate.hpp"
#include "socsim/prompt.hpp"
#include "socsim/response.hpp"
#include "socsim/rng.hpp"

namespace socsim::run {

namespace {

// Chunked thread pool for index ranges; exceptions resurface on the caller.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + w - 1) / w;
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  for (std::size_t t = 0; t < w; ++t) {
    threads.emplace_back([&, t] {
      try {
        const std::size_t begin = std::min(t * chunk, n);
        const std::size_t end = std::min((t + 1) * chunk, n);
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ChatConfig chat_from_json(const nlohmann::json& j) {
  ChatConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "endpoint") c.endpoint = value.get<std::string>();
    else if (key == "model") c.model = value.get<std::string>();
    else if (key == "max_tokens") c.max_tokens = value.get<int>();
    else if (key == "temperature") c.temperature = value.get<double>();
    else if (key == "timeout_ms") c.timeout_ms = value.get<int>();
    else if (key == "retries") c.retries = value.get<int>();
    else if (key == "backoff_ms") c.backoff_ms = value.get<int>();
    else if (key == "api_key_env") c.api_key_env = value.get<std::string>();
    else if (key == "kind" || key == "replay_path" || key == "threshold" ||
             key == "lexicon") {
      // owned by the enclosing driver/annotator object
    } else {
      throw std::invalid_argument("unknown chat option: " + key);
    }
  }
  return c;
}

nlohmann::json chat_to_json(const ChatConfig& c) {
  return {
      {"endpoint", c.endpoint},     {"model", c.model},
      {"max_tokens", c.max_tokens}, {"temperature", c.temperature},
      {"timeout_ms", c.timeout_ms}, {"retries", c.retries},
      {"backoff_ms", c.backoff_ms}, {"api_key_env", c.api_key_env},
  };
}

std::unique_ptr<annotate::StanceBackend> make_stance_backend(
    const AnnotatorConfig& config) {
  if (config.kind == AnnotatorConfig::Kind::remote) {
    return std::make_unique<annotate::RemoteStanceBackend>(config.chat);
  }
  auto lexicon = config.lexicon.empty() ? annotate::default_valence_lexicon()
                                        : config.lexicon;
  return std::make_unique<annotate::LexiconStanceBackend>(std::move(lexicon),
                                                          config.threshold);
}

std::string behavior_name(const agent::AgentAction& action) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, agent::DoNothing>) return "do_nothing";
        else if constexpr (std::is_same_v<T, agent::Post>) return "post";
        else if constexpr (std::is_same_v<T, agent::Retweet>) return "retweet";
        else if constexpr (std::is_same_v<T, agent::Reply>) return "reply";
        else return "like";
      },
      action);
}

std::string join(const std::vector<std::string>& parts,
                 const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& json) {
  if (!json.is_object()) {
    throw std::invalid_argument("run config must be a JSON object");
  }
  RunConfig config;
  for (const auto& [key, value] : json.items()) {
    if (key == "model") {
      auto kind = abm::parse_model_kind(value.at("kind").get<std::string>());
      if (!kind) {
        throw std::invalid_argument("unknown model kind: " +
                                    value.at("kind").get<std::string>());
      }
      std::vector<std::pair<std::string, double>> values;
      for (const auto& [pk, pv] : value.items()) {
        if (pk == "kind") continue;
        values.emplace_back(calib::canonical_parameter_name(pk),
                            pv.get<double>());
      }
      config.model = calib::params_from_values(*kind, values);
    } else if (key == "driver") {
      config.driver.kind =
          agent::parse_driver_kind(value.value("kind", "heuristic"));
      config.driver.replay_path = value.value("replay_path", "");
      config.driver.chat = chat_from_json(value);
    } else if (key == "annotator") {
      const std::string kind = value.value("kind", "lexicon");
      if (kind == "lexicon") {
        config.annotator.kind = AnnotatorConfig::Kind::lexicon;
      } else if (kind == "remote") {
        config.annotator.kind = AnnotatorConfig::Kind::remote;
      } else {
        throw std::invalid_argument("unknown annotator kind: " + kind);
      }
      config.annotator.threshold = value.value("threshold", 0.05);
      if (value.contains("lexicon")) {
        for (const auto& [word, v] : value.at("lexicon").items()) {
          config.annotator.lexicon[word] = v.get<double>();
        }
      }
      config.annotator.chat = chat_from_json(value);
    } else if (key == "feed") {
      config.feed.mode = env::parse_feed_mode(value.value("mode", "none"));
      config.feed.replace_fraction = value.value("replace_fraction", 0.3);
      config.feed.neutral_threshold = value.value("neutral_threshold", 0.1);
    } else if (key == "rounds") {
      config.rounds = value.get<int>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else if (key == "workers") {
      config.workers = value.get<int>();
    } else if (key == "synchronous") {
      config.synchronous = value.get<bool>();
    } else if (key == "repulsive_difference") {
      config.repulsive_difference = value.get<bool>();
    } else if (key == "topic") {
      config.topic = value.get<std::string>();
    } else if (key == "timeline_tweets") {
      config.timeline_tweets = value.get<std::size_t>();
    } else if (key == "memory_snippets") {
      config.memory_snippets = value.get<std::size_t>();
    } else if (key == "reflection_period") {
      config.reflection_period = value.get<int>();
    } else if (key == "embedding_dim") {
      config.embedding_dim = value.get<std::size_t>();
    } else if (key == "failure_budget") {
      config.failure_budget = value.get<double>();
    } else if (key == "start_time") {
      config.start_time = env::parse_timestamp(value.get<std::string>());
    } else if (key == "step_seconds") {
      config.step_seconds = value.get<std::int64_t>();
    } else if (key == "export_agent_attitudes") {
      config.export_agent_attitudes = value.get<bool>();
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  validate(config);
  return config;
}

nlohmann::json config_to_json(const RunConfig& config) {
  nlohmann::json model{{"kind", abm::to_string(abm::kind_of(config.model))}};
  for (const auto& [name, value] : calib::params_to_values(config.model)) {
    model[name] = value;
  }
  nlohmann::json driver = chat_to_json(config.driver.chat);
  driver["kind"] = agent::to_string(config.driver.kind);
  driver["replay_path"] = config.driver.replay_path;
  nlohmann::json annotator = chat_to_json(config.annotator.chat);
  annotator["kind"] = config.annotator.kind == AnnotatorConfig::Kind::lexicon
                          ? "lexicon"
                          : "remote";
  annotator["threshold"] = config.annotator.threshold;
  annotator["lexicon"] = config.annotator.lexicon;
  return {
      {"model", model},
      {"driver", driver},
      {"annotator", annotator},
      {"feed",
       {{"mode", env::to_string(config.feed.mode)},
        {"replace_fraction", config.feed.replace_fraction},
        {"neutral_threshold", config.feed.neutral_threshold}}},
      {"rounds", config.rounds},
      {"seed", config.seed},
      {"workers", config.workers},
      {"synchronous", config.synchronous},
      {"repulsive_difference", config.repulsive_difference},
      {"topic", config.topic},
      {"timeline_tweets", config.timeline_tweets},
      {"memory_snippets", config.memory_snippets},
      {"reflection_period", config.reflection_period},
      {"embedding_dim", config.embedding_dim},
      {"failure_budget", config.failure_budget},
      {"start_time", env::format_timestamp(config.start_time)},
      {"step_seconds", config.step_seconds},
      {"export_agent_attitudes", config.export_agent_attitudes},
  };
}

void validate(const RunConfig& config) {
  abm::validate(config.model);
  if (config.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (config.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (config.timeline_tweets < 1) {
    throw std::invalid_argument("timeline_tweets must be >= 1");
  }
  if (config.embedding_dim < 1) {
    throw std::invalid_argument("embedding_dim must be >= 1");
  }
  if (config.failure_budget < 0.0 || config.failure_budget > 1.0) {
    throw std::invalid_argument("failure_budget outside [0, 1]");
  }
  if (config.step_seconds <= 0) {
    throw std::invalid_argument("step_seconds must be positive");
  }
  if (config.feed.replace_fraction < 0.0 ||
      config.feed.replace_fraction > 1.0) {
    throw std::invalid_argument("replace_fraction outside [0, 1]");
  }
  if (config.feed.neutral_threshold < 0.0) {
    throw std::invalid_argument("neutral_threshold must be non-negative");
  }
  if (config.annotator.threshold < 0.0) {
    throw std::invalid_argument("annotator threshold must be non-negative");
  }
  for (const auto& [word, v] : config.annotator.lexicon) {
    if (v < -1.0 || v > 1.0) {
      throw std::invalid_argument("lexicon valence outside [-1, 1] for " +
                                  word);
    }
  }
  if (config.driver.kind == agent::DriverKind::replay &&
      config.driver.replay_path.empty()) {
    throw std::invalid_argument("replay driver needs replay_path");
  }
  if (config.driver.kind == agent::DriverKind::remote_chat &&
      config.driver.chat.endpoint.empty()) {
    throw std::invalid_argument("remote driver needs an endpoint");
  }
  if (config.annotator.kind == AnnotatorConfig::Kind::remote &&
      config.annotator.chat.endpoint.empty()) {
    throw std::invalid_argument("remote annotator needs an endpoint");
  }
}

namespace {

struct CoreState {
  const DatasetUser* user = nullptr;
  agent::MemoryStore memory;
  double attitude = 0.0;
};

struct GenOutcome {
  agent::ParsedResponse parsed;
  std::vector<env::Tweet> page;
  std::vector<std::string> notifications;
  bool failed = false;
};

// Post-run echo-chamber measure: cosine between what each core user wrote
// and what their followees wrote, averaged over users with both.
std::optional<double> compute_homogeneity(
    const env::Environment& environment,
    const std::vector<const DatasetUser*>& core,
    const annotate::Embedder& embedder) {
  std::unordered_map<std::int64_t, std::vector<double>> cache;
  auto vectors_for = [&](const std::string& author_filter,
                         bool by_followee,
                         const std::string& user) {
    std::vector<std::vector<double>> out;
    for (const auto& t : environment.tweets()) {
      if (t.content.empty()) continue;
      const bool match =
          by_followee ? environment.graph().follows(user, t.author)
                      : t.author == author_filter;
      if (!match) continue;
      auto it = cache.find(t.id);
      if (it == cache.end()) {
        it = cache.emplace(t.id, embedder.embed(t.content)).first;
      }
      out.push_back(it->second);
    }
    return out;
  };

  double sum = 0.0;
  std::size_t n = 0;
  for (const auto* user : core) {
    auto production = vectors_for(user->id, false, user->id);
    auto consumption = vectors_for("", true, user->id);
    auto h = metrics::homogeneity(production, consumption);
    if (h) {
      sum += *h;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

MacroResult run_macro(const Dataset& dataset, const RunConfig& config) {
  validate(config);

  std::vector<const DatasetUser*> ordinary;
  std::vector<const DatasetUser*> core;
  for (const auto& u : dataset.users) {
    (u.is_core ? core : ordinary).push_back(&u);
  }

  MacroResult result;
  for (const auto* c : core) result.column_ids.push_back(c->id);
  for (const auto* o : ordinary) result.column_ids.push_back(o->id);

  // Ordinary users occupy engine ids 0..O-1 in dataset order; core users
  // follow. A run without core users therefore reproduces the pure
  // opinion-model trajectory for the same seed.
  std::vector<abm::OrdinaryAgent> population;
  population.reserve(ordinary.size());
  for (std::size_t i = 0; i < ordinary.size(); ++i) {
    population.push_back(abm::OrdinaryAgent{
        static_cast<abm::AgentId>(i), ordinary[i]->initial_attitude,
        ordinary[i]->uncertainty});
  }
  abm::prepare_population(config.model, population);

  std::unordered_map<std::string, abm::AgentId> engine_ids;
  for (std::size_t j = 0; j < core.size(); ++j) {
    engine_ids[core[j]->id] =
        static_cast<abm::AgentId>(ordinary.size() + j);
  }

  env::Environment& environment = result.environment;
  for (const auto& u : dataset.users) environment.add_user(u.id);
  for (const auto& [follower, followee] : dataset.edges) {
    environment.graph().add_edge(follower, followee);
  }

  annotate::Embedder embedder(config.embedding_dim);
  auto stance = make_stance_backend(config.annotator);

  bridge::BridgeOptions bridge_options;
  bridge_options.topic = config.topic;
  if (!config.annotator.lexicon.empty()) {
    bridge_options.valence_lexicon = &config.annotator.lexicon;
  }

  std::unique_ptr<agent::Driver> driver;
  if (!core.empty()) {
    agent::DriverConfig driver_config = config.driver;
    driver_config.heuristic_seed = config.seed;
    driver = agent::make_driver(driver_config);
  }

  std::vector<CoreState> states(core.size());
  std::unordered_map<std::string, double> prev_attitude;
  for (std::size_t j = 0; j < core.size(); ++j) {
    states[j].user = core[j];
    states[j].attitude = core[j]->initial_attitude;
    prev_attitude[core[j]->id] = core[j]->initial_attitude;
    for (const auto& h : core[j]->history) {
      states[j].memory.write(embedder, h, 0,
                             agent::MemoryKind::personal_experience, 0.5,
                             0.1);
    }
  }

  // Attitude each stored tweet was scored with at creation; feeds the
  // opposite/neutral feed policies.
  std::unordered_map<std::int64_t, double> tweet_scores;
  auto score_of = [&](const env::Tweet& t) {
    auto it = tweet_scores.find(t.id);
    return it == tweet_scores.end() ? 0.0 : it->second;
  };

  abm::StepOptions step_options;
  step_options.repulsive_difference = config.repulsive_difference;
  step_options.synchronous = config.synchronous;
  step_options.workers = config.workers;

  for (int round = 1; round <= config.rounds; ++round) {
    const std::int64_t timestamp =
        config.start_time +
        static_cast<std::int64_t>(round - 1) * config.step_seconds;
    std::vector<std::string> headlines;
    for (const auto& n : dataset.news) {
      if (n.round == round) headlines.push_back(n.text);
    }
    const std::string news_text = join(headlines, " ");

    RoundDiagnostics diag;
    diag.round = round;
    std::vector<abm::Message> externals;

    if (!core.empty()) {
      // Reflection mutates memory and the shared embedder: serial phase.
      for (auto& s : states) {
        agent::reflect(s.memory, embedder, *driver, s.user->id, round,
                       config.reflection_period);
      }

      std::vector<GenOutcome> outcomes(core.size());
      parallel_for(core.size(), config.workers, [&](std::size_t j) {
        CoreState& s = states[j];
        agent::PromptContext pc;
        pc.name = s.user->profile.name;
        pc.summary = s.user->profile.summary;
        pc.current_time = env::format_timestamp(timestamp);
        pc.news = news_text;
        const std::string& query =
            news_text.empty() ? config.topic : news_text;
        std::vector<std::string> digest;
        for (const auto* rec : s.memory.retrieve_kind(
                 embedder, query, 2, round,
                 agent::MemoryKind::personal_experience)) {
          digest.push_back(rec->text);
        }
        pc.personal_experience = join(digest, "; ");
        for (const auto* rec : s.memory.retrieve(
                 embedder, query, config.memory_snippets, round)) {
          pc.recent_memory.push_back(rec->text);
        }
        auto page =
            environment.personal_timeline(s.user->id, config.timeline_tweets);
        page = env::apply_feed_policy(config.feed, s.user->id, s.attitude,
                                      std::move(page), environment, score_of);
        pc.page = page;
        for (const auto& n :
             environment.notifications_for(s.user->id, round - 1)) {
          pc.notifications.push_back("[" + n.author + "]: " + n.author +
                                     " replies to [" + s.user->profile.name +
                                     "]: " + n.content);
        }
        if (config.feed.mode == env::FeedMode::public_hashtag) {
          pc.include_public_page = true;
          pc.public_page = environment.public_timeline(config.timeline_tweets);
        }
        const std::string prompt = agent::assemble_prompt(pc);

        agent::CallContext cc;
        cc.agent_id = s.user->id;
        cc.round = round;
        cc.purpose = agent::Purpose::action;
        cc.profile = &s.user->profile;
        cc.attitude = s.attitude;
        GenOutcome& out = outcomes[j];
        out.page = std::move(page);
        out.notifications = pc.notifications;
        try {
          out.parsed = agent::parse_response(driver->generate(prompt, cc));
        } catch (const agent::DriverError& e) {
          out.failed = true;
          out.parsed = agent::ParsedResponse{};
          out.parsed.diagnostic = e.what();
        }
      });

      for (const auto& out : outcomes) {
        if (out.failed) ++diag.driver_failures;
        else if (!out.parsed.diagnostic.empty()) ++diag.parse_degradations;
      }
      if (static_cast<double>(diag.driver_failures) >
          config.failure_budget * static_cast<double>(core.size())) {
        result.aborted = true;
        result.abort_reason =
            "round " + std::to_string(round) + ": " +
            std::to_string(diag.driver_failures) +
            " driver failures exceed the budget of " +
            std::to_string(config.failure_budget * core.size());
        result.diagnostics.push_back(diag);
        break;
      }

      // Commit phase, dataset core order: environment mutations, bridge
      // scoring, memory writes.
      std::vector<std::pair<std::string, agent::AgentAction>> effective;
      effective.reserve(core.size());
      std::vector<env::MutationRecord> mutations(core.size());
      for (std::size_t j = 0; j < core.size(); ++j) {
        mutations[j] = environment.apply_action(
            outcomes[j].parsed.action, core[j]->id, timestamp, round);
        if (mutations[j].kind == env::MutationRecord::Kind::rejected) {
          ++diag.rejected_actions;
          effective.emplace_back(core[j]->id, agent::DoNothing{});
        } else {
          effective.emplace_back(core[j]->id, outcomes[j].parsed.action);
        }
      }

      auto sync = bridge::sync_core_into_pool(effective, round, *stance,
                                              environment, prev_attitude,
                                              engine_ids, bridge_options);
      diag.annotation_failures = sync.annotation_failures;

      for (std::size_t j = 0; j < core.size(); ++j) {
        if (mutations[j].kind == env::MutationRecord::Kind::new_tweet) {
          tweet_scores[*mutations[j].tweet_id] = sync.records[j].attitude;
        }
      }

      for (std::size_t j = 0; j < core.size(); ++j) {
        CoreState& s = states[j];
        const std::string& name = s.user->profile.name;
        if (!news_text.empty()) {
          s.memory.write(embedder, "News: " + news_text, round,
                         agent::MemoryKind::event, 0.7, 0.7);
        }
        for (const auto& t : outcomes[j].page) {
          s.memory.write(embedder, "[" + t.author + "]: " + t.content, round,
                         agent::MemoryKind::event, 0.3, 0.2);
        }
        for (const auto& line : outcomes[j].notifications) {
          s.memory.write(embedder, line, round, agent::MemoryKind::event,
                         0.5, 0.8);
        }
        const auto& mutation = mutations[j];
        if (mutation.kind == env::MutationRecord::Kind::new_tweet) {
          const env::Tweet* created = environment.find(*mutation.tweet_id);
          std::string line;
          if (created->kind == env::TweetKind::post) {
            line = name + " posted: " + created->content;
          } else if (created->kind == env::TweetKind::retweet) {
            const env::Tweet* parent = environment.find(*created->parent_id);
            line = name + " retweeted [" + parent->author +
                   "]: " + parent->content;
          } else {
            const env::Tweet* parent = environment.find(*created->parent_id);
            line = name + " replies to [" + parent->author +
                   "]: " + created->content;
          }
          s.memory.write(embedder, line, round, agent::MemoryKind::event,
                         0.6, 0.3);
        } else if (mutation.kind == env::MutationRecord::Kind::like) {
          const env::Tweet* target = environment.find(*mutation.tweet_id);
          s.memory.write(embedder,
                         name + " likes a tweet of [" + target->author +
                             "]: '" + target->content + "'",
                         round, agent::MemoryKind::event, 0.6, 0.3);
        }
      }

      for (std::size_t j = 0; j < core.size(); ++j) {
        states[j].attitude = sync.records[j].attitude;
        prev_attitude[core[j]->id] = sync.records[j].attitude;
        result.core_records.push_back(sync.records[j]);
      }
      externals = std::move(sync.messages);
    }

    if (!population.empty()) {
      population = abm::step_round(config.model, population, externals,
                                   config.seed, round, step_options);
    }

    std::vector<double> row;
    row.reserve(states.size() + population.size());
    for (const auto& s : states) row.push_back(s.attitude);
    for (const auto& a : population) row.push_back(a.attitude);
    result.trace.rounds.push_back(std::move(row));
    result.diagnostics.push_back(diag);
  }

  if (!core.empty() && !environment.tweets().empty()) {
    result.echo_homogeneity =
        compute_homogeneity(environment, core, embedder);
  }
  return result;
}

MicroReport run_micro(const Dataset& dataset, const RunConfig& config) {
  validate(config);
  if (dataset.micro_pairs.empty()) {
    throw std::invalid_argument("dataset has no micro pairs");
  }

  agent::DriverConfig driver_config = config.driver;
  driver_config.heuristic_seed = config.seed;
  auto driver = agent::make_driver(driver_config);
  auto stance = make_stance_backend(config.annotator);
  std::unique_ptr<annotate::ContentBackend> content;
  if (config.annotator.kind == AnnotatorConfig::Kind::remote) {
    content = std::make_unique<annotate::RemoteContentBackend>(
        config.annotator.chat);
  }
  const auto& lexicon = config.annotator.lexicon.empty()
                            ? annotate::default_valence_lexicon()
                            : config.annotator.lexicon;

  MicroReport report;
  report.cases.resize(dataset.micro_pairs.size());

  for (std::size_t i = 0; i < dataset.micro_pairs.size(); ++i) {
    const MicroPair& pair = dataset.micro_pairs[i];
    const DatasetUser* user = dataset.find_user(pair.user_id);
    MicroCase& c = report.cases[i];
    c.user_id = pair.user_id;
    c.truth_behavior = pair.truth.behavior;
    c.truth_stance = pair.truth.stance;
    c.truth_content = pair.truth.content_type;
    c.truth_attitude = pair.truth.attitude;

    agent::PromptContext pc;
    pc.name = user->profile.name;
    pc.summary = user->profile.summary;
    pc.current_time = pair.time;
    pc.news = pair.news;
    pc.personal_experience = pair.personal_experience;
    pc.recent_memory = pair.memory_lines;
    pc.page = pair.page;
    pc.notifications = pair.notifications;
    const std::string prompt = agent::assemble_prompt(pc);

    agent::CallContext cc;
    cc.agent_id = user->id;
    cc.round = 0;  // micro calls: replay fixtures are keyed to round 0
    cc.purpose = agent::Purpose::action;
    cc.profile = &user->profile;
    cc.attitude = user->initial_attitude;

    std::string raw;
    try {
      raw = driver->generate(prompt, cc);
    } catch (const agent::DriverError& e) {
      c.failed = true;
      c.diagnostic = e.what();
      ++report.failures;
      continue;
    }
    const auto parsed = agent::parse_response(raw);
    c.diagnostic = parsed.diagnostic;
    c.predicted_behavior = behavior_name(parsed.action);

    // Mirror the bridge's text choice: own text when available, the target
    // tweet's text for a bare retweet.
    const std::string* text = nullptr;
    if (const auto* post = std::get_if<agent::Post>(&parsed.action)) {
      text = &post->content;
    } else if (const auto* reply = std::get_if<agent::Reply>(&parsed.action)) {
      text = &reply->content;
    } else if (const auto* rt = std::get_if<agent::Retweet>(&parsed.action)) {
      if (rt->content && !rt->content->empty()) {
        text = &*rt->content;
      } else {
        for (const auto& t : pair.page) {
          if (std::to_string(t.id) == rt->original_tweet_id) {
            text = &t.content;
            break;
          }
        }
      }
    }

    if (text != nullptr) {
      c.generated_text = *text;
      const auto label = stance->annotate(*text, config.topic);
      c.predicted_stance = annotate::to_string(label);
      c.predicted_attitude = bridge::content_to_attitude(
          label, annotate::sentiment_intensity(*text, lexicon));
      if (content) {
        c.predicted_content = annotate::to_string(content->classify(*text));
      }
    } else {
      c.predicted_stance = "Neutral";
      c.predicted_attitude = user->initial_attitude;
    }
  }

  // Document frequencies from all real and simulated texts before any
  // similarity is computed, so pair order cannot skew the embeddings.
  annotate::Embedder embedder(config.embedding_dim);
  for (const auto& pair : dataset.micro_pairs) {
    if (!pair.truth.text.empty()) embedder.observe(pair.truth.text);
  }
  for (const auto& c : report.cases) {
    if (!c.generated_text.empty()) embedder.observe(c.generated_text);
  }
  for (std::size_t i = 0; i < report.cases.size(); ++i) {
    MicroCase& c = report.cases[i];
    const auto& truth_text = dataset.micro_pairs[i].truth.text;
    if (c.failed || c.generated_text.empty() || truth_text.empty()) continue;
    c.content_similarity = metrics::cosine_similarity(
        embedder.embed(c.generated_text), embedder.embed(truth_text));
  }

  std::vector<std::string> pred_behavior, truth_behavior;
  std::vector<std::string> pred_stance, truth_stance;
  std::vector<std::string> pred_content, truth_content;
  std::vector<double> pred_att, truth_att;
  double sim_sum = 0.0;
  std::size_t sim_n = 0;
  for (const auto& c : report.cases) {
    if (c.failed) continue;
    pred_behavior.push_back(c.predicted_behavior);
    truth_behavior.push_back(c.truth_behavior);
    pred_stance.push_back(c.predicted_stance);
    truth_stance.push_back(c.truth_stance);
    if (content) {
      pred_content.push_back(c.predicted_content);
      truth_content.push_back(c.truth_content);
    }
    if (c.truth_attitude && c.predicted_attitude) {
      pred_att.push_back(*c.predicted_attitude);
      truth_att.push_back(*c.truth_attitude);
    }
    if (c.content_similarity) {
      sim_sum += *c.content_similarity;
      ++sim_n;
    }
  }
  const std::vector<std::string> behavior_labels = {"post", "retweet"};
  const std::vector<std::string> stance_labels = {"Support", "Neutral",
                                                  "Oppose"};
  const std::vector<std::string> content_labels = {
      "call for action", "testimony", "sharing of opinion",
      "reference to a third party", "other"};
  if (!pred_behavior.empty()) {
    report.behavior = metrics::classification_metrics(
        pred_behavior, truth_behavior, behavior_labels);
    report.stance = metrics::classification_metrics(pred_stance, truth_stance,
                                                    stance_labels);
  }
  if (content && !pred_content.empty()) {
    report.content = metrics::classification_metrics(
        pred_content, truth_content, content_labels);
  }
  if (!pred_att.empty()) {
    report.stance_mae = metrics::mae(pred_att, truth_att);
  }
  if (sim_n > 0) {
    report.mean_content_similarity = sim_sum / static_cast<double>(sim_n);
  }
  return report;
}

std::vector<ReplicateSummary> run_frozen_replicate(
    const Dataset& dataset, const RunConfig& config,
    std::span<const bridge::CoreAttitudeRecord> core_records,
    int replicates) {
  validate(config);
  if (replicates < 1) {
    throw std::invalid_argument("replicates must be >= 1");
  }

  std::vector<const DatasetUser*> ordinary;
  std::vector<const DatasetUser*> core;
  for (const auto& u : dataset.users) {
    (u.is_core ? core : ordinary).push_back(&u);
  }
  std::unordered_map<std::string, std::size_t> core_index;
  std::unordered_map<std::string, abm::AgentId> engine_ids;
  for (std::size_t j = 0; j < core.size(); ++j) {
    core_index[core[j]->id] = j;
    engine_ids[core[j]->id] =
        static_cast<abm::AgentId>(ordinary.size() + j);
  }

  // Round-indexed external messages and per-round core attitudes.
  std::vector<std::vector<abm::Message>> externals_by_round(
      static_cast<std::size_t>(config.rounds) + 1);
  std::vector<std::vector<std::pair<std::size_t, double>>> updates_by_round(
      static_cast<std::size_t>(config.rounds) + 1);
  for (const auto& record : core_records) {
    auto it = core_index.find(record.agent_id);
    if (it == core_index.end()) {
      throw std::invalid_argument("core trace references unknown core user " +
                                  record.agent_id);
    }
    if (record.round > config.rounds) continue;
    externals_by_round[static_cast<std::size_t>(record.round)].push_back(
        abm::Message{engine_ids.at(record.agent_id), record.attitude,
                     std::nullopt});
    updates_by_round[static_cast<std::size_t>(record.round)].emplace_back(
        it->second, record.attitude);
  }

  std::vector<abm::OrdinaryAgent> initial;
  initial.reserve(ordinary.size());
  for (std::size_t i = 0; i < ordinary.size(); ++i) {
    initial.push_back(abm::OrdinaryAgent{static_cast<abm::AgentId>(i),
                                         ordinary[i]->initial_attitude,
                                         ordinary[i]->uncertainty});
  }
  abm::prepare_population(config.model, initial);

  abm::StepOptions step_options;
  step_options.repulsive_difference = config.repulsive_difference;
  step_options.synchronous = config.synchronous;
  step_options.workers = config.workers;

  std::vector<ReplicateSummary> summaries;
  summaries.reserve(static_cast<std::size_t>(replicates));
  for (int k = 0; k < replicates; ++k) {
    ReplicateSummary rep;
    rep.replicate = k;
    rep.seed = derive_seed(config.seed, static_cast<std::uint64_t>(k));

    auto population = initial;
    std::vector<double> core_attitudes;
    core_attitudes.reserve(core.size());
    for (const auto* c : core) core_attitudes.push_back(c->initial_attitude);

    for (int round = 1; round <= config.rounds; ++round) {
      const auto r = static_cast<std::size_t>(round);
      for (const auto& [index, attitude] : updates_by_round[r]) {
        core_attitudes[index] = attitude;
      }
      if (!population.empty()) {
        population = abm::step_round(config.model, population,
                                     externals_by_round[r], rep.seed, round,
                                     step_options);
      }
      std::vector<double> row;
      row.reserve(core.size() + population.size());
      for (double a : core_attitudes) row.push_back(a);
      for (const auto& a : population) row.push_back(a.attitude);
      rep.trace.rounds.push_back(std::move(row));
    }
    rep.summary = metrics::summarize(rep.trace);
    summaries.push_back(std::move(rep));
  }
  return summaries;
}

nlohmann::json run_manifest(const RunConfig& config) {
  return {
      {"artifact", "socsim"},
      {"version", std::string(kVersion)},
      {"seed", config.seed},
      {"config", config_to_json(config)},
  };
}

nlohmann::json micro_report_json(const MicroReport& report) {
  nlohmann::json j{
      {"cases", report.cases.size()},
      {"failures", report.failures},
      {"behavior",
       {{"accuracy", report.behavior.accuracy},
        {"macro_f1", report.behavior.macro_f1}}},
      {"stance",
       {{"accuracy", report.stance.accuracy},
        {"macro_f1", report.stance.macro_f1}}},
  };
  j["content"] = report.content
                     ? nlohmann::json{{"accuracy", report.content->accuracy},
                                      {"macro_f1", report.content->macro_f1}}
                     : nlohmann::json();
  j["stance_mae"] = report.stance_mae ? nlohmann::json(*report.stance_mae)
                                      : nlohmann::json();
  j["mean_content_similarity"] =
      report.mean_content_similarity
          ? nlohmann::json(*report.mean_content_similarity)
          : nlohmann::json();
  return j;
}

nlohmann::json macro_metrics_json(
    const MacroResult& result,
    const std::optional<metrics::SeriesSummary>& empirical) {
  nlohmann::json j;
  j["rounds_completed"] = result.trace.rounds.size();
  j["aborted"] = result.aborted;
  if (result.aborted) j["abort_reason"] = result.abort_reason;
  if (!result.trace.rounds.empty()) {
    const auto bd = metrics::bias_and_diversity(result.trace);
    j["bias"] = bd.bias;
    j["diversity"] = bd.diversity;
  }
  j["echo_homogeneity"] = result.echo_homogeneity
                              ? nlohmann::json(*result.echo_homogeneity)
                              : nlohmann::json();
  std::size_t driver_failures = 0, parse_degradations = 0,
              rejected_actions = 0, annotation_failures = 0;
  for (const auto& d : result.diagnostics) {
    driver_failures += d.driver_failures;
    parse_degradations += d.parse_degradations;
    rejected_actions += d.rejected_actions;
    annotation_failures += d.annotation_failures;
  }
  j["diagnostics"] = {
      {"driver_failures", driver_failures},
      {"parse_degradations", parse_degradations},
      {"rejected_actions", rejected_actions},
      {"annotation_failures", annotation_failures},
  };
  if (empirical && !result.trace.rounds.empty()) {
    const auto sim = metrics::summarize(result.trace);
    const auto delta = metrics::delta_metrics(sim, *empirical);
    nlohmann::json cmp{
        {"delta_bias", delta.delta_bias},
        {"delta_diversity", delta.delta_diversity},
        {"dtw", metrics::dtw(sim.mean, empirical->mean)},
    };
    auto r = metrics::pearson(sim.mean, empirical->mean);
    cmp["pearson"] = r ? nlohmann::json(*r) : nlohmann::json();
    j["empirical_comparison"] = cmp;
  }
  return j;
}

}  // namespace socsim::run
