#include "socsim/driver.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "socsim/prompt.hpp"
#include "socsim/response.hpp"
#include "socsim/rng.hpp"

namespace socsim::agent {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::string to_string(Purpose purpose) {
  switch (purpose) {
    case Purpose::action: return "action";
    case Purpose::reflection_questions: return "reflection_questions";
    case Purpose::reflection_insight: return "reflection_insight";
  }
  throw std::logic_error("unreachable purpose");
}

Purpose parse_purpose(std::string_view text) {
  if (text == "action") return Purpose::action;
  if (text == "reflection_questions") return Purpose::reflection_questions;
  if (text == "reflection_insight") return Purpose::reflection_insight;
  throw std::invalid_argument("unknown purpose: " + std::string(text));
}

std::string to_string(DriverKind kind) {
  switch (kind) {
    case DriverKind::remote_chat: return "remote_chat";
    case DriverKind::replay: return "replay";
    case DriverKind::heuristic: return "heuristic";
  }
  throw std::logic_error("unreachable driver kind");
}

DriverKind parse_driver_kind(std::string_view text) {
  if (text == "remote_chat") return DriverKind::remote_chat;
  if (text == "replay") return DriverKind::replay;
  if (text == "heuristic") return DriverKind::heuristic;
  throw std::invalid_argument("unknown driver kind: " + std::string(text));
}

std::unique_ptr<Driver> make_driver(const DriverConfig& config) {
  switch (config.kind) {
    case DriverKind::remote_chat:
      return std::make_unique<RemoteChatDriver>(config.chat);
    case DriverKind::replay:
      return std::make_unique<ReplayDriver>(
          ReplayDriver::from_jsonl(config.replay_path));
    case DriverKind::heuristic:
      return std::make_unique<HeuristicDriver>(config.heuristic_seed);
  }
  throw std::logic_error("unreachable driver kind");
}

RemoteChatDriver::RemoteChatDriver(ChatConfig config)
    : client_(std::move(config)) {}

std::string RemoteChatDriver::generate(const std::string& prompt,
                                       const CallContext&) {
  try {
    return client_.complete(
        "You are role-playing a specific Twitter user inside a social "
        "simulation. Stay in character and answer exactly in the format the "
        "instructions require.",
        prompt);
  } catch (const TransportError& e) {
    throw DriverError(e.what());
  }
}

std::size_t ReplayDriver::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = fnv1a64(k.agent_id);
  h = detail::mix_key(h, static_cast<std::uint64_t>(k.round));
  h = detail::mix_key(h, static_cast<std::uint64_t>(k.purpose));
  return static_cast<std::size_t>(h);
}

ReplayDriver::ReplayDriver(std::vector<ReplayRecord> records) {
  for (auto& r : records) {
    queues_[Key{r.agent_id, r.round, r.purpose}].push_back(
        std::move(r.response));
  }
}

std::vector<ReplayRecord> ReplayDriver::read_jsonl(std::istream& in) {
  std::vector<ReplayRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ReplayRecord r;
      r.agent_id = j.at("agent_id").get<std::string>();
      r.round = j.at("round").get<int>();
      r.response = j.at("response").get<std::string>();
      r.purpose = parse_purpose(j.value("purpose", "action"));
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("replay fixture line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

ReplayDriver ReplayDriver::from_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open replay fixture: " + path);
  return ReplayDriver(read_jsonl(in));
}

std::string ReplayDriver::generate(const std::string&,
                                   const CallContext& context) {
  const Key key{context.agent_id, context.round, context.purpose};
  std::lock_guard lock(mutex_);
  auto it = queues_.find(key);
  if (it != queues_.end()) {
    std::size_t& idx = next_[key];
    if (idx < it->second.size()) return it->second[idx++];
  }
  throw DriverError("replay fixture has no record for agent " +
                    context.agent_id + " round " +
                    std::to_string(context.round) + " purpose " +
                    to_string(context.purpose));
}

bool ReplayDriver::can_reflect(const CallContext& context) const {
  const Key key{context.agent_id, context.round,
                Purpose::reflection_questions};
  std::lock_guard lock(mutex_);
  auto it = queues_.find(key);
  if (it == queues_.end()) return false;
  auto n = next_.find(key);
  return (n == next_.end() ? 0 : n->second) < it->second.size();
}

std::size_t ReplayDriver::remaining() const {
  std::lock_guard lock(mutex_);
  std::size_t total = 0;
  for (const auto& [key, queue] : queues_) {
    auto n = next_.find(key);
    total += queue.size() - (n == next_.end() ? 0 : n->second);
  }
  return total;
}

namespace {

// Action mix per communication role: post, retweet, reply, like, nothing.
std::array<double, 5> role_weights(std::string_view role) {
  if (role == "Idea Starter") return {0.60, 0.10, 0.10, 0.05, 0.15};
  if (role == "Amplifier") return {0.20, 0.50, 0.10, 0.10, 0.10};
  if (role == "Curator") return {0.15, 0.20, 0.40, 0.10, 0.15};
  if (role == "Viewer") return {0.05, 0.10, 0.05, 0.20, 0.60};
  return {0.25, 0.25, 0.25, 0.10, 0.15};  // Commentator and unknowns
}

// Template text is built from the stance lexicon so the downstream
// annotators read back the intended polarity.
const std::array<std::array<std::string_view, 3>, 3>& post_templates() {
  static const std::array<std::array<std::string_view, 3>, 3> kTemplates = {{
      // oppose
      {{"This outrage is misguided and unfair. I oppose where this movement "
        "is heading.",
        "What a disappointing spectacle. These claims are wrong and the "
        "anger is toxic.",
        "I reject this narrative. It is dangerous, divisive and deeply "
        "troubling."}},
      // neutral
      {{"Still reading up on this. There are many sides to the story.",
        "Watching how this develops before I take a position.",
        "Lots of noise today. Waiting for more facts."}},
      // support
      {{"This movement gives me hope. I stand in solidarity with everyone "
        "speaking out, and I support the cause.",
        "Proud to see so much courage here. Keep going, this is inspiring "
        "and important.",
        "Great to see this momentum. I support everyone pushing for justice "
        "and change."}},
  }};
  return kTemplates;
}

const std::array<std::array<std::string_view, 3>, 3>& reply_templates() {
  static const std::array<std::array<std::string_view, 3>, 3> kTemplates = {{
      {{"I disagree, this take is wrong and unfair.",
        "This is misguided nonsense and it is getting worse.",
        "Sorry, but this outrage is overblown and divisive."}},
      {{"Interesting point, I need to think about this more.",
        "Where did you read that? Curious about the source.",
        "Noted. Let's see how this unfolds."}},
      {{"Well said. I support this and stand with you in solidarity.",
        "This is inspiring, thank you for the courage to speak up.",
        "Agreed, this is an important step towards justice."}},
  }};
  return kTemplates;
}

}  // namespace

std::string HeuristicDriver::generate(const std::string& prompt,
                                      const CallContext& context) {
  if (context.purpose != Purpose::action) {
    throw DriverError("heuristic driver has no reflection data");
  }
  auto stream = substream(seed_, fnv1a64(context.agent_id),
                          static_cast<std::uint64_t>(context.round),
                          0x68657572ULL);

  const std::string role =
      context.profile ? context.profile->communication_role : "Commentator";
  const std::string name =
      context.profile ? context.profile->name : parse_prompt_name(prompt);
  const auto weights = role_weights(role);

  const double roll = stream.next_double();
  int choice = 4;  // nothing
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) {
    acc += weights[static_cast<std::size_t>(i)];
    if (roll < acc) {
      choice = i;
      break;
    }
  }

  const double attitude = context.attitude.value_or(0.0);
  const std::size_t bucket = attitude > 0.05 ? 2 : attitude < -0.05 ? 0 : 1;
  const std::size_t variant = static_cast<std::size_t>(
      stream.uniform_below(3));

  // Targeted actions need someone else's tweet on the visible page.
  std::vector<PromptTweet> others;
  for (auto& t : parse_prompt_tweets(prompt)) {
    if (t.author != name) others.push_back(std::move(t));
  }
  if (choice >= 1 && choice <= 3 && others.empty()) choice = 0;

  const std::string thought =
      "due to `my communication role as " + role + "`, I need to:";
  AgentAction action = DoNothing{};
  switch (choice) {
    case 0:
      action = Post{std::string(post_templates()[bucket][variant])};
      break;
    case 1: {
      const auto& t = others[stream.uniform_below(others.size())];
      action = Retweet{std::nullopt, t.author, t.id, t.content};
      break;
    }
    case 2: {
      const auto& t = others[stream.uniform_below(others.size())];
      action =
          Reply{std::string(reply_templates()[bucket][variant]), t.author,
                t.id};
      break;
    }
    case 3: {
      const auto& t = others[stream.uniform_below(others.size())];
      action = Like{t.author, t.id};
      break;
    }
    default:
      return "Thought: None of the observation attract my attention, I need "
             "to:\nAction: do_nothing()";
  }
  return "Thought: " + thought + "\nAction: " + format_action(action);
}

std::size_t reflect(MemoryStore& memory, annotate::Embedder& embedder,
                    Driver& driver, const std::string& agent_id,
                    int current_round, int period) {
  if (period <= 0 || current_round <= 0 || current_round % period != 0) {
    return 0;
  }
  if (memory.size() == 0) return 0;
  CallContext questions_ctx;
  questions_ctx.agent_id = agent_id;
  questions_ctx.round = current_round;
  questions_ctx.purpose = Purpose::reflection_questions;
  if (!driver.can_reflect(questions_ctx)) return 0;

  std::string recent;
  const auto& records = memory.records();
  const std::size_t first = records.size() > 20 ? records.size() - 20 : 0;
  for (std::size_t i = first; i < records.size(); ++i) {
    recent += records[i].text;
    recent += '\n';
  }
  const std::string questions_prompt =
      "Here are your recent observations:\n" + recent +
      "Given only the information above, what are the 3 most salient "
      "high-level questions you can ask about it? Write one question per "
      "line.";
  std::string questions_raw;
  try {
    questions_raw = driver.generate(questions_prompt, questions_ctx);
  } catch (const DriverError&) {
    return 0;  // reflection is best-effort
  }

  std::vector<std::string> questions;
  std::stringstream stream(questions_raw);
  std::string line;
  while (std::getline(stream, line) && questions.size() < 3) {
    std::string q = trim(line);
    // Strip list markers like "1.", "2)", "-".
    std::size_t i = 0;
    while (i < q.size() && std::isdigit((unsigned char)q[i])) ++i;
    if (i > 0 && i < q.size() && (q[i] == '.' || q[i] == ')')) {
      q = trim(q.substr(i + 1));
    } else if (!q.empty() && (q[0] == '-' || q[0] == '*')) {
      q = trim(q.substr(1));
    }
    if (!q.empty()) questions.push_back(std::move(q));
  }

  std::size_t appended = 0;
  for (const auto& question : questions) {
    auto relevant = memory.retrieve(embedder, question, 5, current_round);
    std::string lines;
    for (const auto* r : relevant) {
      lines += r->text;
      lines += '\n';
    }
    CallContext insight_ctx;
    insight_ctx.agent_id = agent_id;
    insight_ctx.round = current_round;
    insight_ctx.purpose = Purpose::reflection_insight;
    std::string insight;
    try {
      insight = trim(driver.generate(
          "Question: " + question + "\nRelevant memories:\n" + lines +
              "Extract one high-level insight that answers the question. "
              "Reply with a single sentence.",
          insight_ctx));
    } catch (const DriverError&) {
      continue;
    }
    if (insight.empty()) continue;
    memory.write(embedder, insight, current_round, MemoryKind::reflection,
                 0.8, 0.0);
    ++appended;
  }
  return appended;
}

}  // namespace socsim::agent
