#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "socsim/chat_client.hpp"
#include "socsim/memory.hpp"
#include "socsim/profile.hpp"

namespace socsim::agent {

struct DriverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Purpose { action, reflection_questions, reflection_insight };

std::string to_string(Purpose purpose);
Purpose parse_purpose(std::string_view text);

// Everything a driver may condition on besides the prompt itself.
struct CallContext {
  std::string agent_id;
  int round = 0;
  Purpose purpose = Purpose::action;
  const CoreProfile* profile = nullptr;    // may be null
  std::optional<double> attitude;          // current stance estimate
};

// Text-generation backend. generate() throws DriverError on failure; the
// engine charges failures against its per-round budget. Implementations must
// tolerate concurrent generate() calls for different agents.
class Driver {
 public:
  virtual ~Driver() = default;
  virtual std::string generate(const std::string& prompt,
                               const CallContext& context) = 0;
  // Whether reflection prompts can be answered for this context; callers
  // skip reflection entirely when false.
  virtual bool can_reflect(const CallContext& context) const = 0;
};

enum class DriverKind { remote_chat, replay, heuristic };

std::string to_string(DriverKind kind);
DriverKind parse_driver_kind(std::string_view text);

struct DriverConfig {
  DriverKind kind = DriverKind::heuristic;
  ChatConfig chat;          // remote_chat only
  std::string replay_path;  // replay only; JSONL fixture
  // Folded into the heuristic driver's substreams so different run seeds
  // produce different synthetic behavior.
  std::uint64_t heuristic_seed = 0;
};

std::unique_ptr<Driver> make_driver(const DriverConfig& config);

// Chat-completions backend. The system message pins the role-play framing;
// all situational detail travels in the prompt.
class RemoteChatDriver : public Driver {
 public:
  explicit RemoteChatDriver(ChatConfig config);
  std::string generate(const std::string& prompt,
                       const CallContext& context) override;
  bool can_reflect(const CallContext&) const override { return true; }

 private:
  ChatClient client_;
};

// Replays recorded responses. Records are keyed (agent_id, round, purpose)
// and consumed FIFO within a key; asking for a missing or exhausted key is a
// DriverError.
struct ReplayRecord {
  std::string agent_id;
  int round = 0;
  Purpose purpose = Purpose::action;
  std::string response;
};

class ReplayDriver : public Driver {
 public:
  explicit ReplayDriver(std::vector<ReplayRecord> records);
  // The mutex is not movable; a moved-from driver is never used concurrently.
  ReplayDriver(ReplayDriver&& other) noexcept
      : queues_(std::move(other.queues_)), next_(std::move(other.next_)) {}
  static ReplayDriver from_jsonl(const std::string& path);
  static std::vector<ReplayRecord> read_jsonl(std::istream& in);

  std::string generate(const std::string& prompt,
                       const CallContext& context) override;
  bool can_reflect(const CallContext& context) const override;
  std::size_t remaining() const;

 private:
  struct Key {
    std::string agent_id;
    int round;
    Purpose purpose;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  // Per-key FIFO; next_ indexes the next unread record in each queue.
  std::unordered_map<Key, std::vector<std::string>, KeyHash> queues_;
  std::unordered_map<Key, std::size_t, KeyHash> next_;
  mutable std::mutex mutex_;
};

// Offline stand-in for a language model: picks an action from
// role-dependent weights and writes template text whose lexicon polarity
// matches the agent's current attitude. Purely a function of (agent id,
// round, profile, attitude, prompt page), so parallel runs stay
// reproducible.
class HeuristicDriver : public Driver {
 public:
  explicit HeuristicDriver(std::uint64_t seed = 0) : seed_(seed) {}
  std::string generate(const std::string& prompt,
                       const CallContext& context) override;
  bool can_reflect(const CallContext&) const override { return false; }

 private:
  std::uint64_t seed_;
};

// Periodic reflection: every `period` rounds the driver is asked for up to
// three salient questions over recent memory, then for one insight per
// question; insights are appended as reflection records with importance 0.8.
// Drivers that cannot reflect make this a no-op. Returns the number of
// records appended.
std::size_t reflect(MemoryStore& memory, annotate::Embedder& embedder,
                    Driver& driver, const std::string& agent_id,
                    int current_round, int period);

}  // namespace socsim::agent
