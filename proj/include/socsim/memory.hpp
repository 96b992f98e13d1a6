#pragma once

#include <span>
#include <string>
#include <vector>

#include "socsim/annotate.hpp"

namespace socsim::agent {

enum class MemoryKind { personal_experience, event, reflection };

std::string to_string(MemoryKind kind);

struct MemoryRecord {
  std::string text;
  std::vector<double> vector;  // embedding at write time
  int created_round = 0;
  double importance = 0.0;  // [0, 1]
  double immediacy = 0.0;   // [0, 1]
  MemoryKind kind = MemoryKind::event;
};

struct RetrievalWeights {
  double recency = 0.25;
  double relevance = 0.25;
  double importance = 0.25;
  double immediacy = 0.25;
  double decay = 0.9;  // recency base, decays per elapsed round
};

// recency = decay^(current - created); relevance = cosine to the query.
double retrieval_score(const MemoryRecord& record,
                       std::span<const double> query_vector, int current_round,
                       const RetrievalWeights& weights);

// Append-only per-agent memory stream. Writes feed the shared embedder's
// document frequencies, so concurrent writers must be serialized by the
// caller (the engine commits agents one at a time).
class MemoryStore {
 public:
  const MemoryRecord& write(annotate::Embedder& embedder, std::string text,
                            int round, MemoryKind kind, double importance,
                            double immediacy);

  // Top-k by retrieval score; ties broken by newer round, then by earlier
  // insertion. Pointers stay valid until the next write.
  std::vector<const MemoryRecord*> retrieve(
      const annotate::Embedder& embedder, const std::string& query,
      std::size_t k, int current_round,
      const RetrievalWeights& weights = {}) const;

  // Same scoring restricted to one kind.
  std::vector<const MemoryRecord*> retrieve_kind(
      const annotate::Embedder& embedder, const std::string& query,
      std::size_t k, int current_round, MemoryKind kind,
      const RetrievalWeights& weights = {}) const;

  const std::vector<MemoryRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<MemoryRecord> records_;
};

}  // namespace socsim::agent
