#include "socsim/memory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "socsim/metrics.hpp"

namespace socsim::agent {

std::string to_string(MemoryKind kind) {
  switch (kind) {
    case MemoryKind::personal_experience: return "personal_experience";
    case MemoryKind::event: return "event";
    case MemoryKind::reflection: return "reflection";
  }
  throw std::logic_error("unreachable memory kind");
}

double retrieval_score(const MemoryRecord& record,
                       std::span<const double> query_vector, int current_round,
                       const RetrievalWeights& weights) {
  if (current_round < record.created_round) {
    throw std::invalid_argument("retrieval from before the record was made");
  }
  const double recency =
      std::pow(weights.decay, current_round - record.created_round);
  const double relevance =
      metrics::cosine_similarity(record.vector, query_vector);
  return weights.recency * recency + weights.relevance * relevance +
         weights.importance * record.importance +
         weights.immediacy * record.immediacy;
}

const MemoryRecord& MemoryStore::write(annotate::Embedder& embedder,
                                       std::string text, int round,
                                       MemoryKind kind, double importance,
                                       double immediacy) {
  if (importance < 0.0 || importance > 1.0 || immediacy < 0.0 ||
      immediacy > 1.0) {
    throw std::invalid_argument("memory weight outside [0, 1]");
  }
  embedder.observe(text);
  MemoryRecord record;
  record.vector = embedder.embed(text);
  record.text = std::move(text);
  record.created_round = round;
  record.importance = importance;
  record.immediacy = immediacy;
  record.kind = kind;
  records_.push_back(std::move(record));
  return records_.back();
}

namespace {

std::vector<const MemoryRecord*> top_k(
    const std::vector<MemoryRecord>& records,
    const std::vector<double>& query_vector, std::size_t k, int current_round,
    const RetrievalWeights& weights,
    const std::function<bool(const MemoryRecord&)>& keep) {
  std::vector<std::size_t> idx;
  idx.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (keep(records[i])) idx.push_back(i);
  }
  std::vector<double> score(records.size(), 0.0);
  for (std::size_t i : idx) {
    score[i] = retrieval_score(records[i], query_vector, current_round,
                               weights);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    if (records[a].created_round != records[b].created_round) {
      return records[a].created_round > records[b].created_round;
    }
    return a < b;
  });
  if (idx.size() > k) idx.resize(k);
  std::vector<const MemoryRecord*> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(&records[i]);
  return out;
}

}  // namespace

std::vector<const MemoryRecord*> MemoryStore::retrieve(
    const annotate::Embedder& embedder, const std::string& query,
    std::size_t k, int current_round, const RetrievalWeights& weights) const {
  return top_k(records_, embedder.embed(query), k, current_round, weights,
               [](const MemoryRecord&) { return true; });
}

std::vector<const MemoryRecord*> MemoryStore::retrieve_kind(
    const annotate::Embedder& embedder, const std::string& query,
    std::size_t k, int current_round, MemoryKind kind,
    const RetrievalWeights& weights) const {
  return top_k(records_, embedder.embed(query), k, current_round, weights,
               [kind](const MemoryRecord& r) { return r.kind == kind; });
}

}  // namespace socsim::agent
