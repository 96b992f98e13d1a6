#include "socsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace socsim::metrics {

namespace {

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

}  // namespace

SeriesSummary summarize(const AttitudeTrace& trace) {
  SeriesSummary summary;
  summary.mean.reserve(trace.rounds.size());
  summary.stddev.reserve(trace.rounds.size());
  for (const auto& round : trace.rounds) {
    if (round.empty()) {
      throw std::invalid_argument("trace round with no attitudes");
    }
    const double mu = mean_of(round);
    double var = 0.0;
    for (double a : round) var += (a - mu) * (a - mu);
    var /= static_cast<double>(round.size());  // population variance
    summary.mean.push_back(mu);
    summary.stddev.push_back(std::sqrt(var));
  }
  return summary;
}

BiasDiversity bias_and_diversity(const SeriesSummary& summary) {
  if (summary.mean.empty() || summary.mean.size() != summary.stddev.size()) {
    throw std::invalid_argument("empty or inconsistent attitude summary");
  }
  return {mean_of(summary.mean), mean_of(summary.stddev)};
}

BiasDiversity bias_and_diversity(const AttitudeTrace& trace) {
  if (trace.rounds.empty()) throw std::invalid_argument("empty attitude trace");
  return bias_and_diversity(summarize(trace));
}

DeltaMetrics delta_metrics(const SeriesSummary& sim, const SeriesSummary& real) {
  const BiasDiversity s = bias_and_diversity(sim);
  const BiasDiversity r = bias_and_diversity(real);
  return {std::abs(s.bias - r.bias), std::abs(s.diversity - r.diversity)};
}

double dtw(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) {
    throw std::invalid_argument("dtw requires non-empty series");
  }
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Rolling-row DP over the (n+1) x (m+1) cost table.
  std::vector<double> prev(m + 1, inf);
  std::vector<double> curr(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = std::abs(x[i - 1] - y[j - 1]);
      curr[j] = cost + std::min({prev[j], curr[j - 1], prev[j - 1]});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson requires equal-length series");
  }
  if (x.size() < 2) {
    throw std::invalid_argument("pearson requires at least two points");
  }
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;  // constant series
  return sxy / std::sqrt(sxx * syy);
}

ClassificationMetrics classification_metrics(
    std::span<const std::string> predicted, std::span<const std::string> truth,
    std::span<const std::string> label_set) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("prediction/truth length mismatch");
  }
  if (predicted.empty() || label_set.empty()) {
    throw std::invalid_argument("empty classification input");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == truth[i]) ++hits;
  }
  double f1_sum = 0.0;
  for (const std::string& label : label_set) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const bool p = predicted[i] == label;
      const bool t = truth[i] == label;
      if (p && t) ++tp;
      else if (p) ++fp;
      else if (t) ++fn;
    }
    const std::size_t denom = 2 * tp + fp + fn;
    f1_sum += denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) /
                                     static_cast<double>(denom);
  }
  return {static_cast<double>(hits) / static_cast<double>(predicted.size()),
          f1_sum / static_cast<double>(label_set.size())};
}

double mae(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("mae requires equal-length inputs");
  }
  if (a.empty()) throw std::invalid_argument("mae requires non-empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine requires equal dimensions");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::optional<double> homogeneity(
    std::span<const std::vector<double>> production_vectors,
    std::span<const std::vector<double>> consumption_vectors) {
  if (production_vectors.empty() || consumption_vectors.empty()) {
    return std::nullopt;
  }
  const std::size_t dim = production_vectors.front().size();
  std::vector<double> prod(dim, 0.0);
  std::vector<double> cons(dim, 0.0);
  for (const auto& v : production_vectors) {
    for (std::size_t i = 0; i < dim; ++i) prod[i] += v[i];
  }
  for (const auto& v : consumption_vectors) {
    for (std::size_t i = 0; i < dim; ++i) cons[i] += v[i];
  }
  for (double& x : prod) x /= static_cast<double>(production_vectors.size());
  for (double& x : cons) x /= static_cast<double>(consumption_vectors.size());
  return cosine_similarity(prod, cons);
}

}  // namespace socsim::metrics
