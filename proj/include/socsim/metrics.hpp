#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socsim::metrics {

// Per-round attitude vectors over the whole simulated population.
struct AttitudeTrace {
  std::vector<std::vector<double>> rounds;
};

// A trace reduced to its per-round mean and population standard deviation;
// also the shape empirical traces are ingested in.
struct SeriesSummary {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct BiasDiversity {
  double bias = 0.0;       // time average of the per-round mean attitude
  double diversity = 0.0;  // time average of the per-round population stddev
};

SeriesSummary summarize(const AttitudeTrace& trace);

// Throws std::invalid_argument on an empty trace or an empty round.
BiasDiversity bias_and_diversity(const AttitudeTrace& trace);
BiasDiversity bias_and_diversity(const SeriesSummary& summary);

struct DeltaMetrics {
  double delta_bias = 0.0;
  double delta_diversity = 0.0;
};

// |sim - real| of the time-averaged bias and diversity.
DeltaMetrics delta_metrics(const SeriesSummary& sim, const SeriesSummary& real);

// Classical dynamic time warping with cost |x_i - y_j| and match / insert /
// delete moves; no window, no path normalization. Throws on empty input.
double dtw(std::span<const double> x, std::span<const double> y);

// Sample Pearson correlation. Requires equal lengths >= 2 (throws
// std::invalid_argument otherwise); a constant series makes the value
// undefined and is reported as nullopt, never as 0.
std::optional<double> pearson(std::span<const double> x,
                              std::span<const double> y);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// Macro F1 averages per-class F1 over the full declared label set; a class
// absent from both predictions and truth contributes 0. Predictions outside
// the label set count as misses for their true class.
ClassificationMetrics classification_metrics(
    std::span<const std::string> predicted, std::span<const std::string> truth,
    std::span<const std::string> label_set);

// Mean absolute error; throws on length mismatch or empty input.
double mae(std::span<const double> a, std::span<const double> b);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// Echo-chamber homogeneity for one agent this epoch: cosine between the mean
// production vector and the mean consumption vector. nullopt when either
// corpus is empty (the agent is skipped, not zero-filled).
std::optional<double> homogeneity(
    std::span<const std::vector<double>> production_vectors,
    std::span<const std::vector<double>> consumption_vectors);

}  // namespace socsim::metrics
