#include "socsim/calibrate.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "socsim/rng.hpp"

namespace socsim::calib {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string canonical_parameter_name(const std::string& name) {
  if (name == "bc_bound") return "epsilon";
  if (name == "init_uct") return "init_uncertainty";
  if (name == "tho") return "rho";
  return name;
}

std::vector<std::string> parameter_names(abm::ModelKind kind) {
  switch (kind) {
    case abm::ModelKind::bc: return {"alpha", "epsilon"};
    case abm::ModelKind::hk: return {"epsilon"};
    case abm::ModelKind::ra: return {"alpha", "init_uncertainty"};
    case abm::ModelKind::sj: return {"alpha", "acc_thred", "rej_thred"};
    case abm::ModelKind::lorenz: return {"alpha", "lambda", "k", "rho"};
  }
  throw std::logic_error("unreachable model kind");
}

abm::ModelParams params_from_values(
    abm::ModelKind kind,
    const std::vector<std::pair<std::string, double>>& values) {
  auto unknown = [&](const std::string& name) {
    return std::invalid_argument("unknown parameter " + name + " for model " +
                                 abm::to_string(kind));
  };
  switch (kind) {
    case abm::ModelKind::bc: {
      abm::BcParams p;
      for (const auto& [name, v] : values) {
        if (name == "alpha") p.alpha = v;
        else if (name == "epsilon") p.epsilon = v;
        else throw unknown(name);
      }
      return p;
    }
    case abm::ModelKind::hk: {
      abm::HkParams p;
      for (const auto& [name, v] : values) {
        if (name == "epsilon") p.epsilon = v;
        else throw unknown(name);
      }
      return p;
    }
    case abm::ModelKind::ra: {
      abm::RaParams p;
      for (const auto& [name, v] : values) {
        if (name == "alpha") p.alpha = v;
        else if (name == "init_uncertainty") p.init_uncertainty = v;
        else throw unknown(name);
      }
      return p;
    }
    case abm::ModelKind::sj: {
      abm::SjParams p;
      for (const auto& [name, v] : values) {
        if (name == "alpha") p.alpha = v;
        else if (name == "acc_thred") p.acc_thred = v;
        else if (name == "rej_thred") p.rej_thred = v;
        else throw unknown(name);
      }
      return p;
    }
    case abm::ModelKind::lorenz: {
      abm::LorenzParams p;
      for (const auto& [name, v] : values) {
        if (name == "alpha") p.alpha = v;
        else if (name == "lambda") p.lambda = v;
        else if (name == "k") p.k = v;
        else if (name == "rho") p.rho = v;
        else throw unknown(name);
      }
      return p;
    }
  }
  throw std::logic_error("unreachable model kind");
}

std::vector<std::pair<std::string, double>> params_to_values(
    const abm::ModelParams& params) {
  return std::visit(
      [](const auto& p) -> std::vector<std::pair<std::string, double>> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, abm::BcParams>) {
          return {{"alpha", p.alpha}, {"epsilon", p.epsilon}};
        } else if constexpr (std::is_same_v<T, abm::HkParams>) {
          return {{"epsilon", p.epsilon}};
        } else if constexpr (std::is_same_v<T, abm::RaParams>) {
          return {{"alpha", p.alpha},
                  {"init_uncertainty", p.init_uncertainty}};
        } else if constexpr (std::is_same_v<T, abm::SjParams>) {
          return {{"alpha", p.alpha},
                  {"acc_thred", p.acc_thred},
                  {"rej_thred", p.rej_thred}};
        } else {
          static_assert(std::is_same_v<T, abm::LorenzParams>);
          return {{"alpha", p.alpha},
                  {"lambda", p.lambda},
                  {"k", p.k},
                  {"rho", p.rho}};
        }
      },
      params);
}

ParameterGrid grid_from_json(const nlohmann::json& json) {
  if (!json.is_object()) {
    throw std::invalid_argument("grid JSON must be an object");
  }
  auto kind = abm::parse_model_kind(
      json.at("model").get<std::string>());
  if (!kind) {
    throw std::invalid_argument("unknown model in grid: " +
                                json.at("model").get<std::string>());
  }

  const auto names = parameter_names(*kind);
  std::vector<std::pair<std::string, std::vector<double>>> provided;
  for (const auto& [key, value] : json.items()) {
    if (key == "model") continue;
    const std::string name = canonical_parameter_name(key);
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw std::invalid_argument("unknown parameter " + key + " for model " +
                                  abm::to_string(*kind));
    }
    std::vector<double> axis;
    if (value.is_array()) {
      for (const auto& v : value) axis.push_back(v.get<double>());
    } else {
      axis.push_back(value.get<double>());
    }
    if (axis.empty()) {
      throw std::invalid_argument("empty value list for parameter " + key);
    }
    provided.emplace_back(name, std::move(axis));
  }

  const auto defaults = params_to_values(params_from_values(*kind, {}));
  ParameterGrid grid;
  grid.kind = *kind;
  for (const auto& name : names) {
    auto it = std::find_if(provided.begin(), provided.end(),
                           [&](const auto& p) { return p.first == name; });
    if (it != provided.end()) {
      grid.axes.emplace_back(name, it->second);
      continue;
    }
    auto def = std::find_if(defaults.begin(), defaults.end(),
                            [&](const auto& p) { return p.first == name; });
    grid.axes.emplace_back(name, std::vector<double>{def->second});
  }
  return grid;
}

std::vector<abm::ModelParams> expand(const ParameterGrid& grid) {
  std::size_t total = 1;
  for (const auto& [name, axis] : grid.axes) {
    if (axis.empty()) {
      throw std::invalid_argument("empty axis for parameter " + name);
    }
    total *= axis.size();
  }
  std::vector<abm::ModelParams> combos;
  combos.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    std::vector<std::pair<std::string, double>> values;
    std::size_t rest = index;
    // Row-major decode, last axis fastest.
    std::size_t stride = total;
    for (const auto& [name, axis] : grid.axes) {
      stride /= axis.size();
      values.emplace_back(name, axis[rest / stride]);
      rest %= stride;
    }
    auto params = params_from_values(grid.kind, values);
    abm::validate(params);
    combos.push_back(std::move(params));
  }
  return combos;
}

CalibrationResult calibrate(const ParameterGrid& grid,
                            const std::vector<abm::OrdinaryAgent>& initial,
                            const metrics::SeriesSummary& empirical,
                            std::uint64_t seed,
                            const CalibrationOptions& options) {
  if (initial.empty()) {
    throw std::invalid_argument("calibration needs a non-empty population");
  }
  if (empirical.mean.empty() ||
      empirical.mean.size() != empirical.stddev.size()) {
    throw std::invalid_argument("empirical series is empty or ragged");
  }
  if (options.replications < 1) {
    throw std::invalid_argument("replications must be >= 1");
  }
  const auto combos = expand(grid);
  const int rounds = static_cast<int>(empirical.mean.size());

  CalibrationResult result;
  result.table.resize(combos.size());

  auto evaluate_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      // Uncertainty segments depend on the combination's parameters.
      auto population = initial;
      abm::prepare_population(combos[c], population);
      double sum_bias = 0.0;
      double sum_div = 0.0;
      for (int r = 0; r < options.replications; ++r) {
        auto trace = abm::simulate(
            combos[c], population, rounds,
            derive_seed(seed, c, static_cast<std::uint64_t>(r)),
            options.step);
        auto delta = metrics::delta_metrics(
            metrics::summarize(metrics::AttitudeTrace{std::move(trace)}),
            empirical);
        sum_bias += delta.delta_bias;
        sum_div += delta.delta_diversity;
      }
      CalibrationEntry& entry = result.table[c];
      entry.params = combos[c];
      entry.delta_bias = sum_bias / options.replications;
      entry.delta_diversity = sum_div / options.replications;
      entry.objective = entry.delta_bias + entry.delta_diversity;
    }
  };

  const std::size_t workers = std::min<std::size_t>(
      std::max(1, options.workers), combos.size());
  if (workers <= 1) {
    evaluate_range(0, combos.size());
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (combos.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          evaluate_range(std::min(w * chunk, combos.size()),
                         std::min((w + 1) * chunk, combos.size()));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < result.table.size(); ++c) {
    const auto& candidate = result.table[c];
    const auto& incumbent = result.table[best];
    if (candidate.objective < incumbent.objective ||
        (candidate.objective == incumbent.objective &&
         candidate.delta_bias < incumbent.delta_bias)) {
      best = c;
    }
  }
  result.best_index = best;
  return result;
}

void write_table_csv(const CalibrationResult& result, std::ostream& out) {
  if (result.table.empty()) {
    throw std::invalid_argument("empty calibration table");
  }
  const auto names = parameter_names(abm::kind_of(result.table[0].params));
  out << "index,model";
  for (const auto& n : names) out << ',' << n;
  out << ",delta_bias,delta_diversity,objective,selected\n";
  for (std::size_t i = 0; i < result.table.size(); ++i) {
    const auto& entry = result.table[i];
    out << i << ',' << abm::to_string(abm::kind_of(entry.params));
    for (const auto& [name, value] : params_to_values(entry.params)) {
      out << ',' << fmt_double(value);
    }
    out << ',' << fmt_double(entry.delta_bias) << ','
        << fmt_double(entry.delta_diversity) << ','
        << fmt_double(entry.objective) << ','
        << (i == result.best_index ? 1 : 0) << '\n';
  }
}

void apply_calibrated(const abm::ModelParams& calibrated,
                      abm::ModelParams& target) {
  if (abm::kind_of(calibrated) != abm::kind_of(target)) {
    throw std::invalid_argument(
        "calibrated parameters are for model " +
        abm::to_string(abm::kind_of(calibrated)) + ", target is " +
        abm::to_string(abm::kind_of(target)));
  }
  target = calibrated;
}

}  // namespace socsim::calib
