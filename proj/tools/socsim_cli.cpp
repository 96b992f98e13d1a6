// Command-line front end: simulate / micro / replicate / calibrate /
// evaluate / annotate over JSON configs and JSONL datasets.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "socsim/abm.hpp"
#include "socsim/annotate.hpp"
#include "socsim/bridge.hpp"
#include "socsim/calibrate.hpp"
#include "socsim/metrics.hpp"
#include "socsim/runner.hpp"

namespace {

namespace fs = std::filesystem;
using socsim::run::Dataset;
using socsim::run::DatasetPaths;
using socsim::run::RunConfig;

RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig{};
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  nlohmann::json j;
  in >> j;
  return socsim::run::config_from_json(j);
}

Dataset load(const DatasetPaths& paths) {
  if (paths.users.empty()) {
    throw std::runtime_error("--users is required for this subcommand");
  }
  return socsim::run::load_dataset(paths);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(2) + "\n");
}

socsim::metrics::SeriesSummary read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path);
  return socsim::run::read_trace_csv(in);
}

void add_dataset_options(CLI::App* cmd, DatasetPaths& paths) {
  cmd->add_option("--users", paths.users, "users.jsonl path");
  cmd->add_option("--edges", paths.edges, "edges.jsonl path");
  cmd->add_option("--news", paths.news, "news.json path");
  cmd->add_option("--micro-pairs", paths.micro_pairs,
                  "micro_pairs.jsonl path");
}

int cmd_simulate(const std::string& config_path, const DatasetPaths& paths,
                 const std::string& out_dir, const std::string& empirical) {
  const RunConfig config = load_config(config_path);
  const Dataset dataset = load(paths);
  const auto result = socsim::run::run_macro(dataset, config);

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "trace.csv", std::ios::binary);
    socsim::run::write_trace_csv(socsim::metrics::summarize(result.trace),
                                 out);
  }
  if (config.export_agent_attitudes) {
    std::ofstream out(fs::path(out_dir) / "trace_wide.csv", std::ios::binary);
    socsim::run::write_wide_trace_csv(result.trace, result.column_ids, out);
  }
  {
    std::ofstream out(fs::path(out_dir) / "tweets.jsonl", std::ios::binary);
    socsim::env::write_tweets_jsonl(result.environment, out);
  }
  {
    std::ofstream out(fs::path(out_dir) / "core_trace.jsonl",
                      std::ios::binary);
    socsim::run::write_core_trace_jsonl(result.core_records, out);
  }
  std::optional<socsim::metrics::SeriesSummary> reference;
  if (!empirical.empty()) reference = read_summary(empirical);
  write_json(fs::path(out_dir) / "metrics.json",
             socsim::run::macro_metrics_json(result, reference));
  write_json(fs::path(out_dir) / "run-manifest.json",
             socsim::run::run_manifest(config));

  if (result.aborted) {
    std::cerr << "aborted: " << result.abort_reason << "\n";
    return 2;
  }
  std::cout << "completed " << result.trace.rounds.size() << " rounds, "
            << result.environment.tweets().size() << " tweets -> " << out_dir
            << "\n";
  return 0;
}

int cmd_micro(const std::string& config_path, const DatasetPaths& paths,
              const std::string& out_dir) {
  const RunConfig config = load_config(config_path);
  const Dataset dataset = load(paths);
  const auto report = socsim::run::run_micro(dataset, config);

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "micro_cases.jsonl",
                      std::ios::binary);
    for (const auto& c : report.cases) {
      nlohmann::json j{
          {"user_id", c.user_id},
          {"failed", c.failed},
          {"predicted_behavior", c.predicted_behavior},
          {"truth_behavior", c.truth_behavior},
          {"predicted_stance", c.predicted_stance},
          {"truth_stance", c.truth_stance},
          {"generated_text", c.generated_text},
      };
      if (!c.diagnostic.empty()) j["diagnostic"] = c.diagnostic;
      if (!c.predicted_content.empty()) {
        j["predicted_content"] = c.predicted_content;
        j["truth_content"] = c.truth_content;
      }
      if (c.predicted_attitude) j["predicted_attitude"] = *c.predicted_attitude;
      if (c.truth_attitude) j["truth_attitude"] = *c.truth_attitude;
      if (c.content_similarity) {
        j["content_similarity"] = *c.content_similarity;
      }
      out << j.dump() << "\n";
    }
  }
  write_json(fs::path(out_dir) / "micro_report.json",
             socsim::run::micro_report_json(report));
  write_json(fs::path(out_dir) / "run-manifest.json",
             socsim::run::run_manifest(config));
  std::cout << "scored " << report.cases.size() << " pairs ("
            << report.failures << " failed) -> " << out_dir << "\n";
  return 0;
}

int cmd_replicate(const std::string& config_path, const DatasetPaths& paths,
                  const std::string& core_trace_path, int replicates,
                  const std::string& out_dir, const std::string& empirical) {
  const RunConfig config = load_config(config_path);
  const Dataset dataset = load(paths);
  std::ifstream trace_in(core_trace_path);
  if (!trace_in) {
    throw std::runtime_error("cannot open core trace " + core_trace_path);
  }
  const auto records = socsim::run::read_core_trace_jsonl(trace_in);
  const auto summaries =
      socsim::run::run_frozen_replicate(dataset, config, records, replicates);

  fs::create_directories(out_dir);
  std::optional<socsim::metrics::SeriesSummary> reference;
  if (!empirical.empty()) reference = read_summary(empirical);

  nlohmann::json per_replicate = nlohmann::json::array();
  double sum_bias = 0.0, sum_div = 0.0, sum_dbias = 0.0, sum_ddiv = 0.0;
  for (const auto& rep : summaries) {
    std::ofstream out(
        fs::path(out_dir) / ("trace_" + std::to_string(rep.replicate) + ".csv"),
        std::ios::binary);
    socsim::run::write_trace_csv(rep.summary, out);

    const auto bd = socsim::metrics::bias_and_diversity(rep.summary);
    nlohmann::json j{{"replicate", rep.replicate},
                     {"seed", rep.seed},
                     {"bias", bd.bias},
                     {"diversity", bd.diversity}};
    sum_bias += bd.bias;
    sum_div += bd.diversity;
    if (reference) {
      const auto delta = socsim::metrics::delta_metrics(rep.summary, *reference);
      j["delta_bias"] = delta.delta_bias;
      j["delta_diversity"] = delta.delta_diversity;
      sum_dbias += delta.delta_bias;
      sum_ddiv += delta.delta_diversity;
    }
    per_replicate.push_back(j);
  }
  const auto n = static_cast<double>(summaries.size());
  nlohmann::json means{{"bias", sum_bias / n}, {"diversity", sum_div / n}};
  if (reference) {
    means["delta_bias"] = sum_dbias / n;
    means["delta_diversity"] = sum_ddiv / n;
  }
  write_json(fs::path(out_dir) / "replicate_metrics.json",
             nlohmann::json{{"replicates", per_replicate}, {"mean", means}});
  write_json(fs::path(out_dir) / "run-manifest.json",
             socsim::run::run_manifest(config));
  std::cout << "ran " << summaries.size() << " replicates -> " << out_dir
            << "\n";
  return 0;
}

int cmd_calibrate(const std::string& grid_path, const DatasetPaths& paths,
                  const std::string& empirical, std::uint64_t seed,
                  int replications, int workers, const std::string& out_dir) {
  std::ifstream grid_in(grid_path);
  if (!grid_in) throw std::runtime_error("cannot open grid file " + grid_path);
  nlohmann::json grid_json;
  grid_in >> grid_json;
  const auto grid = socsim::calib::grid_from_json(grid_json);

  const Dataset dataset = load(paths);
  std::vector<socsim::abm::OrdinaryAgent> population;
  for (const auto& u : dataset.users) {
    if (u.is_core) continue;
    population.push_back(socsim::abm::OrdinaryAgent{
        static_cast<socsim::abm::AgentId>(population.size()),
        u.initial_attitude, u.uncertainty});
  }
  const auto reference = read_summary(empirical);

  socsim::calib::CalibrationOptions options;
  options.replications = replications;
  options.workers = workers;
  const auto result =
      socsim::calib::calibrate(grid, population, reference, seed, options);

  fs::create_directories(out_dir);
  {
    std::ofstream out(fs::path(out_dir) / "calibration.csv", std::ios::binary);
    socsim::calib::write_table_csv(result, out);
  }
  nlohmann::json best{{"model", socsim::abm::to_string(grid.kind)},
                      {"objective", result.best().objective},
                      {"delta_bias", result.best().delta_bias},
                      {"delta_diversity", result.best().delta_diversity}};
  for (const auto& [name, value] :
       socsim::calib::params_to_values(result.best().params)) {
    best[name] = value;
  }
  write_json(fs::path(out_dir) / "calibration.json",
             nlohmann::json{{"best", best}, {"seed", seed},
                            {"replications", replications}});
  std::cout << "best objective " << result.best().objective << " -> "
            << out_dir << "\n";
  return 0;
}

int cmd_evaluate(const std::string& trace_path, const std::string& empirical,
                 const std::string& out_path) {
  const auto sim = read_summary(trace_path);
  const auto sim_bd = socsim::metrics::bias_and_diversity(sim);
  nlohmann::json j{{"bias", sim_bd.bias}, {"diversity", sim_bd.diversity},
                   {"rounds", sim.mean.size()}};
  if (!empirical.empty()) {
    const auto ref = read_summary(empirical);
    const auto ref_bd = socsim::metrics::bias_and_diversity(ref);
    const auto delta = socsim::metrics::delta_metrics(sim, ref);
    j["empirical_bias"] = ref_bd.bias;
    j["empirical_diversity"] = ref_bd.diversity;
    j["delta_bias"] = delta.delta_bias;
    j["delta_diversity"] = delta.delta_diversity;
    j["dtw"] = socsim::metrics::dtw(sim.mean, ref.mean);
    auto r = socsim::metrics::pearson(sim.mean, ref.mean);
    j["pearson"] = r ? nlohmann::json(*r) : nlohmann::json();
  }
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_json(out_path, j);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int cmd_annotate(const std::string& config_path, const std::string& input,
                 const std::string& out_path) {
  const RunConfig config = load_config(config_path);
  std::unique_ptr<socsim::annotate::StanceBackend> stance;
  if (config.annotator.kind == socsim::run::AnnotatorConfig::Kind::remote) {
    stance = std::make_unique<socsim::annotate::RemoteStanceBackend>(
        config.annotator.chat);
  } else {
    auto lexicon = config.annotator.lexicon.empty()
                       ? socsim::annotate::default_valence_lexicon()
                       : config.annotator.lexicon;
    stance = std::make_unique<socsim::annotate::LexiconStanceBackend>(
        std::move(lexicon), config.annotator.threshold);
  }
  const auto& lexicon = config.annotator.lexicon.empty()
                            ? socsim::annotate::default_valence_lexicon()
                            : config.annotator.lexicon;

  std::ifstream in(input);
  if (!in) throw std::runtime_error("cannot open input file " + input);
  std::ofstream out;
  if (!out_path.empty()) {
    out.open(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
  }
  std::ostream& sink = out_path.empty() ? std::cout : out;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // Accept either a JSONL {"text": ...} record or a raw text line.
    std::string text = line;
    nlohmann::json extra = nlohmann::json::object();
    if (line.front() == '{') {
      const auto j = nlohmann::json::parse(line);
      text = j.at("text").get<std::string>();
      if (j.contains("id")) extra["id"] = j.at("id");
    }
    const auto label = stance->annotate(text, config.topic);
    const double intensity =
        socsim::annotate::sentiment_intensity(text, lexicon);
    nlohmann::json record{
        {"line", line_no},
        {"text", text},
        {"stance", socsim::annotate::to_string(label)},
        {"intensity", intensity},
        {"attitude", socsim::bridge::content_to_attitude(label, intensity)},
    };
    record.update(extra);
    sink << record.dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid opinion-dynamics simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", empirical, core_trace_path;
  std::string grid_path, trace_path, input_path, out_path;
  int replicates = 10, replications = 5, workers = 1;
  std::uint64_t seed = 0;
  DatasetPaths paths;

  auto* simulate = app.add_subcommand(
      "simulate", "Run the multi-round hybrid (or pure opinion-model) loop");
  simulate->add_option("--config", config_path, "run config JSON");
  add_dataset_options(simulate, paths);
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--empirical", empirical,
                       "empirical trace.csv for comparison metrics");

  auto* micro = app.add_subcommand(
      "micro", "Replay recorded situations and score behavior alignment");
  micro->add_option("--config", config_path, "run config JSON");
  add_dataset_options(micro, paths);
  micro->add_option("--out", out_dir, "output directory");

  auto* replicate = app.add_subcommand(
      "replicate", "Re-run ordinary users against a frozen core trace");
  replicate->add_option("--config", config_path, "run config JSON");
  add_dataset_options(replicate, paths);
  replicate->add_option("--core-trace", core_trace_path,
                        "core_trace.jsonl from a previous simulate run")
      ->required();
  replicate->add_option("--replicates", replicates, "number of re-runs");
  replicate->add_option("--out", out_dir, "output directory");
  replicate->add_option("--empirical", empirical,
                        "empirical trace.csv for comparison metrics");

  auto* calibrate = app.add_subcommand(
      "calibrate", "Grid-search opinion-model parameters against a trace");
  calibrate->add_option("--grid", grid_path, "parameter grid JSON")
      ->required();
  add_dataset_options(calibrate, paths);
  calibrate->add_option("--empirical", empirical, "empirical trace.csv")
      ->required();
  calibrate->add_option("--seed", seed, "base seed");
  calibrate->add_option("--replications", replications,
                        "runs per grid combination");
  calibrate->add_option("--workers", workers, "worker threads");
  calibrate->add_option("--out", out_dir, "output directory");

  auto* evaluate = app.add_subcommand(
      "evaluate", "Compute metrics over existing trace files");
  evaluate->add_option("--trace", trace_path, "simulated trace.csv")
      ->required();
  evaluate->add_option("--empirical", empirical, "empirical trace.csv");
  evaluate->add_option("--out", out_path, "metrics JSON path (default stdout)");

  auto* annotate = app.add_subcommand(
      "annotate", "Batch stance/intensity annotation of a text file");
  annotate->add_option("--config", config_path, "run config JSON");
  annotate->add_option("--input", input_path, "text or JSONL file")
      ->required();
  annotate->add_option("--out", out_path, "output JSONL path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(config_path, paths, out_dir, empirical);
    }
    if (micro->parsed()) return cmd_micro(config_path, paths, out_dir);
    if (replicate->parsed()) {
      return cmd_replicate(config_path, paths, core_trace_path, replicates,
                           out_dir, empirical);
    }
    if (calibrate->parsed()) {
      return cmd_calibrate(grid_path, paths, empirical, seed, replications,
                           workers, out_dir);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(trace_path, empirical, out_path);
    }
    if (annotate->parsed()) {
      return cmd_annotate(config_path, input_path, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
