#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "socsim/runner.hpp"

namespace socsim::run {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail_line(const std::string& file, std::size_t line,
                            const std::string& what) {
  throw std::runtime_error(file + " line " + std::to_string(line) + ": " +
                           what);
}

// Calls fn(json, line_no) per non-empty line, wrapping parse errors with
// file and line.
template <typename Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail_line(path, line_no, e.what());
    }
    try {
      fn(j, line_no);
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      fail_line(path, line_no, e.what());
    }
  }
}

agent::CoreProfile profile_from_json(const nlohmann::json& j,
                                     const std::string& user_id) {
  agent::CoreProfile p;
  p.name = j.value("name", user_id);
  p.gender = j.value("gender", "");
  p.political_leaning = j.value("political_leaning", "");
  p.account_type = j.value("account_type", "Private Person");
  p.communication_role = j.value("communication_role", "Commentator");
  p.activity_tier = j.value("activity_tier", 1);
  p.influence_tier = j.value("influence_tier", 1);
  p.summary = j.value("summary", "");
  if (p.name.empty()) p.name = user_id;
  agent::validate(p);
  return p;
}

env::Tweet page_tweet_from_json(const nlohmann::json& j) {
  env::Tweet t;
  t.id = j.at("id").get<std::int64_t>();
  t.author = j.at("author").get<std::string>();
  t.content = j.at("content").get<std::string>();
  t.timestamp = env::parse_timestamp(j.at("time").get<std::string>());
  if (t.id <= 0) throw std::invalid_argument("tweet id must be positive");
  if (t.author.empty()) throw std::invalid_argument("tweet without author");
  return t;
}

}  // namespace

const DatasetUser* Dataset::find_user(const std::string& id) const {
  for (const auto& u : users) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

std::size_t Dataset::core_count() const {
  std::size_t n = 0;
  for (const auto& u : users) n += u.is_core ? 1 : 0;
  return n;
}

std::size_t Dataset::ordinary_count() const {
  return users.size() - core_count();
}

Dataset load_dataset(const DatasetPaths& paths) {
  if (paths.users.empty()) {
    throw std::invalid_argument("users file is required");
  }
  Dataset ds;
  std::unordered_set<std::string> ids;

  for_each_jsonl(paths.users, [&](const nlohmann::json& j,
                                  std::size_t line_no) {
    DatasetUser u;
    u.id = j.at("id").get<std::string>();
    if (u.id.empty()) fail_line(paths.users, line_no, "empty user id");
    if (!ids.insert(u.id).second) {
      fail_line(paths.users, line_no, "duplicate user id " + u.id);
    }
    const std::string kind = j.value("kind", "ordinary");
    if (kind == "core") {
      u.is_core = true;
    } else if (kind != "ordinary") {
      fail_line(paths.users, line_no, "unknown user kind " + kind);
    }
    u.initial_attitude = j.value("attitude", 0.0);
    if (!abm::attitude_in_range(u.initial_attitude)) {
      fail_line(paths.users, line_no,
                "attitude outside [-1, 1] for " + u.id);
    }
    u.uncertainty = j.value("uncertainty", 0.0);
    if (u.uncertainty < 0.0) {
      fail_line(paths.users, line_no, "negative uncertainty for " + u.id);
    }
    if (u.is_core) {
      u.profile = profile_from_json(j.value("profile", nlohmann::json::object()),
                                    u.id);
      if (j.contains("history")) {
        for (const auto& h : j.at("history")) {
          u.history.push_back(h.get<std::string>());
        }
      }
    }
    ds.users.push_back(std::move(u));
  });

  if (!paths.edges.empty()) {
    for_each_jsonl(paths.edges, [&](const nlohmann::json& j,
                                    std::size_t line_no) {
      auto follower = j.at("follower").get<std::string>();
      auto followee = j.at("followee").get<std::string>();
      if (!ids.count(follower)) {
        fail_line(paths.edges, line_no, "unknown follower " + follower);
      }
      if (!ids.count(followee)) {
        fail_line(paths.edges, line_no, "unknown followee " + followee);
      }
      if (follower == followee) {
        fail_line(paths.edges, line_no, "self-follow on " + follower);
      }
      ds.edges.emplace_back(std::move(follower), std::move(followee));
    });
  }

  if (!paths.news.empty()) {
    std::ifstream in(paths.news);
    if (!in) throw std::runtime_error("cannot open " + paths.news);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(paths.news + ": " + e.what());
    }
    if (!j.is_array()) {
      throw std::runtime_error(paths.news + ": expected a JSON array");
    }
    for (const auto& item : j) {
      env::NewsItem news;
      try {
        news.round = item.at("round").get<int>();
        news.text = item.at("text").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(paths.news + ": " + e.what());
      }
      if (news.round < 1) {
        throw std::runtime_error(paths.news + ": news round must be >= 1");
      }
      if (news.text.empty()) {
        throw std::runtime_error(paths.news + ": empty news text");
      }
      ds.news.push_back(std::move(news));
    }
  }

  if (!paths.micro_pairs.empty()) {
    for_each_jsonl(paths.micro_pairs, [&](const nlohmann::json& j,
                                          std::size_t line_no) {
      MicroPair pair;
      pair.user_id = j.at("user").get<std::string>();
      const DatasetUser* user = ds.find_user(pair.user_id);
      if (!user) {
        fail_line(paths.micro_pairs, line_no,
                  "unknown user " + pair.user_id);
      }
      if (!user->is_core) {
        fail_line(paths.micro_pairs, line_no,
                  pair.user_id + " is not a core user");
      }
      pair.time = j.value("time", "2020-01-01 00:00:00");
      env::parse_timestamp(pair.time);  // format check
      pair.news = j.value("news", "");
      pair.personal_experience = j.value("personal_experience", "");
      if (j.contains("memory")) {
        for (const auto& m : j.at("memory")) {
          pair.memory_lines.push_back(m.get<std::string>());
        }
      }
      if (j.contains("page")) {
        for (const auto& t : j.at("page")) {
          pair.page.push_back(page_tweet_from_json(t));
        }
      }
      if (j.contains("notifications")) {
        for (const auto& n : j.at("notifications")) {
          pair.notifications.push_back(n.get<std::string>());
        }
      }
      const auto& truth = j.at("truth");
      pair.truth.behavior = truth.at("behavior").get<std::string>();
      if (pair.truth.behavior != "post" && pair.truth.behavior != "retweet") {
        fail_line(paths.micro_pairs, line_no,
                  "behavior outside the {post, retweet} space: " +
                      pair.truth.behavior);
      }
      pair.truth.stance = annotate::to_string(
          annotate::parse_stance_label(truth.at("stance").get<std::string>()));
      pair.truth.content_type = annotate::to_string(annotate::parse_content_type(
          truth.at("content_type").get<std::string>()));
      if (truth.contains("attitude") && !truth.at("attitude").is_null()) {
        pair.truth.attitude = truth.at("attitude").get<double>();
        if (!abm::attitude_in_range(*pair.truth.attitude)) {
          fail_line(paths.micro_pairs, line_no, "truth attitude outside [-1, 1]");
        }
      }
      pair.truth.text = truth.value("text", "");
      ds.micro_pairs.push_back(std::move(pair));
    });
  }

  return ds;
}

void write_trace_csv(const metrics::SeriesSummary& summary,
                     std::ostream& out) {
  if (summary.mean.size() != summary.stddev.size()) {
    throw std::invalid_argument("ragged series summary");
  }
  out << "round,mean,std\n";
  for (std::size_t i = 0; i < summary.mean.size(); ++i) {
    out << (i + 1) << ',' << fmt_double(summary.mean[i]) << ','
        << fmt_double(summary.stddev[i]) << '\n';
  }
}

metrics::SeriesSummary read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty trace file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "round,mean,std") {
    throw std::runtime_error("trace header must be 'round,mean,std', got '" +
                             line + "'");
  }
  metrics::SeriesSummary summary;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 3) {
      throw std::runtime_error("trace line " + std::to_string(line_no) +
                               ": expected 3 columns");
    }
    try {
      summary.mean.push_back(std::stod(fields[1]));
      summary.stddev.push_back(std::stod(fields[2]));
    } catch (const std::exception&) {
      throw std::runtime_error("trace line " + std::to_string(line_no) +
                               ": bad number");
    }
  }
  return summary;
}

void write_wide_trace_csv(const metrics::AttitudeTrace& trace,
                          const std::vector<std::string>& column_ids,
                          std::ostream& out) {
  out << "round";
  for (const auto& id : column_ids) out << ',' << id;
  out << '\n';
  for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
    if (trace.rounds[r].size() != column_ids.size()) {
      throw std::invalid_argument("trace row width != column count");
    }
    out << (r + 1);
    for (double v : trace.rounds[r]) out << ',' << fmt_double(v);
    out << '\n';
  }
}

void write_core_trace_jsonl(
    std::span<const bridge::CoreAttitudeRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    nlohmann::json j{
        {"agent_id", r.agent_id},
        {"round", r.round},
        {"attitude", r.attitude},
        {"source", bridge::to_string(r.source)},
    };
    out << j.dump() << '\n';
  }
}

std::vector<bridge::CoreAttitudeRecord> read_core_trace_jsonl(
    std::istream& in) {
  std::vector<bridge::CoreAttitudeRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      bridge::CoreAttitudeRecord r;
      r.agent_id = j.at("agent_id").get<std::string>();
      r.round = j.at("round").get<int>();
      r.attitude = j.at("attitude").get<double>();
      r.source = bridge::parse_attitude_source(
          j.value("source", "generated_content"));
      if (!abm::attitude_in_range(r.attitude)) {
        throw std::invalid_argument("attitude outside [-1, 1]");
      }
      if (r.round < 1) throw std::invalid_argument("round must be >= 1");
      records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("core trace line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return records;
}

}  // namespace socsim::run
