#include "tout/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tout/cache.hpp"
#include "tout/crosswords.hpp"
#include "tout/digest.hpp"
#include "tout/error.hpp"
#include "tout/game24.hpp"
#include "tout/search.hpp"

namespace tout {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kMethods{{
    {Method::io, "io"},
    {Method::cot, "cot"},
    {Method::cot_sc, "cot_sc"},
    {Method::tot_bfs, "tot_bfs"},
    {Method::tot_dfs, "tot_dfs"},
    {Method::tout_bfs, "tout_bfs"},
    {Method::tout_dfs, "tout_dfs"},
}};

bool is_tree_method(Method m) {
  return m == Method::tot_bfs || m == Method::tot_dfs || m == Method::tout_bfs || m == Method::tout_dfs;
}

std::string format_number(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return ec == std::errc{} ? std::string(buffer, end) : std::to_string(value);
}

std::string format_seconds(double seconds) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(3);
  out << seconds;
  return out.str();
}

std::string method_label(const RunConfig& config) {
  std::string label(to_string(config.method));
  if ((config.method == Method::tout_bfs || config.method == Method::tout_dfs) &&
      (!config.search.luq_enabled || !config.search.ugs_enabled)) {
    label += std::string(" luq=") + (config.search.luq_enabled ? "on" : "off") +
             " ugs=" + (config.search.ugs_enabled ? "on" : "off");
  }
  return label;
}

struct Episode {
  int index = 0;
  std::unique_ptr<Task> task;
};

std::vector<Episode> load_episodes(const RunConfig& config) {
  std::vector<Episode> episodes;
  auto in_range = [&](int index, int default_first, int default_last) {
    return index >= config.first.value_or(default_first) && index <= config.last.value_or(default_last);
  };
  constexpr int kAll = std::numeric_limits<int>::max();

  if (config.task == "game24") {
    for (const auto& puzzle : game24::load_puzzles_csv(config.dataset)) {
      if (in_range(puzzle.index, 901, 1000)) {
        episodes.push_back({puzzle.index, std::make_unique<game24::Game24Task>(puzzle)});
      }
    }
  } else if (config.task == "crosswords") {
    auto puzzles = crosswords::load_puzzle_file(config.dataset);
    for (std::size_t i = 0; i < puzzles.size(); ++i) {
      if (in_range(static_cast<int>(i), 0, kAll)) {
        episodes.push_back({static_cast<int>(i), std::make_unique<crosswords::CrosswordTask>(puzzles[i])});
      }
    }
  } else {
    for (int i = 0; i < config.synthetic_trees; ++i) {
      if (in_range(i, 0, kAll)) {
        auto tree = tree::make_synthetic_tree(config.synthetic_family_seed, i, config.synthetic);
        episodes.push_back({i, std::make_unique<tree::LabeledTreeTask>(tree.task())});
      }
    }
  }
  if (episodes.empty()) throw ConfigError("episode index range selects no " + config.task + " problems");
  return episodes;
}

/// Keeps an inner backend and its cache alive alongside the decorator.
class OwningCachedBackend : public Backend {
 public:
  OwningCachedBackend(std::shared_ptr<Backend> inner, std::shared_ptr<ResponseCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)), cached_(*inner_, *cache_) {}
  std::string id() const override { return cached_.id(); }
  BackendResponse generate(const BackendRequest& request, int draw) override {
    return cached_.generate(request, draw);
  }

 private:
  std::shared_ptr<Backend> inner_;
  std::shared_ptr<ResponseCache> cache_;
  CachedBackend cached_;
};

BackendFactory default_factory(const RunConfig& config) {
  std::shared_ptr<Backend> shared;
  if (config.backend == "scripted") {
    if (config.script.empty()) throw ConfigError("the scripted backend needs --script");
    std::ifstream in(config.script);
    if (!in) throw ConfigError("cannot open script " + config.script.string());
    try {
      shared = std::make_shared<ScriptedBackend>(ScriptedBackend::from_json(nlohmann::json::parse(in)));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed script " + config.script.string() + ": " + e.what());
    }
  } else if (config.backend == "http") {
    shared = std::make_shared<HttpBackend>(config.http);
  }
  if (shared && !config.cache_dir.empty()) {
    shared = std::make_shared<OwningCachedBackend>(shared, std::make_shared<ResponseCache>(config.cache_dir));
  }

  return [shared, config](const RunConfig&, const Task& task, std::uint64_t seed) -> std::shared_ptr<Backend> {
    if (shared) return shared;
    const auto tree = tree::make_synthetic_tree(config.synthetic_family_seed, std::stoi(task.problem_id()),
                                                config.synthetic);
    return std::shared_ptr<Backend>(tree.backend(seed));
  };
}

RunRecord run_episode(const RunConfig& config, const std::string& digest, const Episode& episode,
                      Backend& backend) {
  RunRecord record;
  record.config = config.to_json();
  record.config["digest"] = digest;
  record.task = config.task;
  record.problem_id = episode.task->problem_id();

  SearchConfig search = config.search;
  search.seed = episode_seed(config.search.seed, episode.index);
  Transcript& transcript = record.events;
  transcript.add("episode", {{"index", episode.index}, {"seed", search.seed}, {"input", episode.task->input()}});

  const Task& task = *episode.task;
  bool failed = false;
  try {
    switch (config.method) {
      case Method::io: record.final_output = io_prompt(task, backend, search, transcript); break;
      case Method::cot: record.final_output = cot_prompt(task, backend, search, transcript); break;
      case Method::cot_sc: record.final_output = cot_sc(task, backend, search, search.n_chains, transcript); break;
      case Method::tot_bfs:
        record.final_output = tot_baseline(task, backend, search, transcript, TreeSearch::bfs).final_output;
        break;
      case Method::tot_dfs:
        record.final_output = tot_baseline(task, backend, search, transcript, TreeSearch::dfs).final_output;
        break;
      case Method::tout_bfs: record.final_output = tout_bfs(task, backend, search, transcript).final_output; break;
      case Method::tout_dfs: record.final_output = tout_dfs(task, backend, search, transcript).final_output; break;
    }
  } catch (const SearchExhausted& e) {
    transcript.add("error", {{"kind", "search_exhausted"}, {"message", e.what()}});
  } catch (const BackendUnavailable& e) {
    transcript.add("error", {{"kind", "backend_unavailable"}, {"message", e.what()}, {"status", e.last_status()}});
    failed = true;
  }

  record.verdicts = task.check_success(record.final_output);
  for (const auto& [name, value] : task.transcript_verdicts(transcript)) record.verdicts[name] = value;
  if (failed) record.verdicts["episode_failed"] = 1.0;
  return record;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

std::string_view to_string(Method method) {
  for (const auto& [m, name] : kMethods) {
    if (m == method) return name;
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (const auto& [m, name] : kMethods) {
    if (name == text) return m;
  }
  throw ConfigError("unknown method '" + std::string(text) +
                    "' (expected io, cot, cot_sc, tot_bfs, tot_dfs, tout_bfs or tout_dfs)");
}

void RunConfig::validate() const {
  static const std::set<std::string> kTasks{"game24", "crosswords", "synthetic"};
  static const std::set<std::string> kBackends{"http", "scripted", "synthetic"};
  if (!kTasks.contains(task)) throw ConfigError("unknown task '" + task + "'");
  if (!kBackends.contains(backend)) throw ConfigError("unknown backend '" + backend + "'");
  if (backend == "synthetic" && task != "synthetic") {
    throw ConfigError("the synthetic backend only answers the synthetic task");
  }
  if (task == "synthetic" && backend == "http") throw ConfigError("the synthetic task needs a synthetic or scripted backend");
  if (task == "synthetic" && !is_tree_method(method)) {
    throw ConfigError("the synthetic task supports tree-search methods only");
  }
  if (task != "synthetic" && dataset.empty()) throw ConfigError("--dataset is required for " + task);
  if (first && last && *first > *last) throw ConfigError("empty episode index range");
  if (jobs < 1) throw ConfigError("jobs must be positive");
  if (task == "synthetic" && synthetic_trees < 1) throw ConfigError("synthetic_trees must be positive");
  search.validate();
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{
      {"task", task},
      {"method", std::string(to_string(method))},
      {"backend", backend},
      {"search", search},
  };
  if (task != "synthetic") j["dataset"] = dataset.filename().string();
  if (backend == "http") j["model"] = http.model;
  if (task == "synthetic") {
    j["synthetic"] = {{"family_seed", synthetic_family_seed},
                      {"depth", synthetic.depth},
                      {"k", synthetic.k},
                      {"correct_value", synthetic.correct_value},
                      {"correct_noise", synthetic.correct_noise},
                      {"trap_noise", synthetic.trap_noise},
                      {"trap_win_probability", synthetic.trap_win_probability},
                      {"distractor_value", synthetic.distractor_value},
                      {"distractor_noise", synthetic.distractor_noise}};
  }
  return j;
}

std::string RunConfig::digest() const { return sha256_hex(to_json().dump()).substr(0, 12); }

std::string RunConfig::effective_run_id() const {
  if (!run_id.empty()) return run_id;
  return task + "-" + std::string(to_string(method)) + "-" + digest();
}

RunAborted::RunAborted(const std::string& what, std::vector<ResultRow> partial)
    : Error(what), partial_(std::move(partial)) {}

std::uint64_t episode_seed(std::uint64_t run_seed, int episode_index) noexcept {
  return run_seed ^ static_cast<std::uint64_t>(episode_index);
}

std::filesystem::path transcript_path(const RunConfig& config) {
  return config.output_dir / "transcripts" / (config.effective_run_id() + ".jsonl");
}

std::vector<RunRecord> read_transcript(const std::filesystem::path& path) {
  std::vector<RunRecord> records;
  std::ifstream in(path);
  if (!in) return records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      records.push_back(RunRecord::from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      std::cerr << "tout: warning: skipping unreadable transcript line " << number << " of " << path.string()
                << ": " << e.what() << '\n';
    }
  }
  return records;
}

std::vector<ResultRow> aggregate(const std::vector<RunRecord>& records, const RunConfig& config, double seconds) {
  ResultRow base;
  base.method = method_label(config);
  base.config_digest = config.digest();
  base.m = config.search.effective_samples();
  base.b = config.search.b;
  base.episodes = static_cast<int>(records.size());
  base.seconds = seconds;

  auto total = [&](const std::string& key) {
    double sum = 0.0;
    for (const auto& r : records) {
      auto it = r.verdicts.find(key);
      if (it != r.verdicts.end()) sum += it->second;
    }
    return sum;
  };
  auto row = [&](std::string metric, double value) {
    ResultRow r = base;
    r.metric = std::move(metric);
    r.value = value;
    return r;
  };

  std::vector<ResultRow> rows;
  const double n = static_cast<double>(records.size());
  if (records.empty()) return rows;
  if (config.task == "crosswords") {
    rows.push_back(row("letter", total("letters") / (25.0 * n) * 100.0));
    rows.push_back(row("word", total("words") / (10.0 * n) * 100.0));
    rows.push_back(row("game", total("game") / n * 100.0));
    const bool has_best = std::any_of(records.begin(), records.end(),
                                      [](const RunRecord& r) { return r.verdicts.contains("best_letters"); });
    if (has_best) {
      rows.push_back(row("best_letter", total("best_letters") / (25.0 * n) * 100.0));
      rows.push_back(row("best_word", total("best_words") / (10.0 * n) * 100.0));
      rows.push_back(row("best_game", total("best_game") / n * 100.0));
    }
  } else {
    rows.push_back(row("success_rate", total("success") / n * 100.0));
  }
  return rows;
}

std::vector<ResultRow> run_benchmark(const RunConfig& config, BackendFactory factory) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  const std::string digest = config.digest();
  std::vector<Episode> episodes = load_episodes(config);
  if (!factory) factory = default_factory(config);

  const auto path = transcript_path(config);
  std::filesystem::create_directories(path.parent_path());

  std::vector<RunRecord> records;
  std::set<std::string> done;
  for (auto& record : read_transcript(path)) {
    if (record.config_digest() != digest) continue;
    if (!done.insert(record.problem_id).second) continue;
    records.push_back(std::move(record));
  }
  std::vector<const Episode*> pending;
  std::set<std::string> selected;
  for (const auto& episode : episodes) {
    selected.insert(episode.task->problem_id());
    if (!done.contains(episode.task->problem_id())) pending.push_back(&episode);
  }
  std::erase_if(records, [&](const RunRecord& r) { return !selected.contains(r.problem_id); });

  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open transcript " + path.string());
  std::mutex writer;
  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::exception_ptr fatal;

  auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const Episode& episode = *pending[i];
      try {
        auto backend = factory(config, *episode.task, episode_seed(config.search.seed, episode.index));
        RunRecord record = run_episode(config, digest, episode, *backend);
        if (record.verdicts.contains("episode_failed")) ++failures;
        const std::string line = record.to_json().dump();
        std::lock_guard lock(writer);
        out << line << '\n';
        out.flush();
        records.push_back(std::move(record));
      } catch (...) {
        std::lock_guard lock(writer);
        if (!fatal) fatal = std::current_exception();
        next = pending.size();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.jobs, static_cast<int>(pending.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.problem_id < b.problem_id; });
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::vector<ResultRow> rows = aggregate(records, config, seconds);

  const auto results = config.output_dir / "results" / config.effective_run_id();
  write_text(results.string() + ".csv", emit_results(rows, "csv"));
  write_text(results.string() + ".md", emit_results(rows, "markdown"));

  if (!pending.empty() && failures * 2 > static_cast<int>(pending.size())) {
    throw RunAborted("run aborted: " + std::to_string(failures.load()) + " of " + std::to_string(pending.size()) +
                         " episodes failed on backend errors",
                     rows);
  }
  return rows;
}

std::vector<ResultRow> run_ablation(const RunConfig& base, BackendFactory factory) {
  if (!is_tree_method(base.method)) throw ConfigError("ablation needs a tree-search method");
  RunConfig config = base;
  if (config.method == Method::tot_bfs) config.method = Method::tout_bfs;
  if (config.method == Method::tot_dfs) config.method = Method::tout_dfs;

  std::vector<ResultRow> rows;
  for (auto [luq, ugs] : {std::pair{false, false}, {true, false}, {false, true}, {true, true}}) {
    RunConfig variant = config;
    variant.search.luq_enabled = luq;
    variant.search.ugs_enabled = ugs;
    if (!base.run_id.empty()) {
      variant.run_id = base.run_id + "-luq" + (luq ? "1" : "0") + "-ugs" + (ugs ? "1" : "0");
    }
    auto part = run_benchmark(variant, factory);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::vector<ResultRow> run_m_sweep(const RunConfig& base, const std::vector<int>& ms, BackendFactory factory) {
  if (ms.empty()) throw ConfigError("m sweep needs at least one value of m");
  std::vector<ResultRow> rows;
  for (int m : ms) {
    RunConfig variant = base;
    variant.search.m = m;
    if (!base.run_id.empty()) variant.run_id = base.run_id + "-m" + std::to_string(m);
    auto part = run_benchmark(variant, factory);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

std::string emit_results(const std::vector<ResultRow>& rows, std::string_view format) {
  auto fields = [](const ResultRow& r) {
    return std::vector<std::string>{r.method,
                                    std::to_string(r.m),
                                    std::to_string(r.b),
                                    r.metric,
                                    format_number(r.value),
                                    std::to_string(r.episodes),
                                    format_seconds(r.seconds)};
  };
  static const std::vector<std::string> kHeader{"method", "m", "b", "metric", "value", "episodes", "seconds"};

  std::ostringstream out;
  if (format == "csv") {
    auto quote = [](const std::string& field) {
      if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
      std::string quoted = "\"";
      for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      return quoted + "\"";
    };
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote(cells[i]);
      out << "\r\n";
    };
    line(kHeader);
    for (const auto& r : rows) line(fields(r));
  } else if (format == "markdown") {
    auto line = [&](const std::vector<std::string>& cells) {
      out << "|";
      for (const auto& cell : cells) {
        std::string escaped;
        for (char c : cell) {
          if (c == '|') escaped += '\\';
          escaped += c;
        }
        out << " " << escaped << " |";
      }
      out << "\n";
    };
    line(kHeader);
    out << "|---|---:|---:|---|---:|---:|---:|\n";
    for (const auto& r : rows) line(fields(r));
  } else {
    throw ConfigError("unknown result format '" + std::string(format) + "' (supported: csv, markdown)");
  }
  return out.str();
}

}  // namespace tout
