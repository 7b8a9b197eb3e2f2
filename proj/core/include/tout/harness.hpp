#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tout/backend.hpp"
#include "tout/config.hpp"
#include "tout/error.hpp"
#include "tout/http_backend.hpp"
#include "tout/labeled_tree.hpp"
#include "tout/transcript.hpp"

namespace tout {

enum class Method { io, cot, cot_sc, tot_bfs, tot_dfs, tout_bfs, tout_dfs };
std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct RunConfig {
  std::string task = "game24";    ///< game24 | crosswords | synthetic
  Method method = Method::tout_bfs;
  std::string backend = "scripted";  ///< http | scripted | synthetic
  SearchConfig search;

  std::filesystem::path dataset;
  std::filesystem::path output_dir = "out";
  /// Inclusive episode index range: puzzle rank for game24, array position
  /// for crosswords, tree index for synthetic. Unset means the task default.
  std::optional<int> first;
  std::optional<int> last;
  std::string run_id;  ///< defaults to "<task>-<method>-<digest prefix>"
  int jobs = 1;

  std::filesystem::path script;     ///< scripted backend table (JSON)
  std::filesystem::path cache_dir;  ///< empty disables the on-disk cache
  HttpBackendOptions http;

  int synthetic_trees = 200;
  std::uint64_t synthetic_family_seed = 2023;
  tree::SyntheticTreeSpec synthetic;

  /// Throws ConfigError on an invalid combination.
  void validate() const;
  /// Fields that influence results, for digests and transcript headers.
  nlohmann::json to_json() const;
  /// Short hex digest of to_json().
  std::string digest() const;
  std::string effective_run_id() const;
};

struct ResultRow {
  std::string method;
  std::string config_digest;
  int m = 0;
  int b = 0;
  std::string metric;
  double value = 0.0;
  int episodes = 0;
  double seconds = 0.0;
};

/// More than half of the episodes failed on backend errors.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, std::vector<ResultRow> partial);
  const std::vector<ResultRow>& partial() const noexcept { return partial_; }

 private:
  std::vector<ResultRow> partial_;
};

/// Supplies the backend for an episode. The default factory builds one from
/// RunConfig::backend; tests inject their own.
using BackendFactory =
    std::function<std::shared_ptr<Backend>(const RunConfig&, const Task&, std::uint64_t episode_seed)>;

/// Runs every episode in the configured range, appending one RunRecord per
/// episode to <output_dir>/transcripts/<run-id>.jsonl. Episodes already present
/// for the same config digest are skipped. Metrics are aggregated over all
/// records of this configuration in the transcript.
std::vector<ResultRow> run_benchmark(const RunConfig& config, BackendFactory factory = {});

/// The four {luq} x {ugs} combinations in (off,off), (on,off), (off,on), (on,on) order.
std::vector<ResultRow> run_ablation(const RunConfig& base, BackendFactory factory = {});

/// One run per m, same seed.
std::vector<ResultRow> run_m_sweep(const RunConfig& base, const std::vector<int>& ms,
                                   BackendFactory factory = {});

/// Aggregates metrics from transcript records (all sharing one config).
std::vector<ResultRow> aggregate(const std::vector<RunRecord>& records, const RunConfig& config,
                                 double seconds);

/// Records in a JSONL transcript file; an absent file yields none.
std::vector<RunRecord> read_transcript(const std::filesystem::path& path);

std::filesystem::path transcript_path(const RunConfig& config);

/// "csv" or "markdown"; columns method, m, b, metric, value, episodes, seconds.
std::string emit_results(const std::vector<ResultRow>& rows, std::string_view format);

/// Episode seed: run seed XOR episode index.
std::uint64_t episode_seed(std::uint64_t run_seed, int episode_index) noexcept;

}  // namespace tout
