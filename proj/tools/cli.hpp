#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracmin/l1l2.hpp"
#include "fracmin/line_search.hpp"
#include "fracmin/oracle.hpp"
#include "fracmin/pgsa.hpp"

namespace fracmin::cli {

enum class ExitCode : int {
  ok = 0,
  violations = 1,
  usage = 2,
  io = 3,
  dimension = 4,
  solver = 5,
};

enum class Experiment { sfda, l1l2, custom_sgep };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view text);

/// Every tunable of a run. Keys of the JSON config file and the suffixes of the
/// FRACMIN_* environment variables are the field names below, except that the
/// line-search window N is spelled `memory` (`N` is accepted as an alias in
/// JSON and --set, since FRACMIN_N would collide with n).
struct ExperimentConfig {
  Experiment experiment = Experiment::sfda;

  // sfda: n, p1, p2, r, rho, shift, within_shift
  // l1l2: m, n, K, F, lambda
  std::optional<long> n;
  long p1 = 500;
  long p2 = 500;
  long r = 50;
  double rho = 0.8;
  double shift = 0.5;
  double within_shift = 0.5;
  long m = 64;
  long K = 12;
  double F = 1.0;
  double lambda = kDefaultL1L2Lambda;
  long init_iterations = 2000;

  // custom-sgep and solve
  std::string a_file;
  std::string b_file;

  std::vector<SolverMode> solvers{SolverMode::pgsa, SolverMode::pgsa_ml, SolverMode::pgsa_nl};
  double a = 1e-3;
  double eta = 0.5;
  int N = 4;
  std::optional<double> alpha;
  std::optional<double> alpha_lower;
  std::optional<double> alpha_upper;
  std::optional<long> max_iter;
  std::optional<double> step_tol;
  std::optional<bool> relative_step;
  int max_backtracks = 60;

  long trials = 10;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::string out_dir = "out";
  bool trace = false;

  long dimension() const;
  long effective_max_iter() const;
  double effective_step_tol() const;
  bool effective_relative_step() const;

  PgsaConfig pgsa_config() const;
  LineSearchConfig line_search_config(SolverMode mode) const;

  /// Throws InvalidConfig on out-of-range values.
  void validate() const;
};

/// Names accepted by set_key, in declaration order.
const std::vector<std::string>& config_keys();

/// Assigns one key from its textual form. Throws InvalidConfig for unknown
/// keys or malformed values.
void set_key(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Overlays the keys present in a JSON object.
void apply_json(ExperimentConfig& config, const nlohmann::json& object);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Overlays FRACMIN_<KEY> variables (key upper-cased) read through `lookup`.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
void apply_environment(ExperimentConfig& config, const EnvLookup& lookup);
EnvLookup process_environment();

nlohmann::json to_json(const ExperimentConfig& config);

/// One solver run inside a benchmark trial.
struct RunRecord {
  long trial = 0;
  std::uint64_t seed = 0;
  SolverMode solver = SolverMode::pgsa;
  bool ok = false;
  std::string error;
  Certificate certificate;
  std::optional<RecoveryReport> recovery;  // l1l2 only
  std::vector<Violation> violations;       // audit of the run's trace
  std::optional<RateFit> rate;             // when iterates were recorded and long enough
  double time_seconds = 0.0;               // solver only
  double setup_seconds = 0.0;              // instance generation and L estimation
};

/// Called once per finished run that produced a trace; may run on a worker thread.
using TraceSink = std::function<void(const RunRecord&, const SolverTrace&)>;

/// Runs config.trials instances, each with every configured solver. Trial t
/// uses seed derive_seed(master_seed, t); results come back trial-major in
/// solver order regardless of config.threads.
std::vector<RunRecord> run_trials(const ExperimentConfig& config, const TraceSink& sink = {});

nlohmann::json run_record_json(const ExperimentConfig& config, const RunRecord& record);
nlohmann::json timing_json(const RunRecord& record);

/// Header of results.csv and one row per solver, aggregated over completed runs.
std::string results_header();
std::vector<std::string> results_rows(const ExperimentConfig& config,
                                      const std::vector<RunRecord>& records);

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env);

}  // namespace fracmin::cli
