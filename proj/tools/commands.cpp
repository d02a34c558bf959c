#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "cli.hpp"
#include "fracmin/io.hpp"
#include "fracmin/random.hpp"
#include "fracmin/sgep.hpp"

namespace fracmin::cli {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::optional<std::string> seed;
  bool trace = false;
  std::vector<std::string> sets;
};

std::string flag_name(const std::string& key) {
  std::string name = key;
  std::replace(name.begin(), name.end(), '_', '-');
  return "--" + name;
}

void add_common(CLI::App& sub, CommonOptions& options) {
  sub.add_option("--config", options.config_path, "JSON file with ExperimentConfig keys");
  sub.add_option("--seed", options.seed, "Master seed (alias of --master-seed)");
  sub.add_flag("--trace", options.trace, "Write per-iteration trace CSV files");
  sub.add_option("--set", options.sets, "Override any config key: key=value")->take_all();
  for (const std::string& key : config_keys()) {
    if (key == "trace") continue;
    sub.add_option(flag_name(key), options.values[key], "Config key " + key);
  }
}

ExperimentConfig resolve_config(const CLI::App& sub, const CommonOptions& options, const EnvLookup& env) {
  ExperimentConfig config;
  if (!options.config_path.empty()) apply_config_file(config, options.config_path);
  apply_environment(config, env);
  for (const std::string& key : config_keys()) {
    if (key == "trace") continue;
    if (sub.count(flag_name(key)) > 0) set_key(config, key, options.values.at(key));
  }
  if (options.seed) set_key(config, "master_seed", *options.seed);
  if (options.trace) config.trace = true;
  for (const std::string& assignment : options.sets) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw InvalidConfig("--set expects key=value, got '" + assignment + "'");
    set_key(config, assignment.substr(0, eq), assignment.substr(eq + 1));
  }
  return config;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_for_writing(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

/// Problem loaded from files for solve and verify.
struct LoadedProblem {
  std::unique_ptr<FractionalProblem> problem;
  Vector x0;
};

LoadedProblem load_problem(ExperimentConfig& config) {
  if (config.a_file.empty() || config.b_file.empty()) {
    throw InvalidConfig("problem files are required: --a-file and --b-file");
  }
  LoadedProblem loaded;
  const Matrix a = read_matrix_csv(config.a_file);
  if (config.experiment == Experiment::l1l2) {
    const Vector b = read_vector_csv(config.b_file);
    if (b.size() != a.rows()) {
      throw DimensionMismatch("b has " + std::to_string(b.size()) + " entries but A has " +
                              std::to_string(a.rows()) + " rows");
    }
    config.n = a.cols();
    config.validate();
    auto problem = std::make_unique<L1L2PenaltyProblem>(a, b, config.lambda);
    loaded.x0 = l1_box_initial_point(problem->a(), problem->b(), problem->lower(), problem->upper(),
                                     static_cast<int>(config.init_iterations));
    loaded.problem = std::move(problem);
    return loaded;
  }
  config.experiment = Experiment::custom_sgep;
  const Matrix b = read_matrix_csv(config.b_file);
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionMismatch("A is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ", B is " +
                            std::to_string(b.rows()) + "x" + std::to_string(b.cols()) +
                            "; both must be square of the same size");
  }
  config.n = a.rows();
  config.validate();
  loaded.problem = std::make_unique<SgepProblem>(symmetrized(a), symmetrized(b), static_cast<int>(config.r));
  loaded.x0 = sgep_default_init(a.rows(), static_cast<int>(config.r));
  return loaded;
}

SolverTrace solve_with(const FractionalProblem& problem, const Vector& x0, const ExperimentConfig& config,
                       bool record_iterates) {
  const SolverMode mode = config.solvers.front();
  if (mode == SolverMode::pgsa) {
    PgsaConfig c = config.pgsa_config();
    c.record_iterates = record_iterates;
    return run_pgsa(problem, x0, c);
  }
  LineSearchConfig c = config.line_search_config(mode);
  c.record_iterates = record_iterates;
  return run_pgsa_ls(problem, x0, c);
}

AuditSpec audit_spec_for(const FractionalProblem& problem, const ExperimentConfig& config) {
  const SolverMode mode = config.solvers.front();
  if (mode == SolverMode::pgsa) return make_audit_spec(problem, config.pgsa_config());
  AuditSpec spec = make_audit_spec(problem, config.line_search_config(mode));
  spec.mode = mode;
  return spec;
}

int cmd_solve(ExperimentConfig config, std::ostream& out) {
  LoadedProblem loaded = load_problem(config);
  const SolverTrace trace = solve_with(*loaded.problem, loaded.x0, config, config.trace);
  const Certificate& cert = trace.certificate;
  nlohmann::json j;
  j["problem"] = loaded.problem->name();
  j["solver"] = to_string(config.solvers.front());
  j["objective"] = cert.objective;
  j["criticality_residual"] = cert.criticality_residual;
  j["residual_norm"] = cert.residual_norm;
  j["iterations"] = cert.iterations;
  j["converged_reason"] = to_string(cert.converged_reason);
  j["wall_time_seconds"] = cert.wall_time_seconds;
  j["x"] = std::vector<double>(trace.final_point.data(), trace.final_point.data() + trace.final_point.size());
  if (config.trace) {
    ensure_directory(config.out_dir);
    const fs::path path = fs::path(config.out_dir) / "trace.csv";
    write_trace_csv(path, trace);
    j["trace_file"] = path.string();
  }
  out << j.dump() << '\n';
  return static_cast<int>(ExitCode::ok);
}

int cmd_verify(ExperimentConfig config, const std::string& trace_file, std::ostream& out) {
  LoadedProblem loaded = load_problem(config);
  const TraceFile file = read_trace_csv(trace_file);
  if (file.records.empty()) throw ParseError(trace_file + ": trace has no iterations");
  SolverTrace trace;
  trace.records = file.records;
  const AuditReport report = audit_trace(trace, audit_spec_for(*loaded.problem, config));

  nlohmann::json j;
  j["trace_file"] = trace_file;
  j["solver"] = to_string(config.solvers.front());
  j["iterations"] = file.records.size() - 1;
  j["passed"] = report.passed();
  nlohmann::json violations = nlohmann::json::array();
  for (const Violation& v : report.violations) {
    violations.push_back({{"iteration", v.iteration}, {"kind", v.kind}, {"magnitude", v.magnitude}});
  }
  j["violations"] = violations;
  j["rate"] = nullptr;
  if (!file.errors_to_final.empty()) {
    try {
      const RateFit fit = fit_linear_rate(file.errors_to_final);
      j["rate"] = {{"slope", fit.slope},
                   {"r_squared", fit.r_squared},
                   {"window_begin", fit.window_begin},
                   {"window_end", fit.window_end}};
    } catch (const InsufficientData& e) {
      j["rate_note"] = e.what();
    }
  }
  out << j.dump() << '\n';
  return static_cast<int>(report.passed() ? ExitCode::ok : ExitCode::violations);
}

int cmd_gen(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const fs::path dir = config.out_dir;
  ensure_directory(dir);
  const std::uint64_t seed = derive_seed(config.master_seed, 0);
  nlohmann::json files = nlohmann::json::array();
  auto emit = [&](const std::string& name, const auto& value) {
    const fs::path path = dir / name;
    if constexpr (std::is_same_v<std::decay_t<decltype(value)>, Vector>) {
      write_vector_csv(path, value);
    } else {
      write_matrix_csv(path, value);
    }
    files.push_back(path.string());
  };
  switch (config.experiment) {
    case Experiment::sfda: {
      SfdaRecipe recipe;
      recipe.n = config.dimension();
      recipe.p1 = config.p1;
      recipe.p2 = config.p2;
      recipe.r = static_cast<int>(config.r);
      recipe.rho = config.rho;
      recipe.shift = config.shift;
      recipe.within_shift = config.within_shift;
      recipe.seed = seed;
      const SfdaInstance instance = gen_sfda(recipe);
      emit("A.csv", instance.problem.a());
      emit("B.csv", instance.problem.b());
      break;
    }
    case Experiment::l1l2: {
      const Matrix a = gen_dct_matrix(config.m, config.dimension(), config.F, derive_seed(seed, 0));
      const Vector x = gen_ground_truth(config.dimension(), config.K, derive_seed(seed, 1));
      emit("A.csv", a);
      emit("b.csv", Vector(a * x));
      emit("x_true.csv", x);
      break;
    }
    case Experiment::custom_sgep:
      throw InvalidConfig("gen supports the sfda and l1l2 experiments");
  }
  out << nlohmann::json{{"experiment", to_string(config.experiment)}, {"seed", seed}, {"files", files}}.dump()
      << '\n';
  return static_cast<int>(ExitCode::ok);
}

int cmd_bench(const ExperimentConfig& config, std::ostream& out) {
  config.validate();
  const fs::path dir = config.out_dir;
  ensure_directory(dir);
  if (config.trace) ensure_directory(dir / "traces");

  TraceSink sink;
  if (config.trace) {
    sink = [&dir](const RunRecord& record, const SolverTrace& trace) {
      std::ostringstream name;
      name << to_string(record.solver) << "_trial" << std::setw(4) << std::setfill('0') << record.trial
           << ".csv";
      write_trace_csv(dir / "traces" / name.str(), trace);
    };
  }
  const std::vector<RunRecord> records = run_trials(config, sink);

  {
    std::ofstream runs = open_for_writing(dir / "runs.jsonl");
    for (const RunRecord& r : records) runs << run_record_json(config, r).dump() << '\n';
    std::ofstream timings = open_for_writing(dir / "timings.jsonl");
    for (const RunRecord& r : records) timings << timing_json(r).dump() << '\n';
    std::ofstream config_file = open_for_writing(dir / "config.json");
    config_file << to_json(config).dump(2) << '\n';
    if (!runs || !timings || !config_file) throw IoError("failed writing results to '" + dir.string() + "'");
  }
  std::ofstream results = open_for_writing(dir / "results.csv");
  results << results_header() << '\n';
  out << results_header() << '\n';
  for (const std::string& row : results_rows(config, records)) {
    results << row << '\n';
    out << row << '\n';
  }
  if (!results) throw IoError("failed writing '" + (dir / "results.csv").string() + "'");
  return static_cast<int>(ExitCode::ok);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidConfig*>(&e)) return static_cast<int>(ExitCode::usage);
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e)) {
    return static_cast<int>(ExitCode::io);
  }
  if (dynamic_cast<const DimensionMismatch*>(&e)) return static_cast<int>(ExitCode::dimension);
  return static_cast<int>(ExitCode::solver);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Proximity-gradient-subgradient solvers for fractional programs", "fracmin"};
  app.require_subcommand(1);

  CommonOptions solve_opts, bench_opts, gen_opts, verify_opts;
  CLI::App* solve = app.add_subcommand("solve", "Solve one problem given as CSV files and print a certificate");
  add_common(*solve, solve_opts);
  CLI::App* bench = app.add_subcommand("bench", "Run seeded trials and write result tables");
  add_common(*bench, bench_opts);
  CLI::App* gen = app.add_subcommand("gen", "Write a synthetic problem instance as CSV files");
  add_common(*gen, gen_opts);
  CLI::App* verify = app.add_subcommand("verify", "Audit a trace CSV against the problem files");
  add_common(*verify, verify_opts);
  std::string trace_file;
  verify->add_option("trace_file", trace_file, "Trace CSV written by solve --trace or bench --trace")->required();

  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "fracmin");
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    if (solve->parsed()) return cmd_solve(resolve_config(*solve, solve_opts, env), out);
    if (bench->parsed()) return cmd_bench(resolve_config(*bench, bench_opts, env), out);
    if (gen->parsed()) return cmd_gen(resolve_config(*gen, gen_opts, env), out);
    if (verify->parsed()) return cmd_verify(resolve_config(*verify, verify_opts, env), trace_file, out);
  } catch (const std::exception& e) {
    err << "fracmin: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return static_cast<int>(ExitCode::usage);
}

}  // namespace fracmin::cli
