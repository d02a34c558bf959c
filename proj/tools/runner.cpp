#include <atomic>
#include <chrono>
#include <memory>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "fracmin/io.hpp"
#include "fracmin/random.hpp"
#include "fracmin/sgep.hpp"

namespace fracmin::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Instance {
  std::shared_ptr<const FractionalProblem> problem;
  Vector x0;
  Vector truth;  // l1l2 only
};

Instance make_instance(const ExperimentConfig& config, std::uint64_t trial_seed,
                       const std::shared_ptr<const SgepProblem>& custom) {
  Instance instance;
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
      recipe.seed = trial_seed;
      auto generated = gen_sfda(recipe);
      instance.problem = std::make_shared<SgepProblem>(std::move(generated.problem));
      instance.x0 = sgep_default_init(recipe.n, recipe.r);
      break;
    }
    case Experiment::l1l2: {
      const Index n = config.dimension();
      const Matrix a = gen_dct_matrix(config.m, n, config.F, derive_seed(trial_seed, 0));
      instance.truth = gen_ground_truth(n, config.K, derive_seed(trial_seed, 1));
      const Vector b = a * instance.truth;
      auto problem = std::make_shared<L1L2PenaltyProblem>(a, b, config.lambda);
      instance.x0 = l1_box_initial_point(problem->a(), problem->b(), problem->lower(), problem->upper(),
                                         static_cast<int>(config.init_iterations));
      instance.problem = std::move(problem);
      break;
    }
    case Experiment::custom_sgep: {
      SplitMix64 rng(derive_seed(trial_seed, 0));
      Vector z(custom->dimension());
      for (Index i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
      instance.problem = custom;
      instance.x0 = project_sparse_sphere(z, custom->sparsity());
      break;
    }
  }
  return instance;
}

SolverTrace solve_one(const FractionalProblem& problem, const Vector& x0, SolverMode mode,
                      const ExperimentConfig& config, AuditSpec& spec) {
  if (mode == SolverMode::pgsa) {
    PgsaConfig c = config.pgsa_config();
    c.record_iterates = config.trace;
    spec = make_audit_spec(problem, c);
    return run_pgsa(problem, x0, c);
  }
  LineSearchConfig c = config.line_search_config(mode);
  c.record_iterates = config.trace;
  spec = make_audit_spec(problem, c);
  spec.mode = mode;
  return run_pgsa_ls(problem, x0, c);
}

void run_trial(const ExperimentConfig& config, long trial,
               const std::shared_ptr<const SgepProblem>& custom, const TraceSink& sink,
               RunRecord* out) {
  const std::uint64_t seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(trial));
  for (std::size_t s = 0; s < config.solvers.size(); ++s) {
    out[s].trial = trial;
    out[s].seed = seed;
    out[s].solver = config.solvers[s];
  }

  const auto setup_start = Clock::now();
  Instance instance;
  try {
    instance = make_instance(config, seed, custom);
  } catch (const std::exception& e) {
    for (std::size_t s = 0; s < config.solvers.size(); ++s) out[s].error = e.what();
    return;
  }
  const double setup = seconds_since(setup_start);

  for (std::size_t s = 0; s < config.solvers.size(); ++s) {
    RunRecord& record = out[s];
    record.setup_seconds = setup;
    try {
      AuditSpec spec;
      const auto start = Clock::now();
      SolverTrace trace = solve_one(*instance.problem, instance.x0, record.solver, config, spec);
      record.time_seconds = seconds_since(start);
      record.certificate = trace.certificate;
      record.violations = audit_trace(trace, spec).violations;
      if (instance.truth.size() > 0) {
        record.recovery = make_recovery_report(trace.final_point, instance.truth, record.time_seconds,
                                               trace.iterations());
      }
      if (!trace.iterates.empty()) {
        try {
          record.rate = fit_linear_rate(trace);
        } catch (const InsufficientData&) {
        }
      }
      record.ok = true;
      if (sink) sink(record, trace);
    } catch (const std::exception& e) {
      record.error = e.what();
    }
  }
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char ch : text) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

std::string number(double value) {
  std::ostringstream out;
  out.precision(17);
  out << value;
  return out.str();
}

}  // namespace

std::vector<RunRecord> run_trials(const ExperimentConfig& config, const TraceSink& sink) {
  config.validate();
  std::shared_ptr<const SgepProblem> custom;
  if (config.experiment == Experiment::custom_sgep) {
    if (config.a_file.empty() || config.b_file.empty()) {
      throw InvalidConfig("custom-sgep needs a_file and b_file");
    }
    const Matrix a = read_matrix_csv(config.a_file);
    const Matrix b = read_matrix_csv(config.b_file);
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
      throw DimensionMismatch("A and B must be square matrices of the same size");
    }
    if (config.r > a.rows()) {
      throw InvalidConfig("r = " + std::to_string(config.r) + " exceeds n = " + std::to_string(a.rows()));
    }
    custom = std::make_shared<SgepProblem>(symmetrized(a), symmetrized(b), static_cast<int>(config.r));
  }

  const std::size_t per_trial = config.solvers.size();
  std::vector<RunRecord> records(static_cast<std::size_t>(config.trials) * per_trial);
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long t = next++; t < config.trials; t = next++) {
      run_trial(config, t, custom, sink, records.data() + static_cast<std::size_t>(t) * per_trial);
    }
  };
  const long workers = std::min<long>(config.threads, std::max<long>(config.trials, 1));
  std::vector<std::thread> pool;
  for (long i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  return records;
}

nlohmann::json run_record_json(const ExperimentConfig& config, const RunRecord& r) {
  nlohmann::json j;
  j["experiment"] = to_string(config.experiment);
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["solver"] = to_string(r.solver);
  j["status"] = r.ok ? "ok" : "failed";
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["objective"] = r.certificate.objective;
  j["iterations"] = r.certificate.iterations;
  j["converged_reason"] = to_string(r.certificate.converged_reason);
  j["criticality_residual"] = r.certificate.criticality_residual;
  j["audit_violations"] = r.violations.size();
  if (r.recovery) {
    j["relative_error"] = r.recovery->relative_error;
    j["success"] = r.recovery->success;
    j["l1_over_l2"] = r.recovery->l1_over_l2;
  }
  if (r.rate) {
    j["rate_slope"] = r.rate->slope;
    j["rate_r_squared"] = r.rate->r_squared;
  }
  return j;
}

nlohmann::json timing_json(const RunRecord& r) {
  return {{"trial", r.trial},
          {"solver", to_string(r.solver)},
          {"time_seconds", r.time_seconds},
          {"setup_seconds", r.setup_seconds}};
}

std::string results_header() {
  return "experiment,solver,trials,completed,failed,mean_objective,mean_time_seconds,"
         "success_rate,mean_iterations,mean_l1_over_l2_success";
}

std::vector<std::string> results_rows(const ExperimentConfig& config,
                                      const std::vector<RunRecord>& records) {
  std::vector<std::string> rows;
  if (config.trials == 0) return rows;
  const bool recovery = config.experiment == Experiment::l1l2;
  for (SolverMode mode : config.solvers) {
    long completed = 0, failed = 0, successes = 0;
    double objective = 0.0, time = 0.0, iterations = 0.0, ratio = 0.0;
    for (const RunRecord& r : records) {
      if (r.solver != mode) continue;
      if (!r.ok) {
        ++failed;
        continue;
      }
      ++completed;
      objective += r.certificate.objective;
      time += r.time_seconds;
      iterations += static_cast<double>(r.certificate.iterations);
      if (r.recovery && r.recovery->success) {
        ++successes;
        ratio += r.recovery->l1_over_l2;
      }
    }
    auto mean = [](double sum, long count) { return count > 0 ? number(sum / count) : std::string(); };
    std::string row = csv_field(std::string(to_string(config.experiment))) + "," +
                      csv_field(std::string(to_string(mode))) + "," + std::to_string(config.trials) + "," +
                      std::to_string(completed) + "," + std::to_string(failed) + "," +
                      mean(objective, completed) + "," + mean(time, completed) + ",";
    if (recovery && completed > 0) row += number(static_cast<double>(successes) / completed);
    row += "," + mean(iterations, completed) + ",";
    if (recovery) row += mean(ratio, successes);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fracmin::cli
