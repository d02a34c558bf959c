#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fracmin::cli {

namespace {

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string text = trimmed(raw);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidConfig("config key '" + key + "': cannot parse '" + raw + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string text = lowered(trimmed(raw));
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidConfig("config key '" + key + "': expected a boolean, got '" + raw + "'");
}

bool is_unset(const std::string& raw) {
  const std::string text = lowered(trimmed(raw));
  return text.empty() || text == "null" || text == "default";
}

template <typename T>
void set_optional(std::optional<T>& slot, const std::string& key, const std::string& raw) {
  if (is_unset(raw)) {
    slot.reset();
  } else if constexpr (std::is_same_v<T, bool>) {
    slot = parse_bool(key, raw);
  } else {
    slot = parse_number<T>(key, raw);
  }
}

std::vector<SolverMode> parse_solvers(const std::string& key, const std::string& raw) {
  std::vector<SolverMode> modes;
  std::stringstream stream(raw);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trimmed(item);
    if (item.empty()) continue;
    try {
      modes.push_back(parse_solver_mode(item));
    } catch (const Error&) {
      throw InvalidConfig("config key '" + key + "': unknown solver '" + item + "'");
    }
  }
  if (modes.empty()) throw InvalidConfig("config key '" + key + "': no solver given");
  return modes;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"experiment", [](auto& c, auto&, auto& v) { c.experiment = parse_experiment(trimmed(v)); }},
      {"n", [](auto& c, auto& k, auto& v) { set_optional(c.n, k, v); }},
      {"p1", [](auto& c, auto& k, auto& v) { c.p1 = parse_number<long>(k, v); }},
      {"p2", [](auto& c, auto& k, auto& v) { c.p2 = parse_number<long>(k, v); }},
      {"r", [](auto& c, auto& k, auto& v) { c.r = parse_number<long>(k, v); }},
      {"rho", [](auto& c, auto& k, auto& v) { c.rho = parse_number<double>(k, v); }},
      {"shift", [](auto& c, auto& k, auto& v) { c.shift = parse_number<double>(k, v); }},
      {"within_shift", [](auto& c, auto& k, auto& v) { c.within_shift = parse_number<double>(k, v); }},
      {"m", [](auto& c, auto& k, auto& v) { c.m = parse_number<long>(k, v); }},
      {"K", [](auto& c, auto& k, auto& v) { c.K = parse_number<long>(k, v); }},
      {"F", [](auto& c, auto& k, auto& v) { c.F = parse_number<double>(k, v); }},
      {"lambda", [](auto& c, auto& k, auto& v) { c.lambda = parse_number<double>(k, v); }},
      {"init_iterations", [](auto& c, auto& k, auto& v) { c.init_iterations = parse_number<long>(k, v); }},
      {"a_file", [](auto& c, auto&, auto& v) { c.a_file = trimmed(v); }},
      {"b_file", [](auto& c, auto&, auto& v) { c.b_file = trimmed(v); }},
      {"solver", [](auto& c, auto& k, auto& v) { c.solvers = parse_solvers(k, v); }},
      {"a", [](auto& c, auto& k, auto& v) { c.a = parse_number<double>(k, v); }},
      {"eta", [](auto& c, auto& k, auto& v) { c.eta = parse_number<double>(k, v); }},
      {"memory", [](auto& c, auto& k, auto& v) { c.N = parse_number<int>(k, v); }},
      {"alpha", [](auto& c, auto& k, auto& v) { set_optional(c.alpha, k, v); }},
      {"alpha_lower", [](auto& c, auto& k, auto& v) { set_optional(c.alpha_lower, k, v); }},
      {"alpha_upper", [](auto& c, auto& k, auto& v) { set_optional(c.alpha_upper, k, v); }},
      {"max_iter", [](auto& c, auto& k, auto& v) { set_optional(c.max_iter, k, v); }},
      {"step_tol", [](auto& c, auto& k, auto& v) { set_optional(c.step_tol, k, v); }},
      {"relative_step", [](auto& c, auto& k, auto& v) { set_optional(c.relative_step, k, v); }},
      {"max_backtracks", [](auto& c, auto& k, auto& v) { c.max_backtracks = parse_number<int>(k, v); }},
      {"trials", [](auto& c, auto& k, auto& v) { c.trials = parse_number<long>(k, v); }},
      {"master_seed", [](auto& c, auto& k, auto& v) { c.master_seed = parse_number<std::uint64_t>(k, v); }},
      {"threads", [](auto& c, auto& k, auto& v) { c.threads = parse_number<int>(k, v); }},
      {"out_dir", [](auto& c, auto&, auto& v) { c.out_dir = trimmed(v); }},
      {"trace", [](auto& c, auto& k, auto& v) { c.trace = parse_bool(k, v); }},
  };
  return table;
}

}  // namespace

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::sfda: return "sfda";
    case Experiment::l1l2: return "l1l2";
    case Experiment::custom_sgep: return "custom-sgep";
  }
  return "?";
}

Experiment parse_experiment(std::string_view text) {
  if (text == "sfda") return Experiment::sfda;
  if (text == "l1l2") return Experiment::l1l2;
  if (text == "custom-sgep" || text == "custom_sgep") return Experiment::custom_sgep;
  throw InvalidConfig("unknown experiment '" + std::string(text) + "'");
}

long ExperimentConfig::dimension() const {
  if (n) return *n;
  return experiment == Experiment::l1l2 ? 1024 : 1000;
}

long ExperimentConfig::effective_max_iter() const {
  if (max_iter) return *max_iter;
  return (experiment == Experiment::l1l2 ? 10 : 2) * dimension();
}

double ExperimentConfig::effective_step_tol() const {
  if (step_tol) return *step_tol;
  return experiment == Experiment::l1l2 ? 1e-8 : 1e-6;
}

bool ExperimentConfig::effective_relative_step() const {
  if (relative_step) return *relative_step;
  return experiment == Experiment::l1l2;
}

PgsaConfig ExperimentConfig::pgsa_config() const {
  PgsaConfig c;
  c.alpha = alpha;
  c.alpha_lower = alpha_lower;
  c.alpha_upper = alpha_upper;
  c.max_iter = effective_max_iter();
  c.step_tol = effective_step_tol();
  c.relative_step = effective_relative_step();
  return c;
}

LineSearchConfig ExperimentConfig::line_search_config(SolverMode mode) const {
  LineSearchConfig c;
  c.a = a;
  c.eta = eta;
  c.memory = mode == SolverMode::pgsa_ml ? 0 : N;
  c.alpha_lower = alpha_lower;
  if (alpha_upper) c.alpha_upper = *alpha_upper;
  c.initial_alpha = alpha;
  c.max_iter = effective_max_iter();
  c.step_tol = effective_step_tol();
  c.relative_step = effective_relative_step();
  c.max_backtracks = max_backtracks;
  return c;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw InvalidConfig(message);
  };
  require(dimension() >= 1, "n must be >= 1");
  require(r >= 1, "r must be >= 1");
  if (experiment == Experiment::custom_sgep && n) {
    require(r <= *n, "r = " + std::to_string(r) + " exceeds n = " + std::to_string(*n));
  }
  if (experiment == Experiment::sfda) {
    require(r <= dimension(), "r = " + std::to_string(r) + " exceeds n = " + std::to_string(dimension()));
    require(dimension() % 5 == 0, "sfda needs n divisible by 5");
    require(p1 >= 1 && p2 >= 1, "p1 and p2 must be >= 1");
    require(rho > -1.0 && rho < 1.0, "rho must lie in (-1, 1)");
    require(within_shift >= 0.0, "within_shift must be >= 0");
  }
  if (experiment == Experiment::l1l2) {
    if (a_file.empty()) {
      require(m >= 1, "m must be >= 1");
      require(K >= 1 && K <= dimension(), "K must lie in [1, n]");
      require(F > 0.0, "F must be > 0");
    }
    require(lambda > 0.0, "lambda must be > 0");
    require(init_iterations >= 0, "init_iterations must be >= 0");
  }
  require(a > 0.0, "a must be > 0");
  require(eta > 0.0 && eta < 1.0, "eta must lie in (0, 1)");
  require(N >= 0, "memory must be >= 0");
  require(!alpha || *alpha > 0.0, "alpha must be > 0");
  require(effective_max_iter() >= 1, "max_iter must be >= 1");
  require(effective_step_tol() > 0.0, "step_tol must be > 0");
  require(max_backtracks >= 1, "max_backtracks must be >= 1");
  require(trials >= 0, "trials must be >= 0");
  require(threads >= 1, "threads must be >= 1");
  require(!solvers.empty(), "no solver configured");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [name, setter] : setters()) out.push_back(name);
    return out;
  }();
  return keys;
}

void set_key(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "N") return set_key(config, "memory", value);
  for (const auto& [name, setter] : setters()) {
    if (name == key) {
      setter(config, key, value);
      return;
    }
  }
  throw InvalidConfig("unknown config key '" + key + "'");
}

void apply_json(ExperimentConfig& config, const nlohmann::json& object) {
  if (!object.is_object()) throw InvalidConfig("config file must hold a JSON object");
  for (const auto& [key, value] : object.items()) {
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& item : value) {
        if (!item.is_string()) throw InvalidConfig("config key '" + key + "': expected strings");
        text += (text.empty() ? "" : ",") + item.get<std::string>();
      }
    } else {
      text = value.dump();
    }
    set_key(config, key, text);
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  nlohmann::json object;
  try {
    in >> object;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("config file '" + path.string() + "': " + e.what());
  }
  apply_json(config, object);
}

void apply_environment(ExperimentConfig& config, const EnvLookup& lookup) {
  if (!lookup) return;
  for (const std::string& key : config_keys()) {
    std::string name = "FRACMIN_";
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (const auto value = lookup(name)) set_key(config, key, *value);
  }
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* value = std::getenv(name.c_str())) return std::string(value);
    return std::nullopt;
  };
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  auto opt = [](const auto& o) -> nlohmann::json {
    if (o) return *o;
    return nullptr;
  };
  j["experiment"] = to_string(c.experiment);
  j["n"] = c.dimension();
  j["p1"] = c.p1;
  j["p2"] = c.p2;
  j["r"] = c.r;
  j["rho"] = c.rho;
  j["shift"] = c.shift;
  j["within_shift"] = c.within_shift;
  j["m"] = c.m;
  j["K"] = c.K;
  j["F"] = c.F;
  j["lambda"] = c.lambda;
  j["init_iterations"] = c.init_iterations;
  j["a_file"] = c.a_file;
  j["b_file"] = c.b_file;
  nlohmann::json solvers = nlohmann::json::array();
  for (SolverMode mode : c.solvers) solvers.push_back(to_string(mode));
  j["solver"] = solvers;
  j["a"] = c.a;
  j["eta"] = c.eta;
  j["memory"] = c.N;
  j["alpha"] = opt(c.alpha);
  j["alpha_lower"] = opt(c.alpha_lower);
  j["alpha_upper"] = opt(c.alpha_upper);
  j["max_iter"] = c.effective_max_iter();
  j["step_tol"] = c.effective_step_tol();
  j["relative_step"] = c.effective_relative_step();
  j["max_backtracks"] = c.max_backtracks;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["threads"] = c.threads;
  j["out_dir"] = c.out_dir;
  j["trace"] = c.trace;
  return j;
}

}  // namespace fracmin::cli
