#include "glearn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "glearn/errors.hpp"
#include "glearn/io.hpp"

namespace glearn {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::optional<double> to_optional(const std::string& key, const std::string& v,
                                  const std::string& auto_word) {
  if (v == auto_word) return std::nullopt;
  return to_double(key, v);
}

std::string preconditioner_name(Preconditioner p) {
  switch (p) {
    case Preconditioner::None: return "none";
    case Preconditioner::Diagonal: return "diagonal";
    case Preconditioner::Hessian: return "hessian";
  }
  return "hessian";
}

Preconditioner preconditioner_from(const std::string& key, const std::string& v) {
  if (v == "none") return Preconditioner::None;
  if (v == "diagonal") return Preconditioner::Diagonal;
  if (v == "hessian") return Preconditioner::Hessian;
  throw ConfigError(key + ": expected none, diagonal or hessian, got '" + v + "'");
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

using io::format_double;

#define GLEARN_DOUBLE(KEY, MEMBER)                                                  \
  Field {                                                                           \
    KEY, [](const RunConfig& c) { return format_double(c.MEMBER); },                \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.MEMBER = to_double(k, v); } \
  }
#define GLEARN_INT(KEY, MEMBER, TYPE)                                               \
  Field {                                                                           \
    KEY, [](const RunConfig& c) { return std::to_string(c.MEMBER); },               \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.MEMBER = to_int<TYPE>(k, v); } \
  }
#define GLEARN_BOOL(KEY, MEMBER)                                                    \
  Field {                                                                           \
    KEY, [](const RunConfig& c) { return std::string(c.MEMBER ? "true" : "false"); }, \
        [](RunConfig& c, const std::string& k, const std::string& v) { c.MEMBER = to_bool(k, v); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      GLEARN_DOUBLE("market.mu_m", market.mu_m),
      GLEARN_DOUBLE("market.sigma_m", market.sigma_m),
      GLEARN_DOUBLE("market.s0", market.s0),
      GLEARN_DOUBLE("market.r_f", market.r_f),
      GLEARN_INT("market.num_steps", market.num_steps, int),
      GLEARN_DOUBLE("market.dt", market.dt),
      GLEARN_INT("market.num_risky", market.num_risky, int),
      GLEARN_DOUBLE("market.oracle_c", market.oracle_c),
      GLEARN_DOUBLE("market.sigma_idio", market.sigma_idio),
      GLEARN_DOUBLE("reward.lambda", reward.lambda),
      GLEARN_DOUBLE("reward.eta", reward.eta),
      GLEARN_DOUBLE("reward.rho", reward.rho),
      GLEARN_DOUBLE("reward.omega", reward.omega),
      Field{"benchmark.b0",
            [](const RunConfig& c) { return format_double(c.benchmark().b0); },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.benchmark_b0 = to_optional(k, v, "auto");
            }},
      Field{"benchmark.growth",
            [](const RunConfig& c) {
              return c.benchmark_growth ? format_double(*c.benchmark_growth)
                                        : std::string("tied");
            },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.benchmark_growth = to_optional(k, v, "tied");
            }},
      GLEARN_DOUBLE("portfolio.initial_value", initial_value),
      GLEARN_DOUBLE("prior.contribution", prior_contribution),
      Field{"prior.sigma",
            [](const RunConfig& c) { return format_double(c.resolved_prior_sigma()); },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.prior_sigma = to_optional(k, v, "auto");
            }},
      GLEARN_DOUBLE("solver.beta", solver.beta),
      GLEARN_DOUBLE("solver.gamma", solver.gamma),
      GLEARN_INT("solver.max_iter", solver.max_iter, int),
      GLEARN_DOUBLE("solver.eps", solver.eps),
      GLEARN_DOUBLE("girl.learning_rate", girl.learning_rate),
      GLEARN_DOUBLE("girl.grad_eps", girl.grad_eps),
      GLEARN_INT("girl.max_iter", girl.max_iter, int),
      GLEARN_DOUBLE("girl.tol", girl.tol),
      GLEARN_DOUBLE("girl.lambda0", girl.theta0.lambda),
      GLEARN_DOUBLE("girl.eta0", girl.theta0.eta),
      GLEARN_DOUBLE("girl.rho0", girl.theta0.rho),
      GLEARN_DOUBLE("girl.omega0", girl.theta0.omega),
      Field{"girl.preconditioner",
            [](const RunConfig& c) { return preconditioner_name(c.girl.preconditioner); },
            [](RunConfig& c, const std::string& k, const std::string& v) {
              c.girl.preconditioner = preconditioner_from(k, v);
            }},
      GLEARN_INT("run.seed", seed, std::uint64_t),
      GLEARN_INT("run.num_trajectories", num_trajectories, int),
      GLEARN_INT("run.num_eval_seeds", num_eval_seeds, int),
      Field{"run.output_dir", [](const RunConfig& c) { return c.output_dir.string(); },
            [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
      GLEARN_BOOL("run.replication_mode", replication_mode),
      GLEARN_BOOL("run.annualize", annualize),
  };
  return table;
}

#undef GLEARN_DOUBLE
#undef GLEARN_INT
#undef GLEARN_BOOL

}  // namespace

RunConfig::RunConfig() {
  // GIRL starts from the reference parameters perturbed by x2 / /2.
  girl.theta0 = RewardParams{0.004, 0.65, 0.25, 0.55};
}

void RunConfig::validate() const {
  market.validate();
  reward.validate();
  benchmark().validate();
  solver.validate();
  girl.validate();
  if (!(initial_value > 0.0)) throw ConfigError("portfolio.initial_value must be > 0");
  if (!(resolved_prior_sigma() > 0.0)) throw ConfigError("prior.sigma must be > 0");
  if (!std::isfinite(prior_contribution)) throw ConfigError("prior.contribution must be finite");
  if (num_trajectories < 1) throw ConfigError("run.num_trajectories must be >= 1");
  if (num_eval_seeds < 1) throw ConfigError("run.num_eval_seeds must be >= 1");
}

BenchmarkSpec RunConfig::benchmark() const {
  BenchmarkSpec b;
  b.b0 = benchmark_b0.value_or(initial_value);
  b.growth = benchmark_growth;
  return b;
}

double RunConfig::resolved_prior_sigma() const {
  if (prior_sigma) return *prior_sigma;
  return 0.1 * initial_value / static_cast<double>(market.num_assets());
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = fields();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const Field& f) { return key == f.key; });
  if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
  it->set(config, key, value);
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for " + key);
    try {
      set_config_value(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const IoError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  return parse_config(text);
}

std::string format_config(const RunConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    const std::string key = f.key;
    const std::string prefix = key.substr(0, key.find('.'));
    if (prefix != section) {
      if (!section.empty()) out << '\n';
      section = prefix;
    }
    out << key << " = " << f.get(config) << '\n';
  }
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.emplace_back(f.key);
  return keys;
}

}  // namespace glearn
