#include "glearn/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "glearn/errors.hpp"

namespace glearn::io {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError(context + ": cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

long parse_long(std::string_view s, const std::string& context) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError(context + ": cannot parse integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Reads a CSV file, checks the header and hands each data row to `row`.
template <typename F>
void read_csv(const fs::path& path, const std::string& header, std::size_t min_fields, F&& row) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw IoError(path.string() + ": expected header '" + header + "'");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() < min_fields) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": too few fields");
    }
    row(fields, path.string() + ":" + std::to_string(lineno));
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const Json& doc) { write_text(path, doc.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV

void write_market_csv(const fs::path& path, const MarketPath& market) {
  auto out = open_out(path);
  out << "t,value,return,shock\n";
  for (Eigen::Index t = 0; t < market.values.size(); ++t) {
    out << t << ',' << format_double(market.values[t]);
    if (t < market.returns.size()) {
      out << ',' << format_double(market.returns[t]) << ',' << format_double(market.shocks[t]);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  finish(out, path);
}

MarketPath read_market_csv(const fs::path& path) {
  std::vector<double> values, returns, shocks;
  read_csv(path, "t,value,return,shock", 4, [&](const auto& f, const std::string& ctx) {
    values.push_back(parse_double(f[1], ctx));
    if (!f[2].empty()) {
      returns.push_back(parse_double(f[2], ctx));
      shocks.push_back(parse_double(f[3], ctx));
    }
  });
  MarketPath m;
  m.values = Eigen::Map<VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  m.returns = Eigen::Map<VectorXd>(returns.data(), static_cast<Eigen::Index>(returns.size()));
  m.shocks = Eigen::Map<VectorXd>(shocks.data(), static_cast<Eigen::Index>(shocks.size()));
  if (m.values.size() != m.returns.size() + 1) throw IoError(path.string() + ": inconsistent rows");
  return m;
}

void write_returns_csv(const fs::path& path, const ReturnsPanel& panel) {
  auto out = open_out(path);
  out << "t,asset_index,expected,realized\n";
  for (Eigen::Index t = 0; t < panel.expected.rows(); ++t) {
    for (Eigen::Index i = 0; i < panel.expected.cols(); ++i) {
      out << t << ',' << i << ',' << format_double(panel.expected(t, i)) << ','
          << format_double(panel.realized(t, i)) << '\n';
    }
  }
  finish(out, path);
}

ReturnsPanel read_returns_csv(const fs::path& path) {
  struct Row {
    long t, i;
    double e, r;
  };
  std::vector<Row> rows;
  long max_t = -1, max_i = -1;
  read_csv(path, "t,asset_index,expected,realized", 4, [&](const auto& f, const std::string& ctx) {
    Row r{parse_long(f[0], ctx), parse_long(f[1], ctx), parse_double(f[2], ctx),
          parse_double(f[3], ctx)};
    if (r.t < 0 || r.i < 0) throw IoError(ctx + ": negative index");
    max_t = std::max(max_t, r.t);
    max_i = std::max(max_i, r.i);
    rows.push_back(r);
  });
  ReturnsPanel p;
  p.expected = MatrixXd::Constant(max_t + 1, max_i + 1, std::numeric_limits<double>::quiet_NaN());
  p.realized = p.expected;
  for (const auto& r : rows) {
    p.expected(r.t, r.i) = r.e;
    p.realized(r.t, r.i) = r.r;
  }
  if (!p.expected.allFinite() || !p.realized.allFinite()) {
    throw IoError(path.string() + ": missing (t, asset) rows");
  }
  return p;
}

void write_trajectories_csv(const fs::path& path, const std::vector<Trajectory>& trajectories) {
  auto out = open_out(path);
  out << "traj_id,t,kind,asset_index,value\n";
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const auto& tr = trajectories[k];
    for (std::size_t t = 0; t < tr.states.size(); ++t) {
      for (Eigen::Index i = 0; i < tr.states[t].size(); ++i) {
        out << k << ',' << t << ",state," << i << ',' << format_double(tr.states[t][i]) << '\n';
      }
      if (t < tr.actions.size()) {
        for (Eigen::Index i = 0; i < tr.actions[t].size(); ++i) {
          out << k << ',' << t << ",action," << i << ',' << format_double(tr.actions[t][i]) << '\n';
        }
      }
    }
  }
  finish(out, path);
}

void write_contributions_csv(const fs::path& path, const std::vector<Trajectory>& trajectories) {
  auto out = open_out(path);
  out << "traj_id,t,contribution\n";
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    for (std::size_t t = 0; t < trajectories[k].contributions.size(); ++t) {
      out << k << ',' << t << ',' << format_double(trajectories[k].contributions[t]) << '\n';
    }
  }
  finish(out, path);
}

std::vector<Trajectory> read_trajectories_csv(const fs::path& path,
                                              const fs::path& contributions_path) {
  // traj -> t -> asset -> value
  std::map<long, std::map<long, std::map<long, double>>> states, actions;
  read_csv(path, "traj_id,t,kind,asset_index,value", 5, [&](const auto& f, const std::string& ctx) {
    const long k = parse_long(f[0], ctx);
    const long t = parse_long(f[1], ctx);
    const long i = parse_long(f[3], ctx);
    const double v = parse_double(f[4], ctx);
    if (f[2] == "state") {
      states[k][t][i] = v;
    } else if (f[2] == "action") {
      actions[k][t][i] = v;
    } else {
      throw IoError(ctx + ": unknown kind '" + std::string(f[2]) + "'");
    }
  });

  auto to_vectors = [&](const std::map<long, std::map<long, double>>& by_t, const std::string& what) {
    std::vector<VectorXd> out;
    long expect_t = 0;
    for (const auto& [t, by_i] : by_t) {
      if (t != expect_t++) throw IoError(path.string() + ": gap in " + what + " time index");
      VectorXd v(static_cast<Eigen::Index>(by_i.size()));
      long expect_i = 0;
      for (const auto& [i, value] : by_i) {
        if (i != expect_i++) throw IoError(path.string() + ": gap in " + what + " asset index");
        v[i] = value;
      }
      out.push_back(std::move(v));
    }
    return out;
  };

  std::vector<Trajectory> out;
  long expect_k = 0;
  for (const auto& [k, by_t] : states) {
    if (k != expect_k++) throw IoError(path.string() + ": gap in trajectory ids");
    Trajectory tr;
    tr.states = to_vectors(by_t, "state");
    if (auto it = actions.find(k); it != actions.end()) tr.actions = to_vectors(it->second, "action");
    if (tr.actions.size() + 1 != tr.states.size()) {
      throw IoError(path.string() + ": trajectory " + std::to_string(k) +
                    " needs one more state than actions");
    }
    for (const auto& a : tr.actions) tr.contributions.push_back(a.sum());
    out.push_back(std::move(tr));
  }

  if (!contributions_path.empty() && fs::exists(contributions_path)) {
    read_csv(contributions_path, "traj_id,t,contribution", 3,
             [&](const auto& f, const std::string& ctx) {
               const long k = parse_long(f[0], ctx);
               const long t = parse_long(f[1], ctx);
               if (k < 0 || k >= static_cast<long>(out.size()) || t < 0 ||
                   t >= static_cast<long>(out[k].contributions.size())) {
                 throw IoError(ctx + ": contribution row does not match a trajectory step");
               }
               out[k].contributions[t] = parse_double(f[2], ctx);
             });
  }
  return out;
}

PlotSeries make_plot_series(const Trajectory& traj, const BenchmarkSpec& bench,
                            const RewardParams& params, bool adjust_contributions) {
  PlotSeries s;
  s.portfolio_value = portfolio_values(traj);
  s.benchmark = benchmark_series(traj.horizon(), bench, params);
  s.contribution = traj.contributions;
  if (traj.horizon() > 0) {
    s.portfolio_return = portfolio_returns(s.portfolio_value, s.contribution, adjust_contributions);
  }
  return s;
}

void write_plot_csv(const fs::path& path, const PlotSeries& series) {
  auto out = open_out(path);
  out << "t,portfolio_value,benchmark,contribution,portfolio_return\n";
  for (std::size_t t = 0; t < series.portfolio_value.size(); ++t) {
    out << t << ',' << format_double(series.portfolio_value[t]) << ','
        << format_double(series.benchmark[t]) << ',';
    if (t < series.contribution.size()) {
      out << format_double(series.contribution[t]) << ',' << format_double(series.portfolio_return[t]);
    } else {
      out << ',';
    }
    out << '\n';
  }
  finish(out, path);
}

// ---------------------------------------------------------------------------
// JSON

Json vector_to_json(const VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

VectorXd vector_from_json(const Json& j) {
  const auto data = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(data.data(), static_cast<Eigen::Index>(data.size()));
}

Json matrix_to_json(const MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r).transpose()));
  return rows;
}

MatrixXd matrix_from_json(const Json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) throw IoError("ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

namespace {

void check_schema(const Json& j, const std::string& kind) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw IoError(kind + ": missing schema_version");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw IoError(kind + ": unsupported schema_version " + j.at("schema_version").dump());
  }
}

template <typename F>
auto guarded(const std::string& kind, F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw IoError(kind + ": " + e.what());
  }
}

}  // namespace

Json to_json(const RewardParams& p) {
  return {{"lambda", p.lambda}, {"eta", p.eta}, {"rho", p.rho}, {"omega", p.omega}};
}

RewardParams reward_params_from_json(const Json& j) {
  return guarded("reward params", [&] {
    return RewardParams{j.at("lambda").get<double>(), j.at("eta").get<double>(),
                        j.at("rho").get<double>(), j.at("omega").get<double>()};
  });
}

Json to_json(const BenchmarkSpec& b) {
  Json j{{"b0", b.b0}};
  j["growth"] = b.growth ? Json(*b.growth) : Json("tied_to_eta");
  return j;
}

BenchmarkSpec benchmark_from_json(const Json& j) {
  return guarded("benchmark", [&] {
    BenchmarkSpec b;
    b.b0 = j.at("b0").get<double>();
    if (j.at("growth").is_number()) b.growth = j.at("growth").get<double>();
    return b;
  });
}

Json to_json(const AssetUniverse& u) {
  return {{"schema_version", kSchemaVersion},
          {"alpha", vector_to_json(u.alpha)},
          {"beta0", vector_to_json(u.beta0)},
          {"sigma_idio", u.sigma_idio},
          {"sigma_r", matrix_to_json(u.sigma_r)}};
}

AssetUniverse universe_from_json(const Json& j) {
  check_schema(j, "universe");
  return guarded("universe", [&] {
    AssetUniverse u;
    u.alpha = vector_from_json(j.at("alpha"));
    u.beta0 = vector_from_json(j.at("beta0"));
    u.sigma_idio = j.at("sigma_idio").get<double>();
    u.sigma_r = matrix_from_json(j.at("sigma_r"));
    return u;
  });
}

Json to_json(const PerformanceReport& r) {
  return {{"sharpe", r.sharpe},
          {"mean_excess_return", r.mean_excess_return},
          {"return_volatility", r.return_volatility},
          {"total_contributions", r.total_contributions},
          {"final_value", r.final_value},
          {"benchmark_final", r.benchmark_final},
          {"goal_gap", r.goal_gap}};
}

PerformanceReport performance_from_json(const Json& j) {
  return guarded("performance report", [&] {
    PerformanceReport r;
    r.sharpe = j.at("sharpe").get<double>();
    r.mean_excess_return = j.at("mean_excess_return").get<double>();
    r.return_volatility = j.at("return_volatility").get<double>();
    r.total_contributions = j.at("total_contributions").get<double>();
    r.final_value = j.at("final_value").get<double>();
    r.benchmark_final = j.at("benchmark_final").get<double>();
    r.goal_gap = j.at("goal_gap").get<double>();
    return r;
  });
}

Json to_json(const PolicySolution& s) {
  Json steps = Json::array();
  for (int t = 0; t < s.horizon(); ++t) {
    const auto& g = s.g[t];
    const auto& f = s.f[t];
    steps.push_back({{"t", t},
                     {"u_tilde", vector_to_json(s.u_tilde[t])},
                     {"v_tilde", matrix_to_json(s.v_tilde[t])},
                     {"sigma_tilde", matrix_to_json(s.sigma_tilde[t])},
                     {"g", {{"q_xx", matrix_to_json(g.q_xx)},
                            {"q_ux", matrix_to_json(g.q_ux)},
                            {"q_uu", matrix_to_json(g.q_uu)},
                            {"q_x", vector_to_json(g.q_x)},
                            {"q_u", vector_to_json(g.q_u)},
                            {"q_0", g.q_0}}},
                     {"f", {{"f_xx", matrix_to_json(f.f_xx)},
                            {"f_x", vector_to_json(f.f_x)},
                            {"f_0", f.f_0}}}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "policy"},
          {"beta", s.beta},
          {"horizon", s.horizon()},
          {"num_assets", s.num_assets()},
          {"sweeps", s.sweeps},
          {"last_sweep_change", s.last_sweep_change},
          {"steps", std::move(steps)}};
}

PolicySolution policy_from_json(const Json& j) {
  check_schema(j, "policy");
  return guarded("policy", [&] {
    PolicySolution s;
    s.beta = j.at("beta").get<double>();
    s.sweeps = j.at("sweeps").get<int>();
    s.last_sweep_change = j.at("last_sweep_change").get<double>();
    const int horizon = j.at("horizon").get<int>();
    const auto n = j.at("num_assets").get<Eigen::Index>();
    const auto& steps = j.at("steps");
    if (static_cast<int>(steps.size()) != horizon) throw IoError("policy: step count mismatch");
    for (const auto& st : steps) {
      s.u_tilde.push_back(vector_from_json(st.at("u_tilde")));
      s.v_tilde.push_back(matrix_from_json(st.at("v_tilde")));
      s.sigma_tilde.push_back(matrix_from_json(st.at("sigma_tilde")));
      s.sigma_chol.push_back(checked_llt(s.sigma_tilde.back(), "policy sigma_tilde").matrixL());
      const auto& g = st.at("g");
      s.g.push_back({matrix_from_json(g.at("q_xx")), matrix_from_json(g.at("q_ux")),
                     matrix_from_json(g.at("q_uu")), vector_from_json(g.at("q_x")),
                     vector_from_json(g.at("q_u")), g.at("q_0").get<double>()});
      const auto& f = st.at("f");
      s.f.push_back({matrix_from_json(f.at("f_xx")), vector_from_json(f.at("f_x")),
                     f.at("f_0").get<double>()});
      require_size(s.u_tilde.back(), n, "policy u_tilde");
    }
    s.f.push_back(FCoeffs::zero(n));
    return s;
  });
}

Json to_json(const FitReport& r) {
  Json thetas = Json::array();
  for (const auto& t : r.theta_history) thetas.push_back(to_json(t));
  return {{"schema_version", kSchemaVersion},
          {"kind", "girl_fit"},
          {"theta_star", to_json(r.theta_star)},
          {"loss_history", r.loss_history},
          {"grad_norm_history", r.grad_norm_history},
          {"theta_history", std::move(thetas)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"wall_time_seconds", r.wall_time_seconds}};
}

FitReport fit_report_from_json(const Json& j) {
  check_schema(j, "fit report");
  return guarded("fit report", [&] {
    FitReport r;
    r.theta_star = reward_params_from_json(j.at("theta_star"));
    r.loss_history = j.at("loss_history").get<std::vector<double>>();
    r.grad_norm_history = j.at("grad_norm_history").get<std::vector<double>>();
    for (const auto& t : j.at("theta_history")) r.theta_history.push_back(reward_params_from_json(t));
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
    return r;
  });
}

}  // namespace glearn::io
