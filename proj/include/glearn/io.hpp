#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "glearn/analytics.hpp"
#include "glearn/girl.hpp"
#include "glearn/glearner.hpp"
#include "glearn/market_sim.hpp"

namespace glearn::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// Text files -----------------------------------------------------------------

void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);
void write_json(const fs::path& path, const Json& doc);
Json read_json(const fs::path& path);

// CSV ------------------------------------------------------------------------

/// t,value,return,shock; the last row (t = T) carries only the value.
void write_market_csv(const fs::path& path, const MarketPath& market);
MarketPath read_market_csv(const fs::path& path);

/// t,asset_index,expected,realized; one row per (t, asset).
void write_returns_csv(const fs::path& path, const ReturnsPanel& panel);
ReturnsPanel read_returns_csv(const fs::path& path);

/// traj_id,t,kind,asset_index,value with kind in {state, action}.
void write_trajectories_csv(const fs::path& path, const std::vector<Trajectory>& trajectories);
/// traj_id,t,contribution.
void write_contributions_csv(const fs::path& path, const std::vector<Trajectory>& trajectories);

/// Reads trajectories; contributions are taken from `contributions_path` when
/// it exists, otherwise recomputed as 1'u_t.
std::vector<Trajectory> read_trajectories_csv(const fs::path& path,
                                              const fs::path& contributions_path = {});

struct PlotSeries {
  std::vector<double> portfolio_value;  // T+1
  std::vector<double> benchmark;        // T+1
  std::vector<double> contribution;     // T
  std::vector<double> portfolio_return; // T
};

PlotSeries make_plot_series(const Trajectory& traj, const BenchmarkSpec& bench,
                            const RewardParams& params, bool adjust_contributions = true);

/// t,portfolio_value,benchmark,contribution,portfolio_return; T+1 rows, the
/// last row leaves the per-step columns empty.
void write_plot_csv(const fs::path& path, const PlotSeries& series);

// JSON documents ---------------------------------------------------------------

Json to_json(const RewardParams& p);
RewardParams reward_params_from_json(const Json& j);

Json to_json(const BenchmarkSpec& b);
BenchmarkSpec benchmark_from_json(const Json& j);

Json to_json(const AssetUniverse& u);
AssetUniverse universe_from_json(const Json& j);

Json to_json(const PerformanceReport& r);
PerformanceReport performance_from_json(const Json& j);

/// Versioned policy document: per-step policy moments and G/F coefficients,
/// matrices as row-major nested arrays.
Json to_json(const PolicySolution& s);
PolicySolution policy_from_json(const Json& j);

Json to_json(const FitReport& r);
FitReport fit_report_from_json(const Json& j);

Json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const Json& j);
Json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const Json& j);

}  // namespace glearn::io
