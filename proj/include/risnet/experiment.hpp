// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "risnet/baselines.hpp"
#include "risnet/config.hpp"
#include "risnet/sac.hpp"

namespace risnet {

/// One sweep campaign: scenario x sweep values x seeds x methods.
struct ExperimentSpec {
    std::string scenario = "mid";  // preset name or config file path
    std::string sweep_variable = "N";  // N, M, P_MAX, K, B, R_MIN
    std::vector<double> sweep_values;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods = {"SAC", "RA", "NO_RIS"};
    std::string output_dir = "out";
    int ra_trials = 1000;
    std::size_t oracle_budget = 1'000'000;
    std::vector<double> r_min_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0,
                                      3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
    std::optional<int> episodes_override;
    std::optional<int> steps_override;
    std::optional<SacHyperparams> sac;  // defaults chosen per scenario
    bool write_training_curves = true;

    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentSpec& s);
void from_json(const nlohmann::json& j, ExperimentSpec& s);
ExperimentSpec load_experiment_spec(const std::string& path);

struct MetricsRow {
    std::string method;
    std::string sweep_variable;
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    double mean_sum_rate = 0.0;
    std::vector<double> ue_rates;  // mean per-UE rates for this cell
    std::vector<double> outage;    // indicator per r_min grid point
};

/// Fraction of mean rates <= r_min, per grid point.
std::vector<double> outage_probability(const std::vector<double>& mean_rates,
                                       const std::vector<double>& grid);

/// Outage over the pooled (UE x row) mean rates of several cells.
std::vector<double> pooled_outage(const std::vector<MetricsRow>& rows,
                                  const std::vector<double>& grid);

/// Applies one sweep-variable setting onto a base configuration.
EnvConfig apply_sweep(EnvConfig base, const std::string& variable, double value);

/// Resolves a scenario id: preset name first, then config file path.
EnvConfig resolve_scenario(const std::string& scenario);
SacHyperparams default_hyperparams(const std::string& scenario);

/// Derives independent per-purpose RNG streams from one cell seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

struct CellOutcome {
    MetricsRow row;
    std::optional<TrainingLog> training;  // SAC cells only
};

CellOutcome run_cell(const EnvConfig& cfg, const ExperimentSpec& spec,
                     const std::string& method, double sweep_value, std::uint64_t seed);

/// Runs the full campaign; writes metrics.csv (flushed per row), per-SAC-run
/// training curves, and a JSON sidecar with the resolved configs.
std::vector<MetricsRow> run_experiment(const ExperimentSpec& spec);

void write_metrics_header(std::ostream& out);
void write_metrics_row(const MetricsRow& row, std::ostream& out);
void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out);
std::vector<MetricsRow> parse_metrics_csv(std::istream& in);

/// Aggregated outage curve per method, written as CSV (r_min column plus one
/// column per method).
void write_outage_csv(const std::vector<MetricsRow>& rows,
                      const std::vector<double>& grid, std::ostream& out);

std::string format_double(double v);  // %.17g, round-trip exact

}  // namespace risnet
