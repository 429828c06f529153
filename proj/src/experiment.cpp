// SPDX-License-Identifier: Apache-2.0
#include "risnet/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace risnet {

void ExperimentSpec::validate() const {
    if (sweep_values.empty()) throw std::invalid_argument("experiment: empty sweep values");
    if (seeds.empty()) throw std::invalid_argument("experiment: empty seed list");
    if (methods.empty()) throw std::invalid_argument("experiment: no methods selected");
    if (ra_trials < 1) throw std::invalid_argument("experiment: ra_trials must be >= 1");
    for (const auto& m : methods)
        if (m != "SAC" && m != "RA" && m != "NO_RIS" && m != "ORACLE")
            throw std::invalid_argument("experiment: unknown method " + m);
}

namespace {

void get_if_present(const nlohmann::json& j, const char* key, auto& out) {
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

}  // namespace

void to_json(nlohmann::json& j, const ExperimentSpec& s) {
    j = {{"scenario", s.scenario},
         {"sweep_variable", s.sweep_variable},
         {"sweep_values", s.sweep_values},
         {"seeds", s.seeds},
         {"methods", s.methods},
         {"output_dir", s.output_dir},
         {"ra_trials", s.ra_trials},
         {"oracle_budget", s.oracle_budget},
         {"r_min_grid", s.r_min_grid},
         {"write_training_curves", s.write_training_curves}};
    if (s.episodes_override) j["episodes"] = *s.episodes_override;
    if (s.steps_override) j["steps_per_episode"] = *s.steps_override;
    if (s.sac) j["sac"] = *s.sac;
}

void from_json(const nlohmann::json& j, ExperimentSpec& s) {
    get_if_present(j, "scenario", s.scenario);
    get_if_present(j, "sweep_variable", s.sweep_variable);
    get_if_present(j, "sweep_values", s.sweep_values);
    get_if_present(j, "seeds", s.seeds);
    get_if_present(j, "methods", s.methods);
    get_if_present(j, "output_dir", s.output_dir);
    get_if_present(j, "ra_trials", s.ra_trials);
    get_if_present(j, "oracle_budget", s.oracle_budget);
    get_if_present(j, "r_min_grid", s.r_min_grid);
    get_if_present(j, "write_training_curves", s.write_training_curves);
    if (auto it = j.find("episodes"); it != j.end()) s.episodes_override = it->get<int>();
    if (auto it = j.find("steps_per_episode"); it != j.end())
        s.steps_override = it->get<int>();
    if (auto it = j.find("sac"); it != j.end()) s.sac = it->get<SacHyperparams>();
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open experiment spec: " + path);
    ExperimentSpec spec = nlohmann::json::parse(in).get<ExperimentSpec>();
    spec.validate();
    return spec;
}

std::vector<double> outage_probability(const std::vector<double>& mean_rates,
                                       const std::vector<double>& grid) {
    if (mean_rates.empty()) throw std::invalid_argument("outage: no realizations");
    std::vector<double> curve;
    curve.reserve(grid.size());
    for (double r_min : grid) {
        std::size_t below = 0;
        for (double r : mean_rates)
            if (r <= r_min) ++below;
        curve.push_back(static_cast<double>(below) /
                        static_cast<double>(mean_rates.size()));
    }
    return curve;
}

std::vector<double> pooled_outage(const std::vector<MetricsRow>& rows,
                                  const std::vector<double>& grid) {
    std::vector<double> pooled;
    for (const auto& row : rows)
        pooled.insert(pooled.end(), row.ue_rates.begin(), row.ue_rates.end());
    return outage_probability(pooled, grid);
}

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return s;
}

}  // namespace

EnvConfig apply_sweep(EnvConfig base, const std::string& variable, double value) {
    std::string v = upper(variable);
    if (v == "N") {
        base.network.num_antennas = static_cast<int>(value);
    } else if (v == "M") {
        int side = static_cast<int>(std::lround(std::sqrt(value)));
        if (side * side != static_cast<int>(value))
            throw std::invalid_argument("apply_sweep: M must be a perfect square");
        base.network.ris_cols = side;
        base.network.ris_rows = side;
    } else if (v == "P_MAX" || v == "P") {
        base.network.tx_power_dbm = value;
    } else if (v == "K") {
        base.network.num_ue = static_cast<int>(value);
    } else if (v == "B") {
        base.network.codebook_bits = static_cast<int>(value);
    } else if (v == "R_MIN") {
        base.r_min = value;
    } else {
        throw std::invalid_argument("apply_sweep: unknown variable " + variable);
    }
    base.validate();
    return base;
}

EnvConfig resolve_scenario(const std::string& scenario) {
    try {
        return presets::by_name(scenario);
    } catch (const std::invalid_argument&) {
        return load_env_config(scenario);
    }
}

SacHyperparams default_hyperparams(const std::string& scenario) {
    if (scenario == "ci") return presets::ci_sac();
    if (scenario == "mid") return presets::mid_sac();
    return SacHyperparams{};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer over the salted seed
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<double> final_window_mean_rates(const Environment& env,
                                            const TrainingLog& log) {
    auto n = log.episodes.size();
    std::size_t window = std::max<std::size_t>(1, n / 10);
    arma::vec acc(env.config().network.num_ue, arma::fill::zeros);
    for (std::size_t i = n - window; i < n; ++i)
        acc += env.evaluate(log.episodes[i].best).budget.rates;
    acc /= static_cast<double>(window);
    return {acc.begin(), acc.end()};
}

double final_window_mean_eval(const TrainingLog& log) {
    auto n = log.episodes.size();
    std::size_t window = std::max<std::size_t>(1, n / 10);
    double sum = 0.0;
    for (std::size_t i = n - window; i < n; ++i) sum += log.episodes[i].eval_reward;
    return sum / static_cast<double>(window);
}

}  // namespace

CellOutcome run_cell(const EnvConfig& cfg, const ExperimentSpec& spec,
                     const std::string& method, double sweep_value, std::uint64_t seed) {
    EnvConfig cell_cfg = cfg;
    if (spec.episodes_override) cell_cfg.episodes = *spec.episodes_override;
    if (spec.steps_override) cell_cfg.steps_per_episode = *spec.steps_override;

    Environment env(cell_cfg, derive_seed(seed, 0));
    env.reset();

    CellOutcome out;
    out.row.method = method;
    out.row.sweep_variable = spec.sweep_variable;
    out.row.sweep_value = sweep_value;
    out.row.seed = seed;

    if (method == "RA") {
        std::mt19937_64 rng(derive_seed(seed, 1));
        RandomBaselineResult res = baseline_random_association(env, rng, spec.ra_trials);
        out.row.mean_sum_rate = res.mean_reward;
        out.row.ue_rates.assign(res.mean_ue_rates.begin(), res.mean_ue_rates.end());
    } else if (method == "NO_RIS") {
        NoRisResult res = baseline_no_ris(env);
        out.row.mean_sum_rate = res.reward;
        out.row.ue_rates.assign(res.ue_rates.begin(), res.ue_rates.end());
    } else if (method == "ORACLE") {
        OracleResult res = exhaustive_search(env, spec.oracle_budget);
        out.row.mean_sum_rate = res.reward;
        out.row.ue_rates.assign(res.ue_rates.begin(), res.ue_rates.end());
    } else if (method == "SAC") {
        SacHyperparams hp = spec.sac ? *spec.sac : default_hyperparams(spec.scenario);
        SacAgent agent(env.state_dim(), env.action_dim(), hp, derive_seed(seed, 2));
        out.training = train(env, agent);
        out.row.mean_sum_rate = final_window_mean_eval(*out.training);
        out.row.ue_rates = final_window_mean_rates(env, *out.training);
    } else {
        throw std::invalid_argument("run_cell: unknown method " + method);
    }
    out.row.outage = outage_probability(out.row.ue_rates, spec.r_min_grid);
    return out;
}

void write_metrics_header(std::ostream& out) {
    out << "method,sweep_variable,sweep_value,seed,mean_sum_rate,ue_rates,outage\n";
}

namespace {

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += format_double(v[i]);
    }
    return s;
}

std::vector<double> split_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) out.push_back(std::strtod(item.c_str(), nullptr));
    return out;
}

}  // namespace

void write_metrics_row(const MetricsRow& row, std::ostream& out) {
    out << row.method << ',' << row.sweep_variable << ',' << format_double(row.sweep_value)
        << ',' << row.seed << ',' << format_double(row.mean_sum_rate) << ','
        << join(row.ue_rates) << ',' << join(row.outage) << '\n';
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, std::ostream& out) {
    write_metrics_header(out);
    for (const auto& row : rows) write_metrics_row(row, out);
}

std::vector<MetricsRow> parse_metrics_csv(std::istream& in) {
    std::vector<MetricsRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            continue;
        }
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 7)
            throw std::runtime_error("metrics csv: malformed row: " + line);
        MetricsRow row;
        row.method = fields[0];
        row.sweep_variable = fields[1];
        row.sweep_value = std::strtod(fields[2].c_str(), nullptr);
        row.seed = std::strtoull(fields[3].c_str(), nullptr, 10);
        row.mean_sum_rate = std::strtod(fields[4].c_str(), nullptr);
        row.ue_rates = split_doubles(fields[5]);
        row.outage = split_doubles(fields[6]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_outage_csv(const std::vector<MetricsRow>& rows, const std::vector<double>& grid,
                      std::ostream& out) {
    std::vector<std::string> methods;
    for (const auto& row : rows)
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
            methods.push_back(row.method);
    out << "r_min";
    for (const auto& m : methods) out << ',' << m;
    out << '\n';
    std::vector<std::vector<double>> curves;
    for (const auto& m : methods) {
        std::vector<MetricsRow> subset;
        for (const auto& row : rows)
            if (row.method == m) subset.push_back(row);
        curves.push_back(pooled_outage(subset, grid));
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_double(grid[i]);
        for (const auto& c : curves) out << ',' << format_double(c[i]);
        out << '\n';
    }
}

std::vector<MetricsRow> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    EnvConfig base = resolve_scenario(spec.scenario);
    std::filesystem::create_directories(spec.output_dir);
    std::ofstream csv(std::filesystem::path(spec.output_dir) / "metrics.csv");
    if (!csv) throw std::runtime_error("cannot open metrics.csv for writing");
    write_metrics_header(csv);

    std::vector<MetricsRow> rows;
    for (double value : spec.sweep_values) {
        EnvConfig cfg = apply_sweep(base, spec.sweep_variable, value);
        for (std::uint64_t seed : spec.seeds) {
            for (const auto& method : spec.methods) {
                CellOutcome cell = run_cell(cfg, spec, method, value, seed);
                if (cell.training && spec.write_training_curves) {
                    std::ostringstream name;
                    name << "train_" << spec.sweep_variable << '_' << value << "_seed"
                         << seed << ".csv";
                    std::ofstream curve(std::filesystem::path(spec.output_dir) /
                                        name.str());
                    write_training_csv(*cell.training, curve);
                }
                rows.push_back(cell.row);
                write_metrics_row(cell.row, csv);
                csv.flush();
            }
        }
    }

    std::ofstream outage(std::filesystem::path(spec.output_dir) / "outage.csv");
    write_outage_csv(rows, spec.r_min_grid, outage);

    nlohmann::json sidecar;
    sidecar["spec"] = spec;
    sidecar["base_config"] = base;
    sidecar["rows"] = rows.size();
    std::ofstream side(std::filesystem::path(spec.output_dir) / "metrics.json");
    side << sidecar.dump(2) << '\n';
    return rows;
}

}  // namespace risnet
