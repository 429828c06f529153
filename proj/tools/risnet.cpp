// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "risnet/baselines.hpp"
#include "risnet/experiment.hpp"
#include "risnet/sac.hpp"

namespace {

// RISNET_SEED overrides any seed argument or spec seed list.
std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("RISNET_SEED");
    if (!v || !*v) return std::nullopt;
    return std::strtoull(v, nullptr, 10);
}

risnet::EnvConfig resolve(const std::string& preset, const std::string& config_path) {
    if (!config_path.empty()) return risnet::load_env_config(config_path);
    return risnet::presets::by_name(preset);
}

void apply_overrides(risnet::EnvConfig& cfg, int episodes, int steps) {
    if (episodes > 0) cfg.episodes = episodes;
    if (steps > 0) cfg.steps_per_episode = steps;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted multi-BS downlink: SAC training, baselines and sweeps"};
    app.require_subcommand(1);

    std::string preset = "ci", config_path, output_dir = "out", spec_path;
    std::uint64_t seed = 1;
    int episodes = 0, steps = 0, trials = 1000;
    std::size_t budget = 1'000'000;

    auto add_scenario_opts = [&](CLI::App* cmd) {
        cmd->add_option("--preset", preset, "Scenario preset: paper, ci, mid");
        cmd->add_option("--config", config_path, "JSON config file (overrides --preset)");
        cmd->add_option("--seed", seed, "RNG seed");
    };

    CLI::App* cmd_train = app.add_subcommand("train", "Train the SAC agent");
    add_scenario_opts(cmd_train);
    cmd_train->add_option("--out", output_dir, "Output directory");
    cmd_train->add_option("--episodes", episodes, "Override episode count");
    cmd_train->add_option("--steps", steps, "Override steps per episode");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "Run an experiment campaign");
    cmd_sweep->add_option("--spec", spec_path, "Experiment spec JSON")->required();
    std::string sweep_out;
    cmd_sweep->add_option("--out", sweep_out, "Override spec output directory");

    CLI::App* cmd_oracle = app.add_subcommand("oracle", "Exhaustive search optimum");
    add_scenario_opts(cmd_oracle);
    cmd_oracle->add_option("--budget", budget, "Enumeration budget");

    CLI::App* cmd_base = app.add_subcommand("baselines", "Random-association and no-RIS baselines");
    add_scenario_opts(cmd_base);
    cmd_base->add_option("--trials", trials, "Random-association trials");

    CLI11_PARSE(app, argc, argv);

    if (auto s = env_seed()) seed = *s;

    try {
        if (cmd_train->parsed()) {
            risnet::EnvConfig cfg = resolve(preset, config_path);
            apply_overrides(cfg, episodes, steps);
            std::filesystem::create_directories(output_dir);
            risnet::Environment env(cfg, risnet::derive_seed(seed, 0));
            risnet::SacHyperparams hp = risnet::default_hyperparams(preset);
            risnet::SacAgent agent(env.state_dim(), env.action_dim(), hp,
                                   risnet::derive_seed(seed, 2));
            risnet::TrainingLog log =
                risnet::train(env, agent, [](const risnet::EpisodeLog& el) {
                    if (el.episode % 10 == 0)
                        std::cout << "episode " << el.episode << " mean_reward "
                                  << el.mean_reward << " eval " << el.eval_reward
                                  << " alpha " << el.alpha << '\n';
                });
            auto dir = std::filesystem::path(output_dir);
            std::ofstream csv(dir / "train_log.csv");
            risnet::write_training_csv(log, csv);
            std::ofstream ckpt(dir / "agent.ckpt", std::ios::binary);
            agent.save(ckpt);
            if (!log.episodes.empty()) {
                const auto& last = log.episodes.back();
                std::cout << "final eval reward " << last.eval_reward << " after "
                          << log.episodes.size() << " episodes\n";
            }
        } else if (cmd_sweep->parsed()) {
            risnet::ExperimentSpec spec = risnet::load_experiment_spec(spec_path);
            if (!sweep_out.empty()) spec.output_dir = sweep_out;
            if (auto s = env_seed()) spec.seeds = {*s};
            auto rows = risnet::run_experiment(spec);
            std::cout << "wrote " << rows.size() << " rows to " << spec.output_dir
                      << "/metrics.csv\n";
        } else if (cmd_oracle->parsed()) {
            risnet::EnvConfig cfg = resolve(preset, config_path);
            risnet::Environment env(cfg, risnet::derive_seed(seed, 0));
            env.reset();
            risnet::OracleResult res = risnet::exhaustive_search(env, budget);
            std::cout << "oracle reward " << res.reward << " over " << res.evaluated
                      << " configurations\n"
                      << "theta " << res.config.theta << " phi " << res.config.phi
                      << " ris_bs " << res.config.ris_bs << " ue_bs";
            for (int b : res.config.ue_bs) std::cout << ' ' << b;
            std::cout << '\n';
        } else if (cmd_base->parsed()) {
            risnet::EnvConfig cfg = resolve(preset, config_path);
            risnet::Environment env(cfg, risnet::derive_seed(seed, 0));
            env.reset();
            std::mt19937_64 rng(risnet::derive_seed(seed, 1));
            auto ra = risnet::baseline_random_association(env, rng, trials);
            auto nr = risnet::baseline_no_ris(env);
            std::cout << "RA mean reward " << ra.mean_reward << " (" << trials
                      << " trials)\n"
                      << "no-RIS best reward " << nr.reward << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
