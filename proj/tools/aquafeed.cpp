// Command-line front end for the feeding-control experiments.
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aquafeed/commands.hpp"

namespace {

using Command = int (*)(const aquafeed::ExperimentConfig&, const std::filesystem::path&, std::ostream&);

int run(const std::string& name, Command command, const std::string& config_path, std::string out_dir,
        const std::optional<std::uint64_t>& seed) {
    aquafeed::ExperimentConfig cfg;
    try {
        cfg = config_path.empty() ? aquafeed::parse_config("{}") : aquafeed::load_config(config_path);
    } catch (const aquafeed::ConfigError& e) {
        std::cerr << (config_path.empty() ? "<defaults>" : config_path) << ": " << e.what() << '\n';
        return 2;
    }
    if (cfg.experiment && *cfg.experiment != name) {
        std::cerr << config_path << ": field 'experiment' is \"" << *cfg.experiment << "\" but the command is " << name
                  << '\n';
        return 2;
    }
    if (seed) cfg.scenario.seed = *seed;
    if (out_dir.empty()) out_dir = cfg.output_dir.value_or("out");

    try {
        std::filesystem::create_directories(out_dir);
        return command(cfg, out_dir, std::cout);
    } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fish growth feeding-control experiments"};
    app.require_subcommand(1);

    const std::map<std::string, std::pair<Command, std::string>> commands{
        {"validate", {aquafeed::cmd_validate, "population model vs single-fish model"}},
        {"sensitivity", {aquafeed::cmd_sensitivity, "feeding and water-quality sensitivity study"}},
        {"compare", {aquafeed::cmd_compare, "bang-bang, PID, MPC1, Q-learning and MPC2 on the ammonia cases"}},
        {"train-q", {aquafeed::cmd_train_q, "train a Q-table and write it with its policy-error curve"}},
        {"mpc2", {aquafeed::cmd_mpc2, "joint feed and water-quality MPC on the spike case"}},
    };

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string chosen;
    for (const auto& [name, entry] : commands) {
        auto* sub = app.add_subcommand(name, entry.second);
        sub->add_option("--config", config_path, "JSON configuration file (defaults apply when omitted)")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (created if missing)");
        sub->add_option("--seed", seed, "overrides the configured seed");
        sub->callback([&chosen, n = name] { chosen = n; });
    }

    CLI11_PARSE(app, argc, argv);
    return run(chosen, commands.at(chosen).first, config_path, out_dir, seed);
}
