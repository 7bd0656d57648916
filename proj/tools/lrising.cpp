#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "lrising/config.hpp"
#include "lrising/run.hpp"

using namespace lrising;

int main(int argc, char** argv)
{
    CLI::App app{"Long-range Ising boundary-condition experiments"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::vector<CLI::App*> subs;
    for (const auto& name : command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "flat JSON config file");
        sub->add_option("--seed", seed, "overrides the config seed");
        sub->add_option("--out", out_dir, "overrides output_dir");
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitPass : kExitConfig;
    }
    std::string command;
    for (auto* s : subs)
        if (s->parsed())
            command = s->get_name();

    ExperimentConfig cfg;
    try {
        nlohmann::json obj = nlohmann::json::object();
        if (!config_path.empty()) {
            cfg = parse_config_file(command, config_path);
            obj = cfg.params;
        }
        if (seed != 0 || app.get_subcommand(command)->count("--seed"))
            obj["seed"] = seed;
        if (!out_dir.empty())
            obj["output_dir"] = out_dir;
        cfg = parse_config(command, obj);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        write_error_manifest(out_dir.empty() ? "out" : out_dir, command, kExitConfig, "config",
                             e.what());
        return kExitConfig;
    }
    return run(cfg, std::cout);
}
