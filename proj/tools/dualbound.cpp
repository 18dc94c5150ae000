#include "dualbound/cli.hpp"
#include "dualbound/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    namespace cli = dualbound::cli;
    CLI::App app{"Primal and dual bounds for stochastic optimal control problems", std::string(cli::kToolName)};
    app.set_version_flag("--version", std::string(cli::kToolVersion));
    app.require_subcommand(1);

    std::string config_path;
    for (const std::string& name : cli::subcommand_names()) {
        CLI::App* sub = app.add_subcommand(name, "run '" + name + "' with the given config file");
        sub->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitError;
    }

    dualbound::configure_workers_from_env();
    const std::string chosen = app.get_subcommands().front()->get_name();
    return cli::run_file(*cli::parse_subcommand(chosen), config_path);
}
