// tclme.cpp — Command-line front end: rates | evolve | exact | compare | limits

#include "tclme/cli/commands.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Second-order time-local master equation for the spin-boson model"};
    app.set_version_flag("--version", std::string("tclme 0.1.0"));
    app.require_subcommand(1);

    struct Verb {
        const char* name;
        const char* help;
    };
    const Verb verbs[] = {
        {"rates", "tabulate D_R, D_I, D'_R, D'_I and their time integrals"},
        {"evolve", "propagate the master equation and write the trajectory"},
        {"exact", "compute the exact reduced dynamics with the truncated-Fock oracle"},
        {"compare", "compare master equation and oracle; report coupling-order scaling"},
        {"limits", "run the vacuum, high-T, zero-T and Markov-plateau checks"},
    };

    std::string config;
    std::string out;
    for (const Verb& v : verbs) {
        CLI::App* sub = app.add_subcommand(v.name, v.help);
        sub->add_option("--config", config, "run configuration file")->required();
        sub->add_option("--out", out, "output path (defaults to output.path from the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tclme::cli::kConfigError;
    }

    const std::string verb = app.get_subcommands().front()->get_name();
    return tclme::cli::run_command(verb, config, out, std::cerr);
}
