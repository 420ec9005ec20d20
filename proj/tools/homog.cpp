#include "thinframe/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

using namespace thinframe;

int main(int argc, char** argv) {
    CLI::App app{"Homogenisation of thin periodic frameworks"};
    std::string command;
    std::string config_path;
    app.add_option("command", command, "ahom | micro | bands | solve | direct | converge | report")
        ->required()
        ->check(CLI::IsMember(command_names()));
    app.add_option("--config", config_path, "key = value config file; flags override it");

    // flag name -> config key
    const std::map<std::string, std::string> flags{
        {"framework", "framework"}, {"theta", "theta"},       {"lame0", "lame0"},
        {"shear0", "shear0"},       {"lame1", "lame1"},       {"shear1", "shear1"},
        {"n", "n"},                 {"modes", "modes"},       {"macro-n", "macro_n"},
        {"macro-k", "macro_k"},     {"ladder", "ladder"},     {"eps", "eps"},
        {"nfine", "n_fine"},        {"boundary", "boundary"}, {"direct-modes", "direct_modes"},
        {"macro-spectrum", "macro_spectrum"}, {"out", "out"},
    };
    std::map<std::string, std::string> given;
    for (const auto& [flag, key] : flags) app.add_option("--" + flag, given[flag], "sets " + key);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) load_config(config_path, cfg);
        for (const auto& [flag, key] : flags) {
            if (app.get_option("--" + flag)->count() == 0) continue;
            // `direct --modes` counts direct eigenvalues, as the cell modes do not enter it.
            const std::string target = (command == "direct" && flag == "modes") ? "direct_modes" : key;
            set_value(cfg, target, given[flag]);
        }
        Session session(cfg);
        run_command(command, session, std::cerr);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const GeometryError& e) {
        std::cerr << "config error (framework): " << e.what() << '\n';
        return 2;
    } catch (const MaterialError& e) {
        std::cerr << "config error (materials): " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure in " << command << ": " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error in " << command << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
