#include "ergeig/runner.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ergeig::ValidationError("cannot read config file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradient-constrained ergodic eigenvalue toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    const std::pair<const char*, const char*> subs[] = {
        {"eigen", "vanishing-discount eigenvalue with certificate"},
        {"radial", "radial free-boundary oracle"},
        {"bounds", "min-max certificate for the computed eigenvalue"},
        {"simulate", "Monte Carlo ergodic cost of one ball policy"},
        {"sweep", "Monte Carlo sweep over reflection radii"},
        {"crosscheck", "full acceptance ladder against the oracle"},
    };
    for (const auto& [name, desc] : subs) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--set", overrides, "override, e.g. --set grid.nodes=401");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        ergeig::RunConfig config;
        if (!config_path.empty()) config = ergeig::parse_config(slurp(config_path));
        for (const auto& o : overrides) ergeig::apply_override(config, o);
        config.subcommand = app.get_subcommands().front()->get_name();
        return ergeig::run(config, std::cout);
    } catch (const ergeig::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const ergeig::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
