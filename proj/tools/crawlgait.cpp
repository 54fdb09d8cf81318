#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "crawl/config.hpp"
#include "crawl/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"crawlgait: simulate and analyse crawling locomotors with set-valued friction"};
    app.require_subcommand(1);

    std::string config_path, scenario, out_dir;
    double v0 = 0.0, periods = 1.0, tol = 1e-6, alpha = 1.0, load = 0.0, period = 0.0;
    int steps = 0, grid_n = 0;
    bool oracle = false;

    std::vector<CLI::App*> commands;
    for (const char* name : {"simulate", "poincare", "attractor", "fixed-points", "limit-cycle",
                             "gamma-stats", "check", "sweep"}) {
        CLI::App* cmd = app.add_subcommand(name);
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--scenario", scenario,
                        "builtin scenario (ex-dry, ex-drystar, ex-strib, ex-incomp, ex-comp, "
                        "cont-dry, smooth-dry, slope-dry)");
        cmd->add_option("--v0", v0, "initial barycentre velocity");
        cmd->add_option("--periods", periods, "number of actuation periods");
        cmd->add_option("--tol", tol, "bracket / periodicity tolerance");
        cmd->add_option("--alpha", alpha, "scenario amplitude override");
        cmd->add_option("--T", period, "scenario period override");
        cmd->add_option("--load", load, "scenario external load override");
        cmd->add_option("--steps", steps, "solver steps per period");
        cmd->add_option("--grid", grid_n, "fixed-point / gamma grid size");
        cmd->add_flag("--oracle", oracle, "use the explicit micro-stepping oracle");
        cmd->add_option("--out", out_dir, "output directory");
        commands.push_back(cmd);
    }

    CLI11_PARSE(app, argc, argv);
    CLI::App* cmd = app.get_subcommands().front();

    try {
        crawl::json j;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw crawl::ConfigError("cannot open config file " + config_path);
            in >> j;
        } else {
            j = crawl::json::object();
        }
        if (cmd->count("--scenario")) {
            j["scenario"] = scenario;
            j.erase("model");
        }
        if (cmd->count("--alpha")) j["alpha"] = alpha;
        if (cmd->count("--T")) j["T"] = period;
        if (cmd->count("--load")) j["load"] = load;
        if (cmd->count("--v0")) j["v0"] = v0;
        if (cmd->count("--periods")) j["periods"] = periods;
        if (cmd->count("--tol")) j["tol"] = tol;
        if (cmd->count("--grid")) j["grid_n"] = grid_n;
        if (cmd->count("--out")) j["out"] = out_dir;
        if (cmd->count("--steps")) j["solver"]["steps_per_period"] = steps;
        if (oracle) j["solver"]["oracle_mode"] = true;

        const crawl::RunConfig cfg = crawl::config_from_json(j);
        return crawl::run_command(cfg, cmd->get_name());
    } catch (const crawl::DissipativityError& e) {
        std::cerr << "dissipativity failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
