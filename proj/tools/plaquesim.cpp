#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "plaque/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"plaquesim: arterial plaque growth solver, batch front end"};
    std::string config_path, out_dir, mode_name;
    app.add_option("--config", config_path, "config file (line-oriented `key = value`)");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--mode", mode_name,
                   "simulate | convergence-time | convergence-space | condition | "
                   "risk-sweep | mms | perturb (overrides config)");
    CLI11_PARSE(app, argc, argv);

    try {
        plaque::RunConfig cfg;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) {
                std::fprintf(stderr, "cannot read config file %s\n", config_path.c_str());
                return 1;
            }
            std::ostringstream buf;
            buf << is.rdbuf();
            cfg = plaque::parse_config(buf.str());
        }
        if (!mode_name.empty()) cfg.mode = plaque::mode_from_name(mode_name);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        return plaque::run(cfg);
    } catch (const plaque::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
