// plap: equivariant nodal solutions of the critical p-Laplace equation.
//
// Modes: solve, validate-bubble, diagnose, check-hypotheses, sweep-j.
// Configuration comes from a JSON file (--config); --mode, --output-dir,
// --seed and --workers override it.  PLAP_OUTPUT_ROOT sets the default
// output root for relative output directories.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "plap/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"equivariant nodal solutions of the critical p-Laplace equation"};
    std::string config_path;
    std::string mode;
    std::string output_dir;
    std::int64_t seed = -1;
    int workers = -1;
    app.add_option("--config", config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    app.add_option("--mode", mode,
                   "solve | validate-bubble | diagnose | check-hypotheses | sweep-j");
    app.add_option("--output-dir", output_dir, "artifact directory for this run");
    app.add_option("--seed", seed, "override the run seed");
    app.add_option("--workers", workers, "worker thread count (0 = hardware)");
    CLI11_PARSE(app, argc, argv);

    plap::RunConfig config;
    try {
        std::string text = "{\"mode\":\"solve\"}";
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            std::ostringstream buf;
            buf << in.rdbuf();
            text = buf.str();
        }
        config = plap::parse_config(text);
        if (!mode.empty())
            config.mode = plap::parse_config("{\"mode\":\"" + mode + "\"}").mode;
        if (seed >= 0) {
            config.seed = static_cast<std::uint64_t>(seed);
            config.solve.seed = config.seed;
            config.solve.symmetry.seed = config.seed;
        }
        if (workers >= 0) config.workers = workers;
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (config.output_dir.empty())
            config.output_dir = "plap-" + plap::to_string(config.mode);
        if (std::filesystem::path(config.output_dir).is_relative()) {
            if (const char* root = std::getenv("PLAP_OUTPUT_ROOT"))
                config.output_dir = (std::filesystem::path(root) / config.output_dir).string();
        }
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    const plap::RunOutcome outcome = plap::run(config);
    if (outcome.exit_code == 0)
        std::cout << outcome.message << "\n";
    else
        std::cerr << outcome.message << "\n";
    return outcome.exit_code;
}
