#include "CLI11.hpp"

#include "eer/errors.hpp"
#include "eer/parallel.hpp"
#include "eer/scenario.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

void apply_thread_cap(int cli_threads) {
    if (cli_threads > 0) {
        eer::set_max_threads(cli_threads);
        return;
    }
    if (const char* env = std::getenv("EE_RESPONSE_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0)
            eer::set_max_threads(static_cast<eer::Index>(n));
        else
            throw eer::config_error("EE_RESPONSE_THREADS must be a positive integer, got '" +
                                    std::string(env) + "'");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear response of entanglement entropy: scenario runner"};
    app.require_subcommand(1);

    std::string run_config;
    std::string out_dir;
    int threads = 0;
    CLI::App* run = app.add_subcommand("run", "run a scenario described by a config file");
    run->add_option("config", run_config, "key = value config file")->required();
    run->add_option("--out", out_dir, "override the output directory");
    run->add_option("--threads", threads, "worker thread cap (default: EE_RESPONSE_THREADS or hardware)");

    std::string val_config;
    CLI::App* validate =
        app.add_subcommand("validate", "check a config file and echo the effective config");
    validate->add_option("config", val_config, "key = value config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            apply_thread_cap(threads);
            eer::ScenarioConfig cfg = eer::validate_config(run_config);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            eer::run_scenario(cfg);
            std::cout << "wrote " << cfg.out_dir << " (config " << cfg.hash_hex() << ")\n";
        } else {
            const eer::ScenarioConfig cfg = eer::validate_config(val_config);
            std::cout << "# config_hash: " << cfg.hash_hex() << "\n" << cfg.effective_text();
        }
    } catch (const eer::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const eer::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
