#pragma once

// Config-driven experiment orchestration: flat key-value configs, the four
// batch scenarios, and their CSV/JSON/SVG artifacts.

#include <cstdint>
#include <string>
#include <vector>

#include "eer/dense.hpp"

namespace eer {

struct ScenarioConfig {
    std::string scenario;
    std::string out_dir = "out";
    uint64_t seed = 1;

    // model (xx scenarios)
    Index L = 20;
    double lambda = 0.0;
    double J = 0.0;
    std::string boundary = "periodic";
    Index site = 1;
    Index k = 1;

    // drive
    double alpha = 0.0;
    std::vector<double> alphas;
    double T = 0.0;

    // grid; dt_auto keeps the step rule dt*(|H0|+alpha*|H1|) = 0.015,
    // rounded so dt divides the window
    double t0 = -8.0;
    double t_max = 40.0;
    double dt = 0.0;
    bool dt_auto = true;

    // spectra
    Index pad = 4;
    double kk_band = 40.0;

    // canonical-fdt
    double beta = 1.0;

    // normalized key = value text; dt shown resolved except for theorem1,
    // whose per-branch steps appear as derived comment lines
    std::string effective_text() const;

    // FNV-1a over effective_text minus the out line, so relocated runs
    // hash identically
    uint64_t hash() const;
    std::string hash_hex() const;
};

ScenarioConfig validate_config(const std::string& path);
ScenarioConfig validate_config_text(const std::string& text);

void run_scenario(const ScenarioConfig& cfg);

}  // namespace eer
