#pragma once

#include <stdexcept>
#include <string>

namespace eer {

// Base for every contract violation raised by this library.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

struct dimension_error : error {
    using error::error;
};

struct hermiticity_error : error {
    using error::error;
};

struct partition_error : error {
    using error::error;
};

// Invalid state content: trace off, negative spectrum, broken norm.
struct state_error : error {
    using error::error;
};

// log of a matrix with a (near-)zero eigenvalue while flooring is disabled.
struct singular_spectrum_error : error {
    using error::error;
};

// [rho0, H0] != 0 where a stationary initial state is required.
struct stationarity_error : error {
    using error::error;
};

// Step-size or norm-drift contract of the integrator.
struct integration_error : error {
    using error::error;
};

struct grid_error : error {
    using error::error;
};

// Causality violations detected on kernels or spectra.
struct causality_error : error {
    using error::error;
};

// Theorem preconditions (non-degeneracy, eigenstate requirement) not met.
struct theorem_precondition_error : error {
    using error::error;
};

// Scenario configuration problems: parse errors, unknown keys, bad values.
struct config_error : error {
    using error::error;
};

// Internal cross-checks that are part of an operation's contract.
struct contract_error : error {
    using error::error;
};

}  // namespace eer
