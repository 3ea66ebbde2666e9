#pragma once

#include "riesztool/corona.hpp"
#include "riesztool/fourier.hpp"
#include "riesztool/generators.hpp"

namespace riesz {

struct ExperimentConfig {
    std::string name;                 // which experiment to run
    std::string input_path;           // optional point-cloud or graph spec
    std::string output_dir = ".";
    std::uint64_t seed = 1;
    Constants constants;
    // free-form numeric knobs (experiment specific), e.g. "n", "atoms"
    std::vector<std::pair<std::string, double>> extra;

    double get(const std::string& key, double fallback) const;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentOutcome {
    bool pass = true;                 // false => exit code 2 semantics
    std::vector<std::string> artifacts;
    std::string summary;
};

/// Runs one of: theorem13-comparability, fourier-check, pv-contrast,
/// corona-pipeline, band-decay, beta-alpha-tables, treecode-bench.
/// Writes CSV/JSON artifacts plus a manifest into the output directory.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

}  // namespace riesz
