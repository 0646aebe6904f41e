#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survkit/common.hpp"

namespace survkit {

// Full run configuration.  Defaults follow the documented conventions:
// folds=10, bootstrap=100, alpha=0.95 for the elastic net, horizons={1,3,5},
// 100 path points down to ratio 0.01, iterations=20000 with burn-in
// iterations/2, 20 baseline intervals, seed=1.
struct RunConfig {
    // [data]
    std::string input;
    std::string meta;

    // [preprocess]
    double max_missing = 0.2;
    int impute_k = 5;
    enum class Preselect { none, variance, screen };
    Preselect preselect = Preselect::none;
    double variance_fraction = 0.5;
    double screen_alpha = 0.05;

    // [model]
    enum class Model { lasso, enet, adaptive, bayes_laplace, spike_slab, horseshoe };
    Model model = Model::lasso;
    double alpha = 0.95;       // elastic-net mixing; lasso and adaptive force 1
    double lambda = 0.0;       // fixed penalty; 0 selects by cross-validation
    int n_lambda = 100;
    double lambda_ratio = 0.01;
    double adaptive_gamma = 1.0;
    int iterations = 20000;
    int burnin = -1;           // -1 means iterations / 2
    int baseline_intervals = 20;
    double prior_rate = 1.0;   // Laplace prior rate (hyperprior updates it)
    double inclusion_prob = 0.1;

    // [validate]
    int folds = 10;
    int bootstrap = 100;
    std::vector<double> horizons = {1.0, 3.0, 5.0};
    double tau = 0.0;          // 0 means the largest horizon
    int cal_groups = 10;

    // [output]
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    void validate() const;
    bool bayesian() const {
        return model == Model::bayes_laplace || model == Model::spike_slab ||
               model == Model::horseshoe;
    }
};

// INI-style file with [section] headers, key = value lines, and # or ;
// comments.  Unknown sections or keys are errors.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Applies one "section.key=value" (or bare "key=value" when unambiguous)
// override; used by the CLI so every file key has a flag mirror.
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);

// Canonical round-trippable echo of the config, embedded in run reports.
std::string config_to_string(const RunConfig& cfg);

const char* model_name(RunConfig::Model m);
RunConfig::Model model_from_name(const std::string& name);

}  // namespace survkit
