#pragma once

#include <cstdint>
#include <vector>

#include "survkit/dataset.hpp"

namespace survkit {

// Proportional-hazards data generator: independent standard-normal
// covariates, exponential event times with hazard baseline_rate * exp(x'b),
// independent exponential censoring tuned so roughly censor_frac of
// observations are censored at b = 0.
struct SimSpec {
    std::size_t n = 200;
    std::size_t p = 50;
    std::vector<int> signal_cols = {0, 1, 2};
    std::vector<double> effects;  // per signal column; defaults to 1.0 each
    double baseline_rate = 0.1;
    double censor_frac = 0.3;
    std::vector<int> mandatory_cols;  // marked mandatory in the metadata
};

SurvivalDataset simulate_cox_data(const SimSpec& spec, std::uint64_t seed);

}  // namespace survkit
