#include "survkit/simulate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "survkit/rng.hpp"

namespace survkit {

SurvivalDataset simulate_cox_data(const SimSpec& spec, std::uint64_t seed) {
    if (spec.n < 2 || spec.p < 1) throw ConfigError("generator needs n >= 2 and p >= 1");
    if (!(spec.censor_frac >= 0.0 && spec.censor_frac < 1.0))
        throw ConfigError("censor_frac must lie in [0, 1)");
    if (spec.baseline_rate <= 0.0) throw ConfigError("baseline_rate must be positive");
    std::vector<double> effects = spec.effects;
    if (effects.empty()) effects.assign(spec.signal_cols.size(), 1.0);
    if (effects.size() != spec.signal_cols.size())
        throw ConfigError("effects must match signal_cols");

    Vector beta = Vector::Zero(spec.p);
    for (std::size_t k = 0; k < spec.signal_cols.size(); ++k) {
        const int c = spec.signal_cols[k];
        if (c < 0 || static_cast<std::size_t>(c) >= spec.p)
            throw ConfigError("signal column out of range");
        beta[c] = effects[k];
    }

    Rng rng(seed);
    SurvivalDataset ds;
    ds.covariates = Matrix(spec.n, spec.p);
    ds.outcomes.resize(spec.n);
    ds.ids.resize(spec.n);
    ds.features.resize(spec.p);
    for (std::size_t j = 0; j < spec.p; ++j) ds.features[j].name = "x" + std::to_string(j + 1);
    for (int c : spec.mandatory_cols) {
        if (c < 0 || static_cast<std::size_t>(c) >= spec.p)
            throw ConfigError("mandatory column out of range");
        ds.features[static_cast<std::size_t>(c)].mandatory = true;
        ds.features[static_cast<std::size_t>(c)].block = "clinical";
    }

    // Exponential censoring with hazard c solves c/(c + baseline) = censor_frac
    // at the null linear predictor.
    const double censor_rate =
        spec.censor_frac > 0.0 ? spec.baseline_rate * spec.censor_frac / (1.0 - spec.censor_frac)
                               : 0.0;

    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = 0; j < spec.p; ++j) ds.covariates(i, j) = rng.normal();
        const double eta = ds.covariates.row(i) * beta;
        const double t_event = rng.exponential(spec.baseline_rate * std::exp(eta));
        const double t_cens = censor_rate > 0.0 ? rng.exponential(censor_rate)
                                                : std::numeric_limits<double>::infinity();
        ds.outcomes[i].time = std::min(t_event, t_cens);
        ds.outcomes[i].status = t_event <= t_cens ? 1 : 0;
        ds.ids[i] = "r" + std::to_string(i + 1);
    }
    ds.validate();
    return ds;
}

}  // namespace survkit
