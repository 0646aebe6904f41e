#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survkit/dataset.hpp"

namespace survkit {

struct KMCurve {
    std::vector<double> times;     // strictly increasing event times
    std::vector<double> survival;  // S(T_k)
    std::vector<int> at_risk;      // Y(T_k)
    std::vector<int> events;       // d_k
    std::size_t n = 0;
};

// Product-limit estimator.  Censored rows only shrink the at-risk counts; a
// censoring tied with an event stays at risk at that time.
KMCurve km_estimate(const std::vector<SurvivalOutcome>& outcomes);

// Right-continuous step evaluation; 1 before the first event time, carries the
// last value beyond the grid.
double survival_at(const KMCurve& curve, double t);
// Left limit S(t-).
double survival_before(const KMCurve& curve, double t);

// Smallest event time with S(t) <= 0.5; empty when the curve never gets there.
std::optional<double> median_survival(const KMCurve& curve);

struct LogRankResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::vector<double> observed;  // per group
    std::vector<double> expected;  // per group
};

// Multi-group log-rank test with hypergeometric moments; groups are arbitrary
// integer labels, df = (number of non-empty groups) - 1.
LogRankResult logrank_test(const std::vector<SurvivalOutcome>& outcomes,
                           const std::vector<int>& groups);

// KM of the censoring distribution (status flipped).  As an IPCW weight the
// curve is evaluated as a left limit G(t-) to dodge the jump at t itself.
struct CensoringModel {
    KMCurve curve;
    double at(double t) const { return survival_at(curve, t); }
    double before(double t) const { return survival_before(curve, t); }
};

CensoringModel censoring_km(const std::vector<SurvivalOutcome>& outcomes);

// CSV with header `time,survival,at_risk,events`.
std::string km_to_csv(const KMCurve& curve);

}  // namespace survkit
