#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "survkit/dataset.hpp"
#include "survkit/nonparametric.hpp"

namespace survkit {

struct ConcordanceResult {
    enum class Variant { harrell, uno, antolini };
    double c_index = 0.0;
    double comparable_pairs = 0.0;  // raw count of comparable pairs
    Variant variant = Variant::harrell;
    double truncation = std::numeric_limits<double>::infinity();  // uno only
};

// Pairs (i, j) with T_i < T_j and delta_i = 1; concordant when score_i >
// score_j (higher score = shorter survival); score ties count 0.5.
ConcordanceResult harrell_c(const std::vector<double>& scores,
                            const std::vector<SurvivalOutcome>& outcomes);

// IPCW concordance: events before tau weighted by G(T_i-)^(-2).
ConcordanceResult uno_c(const std::vector<double>& scores,
                        const std::vector<SurvivalOutcome>& outcomes, const CensoringModel& G,
                        double tau);

// Time-dependent concordance on full survival curves: pair (i, j) compared at
// T_i via S(T_i | x_i) < S(T_i | x_j).
using SurvCurve = std::function<double(double)>;
ConcordanceResult antolini_c(const std::vector<SurvCurve>& pred,
                             const std::vector<SurvivalOutcome>& outcomes);

// Cumulative/dynamic AUC at horizon t with IPCW weights; cases are events by
// t, controls are survivors past t.
double time_dependent_auc(const std::vector<double>& scores,
                          const std::vector<SurvivalOutcome>& outcomes, double t,
                          const CensoringModel& G);

struct RocCurve {
    std::vector<double> fpr;
    std::vector<double> tpr;
    double auc = 0.0;
};
RocCurve roc_points(const std::vector<double>& scores,
                    const std::vector<SurvivalOutcome>& outcomes, double t,
                    const CensoringModel& G);

// IPCW Brier score at horizon t; surv[i] = predicted S(t | x_i).  Events by t
// weigh S^2 by 1/G(T_i-), survivors weigh (1-S)^2 by 1/G(t); patients censored
// before t contribute zero.
double brier_score(const std::vector<double>& surv, const std::vector<SurvivalOutcome>& outcomes,
                   double t, const CensoringModel& G);

struct BrierCurve {
    enum class Variant { apparent, oob, dot632plus, null_model };
    std::vector<double> times;
    std::vector<double> values;
    Variant variant = Variant::apparent;
};

// Trapezoidal integral of the curve over [0, tau], divided by tau.
double integrated_brier(const BrierCurve& curve, double tau);

// .632+ blend of apparent and out-of-bag error given the no-information
// error gamma; relative overfitting clamped to [0,1].
double dot632plus(double apparent, double oob, double gamma);

// A trained survival model: S(t | x) for a standardized covariate row.
using SurvivalModel = std::function<double(const Vector& x, double t)>;
// Self-contained training procedure (e.g. CV-tuned lasso); the seed drives any
// internal resampling.
using ModelFitter = std::function<SurvivalModel(const SurvivalDataset& train, std::uint64_t seed)>;

struct PredictionErrorCurves {
    std::vector<double> grid;
    BrierCurve null_model;   // KM prediction, no covariates
    BrierCurve apparent;     // train = test = full data
    BrierCurve dot632plus_curve;
    std::vector<double> oob_mean;   // per grid point, over successful replicates
    std::vector<double> oob_q025;
    std::vector<double> oob_q975;
    std::vector<double> no_information;  // gamma(t), permutation form
    int replicates_used = 0;
    int replicates_failed = 0;
    std::vector<std::string> warnings;
};

// Bootstrap .632+ prediction error curves per the resampling plan.  The
// censoring distribution is estimated once on the full data and reused for
// every replicate.  Failed replicates are recorded and skipped; fewer than
// half succeeding is an error.
PredictionErrorCurves prediction_error_curve(const SurvivalDataset& ds, const ModelFitter& fitter,
                                             const ResamplingPlan& plan,
                                             const std::vector<double>& grid, std::uint64_t seed);
PredictionErrorCurves prediction_error_curve_serial(const SurvivalDataset& ds,
                                                    const ModelFitter& fitter,
                                                    const ResamplingPlan& plan,
                                                    const std::vector<double>& grid,
                                                    std::uint64_t seed);

struct CalibrationResult {
    int groups = 0;
    double horizon = 0.0;
    std::vector<double> pred;      // group mean predicted survival
    std::vector<double> observed;  // group KM at the horizon
    std::vector<double> ci_lo;     // bootstrap CI for the group KM
    std::vector<double> ci_hi;
    double intercept = 0.0;  // alpha-hat on the ln(-ln) scale
    double slope = 0.0;      // beta-hat; 1 = well calibrated
    std::vector<double> residuals;
};

// Groups patients by predicted-probability quantiles (equal-size rank
// chunks), fits observed-vs-predicted on the ln(-ln) scale, and bootstraps
// per-group KM confidence intervals.
CalibrationResult calibration_fit(const std::vector<double>& pred_probs,
                                  const std::vector<SurvivalOutcome>& outcomes, int n_groups,
                                  double horizon, int bootstrap = 200, std::uint64_t seed = 1);

// Splits patients at score quantiles and runs the log-rank test across the
// resulting risk groups.
LogRankResult risk_group_logrank(const std::vector<double>& scores,
                                 const std::vector<SurvivalOutcome>& outcomes,
                                 const std::vector<double>& quantiles);

// CSV exports.
std::string roc_to_csv(const RocCurve& roc);
std::string pec_to_csv(const PredictionErrorCurves& pec);
std::string calibration_to_csv(const CalibrationResult& cal);

}  // namespace survkit
