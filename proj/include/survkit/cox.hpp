#pragma once

#include <string>
#include <vector>

#include "survkit/dataset.hpp"

namespace survkit {

// Right-continuous step function, value 0 before the first jump time.
struct StepFunction {
    std::vector<double> times;   // strictly increasing
    std::vector<double> values;  // value at and after times[k]

    double operator()(double t) const;
    // Value just before t, used for IPCW weights G(t-).
    double left_limit(double t) const;
    bool empty() const { return times.empty(); }
};

// Precomputed event-time layout.  Risk sets are suffixes of the
// descending-time order: R_k = {l : T_l >= T_k}, so events tied with a
// censoring time keep the censored row at risk (censored-after-event
// convention).
struct RiskSetIndex {
    std::vector<int> by_desc_time;            // row indices, time descending
    std::vector<double> desc_times;           // times aligned with by_desc_time
    std::vector<double> event_times;          // ascending distinct event times
    std::vector<int> event_count;             // d_k
    std::vector<int> risk_count;              // |R_k|
    std::vector<std::vector<int>> event_rows; // rows with an event at T_k

    std::size_t n_event_times() const { return event_times.size(); }
};

RiskSetIndex make_risk_index(const std::vector<SurvivalOutcome>& outcomes);

struct CoxFit {
    Vector coef;                      // length p, dataset column order
    Vector se;                        // Wald SEs (Newton fits), else zeros
    std::vector<unsigned char> mandatory;  // per column
    StepFunction baseline;            // Breslow cumulative baseline hazard
    double loglik = 0.0;              // partial log-likelihood at coef
    bool converged = false;
    int iterations = 0;
    std::vector<FeatureMeta> features;  // training metadata incl. scale

    Vector beta0() const;  // mandatory coefficients
    Vector beta() const;   // penalized coefficients
    std::size_t p() const { return static_cast<std::size_t>(coef.size()); }
};

// Breslow-tied partial log-likelihood and its analytic gradient; log-sum-exp
// stabilized over risk-set suffix sums.
double partial_loglik(const Vector& beta_all, const SurvivalDataset& ds);
Vector partial_loglik_grad(const Vector& beta_all, const SurvivalDataset& ds);

// Evaluations on a precomputed linear predictor.
double partial_loglik_eta(const RiskSetIndex& idx, const Vector& eta);

// log S_k = log sum over R_k of exp(eta), per ascending event time.
std::vector<double> risk_log_sums(const RiskSetIndex& idx, const Vector& eta);

// Per-observation score residual s_i and diagonal weight w_i of the partial
// likelihood in eta, the IRLS quantities for coordinate descent:
//   s_i = delta_i - exp(eta_i) * A_i,  w_i = exp(eta_i) * A_i - exp(2 eta_i) * B_i
// with A_i = sum_{T_k <= T_i} d_k / S_k and B_i the same sum of d_k / S_k^2.
void irls_terms(const RiskSetIndex& idx, const Vector& eta, Vector& s, Vector& w);

struct NewtonOptions {
    double tol = 1e-9;       // |delta loglik| convergence threshold
    int max_iter = 50;
    double coef_bound = 50.0;  // divergence guard (monotone likelihood)
};

// Newton-Raphson with step halving on the named column subset; remaining
// coefficients are fixed at zero.  Wald SEs from the observed information.
CoxFit fit_cox_newton(const SurvivalDataset& ds, const std::vector<int>& columns,
                      const NewtonOptions& opt = NewtonOptions());

// Breslow estimator: H0(T_k) = sum_{j<=k} d_j / sum_{l in R_j} exp(eta_l).
StepFunction breslow_baseline(const CoxFit& fit, const SurvivalDataset& ds);
StepFunction breslow_baseline_eta(const RiskSetIndex& idx, const Vector& eta);

// x must already be on the training (standardized) scale; see
// predict_survival_raw for raw inputs.
double prognostic_score(const CoxFit& fit, const Vector& x);
double predict_survival(const CoxFit& fit, const Vector& x, double t);
double predict_survival_raw(const CoxFit& fit, const Vector& raw_x, double t);

// JSON document with named coefficients (standardized and original scale),
// baseline steps, and scale metadata.
std::string cox_fit_to_json(const CoxFit& fit);

}  // namespace survkit
