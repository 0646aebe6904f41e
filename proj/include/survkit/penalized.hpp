#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survkit/cox.hpp"
#include "survkit/dataset.hpp"

namespace survkit {

struct PenaltySpec {
    double lambda = 0.0;
    double alpha = 1.0;  // elastic-net mixing; 1 = lasso, 0 = ridge
    Vector weights;      // per-feature penalty weights, 0 for mandatory

    // Unit weights on penalized features, zero on mandatory ones.
    static Vector default_weights(const SurvivalDataset& ds);
    void validate(const SurvivalDataset& ds) const;
};

struct EnetOptions {
    double tol = 1e-7;    // max coefficient change at convergence
    int max_outer = 100;  // IRLS reweighting rounds
    int max_sweeps = 2000;
    double coef_bound = 50.0;
    double alpha_floor = 1e-3;  // lambda_max cap when alpha -> 0
};

struct EnetDiagnostics {
    std::vector<double> objective_trace;  // penalized objective per IRLS round
    int outer_iterations = 0;
};

// Maximizes (2/n) * loglik - lambda * sum_j w_j (alpha |b_j| + (1-alpha) b_j^2 / 2)
// by IRLS with cyclic coordinate-wise soft-thresholding.  Mandatory
// coordinates (w_j = 0) update without thresholding.
CoxFit fit_enet(const SurvivalDataset& ds, const PenaltySpec& spec,
                const Vector* warm = nullptr, const EnetOptions& opt = EnetOptions(),
                EnetDiagnostics* diag = nullptr);

// Largest lambda with all penalized coefficients zero, mandatory covariates
// profiled in via a Newton fit.
double lambda_max(const SurvivalDataset& ds, double alpha, const Vector& weights,
                  const EnetOptions& opt = EnetOptions());

// Max KKT subgradient violation of the elastic-net optimality conditions at
// coef; 0 at an exact optimum.
double kkt_max_violation(const SurvivalDataset& ds, const Vector& coef, const PenaltySpec& spec);

struct LambdaPath {
    std::vector<double> lambdas;  // strictly decreasing
    std::vector<CoxFit> fits;     // baseline omitted on path fits
    std::vector<int> nonzero;     // penalized nonzero count per lambda
    std::vector<double> cv_mean;  // filled by cv_select_lambda
    std::vector<double> cv_se;
    double alpha = 1.0;
};

// Log-spaced grid from lambda_max down to ratio * lambda_max with warm starts.
LambdaPath lambda_path(const SurvivalDataset& ds, double alpha, int n_lambda = 100,
                       double ratio = 0.01, const Vector* weights = nullptr,
                       const EnetOptions& opt = EnetOptions());

struct CvResult {
    LambdaPath path;  // full-data path, cv columns filled
    double lambda_star = 0.0;
    double lambda_1se = 0.0;
    int star_index = 0;
    int one_se_index = 0;
    std::vector<std::string> warnings;
};

// Verweij-van Houwelingen cross-validated partial likelihood per lambda:
// each fold contributes loglik_full(beta_train) - loglik_train(beta_train).
// lambda_star maximizes the fold mean; the 1-se choice is also reported.
CvResult cv_select_lambda(const SurvivalDataset& ds, double alpha, const ResamplingPlan& plan,
                          int n_lambda = 100, double ratio = 0.01,
                          const Vector* weights = nullptr,
                          const EnetOptions& opt = EnetOptions());
CvResult cv_select_lambda_serial(const SurvivalDataset& ds, double alpha,
                                 const ResamplingPlan& plan, int n_lambda = 100,
                                 double ratio = 0.01, const Vector* weights = nullptr,
                                 const EnetOptions& opt = EnetOptions());

struct AdaptiveLassoResult {
    CoxFit fit;
    Vector init_coef;  // ridge stage estimates
    Vector weights;    // 1/|init|^gamma, capped
    CvResult cv;       // stage-2 CV curve
};

// Two-stage adaptive lasso: CV-tuned ridge initial estimates, then weighted
// lasso with w_j = 1/|init_j| capped at 1e6.
AdaptiveLassoResult fit_adaptive_lasso(const SurvivalDataset& ds, const ResamplingPlan& plan,
                                       double gamma = 1.0,
                                       const EnetOptions& opt = EnetOptions());

struct StabilityReport {
    std::vector<std::string> names;
    std::vector<double> frequency;
    double threshold = 0.0;
    std::vector<int> stable_set;  // column indices with frequency >= threshold
};

// Meinshausen-Buhlmann stability selection: B half subsamples, each walking
// the lambda path until q penalized features are active.
StabilityReport stability_selection(const SurvivalDataset& ds, double alpha, int B, int q,
                                    double pi_thr, std::uint64_t seed,
                                    const EnetOptions& opt = EnetOptions());
StabilityReport stability_selection_serial(const SurvivalDataset& ds, double alpha, int B, int q,
                                           double pi_thr, std::uint64_t seed,
                                           const EnetOptions& opt = EnetOptions());

// Per-feature fraction of fits with a nonzero coefficient; stable set is the
// intersection (threshold 1).
StabilityReport selection_overlap(const std::vector<CoxFit>& fits);

// CSV exports: `lambda,feature,coefficient` and `lambda,mean_cvpl,se`.
std::string path_to_csv(const LambdaPath& path, const std::vector<FeatureMeta>& features);
std::string cv_curve_to_csv(const LambdaPath& path);

}  // namespace survkit
