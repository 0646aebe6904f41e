#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "oracle_helpers.hpp"
#include "survkit/penalized.hpp"
#include "survkit/simulate.hpp"

using namespace survkit;
using testkit::make_ds;

namespace {

SurvivalDataset signal_data(int n, int p, uint64_t seed) {
    SimSpec spec;
    spec.n = n;
    spec.p = p;
    spec.signal_cols = {0, 1, 2};
    spec.effects = {1.0, -1.0, 0.8};
    return standardize(simulate_cox_data(spec, seed));
}

SurvivalDataset noise_data(int n, int p, uint64_t seed) {
    SimSpec spec;
    spec.n = n;
    spec.p = p;
    spec.signal_cols = {};
    spec.effects = {};
    return standardize(simulate_cox_data(spec, seed));
}

}  // namespace

TEST_CASE("unpenalized coordinate descent matches the newton optimum") {
    SimSpec spec;
    spec.n = 100;
    spec.p = 5;
    spec.signal_cols = {0, 1};
    spec.effects = {0.9, -0.6};
    SurvivalDataset ds = standardize(simulate_cox_data(spec, 101));
    CoxFit newton = fit_cox_newton(ds, {0, 1, 2, 3, 4});
    PenaltySpec pen;
    pen.lambda = 0.0;
    pen.weights = PenaltySpec::default_weights(ds);
    CoxFit cd = fit_enet(ds, pen);
    CHECK(cd.converged);
    CHECK((cd.coef - newton.coef).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("above the critical penalty every penalized coefficient is exactly zero") {
    SimSpec spec;
    spec.n = 120;
    spec.p = 8;
    spec.signal_cols = {0, 1};
    spec.effects = {1.0, -0.8};
    spec.mandatory_cols = {7};
    SurvivalDataset ds = standardize(simulate_cox_data(spec, 103));
    Vector w = PenaltySpec::default_weights(ds);
    const double lmax = lambda_max(ds, 1.0, w);

    PenaltySpec pen;
    pen.alpha = 1.0;
    pen.weights = w;
    for (double factor : {1.0, 1.3, 5.0}) {
        pen.lambda = factor * lmax;
        CoxFit fit = fit_enet(ds, pen);
        for (int j = 0; j < 7; ++j) CHECK(fit.coef[j] == 0.0);
        CoxFit mand_only = fit_cox_newton(ds, {7});
        CHECK(std::fabs(fit.coef[7] - mand_only.coef[7]) < 1e-5);
    }
    // Just below the critical value something must enter.
    pen.lambda = 0.9 * lmax;
    CoxFit below = fit_enet(ds, pen);
    int nonzero = 0;
    for (int j = 0; j < 7; ++j) nonzero += below.coef[j] != 0.0;
    CHECK(nonzero > 0);
}

TEST_CASE("subgradient optimality holds at every path point") {
    SurvivalDataset ds = signal_data(80, 20, 107);
    LambdaPath path = lambda_path(ds, 1.0, 30, 0.01);
    PenaltySpec pen;
    pen.alpha = 1.0;
    pen.weights = PenaltySpec::default_weights(ds);
    for (std::size_t k = 0; k < path.lambdas.size(); ++k) {
        pen.lambda = path.lambdas[k];
        CHECK(kkt_max_violation(ds, path.fits[k].coef, pen) < 1e-6);
    }
}

TEST_CASE("the penalized objective never decreases across reweighting rounds") {
    SurvivalDataset ds = signal_data(100, 15, 109);
    PenaltySpec pen;
    pen.alpha = 0.9;
    pen.weights = PenaltySpec::default_weights(ds);
    pen.lambda = 0.05;
    EnetDiagnostics diag;
    fit_enet(ds, pen, nullptr, EnetOptions(), &diag);
    REQUIRE(diag.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < diag.objective_trace.size(); ++i)
        CHECK(diag.objective_trace[i] >= diag.objective_trace[i - 1] - 1e-10);
}

TEST_CASE("warm starts land on the cold-start solution") {
    SurvivalDataset ds = signal_data(90, 25, 113);
    LambdaPath path = lambda_path(ds, 1.0, 20, 0.05);
    PenaltySpec pen;
    pen.alpha = 1.0;
    pen.weights = PenaltySpec::default_weights(ds);
    for (std::size_t k = 0; k < path.lambdas.size(); k += 4) {
        pen.lambda = path.lambdas[k];
        CoxFit cold = fit_enet(ds, pen);
        CHECK((cold.coef - path.fits[k].coef).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("solutions track a permutation of the feature columns") {
    SurvivalDataset ds = signal_data(80, 6, 127);
    PenaltySpec pen;
    pen.alpha = 1.0;
    pen.weights = PenaltySpec::default_weights(ds);
    pen.lambda = 0.04;
    CoxFit base = fit_enet(ds, pen);

    std::vector<int> perm = {3, 0, 5, 1, 4, 2};
    SurvivalDataset shuffled = subset_features(ds, perm);
    CoxFit permuted = fit_enet(shuffled, pen);
    for (std::size_t j = 0; j < perm.size(); ++j)
        CHECK(permuted.coef[static_cast<Eigen::Index>(j)] ==
              doctest::Approx(base.coef[perm[j]]).epsilon(1e-5));
}

TEST_CASE("a duplicated column pair never carries opposite signs") {
    SimSpec spec;
    spec.n = 150;
    spec.p = 4;
    spec.signal_cols = {0};
    spec.effects = {1.2};
    SurvivalDataset ds = standardize(simulate_cox_data(spec, 131));
    ds.covariates.col(3) = ds.covariates.col(0);
    ds.features[3].name = "x1_copy";

    PenaltySpec lasso;
    lasso.alpha = 1.0;
    lasso.weights = PenaltySpec::default_weights(ds);
    lasso.lambda = 0.08;
    CoxFit l1 = fit_enet(ds, lasso);
    CHECK(l1.coef[0] * l1.coef[3] >= 0.0);

    PenaltySpec enet = lasso;
    enet.alpha = 0.5;
    CoxFit mix = fit_enet(ds, enet);
    const double diff = std::fabs(mix.coef[0] - mix.coef[3]);
    const double sum = std::fabs(mix.coef[0] + mix.coef[3]);
    CHECK(sum > 0.0);
    CHECK(diff < 0.1 * sum);
}

TEST_CASE("the path grid starts empty and densifies as the penalty relaxes") {
    LambdaPath path = lambda_path(signal_data(100, 20, 137), 1.0, 40, 0.01);
    CHECK(path.lambdas.size() == 40);
    CHECK(path.nonzero.front() == 0);
    for (std::size_t k = 1; k < path.lambdas.size(); ++k)
        CHECK(path.lambdas[k] < path.lambdas[k - 1]);
    CHECK(path.lambdas.back() ==
          doctest::Approx(path.lambdas.front() * 0.01).epsilon(1e-10));

    int monotone = 0, pairs = 0;
    for (uint64_t seed : {137ull, 139ull, 149ull}) {
        LambdaPath p = lambda_path(signal_data(100, 20, seed), 1.0, 40, 0.01);
        for (std::size_t k = 1; k < p.nonzero.size(); ++k) {
            ++pairs;
            monotone += p.nonzero[k] >= p.nonzero[k - 1];
        }
    }
    CHECK(static_cast<double>(monotone) / pairs >= 0.95);
}

TEST_CASE("cross-validation is deterministic and finds the planted signal") {
    SurvivalDataset ds = signal_data(150, 40, 151);
    ResamplingPlan plan = make_cv_folds(ds.outcomes, 4, 9);
    CvResult a = cv_select_lambda(ds, 1.0, plan, 40, 0.01);
    CvResult b = cv_select_lambda(ds, 1.0, plan, 40, 0.01);
    CHECK(a.lambda_star == b.lambda_star);
    CHECK(a.path.cv_mean == b.path.cv_mean);

    // The 1-se choice penalizes at least as hard as the maximizer.
    CHECK(a.lambda_1se >= a.lambda_star);
    CHECK(a.one_se_index <= a.star_index);

    CoxFit fit = a.path.fits[static_cast<std::size_t>(a.star_index)];
    std::set<int> selected;
    for (int j = 0; j < 40; ++j)
        if (fit.coef[j] != 0.0) selected.insert(j);
    CHECK(selected.count(0));
    CHECK(selected.count(1));
    CHECK(selected.count(2));
}

TEST_CASE("pure noise drives the tuned penalty toward the top of the path") {
    int near_empty = 0, one_se_empty = 0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        SurvivalDataset ds = noise_data(200, 30, 157 + seed);
        ResamplingPlan plan = make_cv_folds(ds.outcomes, 10, 11 + seed);
        CvResult cv = cv_select_lambda(ds, 1.0, plan, 40, 0.01);
        near_empty += cv.path.nonzero[static_cast<std::size_t>(cv.star_index)] <= 2;
        one_se_empty += cv.path.nonzero[static_cast<std::size_t>(cv.one_se_index)] == 0;
    }
    CHECK(near_empty >= 16);
    CHECK(one_se_empty >= 16);
}

TEST_CASE("training folds without events are skipped with a warning") {
    SurvivalDataset ds = signal_data(40, 5, 163);
    // Hand-built plan: fold 0 trains on censored rows only.
    ResamplingPlan plan;
    plan.kind = ResamplingPlan::Kind::cv_folds;
    plan.seed = 1;
    std::vector<int> events, censored;
    for (std::size_t i = 0; i < ds.n(); ++i)
        (ds.outcomes[i].status == 1 ? events : censored).push_back(static_cast<int>(i));
    REQUIRE(events.size() >= 2);
    REQUIRE(censored.size() >= 2);
    plan.in_sample.push_back(censored);
    plan.out_sample.push_back(events);
    std::vector<int> all;
    for (std::size_t i = 0; i < ds.n(); ++i) all.push_back(static_cast<int>(i));
    plan.in_sample.push_back(all);
    plan.out_sample.push_back(events);
    CvResult cv = cv_select_lambda(ds, 1.0, plan, 15, 0.05);
    CHECK_FALSE(cv.warnings.empty());
    CHECK(cv.lambda_star > 0.0);
}

TEST_CASE("adaptive weights shrink where the pilot estimate is strong") {
    SimSpec spec;
    spec.n = 150;
    spec.p = 12;
    spec.signal_cols = {0, 1, 2};
    spec.effects = {1.0, -1.0, 0.8};
    spec.mandatory_cols = {11};
    SurvivalDataset ds = standardize(simulate_cox_data(spec, 167));
    ResamplingPlan plan = make_cv_folds(ds.outcomes, 4, 13);
    AdaptiveLassoResult res = fit_adaptive_lasso(ds, plan);

    CHECK(res.weights[11] == 0.0);                      // mandatory stays unpenalized
    CHECK(res.weights[0] < res.weights[5]);             // strong pilot, light penalty
    CHECK(res.fit.coef[0] != 0.0);
    for (int j = 0; j < 12; ++j) CHECK(res.weights[j] <= 1e6);
    CHECK(res.init_coef.size() == 12);
}

TEST_CASE("stability selection is reproducible and separates signal from noise") {
    SurvivalDataset ds = signal_data(200, 30, 173);
    StabilityReport a = stability_selection(ds, 1.0, 40, 4, 0.7, 19);
    StabilityReport b = stability_selection(ds, 1.0, 40, 4, 0.7, 19);
    CHECK(a.frequency == b.frequency);
    CHECK(a.threshold == 0.7);

    for (int j : {0, 1, 2}) CHECK(a.frequency[static_cast<std::size_t>(j)] >= 0.8);
    for (std::size_t j = 3; j < 30; ++j) CHECK(a.frequency[j] <= 0.4);
    std::set<int> stable(a.stable_set.begin(), a.stable_set.end());
    CHECK(stable.count(0));
    CHECK(stable.count(1));
    CHECK(stable.count(2));
}

TEST_CASE("a unanimity threshold keeps only ever-present features") {
    SurvivalDataset ds = signal_data(120, 10, 179);
    StabilityReport rep = stability_selection(ds, 1.0, 20, 3, 1.0, 23);
    for (int j : rep.stable_set)
        CHECK(rep.frequency[static_cast<std::size_t>(j)] == 1.0);
}

TEST_CASE("stability selection validates its arguments") {
    SurvivalDataset ds = signal_data(60, 5, 181);
    CHECK_THROWS_AS(stability_selection(ds, 1.0, 10, 5, 0.7, 1), ConfigError);   // q = p
    CHECK_THROWS_AS(stability_selection(ds, 1.0, 10, 2, 0.5, 1), ConfigError);   // pi_thr low
    CHECK_THROWS_AS(stability_selection(ds, 1.0, 10, 2, 1.01, 1), ConfigError);  // pi_thr high
    CHECK_THROWS_AS(stability_selection(ds, 1.0, 0, 2, 0.7, 1), ConfigError);    // B zero
}

TEST_CASE("selection overlap counts nonzero patterns") {
    SurvivalDataset ds = signal_data(60, 4, 191);
    PenaltySpec pen;
    pen.weights = PenaltySpec::default_weights(ds);
    pen.lambda = 0.02;
    CoxFit f1 = fit_enet(ds, pen);
    StabilityReport same = selection_overlap({f1, f1, f1});
    for (int j = 0; j < 4; ++j) {
        const bool active = f1.coef[j] != 0.0;
        CHECK(same.frequency[static_cast<std::size_t>(j)] == (active ? 1.0 : 0.0));
    }

    CoxFit a = f1, b = f1;
    a.coef << 1.0, 0.0, 0.5, 0.0;
    b.coef << 0.0, 2.0, 0.0, 0.0;
    StabilityReport disjoint = selection_overlap({a, b});
    CHECK(disjoint.stable_set.empty());
    CHECK(disjoint.frequency[0] == 0.5);
    CHECK(disjoint.frequency[1] == 0.5);
    CHECK(disjoint.frequency[2] == 0.5);
    CHECK(disjoint.frequency[3] == 0.0);
    CHECK_THROWS_AS(selection_overlap({f1}), ConfigError);
}

TEST_CASE("penalty specifications reject invalid parameters") {
    SurvivalDataset ds = signal_data(40, 3, 193);
    PenaltySpec pen;
    pen.weights = PenaltySpec::default_weights(ds);
    pen.alpha = 1.5;
    CHECK_THROWS_AS(pen.validate(ds), ConfigError);
    pen.alpha = 1.0;
    pen.lambda = -0.1;
    CHECK_THROWS_AS(pen.validate(ds), ConfigError);
    pen.lambda = 0.1;
    pen.weights = Vector::Ones(2);
    CHECK_THROWS_AS(pen.validate(ds), ConfigError);
    pen.weights = -Vector::Ones(3);
    CHECK_THROWS_AS(pen.validate(ds), ConfigError);

    SimSpec spec;
    spec.n = 40;
    spec.p = 3;
    spec.signal_cols = {0};
    spec.effects = {0.5};
    spec.mandatory_cols = {1};
    SurvivalDataset with_mand = standardize(simulate_cox_data(spec, 197));
    PenaltySpec bad;
    bad.lambda = 0.1;
    bad.weights = Vector::Ones(3);  // mandatory feature must carry weight zero
    CHECK_THROWS_AS(bad.validate(with_mand), ConfigError);
}

TEST_CASE("path and cv curves export as csv") {
    SurvivalDataset ds = signal_data(80, 5, 199);
    ResamplingPlan plan = make_cv_folds(ds.outcomes, 3, 29);
    CvResult cv = cv_select_lambda(ds, 1.0, plan, 10, 0.05);
    std::string path_csv = path_to_csv(cv.path, ds.features);
    CHECK(path_csv.rfind("lambda,feature,coefficient\n", 0) == 0);
    std::string curve_csv = cv_curve_to_csv(cv.path);
    CHECK(curve_csv.rfind("lambda,mean_cvpl,se\n", 0) == 0);

    LambdaPath bare = lambda_path(ds, 1.0, 5, 0.1);
    CHECK_THROWS_AS(cv_curve_to_csv(bare), DataError);
}
