#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <vector>

#include "oracle_helpers.hpp"
#include "survkit/cox.hpp"
#include "survkit/dataset.hpp"
#include "survkit/rng.hpp"
#include "survkit/simulate.hpp"

using namespace survkit;
using testkit::finite_difference;
using testkit::make_ds;
using testkit::toy_dataset;

TEST_CASE("partial log-likelihood at zero counts risk-set sizes on the five-patient cohort") {
    SurvivalDataset ds = toy_dataset();
    Vector beta = Vector::Zero(1);
    CHECK(partial_loglik(beta, ds) ==
          doctest::Approx(-(std::log(4.0) + std::log(2.0))).epsilon(1e-14));
}

TEST_CASE("partial log-likelihood reduces to the single-pair formula") {
    SurvivalDataset ds = make_ds({1, 2}, {1, 0}, {{1, 0}});
    Vector beta(1);
    beta << 1.0;
    CHECK(partial_loglik(beta, ds) ==
          doctest::Approx(1.0 - std::log(std::exp(1.0) + 1.0)).epsilon(1e-14));
}

TEST_CASE("tied events share one denominator per event time") {
    SurvivalDataset ds = make_ds({1, 1, 2, 2}, {1, 1, 1, 1}, {{1, 0, 1, 0}});
    Vector beta = Vector::Zero(1);
    CHECK(partial_loglik(beta, ds) ==
          doctest::Approx(-2.0 * std::log(4.0) - 2.0 * std::log(2.0)).epsilon(1e-14));
    // Even split of covariate values inside each risk set zeroes the gradient.
    CHECK(partial_loglik_grad(beta, ds)[0] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("adding a constant to a covariate column never moves the partial likelihood") {
    SimSpec spec;
    spec.n = 40;
    spec.p = 3;
    SurvivalDataset ds = simulate_cox_data(spec, 3);
    Vector beta(3);
    beta << 0.4, -0.7, 0.2;
    const double base = partial_loglik(beta, ds);
    SurvivalDataset shifted = ds;
    shifted.covariates.col(1).array() += 57.0;
    CHECK(partial_loglik(beta, shifted) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("analytic gradient agrees with central differences") {
    for (int seed = 1; seed <= 20; ++seed) {
        SimSpec spec;
        spec.n = 30;
        spec.p = 5;
        spec.signal_cols = {0, 1};
        spec.effects = {0.8, -0.5};
        SurvivalDataset ds = standardize(simulate_cox_data(spec, static_cast<uint64_t>(seed)));
        Rng rng(static_cast<uint64_t>(seed) * 31);
        Vector beta(5);
        for (int j = 0; j < 5; ++j) beta[j] = rng.normal() * 0.5;
        Vector analytic = partial_loglik_grad(beta, ds);
        Vector numeric = finite_difference(
            [&](const Vector& b) { return partial_loglik(b, ds); }, beta);
        const double scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
        CHECK((analytic - numeric).cwiseAbs().maxCoeff() / scale < 1e-6);
    }
}

TEST_CASE("a zero-variance column has zero gradient") {
    SurvivalDataset ds = make_ds({1, 2, 3, 4}, {1, 1, 0, 1}, {{2, 2, 2, 2}, {0.5, -1, 0, 1}});
    Vector beta = Vector::Zero(2);
    CHECK(partial_loglik_grad(beta, ds)[0] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("eta-space evaluation matches the dataset entry point") {
    SimSpec spec;
    spec.n = 25;
    spec.p = 2;
    spec.signal_cols = {0};
    spec.effects = {0.6};
    SurvivalDataset ds = simulate_cox_data(spec, 8);
    Vector beta(2);
    beta << 0.3, -0.4;
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    Vector eta = ds.covariates * beta;
    CHECK(partial_loglik_eta(idx, eta) == doctest::Approx(partial_loglik(beta, ds)).epsilon(1e-14));
}

TEST_CASE("risk sets are nested suffixes of the descending time order") {
    SimSpec spec;
    spec.n = 30;
    spec.p = 1;
    spec.signal_cols = {0};
    spec.effects = {0.5};
    SurvivalDataset ds = simulate_cox_data(spec, 12);
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    for (std::size_t k = 1; k < idx.n_event_times(); ++k) {
        CHECK(idx.event_times[k] > idx.event_times[k - 1]);
        CHECK(idx.risk_count[k] <= idx.risk_count[k - 1]);
    }
    for (std::size_t i = 1; i < idx.desc_times.size(); ++i)
        CHECK(idx.desc_times[i] <= idx.desc_times[i - 1]);
}

TEST_CASE("newton fit recovers a unit effect from its own generator") {
    SimSpec spec;
    spec.n = 500;
    spec.p = 1;
    spec.signal_cols = {0};
    spec.effects = {1.0};
    SurvivalDataset ds = simulate_cox_data(spec, 44);
    CoxFit fit = fit_cox_newton(ds, {0});
    CHECK(fit.converged);
    CHECK(fit.coef[0] > 0.8);
    CHECK(fit.coef[0] < 1.2);
    CHECK(fit.se[0] > 0.0);
}

TEST_CASE("newton fit on a null covariate stays within three standard errors") {
    SimSpec spec;
    spec.n = 200;
    spec.p = 1;
    spec.signal_cols = {};
    spec.effects = {};
    SurvivalDataset ds = simulate_cox_data(spec, 45);
    CoxFit fit = fit_cox_newton(ds, {0});
    CHECK(std::fabs(fit.coef[0]) < 3.0 * fit.se[0]);
}

TEST_CASE("newton fit reports duplicated columns as collinear") {
    std::vector<double> x = {0.5, -1.0, 0.0, 1.5, -0.5, 0.7};
    SurvivalDataset ds = make_ds({1, 2, 3, 4, 5, 6}, {1, 1, 0, 1, 1, 0}, {x, x});
    CHECK_THROWS_AS(fit_cox_newton(ds, {0, 1}), NumericError);
}

TEST_CASE("newton fit reports a monotone likelihood instead of silently stalling") {
    // A perfectly separating covariate on a tiny scale needs an enormous
    // coefficient; the divergence guard should fire.
    std::vector<double> t = {1, 2, 3, 4, 5, 6};
    std::vector<int> s(6, 1);
    SurvivalDataset ds = make_ds(t, s, {{-0.01, -0.02, -0.03, -0.04, -0.05, -0.06}});
    CHECK_THROWS_AS(fit_cox_newton(ds, {0}), NumericError);
}

TEST_CASE("newton fit needs fewer covariates than events") {
    SurvivalDataset ds = make_ds({1, 2, 3}, {1, 1, 0}, {{1, 0, 1}, {0, 1, 0}});
    CHECK_THROWS_AS(fit_cox_newton(ds, {0, 1}), DataError);
}

TEST_CASE("one-covariate newton estimates equal the univariate screen report") {
    SimSpec spec;
    spec.n = 80;
    spec.p = 3;
    spec.signal_cols = {1};
    spec.effects = {0.9};
    SurvivalDataset ds = standardize(simulate_cox_data(spec, 51));
    auto [kept, report] = univariate_cox_screen(ds, 1.0);
    for (std::size_t j = 0; j < 3; ++j) {
        CoxFit fit = fit_cox_newton(ds, {static_cast<int>(j)});
        CHECK(report.rows[j].beta == doctest::Approx(fit.coef[static_cast<Eigen::Index>(j)])
                                         .epsilon(1e-12));
        CHECK(report.rows[j].se ==
              doctest::Approx(fit.se[static_cast<Eigen::Index>(j)]).epsilon(1e-12));
    }
}

TEST_CASE("breslow baseline at zero coefficients is the cumulated event-over-risk ratio") {
    SurvivalDataset ds = toy_dataset();
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    StepFunction H = breslow_baseline_eta(idx, Vector::Zero(5));
    CHECK(H(0.0) == 0.0);
    CHECK(H(4.0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(H(9.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(H(100.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(H.left_limit(4.0) == 0.0);
    CHECK(H.left_limit(9.0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("scaling every relative risk rescales the baseline increments inversely") {
    SimSpec spec;
    spec.n = 30;
    spec.p = 1;
    spec.signal_cols = {0};
    spec.effects = {0.5};
    SurvivalDataset ds = simulate_cox_data(spec, 20);
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    Vector eta = ds.covariates.col(0) * 0.5;
    StepFunction base = breslow_baseline_eta(idx, eta);
    const double logc = std::log(3.0);
    StepFunction scaled = breslow_baseline_eta(idx, eta.array() + logc);
    for (std::size_t k = 0; k < base.times.size(); ++k)
        CHECK(scaled.values[k] == doctest::Approx(base.values[k] / 3.0).epsilon(1e-12));
}

TEST_CASE("survival predictions are anchored at one and monotone") {
    SimSpec spec;
    spec.n = 120;
    spec.p = 2;
    spec.signal_cols = {0};
    spec.effects = {1.0};
    SurvivalDataset ds = standardize(simulate_cox_data(spec, 60));
    CoxFit fit = fit_cox_newton(ds, {0, 1});
    Vector x = ds.covariates.row(4).transpose();

    CHECK(predict_survival(fit, x, 0.0) == 1.0);
    double prev = 1.0;
    for (double t = 0.5; t < 12.0; t += 0.5) {
        const double s = predict_survival(fit, x, t);
        CHECK(s <= prev + 1e-15);
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        prev = s;
    }

    // Larger linear predictor lowers survival wherever hazard has accrued.
    Vector lo = x, hi = x;
    lo[0] = -1.5;
    hi[0] = 1.5;
    const double t_ref = ds.outcomes[10].time;
    if (fit.baseline(t_ref) > 0.0 && fit.coef[0] > 0.0)
        CHECK(predict_survival(fit, hi, t_ref) < predict_survival(fit, lo, t_ref));

    // eta = 0 reduces to the baseline survival.
    Vector zero = Vector::Zero(2);
    const double t_mid = 3.0;
    CHECK(predict_survival(fit, zero, t_mid) ==
          doctest::Approx(std::exp(-fit.baseline(t_mid))).epsilon(1e-12));

    CHECK_THROWS_AS(predict_survival(fit, Vector::Zero(3), 1.0), DataError);
    CHECK_THROWS_AS(predict_survival(fit, x, -1.0), DataError);
}

TEST_CASE("raw-scale predictions standardize the row first") {
    SimSpec spec;
    spec.n = 80;
    spec.p = 2;
    spec.signal_cols = {0};
    spec.effects = {0.7};
    SurvivalDataset raw = simulate_cox_data(spec, 61);
    SurvivalDataset ds = standardize(raw);
    CoxFit fit = fit_cox_newton(ds, {0, 1});
    Vector raw_row = raw.covariates.row(7).transpose();
    Vector std_row = standardize_row(ds, raw_row);
    CHECK(predict_survival_raw(fit, raw_row, 4.0) ==
          doctest::Approx(predict_survival(fit, std_row, 4.0)).epsilon(1e-12));
}

TEST_CASE("prognostic scores are plain inner products") {
    SurvivalDataset ds = standardize(toy_dataset());
    CoxFit fit = fit_cox_newton(ds, {0});
    Vector zero = Vector::Zero(1);
    CHECK(prognostic_score(fit, zero) == 0.0);
    Vector one(1);
    one << 1.0;
    CHECK(prognostic_score(fit, one) == doctest::Approx(fit.coef[0]).epsilon(1e-15));
    Vector wrong(2);
    CHECK_THROWS_AS(prognostic_score(fit, wrong), DataError);
}

TEST_CASE("rescaling a covariate column rescales its coefficient inversely") {
    SimSpec spec;
    spec.n = 150;
    spec.p = 1;
    spec.signal_cols = {0};
    spec.effects = {0.8};
    SurvivalDataset ds = simulate_cox_data(spec, 71);
    CoxFit base = fit_cox_newton(ds, {0});
    SurvivalDataset scaled = ds;
    scaled.covariates.col(0) *= 4.0;
    CoxFit rescaled = fit_cox_newton(scaled, {0});
    CHECK(rescaled.coef[0] == doctest::Approx(base.coef[0] / 4.0).epsilon(1e-7));
    CHECK(rescaled.loglik == doctest::Approx(base.loglik).epsilon(1e-10));
}

TEST_CASE("fits serialize to json with names, baseline, and scale metadata") {
    SurvivalDataset ds = standardize(toy_dataset());
    CoxFit fit = fit_cox_newton(ds, {0});
    auto doc = nlohmann::json::parse(cox_fit_to_json(fit));
    CHECK(doc["coefficients"].size() == 1);
    CHECK(doc["coefficients"][0]["name"] == "x1");
    CHECK(doc["coefficients"][0].contains("coefficient"));
    CHECK(doc["coefficients"][0].contains("coefficient_raw_scale"));
    CHECK(doc["baseline"]["times"].size() == doc["baseline"]["cumulative_hazard"].size());
    CHECK(doc["loglik"].is_number());
}
