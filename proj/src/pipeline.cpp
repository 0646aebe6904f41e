#include "survkit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "survkit/csv.hpp"
#include "survkit/rng.hpp"
#include "survkit/svg.hpp"

namespace survkit {

namespace {

// Sub-seed streams off the master seed; one place so runs stay reproducible
// when stages are added.
enum SeedStream : std::uint64_t {
    kSeedFolds = 1,
    kSeedBootPlan = 2,
    kSeedPec = 3,
    kSeedMcmc = 4,
    kSeedCalibration = 5,
};

void write_artifact(RunReport& report, const std::string& name, const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(report.config.out_dir);
    write_file((fs::path(report.config.out_dir) / name).string(), content);
    report.manifest.push_back({name, fnv1a64_hex(content), content.size()});
}

std::string dataset_to_csv(const SurvivalDataset& ds) {
    std::ostringstream os;
    const bool with_ids = !ds.ids.empty();
    if (with_ids) os << "id,";
    os << "time,status";
    for (const auto& f : ds.features) os << ',' << f.name;
    os << "\n";
    for (std::size_t i = 0; i < ds.n(); ++i) {
        if (with_ids) os << ds.ids[i] << ',';
        os << fmt_num(ds.outcomes[i].time) << ',' << ds.outcomes[i].status;
        for (std::size_t j = 0; j < ds.p(); ++j) os << ',' << fmt_num(ds.covariates(i, j));
        os << "\n";
    }
    return os.str();
}

std::string meta_to_csv(const SurvivalDataset& ds) {
    std::ostringstream os;
    os << "name,block,mandatory,center,scale\n";
    for (const auto& f : ds.features) {
        os << f.name << ',' << f.block << ',' << (f.mandatory ? 1 : 0) << ','
           << fmt_num(f.has_scale ? f.center : 0.0) << ',' << fmt_num(f.has_scale ? f.scale : 1.0)
           << "\n";
    }
    return os.str();
}

// Everything the validation stages need from a fitted model.
struct FittedModel {
    std::vector<int> selected;  // non-mandatory columns with signal
    bool bayes = false;
    CoxFit cox;                // penalized point fit
    PosteriorSummary summary;  // bayes only
    Vector coef;               // prediction coefficients (posterior mean for bayes)
    SurvivalModel predict;
    ModelFitter refit;  // used by the bootstrap error curves
};

CoxFit fit_cox_or_null(const SurvivalDataset& ds, const std::vector<int>& cols) {
    if (cols.empty()) {
        CoxFit fit;
        fit.coef = Vector::Zero(ds.p());
        fit.se = Vector::Zero(ds.p());
        fit.mandatory.assign(ds.p(), 0);
        fit.features = ds.features;
        fit.converged = true;
        RiskSetIndex idx = make_risk_index(ds.outcomes);
        fit.baseline = breslow_baseline_eta(idx, Vector::Zero(ds.n()));
        fit.loglik = partial_loglik(fit.coef, ds);
        return fit;
    }
    return fit_cox_newton(ds, cols);
}

SurvivalModel cox_model(const CoxFit& fit) {
    return [fit](const Vector& x, double t) { return predict_survival(fit, x, t); };
}

std::vector<int> nonzero_penalized(const CoxFit& fit) {
    std::vector<int> out;
    for (std::size_t j = 0; j < fit.features.size(); ++j) {
        if (!fit.features[j].mandatory && fit.coef[static_cast<Eigen::Index>(j)] != 0.0)
            out.push_back(static_cast<int>(j));
    }
    return out;
}

FittedModel fit_penalized(const SurvivalDataset& ds, const RunConfig& cfg, RunReport& report) {
    const double alpha = cfg.model == RunConfig::Model::enet ? cfg.alpha : 1.0;
    FittedModel m;
    PenaltySpec final_spec;

    if (cfg.model == RunConfig::Model::adaptive) {
        ResamplingPlan plan =
            make_cv_folds(ds.outcomes, cfg.folds, derive_seed(cfg.seed, kSeedFolds));
        for (const auto& w : plan.warnings) report.warnings.push_back(w);
        AdaptiveLassoResult ada = fit_adaptive_lasso(ds, plan, cfg.adaptive_gamma);
        m.cox = ada.fit;
        report.cv = ada.cv;
        report.has_cv = true;
        report.path = ada.cv.path;
        report.has_path = true;
        final_spec.lambda = ada.cv.lambda_star;
        final_spec.alpha = 1.0;
        final_spec.weights = ada.weights;
    } else if (cfg.lambda > 0.0) {
        final_spec.lambda = cfg.lambda;
        final_spec.alpha = alpha;
        final_spec.weights = PenaltySpec::default_weights(ds);
        m.cox = fit_enet(ds, final_spec);
        report.path = lambda_path(ds, alpha, cfg.n_lambda, cfg.lambda_ratio);
        report.has_path = true;
    } else {
        ResamplingPlan plan =
            make_cv_folds(ds.outcomes, cfg.folds, derive_seed(cfg.seed, kSeedFolds));
        for (const auto& w : plan.warnings) report.warnings.push_back(w);
        CvResult cv = cv_select_lambda(ds, alpha, plan, cfg.n_lambda, cfg.lambda_ratio);
        for (const auto& w : cv.warnings) report.warnings.push_back(w);
        final_spec.lambda = cv.lambda_star;
        final_spec.alpha = alpha;
        final_spec.weights = PenaltySpec::default_weights(ds);
        const Vector warm = cv.path.fits[static_cast<std::size_t>(cv.star_index)].coef;
        m.cox = fit_enet(ds, final_spec, &warm);
        report.cv = std::move(cv);
        report.has_cv = true;
        report.path = report.cv.path;
        report.has_path = true;
    }

    m.selected = nonzero_penalized(m.cox);
    m.coef = m.cox.coef;
    m.predict = cox_model(m.cox);
    // Bootstrap replicates refit at the tuned penalty rather than re-running
    // the full CV, which keeps B refits tractable.
    const CoxFit full_fit = m.cox;
    m.refit = [final_spec, full_fit](const SurvivalDataset& train, std::uint64_t) {
        PenaltySpec spec = final_spec;
        const Vector warm = full_fit.coef;
        CoxFit fit = fit_enet(train, spec, &warm);
        return cox_model(fit);
    };
    return m;
}

FittedModel fit_bayes(const SurvivalDataset& ds, const RunConfig& cfg, RunReport& report) {
    PriorSpec prior;
    switch (cfg.model) {
        case RunConfig::Model::bayes_laplace:
            prior.kind = PriorSpec::Kind::laplace;
            prior.laplace_rate = cfg.prior_rate;
            break;
        case RunConfig::Model::spike_slab:
            prior.kind = PriorSpec::Kind::spike_slab;
            prior.inclusion_prob = cfg.inclusion_prob;
            break;
        default:
            prior.kind = PriorSpec::Kind::horseshoe;
            break;
    }
    BaselineHazardPrior base = quantile_hazard_prior(ds.outcomes, cfg.baseline_intervals);
    const int burn = cfg.burnin >= 0 ? cfg.burnin : cfg.iterations / 2;
    PosteriorSamples samples =
        run_mcmc(ds, prior, base, cfg.iterations, burn, derive_seed(cfg.seed, kSeedMcmc));

    FittedModel m;
    m.bayes = true;
    m.summary = posterior_summary(samples, 0.95);
    m.coef = m.summary.mean;
    switch (prior.kind) {
        case PriorSpec::Kind::laplace: m.selected = select_by_ci(m.summary); break;
        case PriorSpec::Kind::spike_slab: m.selected = median_probability_model(m.summary); break;
        case PriorSpec::Kind::horseshoe: m.selected = horseshoe_select(m.summary); break;
    }

    // Plug-in predictions from posterior means; the cumulative hazard grows
    // linearly inside each interval.
    Vector g_mean(samples.hazard.cols());
    for (Eigen::Index j = 0; j < g_mean.size(); ++j) g_mean[j] = samples.hazard.col(j).mean();
    const std::vector<double> cuts = samples.interval_cuts;
    const Vector beta = m.coef;
    m.predict = [cuts, g_mean, beta](const Vector& x, double t) {
        double h0 = 0.0;
        for (Eigen::Index j = 0; j + 1 < static_cast<Eigen::Index>(cuts.size()); ++j) {
            const double lo = cuts[static_cast<std::size_t>(j)];
            const double hi = cuts[static_cast<std::size_t>(j) + 1];
            if (t <= lo) break;
            h0 += g_mean[j] * (std::min(t, hi) - lo) / (hi - lo);
        }
        return std::exp(-h0 * std::exp(x.dot(beta)));
    };

    // Refitting the chain per bootstrap replicate is out of budget; the error
    // curves refit an unpenalized model on the selected support instead.
    std::vector<int> support = m.selected;
    for (int c : ds.mandatory_columns()) support.push_back(c);
    std::sort(support.begin(), support.end());
    m.refit = [support](const SurvivalDataset& train, std::uint64_t) {
        return cox_model(fit_cox_or_null(train, support));
    };

    write_artifact(report, "chain.csv", chain_to_csv(samples));
    write_artifact(report, "model.json", summary_to_json(m.summary));
    return m;
}

std::vector<double> model_scores(const SurvivalDataset& ds, const Vector& coef) {
    Vector eta = ds.covariates * coef;
    return std::vector<double>(eta.data(), eta.data() + eta.size());
}

std::vector<double> brier_grid(const SurvivalDataset& ds, double tau) {
    std::set<double> pts;
    for (const auto& o : ds.outcomes) {
        if (o.status == 1 && o.time <= tau) pts.insert(o.time);
    }
    std::vector<double> grid;
    grid.push_back(0.0);
    for (double t : pts) grid.push_back(t);
    if (grid.back() < tau) grid.push_back(tau);
    return grid;
}

void note_skip(RunReport& report, const std::string& what, const std::exception& e) {
    report.warnings.push_back(what + " skipped: " + e.what());
}

nlohmann::ordered_json concordance_json(const ConcordanceResult& c) {
    nlohmann::ordered_json j;
    j["c_index"] = c.c_index;
    j["comparable_pairs"] = c.comparable_pairs;
    return j;
}

void validate_stage(const SurvivalDataset& ds, const RunConfig& cfg, FittedModel& model,
                    RunReport& report, nlohmann::ordered_json& val) {
    const std::vector<double> scores = model_scores(ds, model.coef);
    const CensoringModel G = censoring_km(ds.outcomes);
    const double tau = cfg.tau > 0.0 ? cfg.tau : cfg.horizons.back();
    val["tau"] = tau;

    try {
        val["harrell"] = concordance_json(harrell_c(scores, ds.outcomes));
    } catch (const std::exception& e) {
        note_skip(report, "Harrell concordance", e);
    }
    try {
        val["uno"] = concordance_json(uno_c(scores, ds.outcomes, G, tau));
    } catch (const std::exception& e) {
        note_skip(report, "Uno concordance", e);
    }
    try {
        std::vector<SurvCurve> curves(ds.n());
        for (std::size_t i = 0; i < ds.n(); ++i) {
            const Vector x = ds.covariates.row(i).transpose();
            curves[i] = [x, &model](double t) { return model.predict(x, t); };
        }
        val["antolini"] = concordance_json(antolini_c(curves, ds.outcomes));
    } catch (const std::exception& e) {
        note_skip(report, "Antolini concordance", e);
    }

    nlohmann::ordered_json horizons = nlohmann::ordered_json::array();
    for (double h : cfg.horizons) {
        nlohmann::ordered_json row;
        row["horizon"] = h;
        try {
            row["auc"] = time_dependent_auc(scores, ds.outcomes, h, G);
            if (!report.has_roc) {
                report.roc = roc_points(scores, ds.outcomes, h, G);
                report.roc_horizon = h;
                report.has_roc = true;
            }
        } catch (const std::exception& e) {
            note_skip(report, "AUC at horizon " + fmt_num(h), e);
        }
        try {
            std::vector<double> surv(ds.n());
            for (std::size_t i = 0; i < ds.n(); ++i)
                surv[i] = model.predict(ds.covariates.row(i).transpose(), h);
            row["brier"] = brier_score(surv, ds.outcomes, h, G);
        } catch (const std::exception& e) {
            note_skip(report, "Brier score at horizon " + fmt_num(h), e);
        }
        horizons.push_back(std::move(row));
    }
    val["horizons"] = std::move(horizons);

    const std::vector<double> grid = brier_grid(ds, tau);
    try {
        BrierCurve apparent;
        apparent.times = grid;
        for (double t : grid) {
            std::vector<double> surv(ds.n());
            for (std::size_t i = 0; i < ds.n(); ++i)
                surv[i] = model.predict(ds.covariates.row(i).transpose(), t);
            apparent.values.push_back(brier_score(surv, ds.outcomes, t, G));
        }
        val["integrated_brier"] = integrated_brier(apparent, tau);
    } catch (const std::exception& e) {
        note_skip(report, "integrated Brier score", e);
    }

    if (cfg.bootstrap >= 2) {
        try {
            ResamplingPlan plan = bootstrap_plan(ds.n(), cfg.bootstrap,
                                                 derive_seed(cfg.seed, kSeedBootPlan));
            for (const auto& w : plan.warnings) report.warnings.push_back(w);
            report.pec = prediction_error_curve(ds, model.refit, plan, grid,
                                                derive_seed(cfg.seed, kSeedPec));
            report.has_pec = true;
            for (const auto& w : report.pec.warnings) report.warnings.push_back(w);
            nlohmann::ordered_json pj;
            pj["replicates_used"] = report.pec.replicates_used;
            pj["replicates_failed"] = report.pec.replicates_failed;
            val["prediction_error"] = std::move(pj);
        } catch (const std::exception& e) {
            note_skip(report, "prediction error curves", e);
        }
    } else {
        report.warnings.push_back("prediction error curves skipped: bootstrap < 2");
    }

    try {
        LogRankResult lr = risk_group_logrank(scores, ds.outcomes, {0.5});
        nlohmann::ordered_json rj;
        rj["statistic"] = lr.statistic;
        rj["df"] = lr.df;
        rj["p_value"] = lr.p_value;
        val["risk_groups"] = std::move(rj);
    } catch (const std::exception& e) {
        note_skip(report, "risk-group log-rank test", e);
    }
}

void calibrate_stage(const SurvivalDataset& ds, const RunConfig& cfg, FittedModel& model,
                     RunReport& report, nlohmann::ordered_json& cal_array) {
    for (double h : cfg.horizons) {
        try {
            std::vector<double> pred(ds.n());
            for (std::size_t i = 0; i < ds.n(); ++i)
                pred[i] = model.predict(ds.covariates.row(i).transpose(), h);
            CalibrationResult cal = calibration_fit(pred, ds.outcomes, cfg.cal_groups, h, 200,
                                                    derive_seed(cfg.seed, kSeedCalibration));
            nlohmann::ordered_json row;
            row["horizon"] = h;
            row["groups"] = cal.groups;
            row["slope"] = cal.slope;
            row["intercept"] = cal.intercept;
            cal_array.push_back(std::move(row));
            report.calibration = std::move(cal);
            report.calibration_horizon = h;
            report.has_calibration = true;
        } catch (const std::exception& e) {
            note_skip(report, "calibration at horizon " + fmt_num(h), e);
        }
    }
}

nlohmann::ordered_json selected_json(const SurvivalDataset& ds, const FittedModel& model) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    auto add = [&](int col) {
        const auto j = static_cast<std::size_t>(col);
        const auto k = static_cast<Eigen::Index>(col);
        nlohmann::ordered_json row;
        row["name"] = ds.features[j].name;
        row["block"] = ds.features[j].block;
        row["mandatory"] = ds.features[j].mandatory;
        row["coefficient"] = model.coef[k];
        if (ds.features[j].has_scale && ds.features[j].scale > 0.0)
            row["coefficient_raw_scale"] = model.coef[k] / ds.features[j].scale;
        if (model.bayes) {
            row["lower"] = model.summary.lower[k];
            row["upper"] = model.summary.upper[k];
        }
        arr.push_back(std::move(row));
    };
    for (int c : ds.mandatory_columns()) add(c);
    for (int c : model.selected) add(c);
    return arr;
}

void finalize_report(RunReport& report) {
    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
    for (const auto& e : report.manifest) {
        nlohmann::ordered_json row;
        row["file"] = e.file;
        row["hash"] = e.hash;
        row["bytes"] = e.bytes;
        manifest.push_back(std::move(row));
    }
    report.document["warnings"] = report.warnings;
    report.document["failure_stage"] =
        report.failure_stage.empty() ? nlohmann::ordered_json(nullptr)
                                     : nlohmann::ordered_json(report.failure_stage);
    report.document["manifest"] = std::move(manifest);
    const std::string text = report.document.dump(2) + "\n";
    namespace fs = std::filesystem;
    fs::create_directories(report.config.out_dir);
    write_file((fs::path(report.config.out_dir) / "report.json").string(), text);

    // The manifest file covers every emitted artifact including the report;
    // it cannot list itself.
    std::ostringstream mf;
    for (const auto& e : report.manifest) mf << e.hash << "  " << e.file << "\n";
    mf << fnv1a64_hex(text) << "  report.json\n";
    write_file((fs::path(report.config.out_dir) / "manifest.txt").string(), mf.str());
}

}  // namespace

std::vector<std::string> emit_plots(RunReport& report, const std::vector<std::string>& kinds) {
    std::vector<std::string> written;
    auto emit = [&](const std::string& base, const std::string& csv, const std::string& svg) {
        write_artifact(report, base + ".csv", csv);
        write_artifact(report, base + ".svg", svg);
        written.push_back(base + ".csv");
        written.push_back(base + ".svg");
    };
    for (const auto& kind : kinds) {
        if (kind == "km") {
            if (!report.has_km) throw DataError("no survival curve available for the km plot");
            emit("km", km_to_csv(report.km), svg_km_plot(report.km));
        } else if (kind == "path") {
            if (!report.has_path)
                throw DataError("no regularization path available for the path plot");
            emit("path", path_to_csv(report.path, report.path.fits.front().features),
                 svg_path_plot(report.path));
            if (report.has_cv) write_artifact(report, "cv.csv", cv_curve_to_csv(report.cv.path));
        } else if (kind == "pec") {
            if (!report.has_pec)
                throw DataError("no prediction error curves available for the pec plot");
            emit("pec", pec_to_csv(report.pec), svg_pec_plot(report.pec));
        } else if (kind == "roc") {
            if (!report.has_roc) throw DataError("no ROC data available for the roc plot");
            emit("roc", roc_to_csv(report.roc),
                 svg_roc_plot(report.roc, "Time-dependent ROC at t = " + fmt_num(report.roc_horizon)));
        } else if (kind == "calibration") {
            if (!report.has_calibration)
                throw DataError("no calibration data available for the calibration plot");
            emit("calibration", calibration_to_csv(report.calibration),
                 svg_calibration_plot(report.calibration,
                                      "Calibration at t = " + fmt_num(report.calibration_horizon)));
        } else {
            throw ConfigError("unknown plot kind '" + kind + "'");
        }
    }
    return written;
}

RunReport run_pipeline(const RunConfig& config, Stage upto, const std::vector<std::string>* kinds) {
    config.validate();
    RunReport report;
    report.config = config;
    report.document["tool"] = {{"name", "survkit"}, {"version", kVersion}};
    report.document["provenance"] = {{"seed", config.seed},
                                     {"model", model_name(config.model)},
                                     {"config", config_to_string(config)}};

    std::string stage = "load";
    try {
        SurvivalDataset ds = load_dataset(config.input, config.meta);
        const std::size_t p_raw = ds.p();

        stage = "preprocess";
        SurvivalDataset filtered = filter_missingness(ds, config.max_missing);
        std::vector<std::string> dropped;
        {
            std::set<std::string> kept;
            for (const auto& f : filtered.features) kept.insert(f.name);
            for (const auto& f : ds.features) {
                if (!kept.count(f.name)) dropped.push_back(f.name);
            }
        }
        const bool imputed = filtered.has_missing();
        if (imputed) filtered = impute_knn(filtered, config.impute_k);
        SurvivalDataset work = standardize(filtered);
        report.km = km_estimate(work.outcomes);
        report.has_km = true;

        stage = "preselect";
        nlohmann::ordered_json prep;
        prep["dropped_missing"] = dropped;
        prep["imputed"] = imputed;
        if (config.preselect == RunConfig::Preselect::variance) {
            work = variance_preselect(work, config.variance_fraction);
            prep["preselect"] = {{"mode", "variance"}, {"kept", work.p()}};
        } else if (config.preselect == RunConfig::Preselect::screen) {
            work = univariate_cox_screen(work, config.screen_alpha).first;
            prep["preselect"] = {{"mode", "screen"}, {"kept", work.p()}};
        } else {
            prep["preselect"] = {{"mode", "none"}, {"kept", work.p()}};
        }
        report.document["preprocess"] = std::move(prep);

        nlohmann::ordered_json data;
        data["n"] = work.n();
        data["p_raw"] = p_raw;
        data["p_used"] = work.p();
        data["events"] = work.n_events();
        const auto med = median_survival(report.km);
        data["km_median"] = med ? nlohmann::ordered_json(*med) : nlohmann::ordered_json(nullptr);
        report.document["data"] = std::move(data);

        write_artifact(report, "processed.csv", dataset_to_csv(work));
        write_artifact(report, "processed_meta.csv", meta_to_csv(work));
        if (upto < Stage::fit) {
            if (upto >= Stage::preprocess) {
                std::vector<std::string> k{"km"};
                emit_plots(report, k);
            }
            finalize_report(report);
            return report;
        }

        stage = "fit";
        FittedModel model = config.bayesian() ? fit_bayes(work, config, report)
                                              : fit_penalized(work, config, report);
        nlohmann::ordered_json mj;
        mj["kind"] = model_name(config.model);
        if (report.has_cv) {
            mj["lambda_star"] = report.cv.lambda_star;
            mj["lambda_1se"] = report.cv.lambda_1se;
        } else if (!model.bayes) {
            mj["lambda_star"] = config.lambda;
        }
        if (!model.bayes) {
            mj["converged"] = model.cox.converged;
            write_artifact(report, "model.json", cox_fit_to_json(model.cox));
        }
        mj["selected"] = selected_json(work, model);
        report.document["model"] = std::move(mj);
        if (upto < Stage::validate) {
            std::vector<std::string> k{"km"};
            if (report.has_path) k.push_back("path");
            emit_plots(report, k);
            finalize_report(report);
            return report;
        }

        stage = "validate";
        nlohmann::ordered_json val;
        validate_stage(work, config, model, report, val);
        report.document["validation"] = std::move(val);

        stage = "calibrate";
        nlohmann::ordered_json cal = nlohmann::ordered_json::array();
        calibrate_stage(work, config, model, report, cal);
        report.document["calibration"] = std::move(cal);
        if (upto < Stage::emit) {
            std::vector<std::string> k{"km"};
            if (report.has_path) k.push_back("path");
            emit_plots(report, k);
            finalize_report(report);
            return report;
        }

        stage = "emit";
        if (kinds) {
            emit_plots(report, *kinds);
        } else {
            std::vector<std::string> avail{"km"};
            if (report.has_path) avail.push_back("path");
            if (report.has_pec) avail.push_back("pec");
            if (report.has_roc) avail.push_back("roc");
            if (report.has_calibration) avail.push_back("calibration");
            emit_plots(report, avail);
        }
        finalize_report(report);
        return report;
    } catch (const std::exception&) {
        report.failure_stage = stage;
        try {
            finalize_report(report);
        } catch (const std::exception&) {
            // Reporting must not mask the original failure.
        }
        throw;
    }
}

}  // namespace survkit
