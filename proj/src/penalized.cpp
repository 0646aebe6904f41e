#include "survkit/penalized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "survkit/parallel.hpp"
#include "survkit/rng.hpp"

namespace survkit {

Vector PenaltySpec::default_weights(const SurvivalDataset& ds) {
    Vector w = Vector::Ones(static_cast<Eigen::Index>(ds.p()));
    for (std::size_t j = 0; j < ds.p(); ++j)
        if (ds.features[j].mandatory) w[static_cast<Eigen::Index>(j)] = 0.0;
    return w;
}

void PenaltySpec::validate(const SurvivalDataset& ds) const {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("elastic-net alpha must lie in [0,1]");
    if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
    if (static_cast<std::size_t>(weights.size()) != ds.p())
        throw ConfigError("penalty weight length must match feature count");
    for (std::size_t j = 0; j < ds.p(); ++j) {
        double w = weights[static_cast<Eigen::Index>(j)];
        if (w < 0.0) throw ConfigError("penalty weights must be non-negative");
        if (ds.features[j].mandatory && w != 0.0)
            throw ConfigError("mandatory features must carry zero penalty weight");
    }
}

namespace {

double soft_threshold(double z, double g) {
    if (z > g) return z - g;
    if (z < -g) return z + g;
    return 0.0;
}

double penalty_value(const PenaltySpec& spec, const Vector& coef) {
    double pen = 0.0;
    for (Eigen::Index j = 0; j < coef.size(); ++j) {
        double w = spec.weights[j];
        if (w == 0.0) continue;
        pen += w * (spec.alpha * std::fabs(coef[j]) +
                    0.5 * (1.0 - spec.alpha) * coef[j] * coef[j]);
    }
    return spec.lambda * pen;
}

}  // namespace

CoxFit fit_enet(const SurvivalDataset& ds, const PenaltySpec& spec, const Vector* warm,
                const EnetOptions& opt, EnetDiagnostics* diag) {
    if (ds.has_missing()) throw DataError("fit_enet requires a fully imputed dataset");
    spec.validate(ds);
    if (ds.n_events() == 0) throw DataError("fit_enet requires at least one event");

    const Eigen::Index n = ds.covariates.rows();
    const Eigen::Index p = ds.covariates.cols();
    const Matrix& X = ds.covariates;
    const double n_d = static_cast<double>(n);
    RiskSetIndex idx = make_risk_index(ds.outcomes);

    Vector beta = warm && warm->size() == p ? *warm : Vector::Zero(p);
    Vector eta = X * beta;
    double obj_prev = -std::numeric_limits<double>::infinity();
    Vector s(n), w(n);
    Vector wr(n);  // w_i * r_i with r the working residual in the eta offset
    std::vector<double> xwx(static_cast<std::size_t>(p));
    std::vector<char> active(static_cast<std::size_t>(p), 1);

    if (diag) {
        diag->objective_trace.clear();
        diag->outer_iterations = 0;
    }

    bool converged = false;
    int outer = 0;
    double prev_move = 1.0;
    for (; outer < opt.max_outer; ++outer) {
        // Early quadratic subproblems need only as much precision as the
        // outer step they feed; the factor keeps the final round at full
        // tolerance so the KKT bound holds at the returned solution.
        const double inner_tol = std::max(opt.tol, 0.02 * prev_move);
        irls_terms(idx, eta, s, w);
        // Working residual r_i starts at s_i / w_i (zero where w_i = 0), so
        // wr = s at the expansion point.
        wr = s;
        for (Eigen::Index j = 0; j < p; ++j)
            xwx[static_cast<std::size_t>(j)] = (w.array() * X.col(j).array().square()).sum();

        Vector beta_outer = beta;
        // Cyclic coordinate descent on the quadratic expansion; full sweeps
        // alternate with active-set sweeps until nothing moves.
        bool full_sweep = true;
        for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
            double max_change = 0.0;
            for (Eigen::Index j = 0; j < p; ++j) {
                if (!full_sweep && !active[static_cast<std::size_t>(j)]) continue;
                double v = 2.0 * xwx[static_cast<std::size_t>(j)] / n_d;
                if (v <= 0.0) continue;
                double u = 2.0 * X.col(j).dot(wr) / n_d + v * beta[j];
                double wj = spec.weights[j];
                double b_new;
                if (wj == 0.0) {
                    b_new = u / v;
                } else {
                    b_new = soft_threshold(u, spec.lambda * spec.alpha * wj) /
                            (v + spec.lambda * (1.0 - spec.alpha) * wj);
                }
                double d = b_new - beta[j];
                if (d != 0.0) {
                    beta[j] = b_new;
                    wr -= d * (w.array() * X.col(j).array()).matrix();
                    double ad = std::fabs(d);
                    if (ad > max_change) max_change = ad;
                }
                active[static_cast<std::size_t>(j)] = beta[j] != 0.0 || wj == 0.0;
            }
            if (max_change < inner_tol) {
                if (full_sweep) break;  // a clean full pass moved nothing
                full_sweep = true;
                continue;
            }
            full_sweep = false;
        }
        if (beta.cwiseAbs().maxCoeff() > opt.coef_bound)
            throw NumericError("elastic net diverged: coefficient beyond bound");

        eta = X * beta;
        double obj = 2.0 * partial_loglik_eta(idx, eta) / n_d - penalty_value(spec, beta);
        // The quadratic model can overshoot; fall back halfway until the true
        // objective is non-decreasing.
        int halvings = 0;
        while (obj + 1e-12 < obj_prev && halvings < 12) {
            beta = 0.5 * (beta + beta_outer);
            eta = X * beta;
            obj = 2.0 * partial_loglik_eta(idx, eta) / n_d - penalty_value(spec, beta);
            ++halvings;
        }
        if (diag) diag->objective_trace.push_back(obj);
        obj_prev = obj;

        double max_move = (beta - beta_outer).cwiseAbs().maxCoeff();
        prev_move = max_move;
        if (max_move < opt.tol) {
            converged = true;
            ++outer;
            break;
        }
    }

    CoxFit fit;
    fit.coef = beta;
    fit.se = Vector::Zero(p);
    fit.mandatory.resize(ds.p());
    for (std::size_t j = 0; j < ds.p(); ++j) fit.mandatory[j] = ds.features[j].mandatory ? 1 : 0;
    fit.loglik = partial_loglik_eta(idx, eta);
    fit.converged = converged;
    fit.iterations = outer;
    fit.features = ds.features;
    fit.baseline = breslow_baseline_eta(idx, eta);
    if (diag) diag->outer_iterations = outer;
    return fit;
}

double lambda_max(const SurvivalDataset& ds, double alpha, const Vector& weights,
                  const EnetOptions& opt) {
    std::vector<int> mand = ds.mandatory_columns();
    Vector eta0 = Vector::Zero(ds.covariates.rows());
    if (!mand.empty()) {
        CoxFit base = fit_cox_newton(ds, mand);
        eta0 = ds.covariates * base.coef;
    }
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    // Gradient of (2/n) loglik at the profiled start.
    Vector s(ds.covariates.rows()), w(ds.covariates.rows());
    irls_terms(idx, eta0, s, w);
    double n_d = static_cast<double>(ds.n());
    double best = 0.0;
    double a = std::max(alpha, opt.alpha_floor);
    for (std::size_t j = 0; j < ds.p(); ++j) {
        Eigen::Index jj = static_cast<Eigen::Index>(j);
        if (weights[jj] <= 0.0) continue;
        double g = 2.0 * ds.covariates.col(jj).dot(s) / n_d;
        best = std::max(best, std::fabs(g) / (a * weights[jj]));
    }
    if (best <= 0.0) return 1.0;  // degenerate data: any positive grid works
    // The exact supremum leaves the zero solution only marginally optimal:
    // the solver re-profiles mandatory coordinates to its own tolerance, and
    // the argmax feature can then escape the soft threshold by ~1e-9.  A one
    // part in 1e6 margin keeps fits at lambda_max exactly sparse without
    // moving the grid at any tolerance used downstream.
    return best * (1.0 + 1e-6);
}

double kkt_max_violation(const SurvivalDataset& ds, const Vector& coef, const PenaltySpec& spec) {
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    Vector eta = ds.covariates * coef;
    Vector s(ds.covariates.rows()), w(ds.covariates.rows());
    irls_terms(idx, eta, s, w);
    double n_d = static_cast<double>(ds.n());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < coef.size(); ++j) {
        double g = 2.0 * ds.covariates.col(j).dot(s) / n_d;
        double wj = spec.weights[j];
        double viol;
        if (wj == 0.0) {
            viol = std::fabs(g);
        } else if (coef[j] == 0.0) {
            viol = std::fabs(g) - spec.lambda * spec.alpha * wj;
        } else {
            viol = std::fabs(g - spec.lambda * (1.0 - spec.alpha) * wj * coef[j] -
                             (coef[j] > 0.0 ? 1.0 : -1.0) * spec.lambda * spec.alpha * wj);
        }
        worst = std::max(worst, viol);
    }
    return worst;
}

LambdaPath lambda_path(const SurvivalDataset& ds, double alpha, int n_lambda, double ratio,
                       const Vector* weights, const EnetOptions& opt) {
    if (n_lambda < 1) throw ConfigError("lambda_path: n_lambda must be positive");
    if (ratio <= 0.0 || ratio > 1.0) throw ConfigError("lambda_path: ratio must lie in (0,1]");
    Vector w = weights ? *weights : PenaltySpec::default_weights(ds);

    LambdaPath path;
    path.alpha = alpha;
    double lmax = lambda_max(ds, alpha, w, opt);
    path.lambdas.resize(static_cast<std::size_t>(n_lambda));
    for (int i = 0; i < n_lambda; ++i)
        path.lambdas[static_cast<std::size_t>(i)] =
            n_lambda == 1 ? lmax : lmax * std::pow(ratio, static_cast<double>(i) / (n_lambda - 1));

    path.fits.reserve(path.lambdas.size());
    path.nonzero.reserve(path.lambdas.size());
    Vector warm = Vector::Zero(static_cast<Eigen::Index>(ds.p()));
    for (double lambda : path.lambdas) {
        PenaltySpec spec{lambda, alpha, w};
        CoxFit fit = fit_enet(ds, spec, &warm, opt);
        warm = fit.coef;
        int nz = 0;
        for (std::size_t j = 0; j < ds.p(); ++j)
            if (!ds.features[j].mandatory && fit.coef[static_cast<Eigen::Index>(j)] != 0.0) ++nz;
        fit.baseline = StepFunction{};  // recomputed on demand for the pick
        path.fits.push_back(std::move(fit));
        path.nonzero.push_back(nz);
    }
    return path;
}

namespace {

CvResult cv_select_impl(const SurvivalDataset& ds, double alpha, const ResamplingPlan& plan,
                        int n_lambda, double ratio, const Vector* weights,
                        const EnetOptions& opt, bool threaded) {
    if (plan.kind != ResamplingPlan::Kind::cv_folds)
        throw ConfigError("cv_select_lambda needs a cv-folds plan");
    CvResult res;
    res.path = lambda_path(ds, alpha, n_lambda, ratio, weights, opt);
    const std::size_t L = res.path.lambdas.size();
    const std::size_t K = plan.replicates();
    Vector w = weights ? *weights : PenaltySpec::default_weights(ds);

    RiskSetIndex idx_full = make_risk_index(ds.outcomes);
    // Per-fold contribution matrix, filled by index so threading cannot
    // reorder the reduction.
    std::vector<std::vector<double>> cvpl(K, std::vector<double>(L, 0.0));
    std::vector<char> fold_ok(K, 0);

    auto one_fold = [&](std::size_t f) {
        SurvivalDataset train = subset_rows(ds, plan.in_sample[f]);
        if (train.n_events() == 0) return;
        RiskSetIndex idx_train = make_risk_index(train.outcomes);
        Vector warm = Vector::Zero(static_cast<Eigen::Index>(ds.p()));
        for (std::size_t l = 0; l < L; ++l) {
            PenaltySpec spec{res.path.lambdas[l], alpha, w};
            CoxFit fit = fit_enet(train, spec, &warm, opt);
            warm = fit.coef;
            double ll_train = fit.loglik;
            double ll_full = partial_loglik_eta(idx_full, ds.covariates * fit.coef);
            cvpl[f][l] = ll_full - ll_train;
        }
        fold_ok[f] = 1;
    };
    if (threaded)
        parallel_for(K, one_fold);
    else
        serial_for(K, one_fold);

    std::size_t used = 0;
    for (std::size_t f = 0; f < K; ++f) {
        if (fold_ok[f])
            ++used;
        else
            res.warnings.push_back("fold " + std::to_string(f) + " skipped: no events in training split");
    }
    if (used == 0) throw DataError("cross-validation failed: every training fold lacked events");

    res.path.cv_mean.resize(L);
    res.path.cv_se.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<double> vals;
        vals.reserve(used);
        for (std::size_t f = 0; f < K; ++f)
            if (fold_ok[f]) vals.push_back(cvpl[f][l]);
        double mean = pairwise_sum(vals) / static_cast<double>(used);
        double sd = 0.0;
        if (used > 1) {
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            sd = std::sqrt(ss / (static_cast<double>(used) - 1.0));
        }
        res.path.cv_mean[l] = mean;
        res.path.cv_se[l] = sd / std::sqrt(static_cast<double>(used));
    }

    std::size_t star = 0;
    for (std::size_t l = 1; l < L; ++l)
        if (res.path.cv_mean[l] > res.path.cv_mean[star]) star = l;
    res.star_index = static_cast<int>(star);
    res.lambda_star = res.path.lambdas[star];

    double floor_val = res.path.cv_mean[star] - res.path.cv_se[star];
    std::size_t one_se = star;
    for (std::size_t l = 0; l <= star; ++l) {
        if (res.path.cv_mean[l] >= floor_val) {
            one_se = l;
            break;
        }
    }
    res.one_se_index = static_cast<int>(one_se);
    res.lambda_1se = res.path.lambdas[one_se];
    return res;
}

}  // namespace

CvResult cv_select_lambda(const SurvivalDataset& ds, double alpha, const ResamplingPlan& plan,
                          int n_lambda, double ratio, const Vector* weights,
                          const EnetOptions& opt) {
    return cv_select_impl(ds, alpha, plan, n_lambda, ratio, weights, opt, true);
}

CvResult cv_select_lambda_serial(const SurvivalDataset& ds, double alpha,
                                 const ResamplingPlan& plan, int n_lambda, double ratio,
                                 const Vector* weights, const EnetOptions& opt) {
    return cv_select_impl(ds, alpha, plan, n_lambda, ratio, weights, opt, false);
}

AdaptiveLassoResult fit_adaptive_lasso(const SurvivalDataset& ds, const ResamplingPlan& plan,
                                       double gamma, const EnetOptions& opt) {
    if (gamma <= 0.0) throw ConfigError("adaptive lasso gamma must be positive");
    AdaptiveLassoResult out;

    // Stage 1: ridge initial estimator tuned by CV.
    CvResult ridge = cv_select_lambda(ds, 0.0, plan, 100, 0.01, nullptr, opt);
    out.init_coef = ridge.path.fits[static_cast<std::size_t>(ridge.star_index)].coef;

    bool any_nonzero = false;
    for (std::size_t j = 0; j < ds.p(); ++j)
        if (!ds.features[j].mandatory && out.init_coef[static_cast<Eigen::Index>(j)] != 0.0)
            any_nonzero = true;
    if (!any_nonzero)
        throw NumericError("adaptive lasso: ridge initial estimates are all zero");

    out.weights = Vector::Zero(static_cast<Eigen::Index>(ds.p()));
    for (std::size_t j = 0; j < ds.p(); ++j) {
        Eigen::Index jj = static_cast<Eigen::Index>(j);
        if (ds.features[j].mandatory) continue;
        double denom = std::pow(std::fabs(out.init_coef[jj]), gamma);
        out.weights[jj] = denom > 0.0 ? std::min(1.0 / denom, 1e6) : 1e6;
    }

    // Stage 2: weighted lasso tuned by CV on the same plan.
    out.cv = cv_select_lambda(ds, 1.0, plan, 100, 0.01, &out.weights, opt);
    PenaltySpec spec{out.cv.lambda_star, 1.0, out.weights};
    out.fit = fit_enet(ds, spec, nullptr, opt);
    return out;
}

namespace {

StabilityReport stability_impl(const SurvivalDataset& ds, double alpha, int B, int q,
                               double pi_thr, std::uint64_t seed, const EnetOptions& opt,
                               bool threaded) {
    std::vector<int> penalized = ds.penalized_columns();
    if (q <= 0) throw ConfigError("stability_selection: q must be positive");
    if (static_cast<std::size_t>(q) >= penalized.size())
        throw ConfigError("stability_selection: q must be smaller than the penalized feature count");
    if (pi_thr <= 0.5 || pi_thr > 1.0)
        throw ConfigError("stability_selection: pi_thr must lie in (0.5, 1]");
    if (B < 1) throw ConfigError("stability_selection: B must be positive");

    const std::size_t n = ds.n();
    const std::size_t half = n / 2;
    if (half < 2) throw DataError("stability_selection: sample too small to subsample");

    std::vector<std::vector<char>> hits(static_cast<std::size_t>(B),
                                        std::vector<char>(ds.p(), 0));
    auto one = [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        // Half subsample without replacement: partial Fisher-Yates.
        std::vector<int> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < half; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(n - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<int> rows(pool.begin(), pool.begin() + static_cast<long>(half));
        std::sort(rows.begin(), rows.end());
        SurvivalDataset sub = subset_rows(ds, rows);
        if (sub.n_events() == 0) return;

        LambdaPath path;
        try {
            path = lambda_path(sub, alpha, 100, 0.01, nullptr, opt);
        } catch (const std::exception&) {
            return;  // degenerate subsample; contributes no selections
        }
        for (std::size_t l = 0; l < path.lambdas.size(); ++l) {
            if (path.nonzero[l] >= q || l + 1 == path.lambdas.size()) {
                const Vector& c = path.fits[l].coef;
                for (int j : penalized)
                    if (c[j] != 0.0) hits[b][static_cast<std::size_t>(j)] = 1;
                break;
            }
        }
    };
    if (threaded)
        parallel_for(static_cast<std::size_t>(B), one);
    else
        serial_for(static_cast<std::size_t>(B), one);

    StabilityReport report;
    report.threshold = pi_thr;
    for (std::size_t j = 0; j < ds.p(); ++j) {
        report.names.push_back(ds.features[j].name);
        if (ds.features[j].mandatory) {
            report.frequency.push_back(1.0);  // always in the model by construction
            continue;
        }
        int count = 0;
        for (int b = 0; b < B; ++b) count += hits[static_cast<std::size_t>(b)][j];
        report.frequency.push_back(static_cast<double>(count) / static_cast<double>(B));
    }
    for (std::size_t j = 0; j < ds.p(); ++j)
        if (!ds.features[j].mandatory && report.frequency[j] >= pi_thr)
            report.stable_set.push_back(static_cast<int>(j));
    return report;
}

}  // namespace

StabilityReport stability_selection(const SurvivalDataset& ds, double alpha, int B, int q,
                                    double pi_thr, std::uint64_t seed, const EnetOptions& opt) {
    return stability_impl(ds, alpha, B, q, pi_thr, seed, opt, true);
}

StabilityReport stability_selection_serial(const SurvivalDataset& ds, double alpha, int B, int q,
                                           double pi_thr, std::uint64_t seed,
                                           const EnetOptions& opt) {
    return stability_impl(ds, alpha, B, q, pi_thr, seed, opt, false);
}

StabilityReport selection_overlap(const std::vector<CoxFit>& fits) {
    if (fits.size() < 2) throw ConfigError("selection_overlap needs at least two fits");
    const std::size_t p = fits.front().p();
    for (const auto& f : fits)
        if (f.p() != p) throw DataError("selection_overlap: fits disagree on feature count");

    StabilityReport report;
    report.threshold = 1.0;
    for (std::size_t j = 0; j < p; ++j) {
        report.names.push_back(fits.front().features[j].name);
        int count = 0;
        for (const auto& f : fits)
            if (f.coef[static_cast<Eigen::Index>(j)] != 0.0) ++count;
        report.frequency.push_back(static_cast<double>(count) / static_cast<double>(fits.size()));
        if (count == static_cast<int>(fits.size())) report.stable_set.push_back(static_cast<int>(j));
    }
    return report;
}

std::string path_to_csv(const LambdaPath& path, const std::vector<FeatureMeta>& features) {
    // Only features active somewhere on the path (or mandatory) are emitted.
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < features.size(); ++j) {
        bool keep = features[j].mandatory;
        for (const auto& fit : path.fits)
            if (fit.coef[static_cast<Eigen::Index>(j)] != 0.0) keep = true;
        if (keep) cols.push_back(j);
    }
    std::ostringstream out;
    out << "lambda,feature,coefficient\n";
    for (std::size_t l = 0; l < path.lambdas.size(); ++l)
        for (std::size_t j : cols)
            out << fmt_num(path.lambdas[l]) << ',' << features[j].name << ','
                << fmt_num(path.fits[l].coef[static_cast<Eigen::Index>(j)]) << '\n';
    return out.str();
}

std::string cv_curve_to_csv(const LambdaPath& path) {
    if (path.cv_mean.empty()) throw DataError("cv curve not computed for this path");
    std::ostringstream out;
    out << "lambda,mean_cvpl,se\n";
    for (std::size_t l = 0; l < path.lambdas.size(); ++l)
        out << fmt_num(path.lambdas[l]) << ',' << fmt_num(path.cv_mean[l]) << ','
            << fmt_num(path.cv_se[l]) << '\n';
    return out.str();
}

}  // namespace survkit
