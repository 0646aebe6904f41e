#include "survkit/cox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "survkit/common.hpp"

namespace survkit {

double StepFunction::operator()(double t) const {
    // Last jump time <= t; value 0 before the first jump.
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0.0;
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return 0.0;
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

RiskSetIndex make_risk_index(const std::vector<SurvivalOutcome>& outcomes) {
    if (outcomes.empty()) throw DataError("empty outcome sequence");
    RiskSetIndex idx;
    const std::size_t n = outcomes.size();
    idx.by_desc_time.resize(n);
    std::iota(idx.by_desc_time.begin(), idx.by_desc_time.end(), 0);
    std::sort(idx.by_desc_time.begin(), idx.by_desc_time.end(), [&](int a, int b) {
        double ta = outcomes[static_cast<std::size_t>(a)].time;
        double tb = outcomes[static_cast<std::size_t>(b)].time;
        if (ta != tb) return ta > tb;
        return a < b;
    });
    idx.desc_times.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        idx.desc_times[i] = outcomes[static_cast<std::size_t>(idx.by_desc_time[i])].time;

    // Ascending scan grouping rows by tied time; only times with events enter
    // the grid.  Rows at ascending position a..n-1 have time >= the block time,
    // so the risk-set size is n - a.
    std::vector<int> asc(idx.by_desc_time.rbegin(), idx.by_desc_time.rend());
    std::vector<double> asc_t(idx.desc_times.rbegin(), idx.desc_times.rend());
    std::size_t a = 0;
    while (a < n) {
        double t = asc_t[a];
        std::size_t b = a;
        std::vector<int> ev;
        while (b < n && asc_t[b] == t) {
            if (outcomes[static_cast<std::size_t>(asc[b])].status == 1) ev.push_back(asc[b]);
            ++b;
        }
        if (!ev.empty()) {
            std::sort(ev.begin(), ev.end());
            idx.event_times.push_back(t);
            idx.event_count.push_back(static_cast<int>(ev.size()));
            idx.risk_count.push_back(static_cast<int>(n - a));
            idx.event_rows.push_back(std::move(ev));
        }
        a = b;
    }
    return idx;
}

Vector CoxFit::beta0() const {
    std::vector<double> v;
    for (std::size_t j = 0; j < p(); ++j)
        if (mandatory[j]) v.push_back(coef[static_cast<Eigen::Index>(j)]);
    return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vector CoxFit::beta() const {
    std::vector<double> v;
    for (std::size_t j = 0; j < p(); ++j)
        if (!mandatory[j]) v.push_back(coef[static_cast<Eigen::Index>(j)]);
    return Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

namespace {

void check_finite_eta(const Vector& eta) {
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        if (!std::isfinite(eta[i])) throw NumericError("non-finite linear predictor");
}

}  // namespace

std::vector<double> risk_log_sums(const RiskSetIndex& idx, const Vector& eta) {
    check_finite_eta(eta);
    const std::size_t K = idx.n_event_times();
    std::vector<double> log_s(K);
    // Descending sweep; risk sets are nested suffixes, so each row enters the
    // running sum exactly once.  Streaming max rescale keeps exp() bounded.
    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    std::size_t pos = 0;
    for (std::size_t k = K; k-- > 0;) {
        double t_k = idx.event_times[k];
        while (pos < idx.by_desc_time.size() && idx.desc_times[pos] >= t_k) {
            double e = eta[idx.by_desc_time[pos]];
            if (e > m) {
                s = std::isfinite(m) ? s * std::exp(m - e) : 0.0;
                m = e;
            }
            s += std::exp(e - m);
            ++pos;
        }
        log_s[k] = m + std::log(s);
    }
    return log_s;
}

double partial_loglik_eta(const RiskSetIndex& idx, const Vector& eta) {
    std::vector<double> log_s = risk_log_sums(idx, eta);
    double ll = 0.0;
    for (std::size_t k = 0; k < idx.n_event_times(); ++k) {
        for (int row : idx.event_rows[k]) ll += eta[row];
        ll -= idx.event_count[k] * log_s[k];
    }
    return ll;
}

double partial_loglik(const Vector& beta_all, const SurvivalDataset& ds) {
    if (static_cast<std::size_t>(beta_all.size()) != ds.p())
        throw DataError("coefficient length does not match feature count");
    if (ds.has_missing()) throw DataError("partial likelihood requires a fully imputed dataset");
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    Vector eta = ds.covariates * beta_all;
    return partial_loglik_eta(idx, eta);
}

namespace {

// One descending sweep producing loglik, gradient, and optionally the Hessian
// on a column subset.  X is n x q (the subset matrix).
void cox_derivatives(const RiskSetIndex& idx, const Matrix& X, const Vector& eta, double* loglik,
                     Vector* grad, Matrix* hess) {
    check_finite_eta(eta);
    const Eigen::Index q = X.cols();
    const std::size_t K = idx.n_event_times();
    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    Vector vs = Vector::Zero(q);   // sum exp(eta - m) * x
    Matrix us;                     // sum exp(eta - m) * x x^T
    if (hess) us = Matrix::Zero(q, q);

    double ll = 0.0;
    if (grad) grad->setZero(q);
    if (hess) hess->setZero(q, q);

    std::size_t pos = 0;
    for (std::size_t k = K; k-- > 0;) {
        double t_k = idx.event_times[k];
        while (pos < idx.by_desc_time.size() && idx.desc_times[pos] >= t_k) {
            int row = idx.by_desc_time[pos];
            double e = eta[row];
            if (e > m) {
                double r = std::isfinite(m) ? std::exp(m - e) : 0.0;
                s *= r;
                vs *= r;
                if (hess) us *= r;
                m = e;
            }
            double w = std::exp(e - m);
            s += w;
            vs += w * X.row(row).transpose();
            if (hess) us += w * (X.row(row).transpose() * X.row(row));
            ++pos;
        }
        double d = idx.event_count[k];
        double log_s = m + std::log(s);
        Vector mean = vs / s;
        for (int row : idx.event_rows[k]) {
            ll += eta[row];
            if (grad) *grad += X.row(row).transpose() - mean;
        }
        ll -= d * log_s;
        if (hess) *hess -= d * (us / s - mean * mean.transpose());
    }
    if (loglik) *loglik = ll;
}

}  // namespace

Vector partial_loglik_grad(const Vector& beta_all, const SurvivalDataset& ds) {
    if (static_cast<std::size_t>(beta_all.size()) != ds.p())
        throw DataError("coefficient length does not match feature count");
    if (ds.has_missing()) throw DataError("partial likelihood requires a fully imputed dataset");
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    Vector eta = ds.covariates * beta_all;
    Vector grad;
    cox_derivatives(idx, ds.covariates, eta, nullptr, &grad, nullptr);
    return grad;
}

void irls_terms(const RiskSetIndex& idx, const Vector& eta, Vector& s_out, Vector& w_out) {
    std::vector<double> log_s = risk_log_sums(idx, eta);
    const std::size_t K = idx.n_event_times();
    const std::size_t n = idx.by_desc_time.size();
    s_out.resize(static_cast<Eigen::Index>(n));
    w_out.resize(static_cast<Eigen::Index>(n));

    // Ascending sweep: accumulate a = sum d_k / S_k and b = sum d_k / S_k^2
    // over event times up to each row's observed time.
    double a = 0.0, b = 0.0;
    std::size_t k = 0;
    for (std::size_t pos = n; pos-- > 0;) {  // by_desc_time reversed = ascending
        int row = idx.by_desc_time[pos];
        double t = idx.desc_times[pos];
        while (k < K && idx.event_times[k] <= t) {
            double d = idx.event_count[k];
            a += d * std::exp(-log_s[k]);
            b += d * std::exp(-2.0 * log_s[k]);
            ++k;
        }
        double ex = std::exp(eta[row]);
        double mu = ex * a;
        double w = mu - ex * ex * b;
        if (!std::isfinite(mu) || !std::isfinite(w))
            throw NumericError("IRLS weights overflow: linear predictor out of range");
        s_out[row] = -mu;
        w_out[row] = w > 0.0 ? w : 0.0;
    }
    // Add the event indicator to the score residuals.
    for (std::size_t kk = 0; kk < K; ++kk)
        for (int row : idx.event_rows[kk]) s_out[row] += 1.0;
}

CoxFit fit_cox_newton(const SurvivalDataset& ds, const std::vector<int>& columns,
                      const NewtonOptions& opt) {
    if (ds.has_missing()) throw DataError("Newton fit requires a fully imputed dataset");
    const std::size_t n_ev = ds.n_events();
    if (n_ev == 0) throw DataError("Newton fit requires at least one event");
    if (columns.size() >= n_ev)
        throw DataError("Newton fit needs fewer covariates than events");
    for (int c : columns)
        if (c < 0 || static_cast<std::size_t>(c) >= ds.p())
            throw DataError("Newton fit: column index out of range");

    RiskSetIndex idx = make_risk_index(ds.outcomes);
    const Eigen::Index q = static_cast<Eigen::Index>(columns.size());
    Matrix Xs(ds.covariates.rows(), q);
    for (Eigen::Index j = 0; j < q; ++j) Xs.col(j) = ds.covariates.col(columns[static_cast<std::size_t>(j)]);

    Vector beta = Vector::Zero(q);
    Vector eta = Vector::Zero(ds.covariates.rows());
    double ll;
    Vector grad;
    Matrix hess;
    cox_derivatives(idx, Xs, eta, &ll, &grad, &hess);

    bool converged = false;
    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        Matrix info = -hess;
        Eigen::SelfAdjointEigenSolver<Matrix> es(info);
        double lo = es.eigenvalues().minCoeff();
        double hi = es.eigenvalues().maxCoeff();
        if (!(hi > 0.0) || lo <= hi * 1e-10)
            throw NumericError("collinear covariates: observed information is singular");
        Vector step = es.eigenvectors() *
                      (es.eigenvectors().transpose() * grad).cwiseQuotient(es.eigenvalues());

        double scale = 1.0;
        double ll_new = ll;
        Vector beta_new, eta_new;
        bool improved = false;
        for (int h = 0; h < 20; ++h) {
            beta_new = beta + scale * step;
            eta_new = Xs * beta_new;
            ll_new = partial_loglik_eta(idx, eta_new);
            if (std::isfinite(ll_new) && ll_new >= ll) {
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;  // stalled; report non-convergence via flag below
        beta = beta_new;
        eta = eta_new;
        if (beta.cwiseAbs().maxCoeff() > opt.coef_bound)
            throw NumericError("monotone likelihood: coefficient diverged beyond bound");
        double delta = ll_new - ll;
        ll = ll_new;
        cox_derivatives(idx, Xs, eta, nullptr, &grad, &hess);
        if (std::fabs(delta) < opt.tol) {
            converged = true;
            ++iter;
            break;
        }
    }

    Matrix info = -hess;
    Matrix cov = info.inverse();

    CoxFit fit;
    fit.coef = Vector::Zero(static_cast<Eigen::Index>(ds.p()));
    fit.se = Vector::Zero(static_cast<Eigen::Index>(ds.p()));
    fit.mandatory.resize(ds.p());
    for (std::size_t j = 0; j < ds.p(); ++j) fit.mandatory[j] = ds.features[j].mandatory ? 1 : 0;
    for (Eigen::Index j = 0; j < q; ++j) {
        fit.coef[columns[static_cast<std::size_t>(j)]] = beta[j];
        double v = cov(j, j);
        fit.se[columns[static_cast<std::size_t>(j)]] = v > 0.0 ? std::sqrt(v) : 0.0;
    }
    fit.loglik = ll;
    fit.converged = converged;
    fit.iterations = iter;
    fit.features = ds.features;
    fit.baseline = breslow_baseline_eta(idx, ds.covariates * fit.coef);
    return fit;
}

StepFunction breslow_baseline_eta(const RiskSetIndex& idx, const Vector& eta) {
    std::vector<double> log_s = risk_log_sums(idx, eta);
    StepFunction h0;
    h0.times = idx.event_times;
    h0.values.resize(idx.n_event_times());
    double cum = 0.0;
    for (std::size_t k = 0; k < idx.n_event_times(); ++k) {
        cum += idx.event_count[k] * std::exp(-log_s[k]);
        h0.values[k] = cum;
    }
    return h0;
}

StepFunction breslow_baseline(const CoxFit& fit, const SurvivalDataset& ds) {
    if (fit.p() != ds.p()) throw DataError("fit and dataset disagree on feature count");
    RiskSetIndex idx = make_risk_index(ds.outcomes);
    return breslow_baseline_eta(idx, ds.covariates * fit.coef);
}

double prognostic_score(const CoxFit& fit, const Vector& x) {
    if (x.size() != fit.coef.size())
        throw DataError("covariate row length does not match fitted coefficients");
    return fit.coef.dot(x);
}

double predict_survival(const CoxFit& fit, const Vector& x, double t) {
    if (t < 0.0) throw DataError("prediction time must be non-negative");
    double eta = prognostic_score(fit, x);
    double h = fit.baseline(t);
    return std::exp(-h * std::exp(eta));
}

double predict_survival_raw(const CoxFit& fit, const Vector& raw_x, double t) {
    if (raw_x.size() != fit.coef.size())
        throw DataError("covariate row length does not match fitted coefficients");
    Vector x(raw_x.size());
    for (Eigen::Index j = 0; j < raw_x.size(); ++j) {
        const FeatureMeta& f = fit.features[static_cast<std::size_t>(j)];
        x[j] = f.has_scale ? (raw_x[j] - f.center) / f.scale : raw_x[j];
        if (f.constant) x[j] = 0.0;
    }
    return predict_survival(fit, x, t);
}

std::string cox_fit_to_json(const CoxFit& fit) {
    nlohmann::ordered_json doc;
    doc["model"] = "cox";
    doc["loglik"] = fit.loglik;
    doc["converged"] = fit.converged;
    doc["iterations"] = fit.iterations;
    nlohmann::ordered_json coefs = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < fit.p(); ++j) {
        const FeatureMeta& f = fit.features[j];
        double b = fit.coef[static_cast<Eigen::Index>(j)];
        nlohmann::ordered_json c;
        c["name"] = f.name;
        c["block"] = f.block;
        c["mandatory"] = fit.mandatory[j] != 0;
        c["coefficient"] = b;
        // Original-scale slope; the matching baseline offset is exp(sum center*coef/scale).
        c["coefficient_raw_scale"] = f.has_scale && f.scale != 0.0 ? b / f.scale : b;
        if (fit.se.size() == fit.coef.size()) c["se"] = fit.se[static_cast<Eigen::Index>(j)];
        if (f.has_scale) {
            c["center"] = f.center;
            c["scale"] = f.scale;
        }
        coefs.push_back(c);
    }
    doc["coefficients"] = coefs;
    doc["baseline"]["times"] = fit.baseline.times;
    doc["baseline"]["cumulative_hazard"] = fit.baseline.values;
    return doc.dump(2) + "\n";
}

}  // namespace survkit
