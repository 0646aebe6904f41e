#include "survkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "survkit/cox.hpp"
#include "survkit/csv.hpp"
#include "survkit/parallel.hpp"
#include "survkit/rng.hpp"
#include "survkit/special.hpp"

namespace survkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_number(const std::string& tok, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw DataError("non-numeric value '" + tok + "' in " + what);
    }
}

}  // namespace

std::size_t SurvivalDataset::n_events() const {
    std::size_t d = 0;
    for (const auto& o : outcomes) d += o.status;
    return d;
}

bool SurvivalDataset::has_missing() const {
    for (Eigen::Index i = 0; i < covariates.rows(); ++i)
        for (Eigen::Index j = 0; j < covariates.cols(); ++j)
            if (std::isnan(covariates(i, j))) return true;
    return false;
}

void SurvivalDataset::validate() const {
    if (static_cast<std::size_t>(covariates.rows()) != outcomes.size())
        throw DataError("covariate row count does not match outcome count");
    if (static_cast<std::size_t>(covariates.cols()) != features.size())
        throw DataError("covariate column count does not match feature metadata");
    std::set<std::string> names;
    for (const auto& f : features)
        if (!names.insert(f.name).second) throw DataError("duplicate feature name: " + f.name);
    for (const auto& o : outcomes) {
        if (!(o.time >= 0.0) || !std::isfinite(o.time))
            throw DataError("time must be finite and non-negative");
        if (o.status != 0 && o.status != 1) throw DataError("status must be 0 or 1");
    }
}

int SurvivalDataset::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < features.size(); ++j)
        if (features[j].name == name) return static_cast<int>(j);
    return -1;
}

std::vector<int> SurvivalDataset::mandatory_columns() const {
    std::vector<int> out;
    for (std::size_t j = 0; j < features.size(); ++j)
        if (features[j].mandatory) out.push_back(static_cast<int>(j));
    return out;
}

std::vector<int> SurvivalDataset::penalized_columns() const {
    std::vector<int> out;
    for (std::size_t j = 0; j < features.size(); ++j)
        if (!features[j].mandatory) out.push_back(static_cast<int>(j));
    return out;
}

SurvivalDataset dataset_from_csv(const std::string& data_text, const std::string& meta_text) {
    CsvTable t = parse_csv(data_text);
    int time_col = t.column("time");
    int status_col = t.column("status");
    int id_col = t.column("id");
    if (time_col < 0) throw DataError("input is missing required column 'time'");
    if (status_col < 0) throw DataError("input is missing required column 'status'");

    std::vector<int> cov_cols;
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        int jj = static_cast<int>(j);
        if (jj != time_col && jj != status_col && jj != id_col) cov_cols.push_back(jj);
    }

    SurvivalDataset ds;
    std::size_t n = t.nrow();
    ds.outcomes.resize(n);
    ds.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cov_cols.size()));
    for (int c : cov_cols) {
        FeatureMeta meta;
        meta.name = t.header[static_cast<std::size_t>(c)];
        ds.features.push_back(meta);
    }
    if (id_col >= 0) ds.ids.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = t.rows[i];
        const std::string& time_tok = row[static_cast<std::size_t>(time_col)];
        const std::string& status_tok = row[static_cast<std::size_t>(status_col)];
        if (is_missing_token(time_tok) || is_missing_token(status_tok))
            throw DataError("missing time or status in row " + std::to_string(i + 1));
        ds.outcomes[i].time = parse_number(time_tok, "column 'time'");
        double s = parse_number(status_tok, "column 'status'");
        if (s != 0.0 && s != 1.0)
            throw DataError("status must be 0 or 1, got '" + status_tok + "'");
        ds.outcomes[i].status = static_cast<int>(s);
        if (id_col >= 0) ds.ids[i] = row[static_cast<std::size_t>(id_col)];
        for (std::size_t jj = 0; jj < cov_cols.size(); ++jj) {
            const std::string& tok = row[static_cast<std::size_t>(cov_cols[jj])];
            ds.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jj)) =
                is_missing_token(tok) ? kNaN
                                      : parse_number(tok, "feature '" + ds.features[jj].name + "'");
        }
    }

    if (!meta_text.empty()) {
        CsvTable m = parse_csv(meta_text);
        int name_col = m.column("name");
        int block_col = m.column("block");
        int mand_col = m.column("mandatory");
        if (name_col < 0) throw DataError("metadata is missing required column 'name'");
        for (const auto& row : m.rows) {
            const std::string& name = row[static_cast<std::size_t>(name_col)];
            int idx = ds.feature_index(name);
            if (idx < 0) throw DataError("metadata names unknown feature: " + name);
            if (block_col >= 0 && !row[static_cast<std::size_t>(block_col)].empty())
                ds.features[static_cast<std::size_t>(idx)].block =
                    row[static_cast<std::size_t>(block_col)];
            if (mand_col >= 0) {
                const std::string& tok = row[static_cast<std::size_t>(mand_col)];
                if (tok != "0" && tok != "1")
                    throw DataError("metadata mandatory must be 0 or 1 for feature " + name);
                ds.features[static_cast<std::size_t>(idx)].mandatory = tok == "1";
            }
        }
    }

    ds.validate();
    return ds;
}

SurvivalDataset load_dataset(const std::string& data_path, const std::string& meta_path) {
    std::string meta = meta_path.empty() ? std::string() : read_file(meta_path);
    return dataset_from_csv(read_file(data_path), meta);
}

SurvivalDataset filter_missingness(const SurvivalDataset& ds, double max_frac) {
    if (max_frac < 0.0 || max_frac > 1.0) throw ConfigError("max_frac must lie in [0,1]");
    std::vector<int> keep;
    double n = static_cast<double>(ds.n());
    for (std::size_t j = 0; j < ds.p(); ++j) {
        Eigen::Index jj = static_cast<Eigen::Index>(j);
        double miss = 0.0;
        for (Eigen::Index i = 0; i < ds.covariates.rows(); ++i)
            if (std::isnan(ds.covariates(i, jj))) miss += 1.0;
        double frac = n > 0 ? miss / n : 0.0;
        if (frac > max_frac) {
            if (ds.features[j].mandatory)
                throw DataError("mandatory feature '" + ds.features[j].name +
                                "' exceeds missingness threshold");
            continue;
        }
        keep.push_back(static_cast<int>(j));
    }
    return subset_features(ds, keep);
}

SurvivalDataset impute_knn(const SurvivalDataset& ds, int k) {
    if (k <= 0) throw ConfigError("impute_knn: k must be positive");
    if (static_cast<std::size_t>(k) >= ds.n())
        throw DataError("impute_knn: k must be smaller than the number of rows");
    const std::size_t n = ds.n(), p = ds.p();
    const Matrix& X = ds.covariates;

    // Per-feature sd over observed entries, for distance rescaling.
    std::vector<double> sd(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        Eigen::Index jj = static_cast<Eigen::Index>(j);
        double sum = 0.0, cnt = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isnan(X(static_cast<Eigen::Index>(i), jj))) {
                sum += X(static_cast<Eigen::Index>(i), jj);
                cnt += 1.0;
            }
        if (cnt == 0.0)
            throw DataError("feature '" + ds.features[j].name + "' is missing in every row");
        double mean = sum / cnt;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isnan(X(static_cast<Eigen::Index>(i), jj))) {
                double d = X(static_cast<Eigen::Index>(i), jj) - mean;
                ss += d * d;
            }
        sd[j] = cnt > 1.0 ? std::sqrt(ss / (cnt - 1.0)) : 0.0;
        if (sd[j] <= 0.0) sd[j] = 1.0;
    }

    SurvivalDataset out = ds;
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Index ii = static_cast<Eigen::Index>(i);
        bool any = false;
        for (std::size_t j = 0; j < p && !any; ++j)
            any = std::isnan(X(ii, static_cast<Eigen::Index>(j)));
        if (!any) continue;

        // Distances to all other rows on mutually observed coordinates.
        std::vector<std::pair<double, int>> dist;
        dist.reserve(n - 1);
        for (std::size_t l = 0; l < n; ++l) {
            if (l == i) continue;
            Eigen::Index ll = static_cast<Eigen::Index>(l);
            double ss = 0.0;
            int shared = 0;
            for (std::size_t j = 0; j < p; ++j) {
                Eigen::Index jj = static_cast<Eigen::Index>(j);
                if (std::isnan(X(ii, jj)) || std::isnan(X(ll, jj))) continue;
                double d = (X(ii, jj) - X(ll, jj)) / sd[j];
                ss += d * d;
                ++shared;
            }
            if (shared == 0) continue;
            dist.emplace_back(std::sqrt(ss / shared), static_cast<int>(l));
        }
        std::sort(dist.begin(), dist.end());

        for (std::size_t j = 0; j < p; ++j) {
            Eigen::Index jj = static_cast<Eigen::Index>(j);
            if (!std::isnan(X(ii, jj))) continue;
            double sum = 0.0;
            int used = 0;
            for (const auto& [d, l] : dist) {
                double v = X(static_cast<Eigen::Index>(l), jj);
                if (std::isnan(v)) continue;
                sum += v;
                if (++used == k) break;
            }
            if (used < k)
                throw DataError("impute_knn: fewer than k rows observe feature '" +
                                ds.features[j].name + "'");
            out.covariates(ii, jj) = sum / used;
        }
    }
    return out;
}

SurvivalDataset standardize(const SurvivalDataset& ds) {
    if (ds.has_missing()) throw DataError("standardize requires a fully imputed dataset");
    SurvivalDataset out = ds;
    const double n = static_cast<double>(ds.n());
    if (n == 0) return out;
    for (std::size_t j = 0; j < ds.p(); ++j) {
        Eigen::Index jj = static_cast<Eigen::Index>(j);
        double mean = out.covariates.col(jj).mean();
        double sd = 0.0;
        if (n > 1) {
            double ss = (out.covariates.col(jj).array() - mean).square().sum();
            sd = std::sqrt(ss / (n - 1.0));
        }
        FeatureMeta& f = out.features[j];
        if (sd <= 0.0) {
            out.covariates.col(jj).setZero();
            f.constant = true;
            f.center = f.has_scale ? f.center + mean * f.scale : mean;
            if (!f.has_scale) f.scale = 1.0;
            f.has_scale = true;
            continue;
        }
        out.covariates.col(jj) = (out.covariates.col(jj).array() - mean) / sd;
        // Compose with any earlier scaling so FeatureMeta always maps raw -> current.
        f.center = f.has_scale ? f.center + mean * f.scale : mean;
        f.scale = f.has_scale ? f.scale * sd : sd;
        f.has_scale = true;
        f.constant = false;
    }
    return out;
}

Vector standardize_row(const SurvivalDataset& ds, const Vector& raw) {
    if (static_cast<std::size_t>(raw.size()) != ds.p())
        throw DataError("covariate row length does not match feature count");
    Vector out(raw.size());
    for (std::size_t j = 0; j < ds.p(); ++j) {
        const FeatureMeta& f = ds.features[j];
        Eigen::Index jj = static_cast<Eigen::Index>(j);
        out[jj] = f.has_scale ? (raw[jj] - f.center) / f.scale : raw[jj];
        if (f.constant) out[jj] = 0.0;
    }
    return out;
}

SurvivalDataset variance_preselect(const SurvivalDataset& ds, double cum_frac) {
    if (cum_frac <= 0.0) throw ConfigError("variance_preselect: cum_frac must be positive");
    if (cum_frac > 1.0) throw ConfigError("variance_preselect: cum_frac must be at most 1");
    if (ds.has_missing()) throw DataError("variance_preselect requires a fully imputed dataset");
    const double n = static_cast<double>(ds.n());

    std::vector<std::pair<double, int>> var_order;  // (-variance, column) for stable ties
    double total = 0.0;
    for (std::size_t j = 0; j < ds.p(); ++j) {
        if (ds.features[j].mandatory) continue;
        Eigen::Index jj = static_cast<Eigen::Index>(j);
        double mean = ds.covariates.col(jj).mean();
        double var = n > 1 ? (ds.covariates.col(jj).array() - mean).square().sum() / (n - 1.0) : 0.0;
        var_order.emplace_back(-var, static_cast<int>(j));
        total += var;
    }
    std::sort(var_order.begin(), var_order.end());

    std::vector<bool> keep(ds.p(), false);
    for (std::size_t j = 0; j < ds.p(); ++j) keep[j] = ds.features[j].mandatory;
    double cum = 0.0;
    for (const auto& [neg_var, j] : var_order) {
        if (total > 0.0 && cum >= cum_frac * total) break;
        keep[static_cast<std::size_t>(j)] = true;
        cum += -neg_var;
    }

    std::vector<int> cols;
    for (std::size_t j = 0; j < ds.p(); ++j)
        if (keep[j]) cols.push_back(static_cast<int>(j));
    return subset_features(ds, cols);
}

namespace {

std::pair<SurvivalDataset, ScreenResult> screen_impl(const SurvivalDataset& ds, double alpha,
                                                     bool threaded) {
    if (ds.has_missing()) throw DataError("univariate_cox_screen requires a fully imputed dataset");
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("screen alpha must lie in [0,1]");
    ScreenResult report;
    report.rows.resize(ds.p());

    auto one = [&](std::size_t j) {
        ScreenResult::Row row;
        row.name = ds.features[j].name;
        if (ds.features[j].mandatory) {
            row.kept = true;
            report.rows[j] = row;
            return;
        }
        try {
            CoxFit fit = fit_cox_newton(ds, {static_cast<int>(j)});
            row.beta = fit.coef[static_cast<Eigen::Index>(j)];
            row.se = fit.se[static_cast<Eigen::Index>(j)];
            double z = row.se > 0.0 ? row.beta / row.se : 0.0;
            row.p_value = 2.0 * normal_sf(std::fabs(z));
            row.kept = row.p_value <= alpha;
        } catch (const std::exception&) {
            row.flagged = true;  // conservative: keep what we could not test
            row.kept = true;
        }
        report.rows[j] = row;
    };
    if (threaded)
        parallel_for(ds.p(), one);
    else
        serial_for(ds.p(), one);

    std::vector<int> cols;
    for (std::size_t j = 0; j < ds.p(); ++j)
        if (report.rows[j].kept) cols.push_back(static_cast<int>(j));
    SurvivalDataset out = subset_features(ds, cols);
    // Propagate flags onto the surviving metadata.
    for (auto& f : out.features) {
        int src = ds.feature_index(f.name);
        if (src >= 0) f.screen_flagged = report.rows[static_cast<std::size_t>(src)].flagged;
    }
    return {out, report};
}

}  // namespace

std::pair<SurvivalDataset, ScreenResult> univariate_cox_screen(const SurvivalDataset& ds,
                                                               double alpha) {
    return screen_impl(ds, alpha, true);
}

std::pair<SurvivalDataset, ScreenResult> univariate_cox_screen_serial(const SurvivalDataset& ds,
                                                                      double alpha) {
    return screen_impl(ds, alpha, false);
}

ResamplingPlan make_cv_folds(const std::vector<SurvivalOutcome>& outcomes, int k,
                             std::uint64_t seed) {
    const std::size_t n = outcomes.size();
    if (k < 2) throw ConfigError("make_cv_folds: k must be at least 2");
    if (static_cast<std::size_t>(k) > n) throw ConfigError("make_cv_folds: k exceeds sample size");

    std::vector<int> events, censored;
    for (std::size_t i = 0; i < n; ++i)
        (outcomes[i].status == 1 ? events : censored).push_back(static_cast<int>(i));

    Rng rng(derive_seed(seed, 0));
    auto shuffle = [&rng](std::vector<int>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[rng.uniform_int(i)]);
    };
    shuffle(events);
    shuffle(censored);

    ResamplingPlan plan;
    plan.kind = ResamplingPlan::Kind::cv_folds;
    plan.seed = seed;
    plan.out_sample.assign(static_cast<std::size_t>(k), {});
    // Round-robin deal, events first so they spread as evenly as possible.
    std::size_t slot = 0;
    std::size_t kk = static_cast<std::size_t>(k);
    for (int idx : events) plan.out_sample[slot++ % kk].push_back(idx);
    for (int idx : censored) plan.out_sample[slot++ % kk].push_back(idx);
    for (auto& fold : plan.out_sample) std::sort(fold.begin(), fold.end());

    plan.in_sample.assign(static_cast<std::size_t>(k), {});
    for (int f = 0; f < k; ++f) {
        std::vector<bool> held(n, false);
        for (int idx : plan.out_sample[static_cast<std::size_t>(f)]) held[static_cast<std::size_t>(idx)] = true;
        for (std::size_t i = 0; i < n; ++i)
            if (!held[i]) plan.in_sample[static_cast<std::size_t>(f)].push_back(static_cast<int>(i));
    }
    if (events.size() < static_cast<std::size_t>(k))
        plan.warnings.push_back("fewer events than folds; some folds contain no events");
    return plan;
}

ResamplingPlan bootstrap_plan(std::size_t n, int B, std::uint64_t seed) {
    if (B < 1) throw ConfigError("bootstrap_plan: B must be at least 1");
    if (n == 0) throw ConfigError("bootstrap_plan: empty sample");
    ResamplingPlan plan;
    plan.kind = ResamplingPlan::Kind::bootstrap;
    plan.seed = seed;
    plan.in_sample.resize(static_cast<std::size_t>(B));
    plan.out_sample.resize(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b)));
        std::vector<bool> seen(n, false);
        auto& in = plan.in_sample[static_cast<std::size_t>(b)];
        in.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            int idx = static_cast<int>(rng.uniform_int(n));
            in[i] = idx;
            seen[static_cast<std::size_t>(idx)] = true;
        }
        std::sort(in.begin(), in.end());
        auto& out = plan.out_sample[static_cast<std::size_t>(b)];
        for (std::size_t i = 0; i < n; ++i)
            if (!seen[i]) out.push_back(static_cast<int>(i));
        if (out.empty())
            plan.warnings.push_back("replicate " + std::to_string(b) + " has empty out-of-bag set");
    }
    return plan;
}

SurvivalDataset subset_rows(const SurvivalDataset& ds, const std::vector<int>& rows) {
    SurvivalDataset out;
    out.features = ds.features;
    out.outcomes.reserve(rows.size());
    out.covariates.resize(static_cast<Eigen::Index>(rows.size()), ds.covariates.cols());
    Eigen::Index r = 0;
    for (int i : rows) {
        if (i < 0 || static_cast<std::size_t>(i) >= ds.n())
            throw DataError("subset_rows: index out of range");
        out.outcomes.push_back(ds.outcomes[static_cast<std::size_t>(i)]);
        out.covariates.row(r++) = ds.covariates.row(i);
        if (!ds.ids.empty()) out.ids.push_back(ds.ids[static_cast<std::size_t>(i)]);
    }
    return out;
}

SurvivalDataset subset_features(const SurvivalDataset& ds, const std::vector<int>& cols) {
    SurvivalDataset out;
    out.outcomes = ds.outcomes;
    out.ids = ds.ids;
    out.covariates.resize(ds.covariates.rows(), static_cast<Eigen::Index>(cols.size()));
    Eigen::Index c = 0;
    for (int j : cols) {
        if (j < 0 || static_cast<std::size_t>(j) >= ds.p())
            throw DataError("subset_features: index out of range");
        out.covariates.col(c++) = ds.covariates.col(j);
        out.features.push_back(ds.features[static_cast<std::size_t>(j)]);
    }
    return out;
}

}  // namespace survkit
