#include "survkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "survkit/parallel.hpp"
#include "survkit/rng.hpp"

namespace survkit {

namespace {

// Shared pair walk for Harrell/Uno: per-i partials are self-contained, so the
// threaded and serial paths add the same numbers in the same index order.
ConcordanceResult weighted_concordance(const std::vector<double>& scores,
                                       const std::vector<SurvivalOutcome>& outcomes,
                                       const std::vector<double>& case_weight,
                                       ConcordanceResult::Variant variant, double tau) {
    const std::size_t n = outcomes.size();
    if (scores.size() != n) throw DataError("score length does not match outcomes");
    std::vector<double> num(n, 0.0), den(n, 0.0), pairs(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        if (outcomes[i].status != 1 || case_weight[i] == 0.0) return;
        if (outcomes[i].time >= tau) return;
        double ni = 0.0, di = 0.0, ci = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (outcomes[j].time <= outcomes[i].time) continue;
            double c = scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
            ni += c;
            di += 1.0;
            ci += 1.0;
        }
        num[i] = case_weight[i] * ni;
        den[i] = case_weight[i] * di;
        pairs[i] = ci;
    });
    double num_total = 0.0, den_total = 0.0, pair_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num_total += num[i];
        den_total += den[i];
        pair_total += pairs[i];
    }
    if (den_total == 0.0) throw DataError("concordance undefined: no comparable pairs");
    ConcordanceResult res;
    res.c_index = num_total / den_total;
    res.comparable_pairs = pair_total;
    res.variant = variant;
    res.truncation = tau;
    return res;
}

}  // namespace

ConcordanceResult harrell_c(const std::vector<double>& scores,
                            const std::vector<SurvivalOutcome>& outcomes) {
    std::vector<double> w(outcomes.size(), 1.0);
    auto res = weighted_concordance(scores, outcomes, w, ConcordanceResult::Variant::harrell,
                                    std::numeric_limits<double>::infinity());
    return res;
}

ConcordanceResult uno_c(const std::vector<double>& scores,
                        const std::vector<SurvivalOutcome>& outcomes, const CensoringModel& G,
                        double tau) {
    if (!(tau > 0.0)) throw ConfigError("uno_c: truncation must be positive");
    std::vector<double> w(outcomes.size(), 0.0);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].status != 1 || outcomes[i].time >= tau) continue;
        double g = G.before(outcomes[i].time);
        if (g <= 0.0)
            throw NumericError("uno_c: censoring survival reaches zero before the truncation");
        w[i] = 1.0 / (g * g);
    }
    return weighted_concordance(scores, outcomes, w, ConcordanceResult::Variant::uno, tau);
}

ConcordanceResult antolini_c(const std::vector<SurvCurve>& pred,
                             const std::vector<SurvivalOutcome>& outcomes) {
    const std::size_t n = outcomes.size();
    if (pred.size() != n) throw DataError("prediction count does not match outcomes");
    std::vector<double> num(n, 0.0), den(n, 0.0);
    parallel_for(n, [&](std::size_t i) {
        if (outcomes[i].status != 1) return;
        double t = outcomes[i].time;
        double si = pred[i](t);
        double ni = 0.0, di = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (outcomes[j].time <= t) continue;
            double sj = pred[j](t);
            ni += si < sj ? 1.0 : (si == sj ? 0.5 : 0.0);
            di += 1.0;
        }
        num[i] = ni;
        den[i] = di;
    });
    double num_total = 0.0, den_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num_total += num[i];
        den_total += den[i];
    }
    if (den_total == 0.0) throw DataError("concordance undefined: no comparable pairs");
    ConcordanceResult res;
    res.c_index = num_total / den_total;
    res.comparable_pairs = den_total;
    res.variant = ConcordanceResult::Variant::antolini;
    return res;
}

namespace {

struct AucParts {
    std::vector<std::size_t> cases, controls;
    std::vector<double> case_w;
    double control_w = 0.0;
};

AucParts auc_parts(const std::vector<SurvivalOutcome>& outcomes, double t,
                   const CensoringModel& G) {
    AucParts parts;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].time <= t && outcomes[i].status == 1) {
            double g = G.before(outcomes[i].time);
            if (g <= 0.0) throw NumericError("time_dependent_auc: zero censoring weight");
            parts.cases.push_back(i);
            parts.case_w.push_back(1.0 / g);
        } else if (outcomes[i].time > t) {
            parts.controls.push_back(i);
        }
    }
    if (parts.cases.empty()) throw DataError("time_dependent_auc: no cases by the horizon");
    if (parts.controls.empty()) throw DataError("time_dependent_auc: no controls past the horizon");
    double gt = G.at(t);
    if (gt <= 0.0) throw NumericError("time_dependent_auc: zero censoring weight at horizon");
    parts.control_w = 1.0 / gt;
    return parts;
}

}  // namespace

double time_dependent_auc(const std::vector<double>& scores,
                          const std::vector<SurvivalOutcome>& outcomes, double t,
                          const CensoringModel& G) {
    if (scores.size() != outcomes.size()) throw DataError("score length does not match outcomes");
    AucParts parts = auc_parts(outcomes, t, G);
    double num = 0.0, den = 0.0;
    for (std::size_t a = 0; a < parts.cases.size(); ++a) {
        double si = scores[parts.cases[a]];
        double acc = 0.0;
        for (std::size_t c : parts.controls) {
            double sj = scores[c];
            acc += si > sj ? 1.0 : (si == sj ? 0.5 : 0.0);
        }
        num += parts.case_w[a] * parts.control_w * acc;
        den += parts.case_w[a] * parts.control_w * static_cast<double>(parts.controls.size());
    }
    return num / den;
}

RocCurve roc_points(const std::vector<double>& scores,
                    const std::vector<SurvivalOutcome>& outcomes, double t,
                    const CensoringModel& G) {
    if (scores.size() != outcomes.size()) throw DataError("score length does not match outcomes");
    AucParts parts = auc_parts(outcomes, t, G);

    double case_total = 0.0;
    for (double w : parts.case_w) case_total += w;

    // Threshold sweep over descending unique scores; ties advance both rates.
    std::vector<double> thresholds;
    for (std::size_t i : parts.cases) thresholds.push_back(scores[i]);
    for (std::size_t j : parts.controls) thresholds.push_back(scores[j]);
    std::sort(thresholds.rbegin(), thresholds.rend());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    RocCurve roc;
    roc.fpr.push_back(0.0);
    roc.tpr.push_back(0.0);
    for (double thr : thresholds) {
        double tp = 0.0;
        std::size_t fp_count = 0;
        for (std::size_t a = 0; a < parts.cases.size(); ++a)
            if (scores[parts.cases[a]] >= thr) tp += parts.case_w[a];
        for (std::size_t j : parts.controls)
            if (scores[j] >= thr) ++fp_count;
        roc.tpr.push_back(tp / case_total);
        // Controls share one weight, so the rate is a pure count ratio; this
        // keeps the terminal point at exactly (1, 1).
        roc.fpr.push_back(static_cast<double>(fp_count) /
                          static_cast<double>(parts.controls.size()));
    }
    roc.auc = time_dependent_auc(scores, outcomes, t, G);
    return roc;
}

double brier_score(const std::vector<double>& surv, const std::vector<SurvivalOutcome>& outcomes,
                   double t, const CensoringModel& G) {
    const std::size_t n = outcomes.size();
    if (surv.size() != n) throw DataError("prediction length does not match outcomes");
    std::vector<double> terms(n, 0.0);
    double gt = G.at(t);
    for (std::size_t i = 0; i < n; ++i) {
        if (outcomes[i].time <= t && outcomes[i].status == 1) {
            double g = G.before(outcomes[i].time);
            if (g <= 0.0) throw NumericError("brier_score: zero censoring weight at an event");
            terms[i] = surv[i] * surv[i] / g;
        } else if (outcomes[i].time > t) {
            if (gt <= 0.0) throw NumericError("brier_score: zero censoring weight at the horizon");
            terms[i] = (1.0 - surv[i]) * (1.0 - surv[i]) / gt;
        }
        // censored at or before t: no contribution
    }
    return pairwise_sum(terms) / static_cast<double>(n);
}

double integrated_brier(const BrierCurve& curve, double tau) {
    if (curve.times.empty()) throw DataError("integrated_brier: empty curve");
    if (!(tau > 0.0)) throw ConfigError("integrated_brier: tau must be positive");
    if (tau > curve.times.back() + 1e-12)
        throw DataError("integrated_brier: tau beyond the curve grid");
    if (curve.times.front() > 1e-12)
        throw DataError("integrated_brier: grid must start at 0");

    double integral = 0.0;
    for (std::size_t k = 1; k < curve.times.size(); ++k) {
        double t0 = curve.times[k - 1], t1 = curve.times[k];
        if (t0 >= tau) break;
        double v0 = curve.values[k - 1], v1 = curve.values[k];
        if (t1 > tau) {  // clip the last segment at tau
            double f = (tau - t0) / (t1 - t0);
            v1 = v0 + f * (v1 - v0);
            t1 = tau;
        }
        integral += 0.5 * (v0 + v1) * (t1 - t0);
    }
    return integral / tau;
}

double dot632plus(double apparent, double oob, double gamma) {
    double r = 0.0;
    if (oob > apparent && gamma > apparent) r = (oob - apparent) / (gamma - apparent);
    r = std::clamp(r, 0.0, 1.0);
    double omega = 0.632 / (1.0 - 0.368 * r);
    return (1.0 - omega) * apparent + omega * std::min(oob, gamma);
}

namespace {

PredictionErrorCurves pec_impl(const SurvivalDataset& ds, const ModelFitter& fitter,
                               const ResamplingPlan& plan, const std::vector<double>& grid,
                               std::uint64_t seed, bool threaded) {
    if (plan.kind != ResamplingPlan::Kind::bootstrap)
        throw ConfigError("prediction_error_curve needs a bootstrap plan");
    if (grid.empty()) throw ConfigError("prediction_error_curve: empty time grid");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (grid[k] <= grid[k - 1]) throw ConfigError("prediction_error_curve: grid must increase");

    const std::size_t n = ds.n();
    const std::size_t T = grid.size();
    const std::size_t B = plan.replicates();
    CensoringModel G = censoring_km(ds.outcomes);

    PredictionErrorCurves out;
    out.grid = grid;

    // Null model: full-data KM prediction for everyone.
    KMCurve km = km_estimate(ds.outcomes);
    out.null_model.variant = BrierCurve::Variant::null_model;
    out.null_model.times = grid;
    for (double t : grid) {
        std::vector<double> pred(n, survival_at(km, t));
        out.null_model.values.push_back(brier_score(pred, ds.outcomes, t, G));
    }

    // Apparent curve: model trained on the full data scores the full data.
    SurvivalModel full_model = fitter(ds, derive_seed(seed, static_cast<std::uint64_t>(B)));
    Matrix apparent_pred(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(T));
    for (std::size_t i = 0; i < n; ++i) {
        Vector x = ds.covariates.row(static_cast<Eigen::Index>(i)).transpose();
        for (std::size_t k = 0; k < T; ++k)
            apparent_pred(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                full_model(x, grid[k]);
    }
    out.apparent.variant = BrierCurve::Variant::apparent;
    out.apparent.times = grid;
    for (std::size_t k = 0; k < T; ++k) {
        std::vector<double> pred(n);
        for (std::size_t i = 0; i < n; ++i)
            pred[i] = apparent_pred(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        out.apparent.values.push_back(brier_score(pred, ds.outcomes, grid[k], G));
    }

    // No-information error gamma(t): every prediction scored against every
    // outcome; the permutation double sum factorizes into case/control means.
    for (std::size_t k = 0; k < T; ++k) {
        double t = grid[k];
        double gt = G.at(t);
        double case_w = 0.0, control_w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (ds.outcomes[i].time <= t && ds.outcomes[i].status == 1) {
                double g = G.before(ds.outcomes[i].time);
                if (g <= 0.0) throw NumericError("no-information error: zero censoring weight");
                case_w += 1.0 / g;
            } else if (ds.outcomes[i].time > t) {
                if (gt <= 0.0) throw NumericError("no-information error: zero censoring weight");
                control_w += 1.0 / gt;
            }
        }
        double mean_s2 = 0.0, mean_1ms2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double s = apparent_pred(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
            mean_s2 += s * s;
            mean_1ms2 += (1.0 - s) * (1.0 - s);
        }
        mean_s2 /= static_cast<double>(n);
        mean_1ms2 /= static_cast<double>(n);
        out.no_information.push_back((case_w * mean_s2 + control_w * mean_1ms2) /
                                     static_cast<double>(n));
    }

    // Out-of-bag replicates.
    Matrix oob_bs(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(T));
    oob_bs.setConstant(std::numeric_limits<double>::quiet_NaN());
    std::vector<char> ok(B, 0);
    std::vector<std::string> rep_errors(B);
    auto one = [&](std::size_t b) {
        const auto& oob = plan.out_sample[b];
        if (oob.empty()) {
            rep_errors[b] = "empty out-of-bag set";
            return;
        }
        try {
            SurvivalDataset train = subset_rows(ds, plan.in_sample[b]);
            SurvivalModel model = fitter(train, derive_seed(seed, static_cast<std::uint64_t>(b)));
            std::vector<SurvivalOutcome> oob_outcomes;
            oob_outcomes.reserve(oob.size());
            for (int i : oob) oob_outcomes.push_back(ds.outcomes[static_cast<std::size_t>(i)]);
            for (std::size_t k = 0; k < T; ++k) {
                std::vector<double> pred(oob.size());
                for (std::size_t a = 0; a < oob.size(); ++a) {
                    Vector x = ds.covariates.row(oob[a]).transpose();
                    pred[a] = model(x, grid[k]);
                }
                oob_bs(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) =
                    brier_score(pred, oob_outcomes, grid[k], G);
            }
            ok[b] = 1;
        } catch (const std::exception& e) {
            rep_errors[b] = e.what();
        }
    };
    if (threaded)
        parallel_for(B, one);
    else
        serial_for(B, one);

    for (std::size_t b = 0; b < B; ++b) {
        if (ok[b])
            ++out.replicates_used;
        else {
            ++out.replicates_failed;
            out.warnings.push_back("replicate " + std::to_string(b) + " skipped: " + rep_errors[b]);
        }
    }
    if (out.replicates_used * 2 < static_cast<int>(B))
        throw DataError("prediction_error_curve: more than half of the replicates failed");

    out.dot632plus_curve.variant = BrierCurve::Variant::dot632plus;
    out.dot632plus_curve.times = grid;
    for (std::size_t k = 0; k < T; ++k) {
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(out.replicates_used));
        for (std::size_t b = 0; b < B; ++b)
            if (ok[b]) vals.push_back(oob_bs(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)));
        double mean = pairwise_sum(vals) / static_cast<double>(vals.size());
        out.oob_mean.push_back(mean);
        out.oob_q025.push_back(quantile(vals, 0.025));
        out.oob_q975.push_back(quantile(vals, 0.975));
        out.dot632plus_curve.values.push_back(
            dot632plus(out.apparent.values[k], mean, out.no_information[k]));
    }
    return out;
}

}  // namespace

PredictionErrorCurves prediction_error_curve(const SurvivalDataset& ds, const ModelFitter& fitter,
                                             const ResamplingPlan& plan,
                                             const std::vector<double>& grid, std::uint64_t seed) {
    return pec_impl(ds, fitter, plan, grid, seed, true);
}

PredictionErrorCurves prediction_error_curve_serial(const SurvivalDataset& ds,
                                                    const ModelFitter& fitter,
                                                    const ResamplingPlan& plan,
                                                    const std::vector<double>& grid,
                                                    std::uint64_t seed) {
    return pec_impl(ds, fitter, plan, grid, seed, false);
}

CalibrationResult calibration_fit(const std::vector<double>& pred_probs,
                                  const std::vector<SurvivalOutcome>& outcomes, int n_groups,
                                  double horizon, int bootstrap, std::uint64_t seed) {
    const std::size_t n = outcomes.size();
    if (pred_probs.size() != n) throw DataError("prediction length does not match outcomes");
    if (n_groups < 2) throw ConfigError("calibration_fit: need at least 2 groups");
    if (static_cast<std::size_t>(n_groups) > n)
        throw DataError("calibration_fit: more groups than patients");

    // Equal-size rank chunks by predicted probability (ties by index).
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pred_probs[a] != pred_probs[b]) return pred_probs[a] < pred_probs[b];
        return a < b;
    });
    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(n_groups));
    for (std::size_t r = 0; r < n; ++r)
        groups[r * static_cast<std::size_t>(n_groups) / n].push_back(order[r]);

    CalibrationResult res;
    res.groups = n_groups;
    res.horizon = horizon;
    std::vector<double> x, y;
    for (int g = 0; g < n_groups; ++g) {
        const auto& members = groups[static_cast<std::size_t>(g)];
        if (members.empty())
            throw DataError("calibration_fit: group " + std::to_string(g + 1) + " is empty");
        double mean_pred = 0.0;
        std::vector<SurvivalOutcome> sub;
        sub.reserve(members.size());
        for (std::size_t i : members) {
            mean_pred += pred_probs[i];
            sub.push_back(outcomes[i]);
        }
        mean_pred /= static_cast<double>(members.size());
        KMCurve km = km_estimate(sub);
        double s_km = survival_at(km, horizon);
        if (s_km <= 0.0 || s_km >= 1.0)
            throw DataError("calibration_fit: group " + std::to_string(g + 1) +
                            " has degenerate KM survival at the horizon");
        if (mean_pred <= 0.0 || mean_pred >= 1.0)
            throw DataError("calibration_fit: group " + std::to_string(g + 1) +
                            " has degenerate mean prediction");
        res.pred.push_back(mean_pred);
        res.observed.push_back(s_km);
        x.push_back(std::log(-std::log(mean_pred)));
        y.push_back(std::log(-std::log(s_km)));

        // Bootstrap the group KM at the horizon.
        std::vector<double> boot_vals;
        boot_vals.reserve(static_cast<std::size_t>(bootstrap));
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(g)));
        for (int r = 0; r < bootstrap; ++r) {
            std::vector<SurvivalOutcome> resampled(sub.size());
            for (auto& o : resampled) o = sub[rng.uniform_int(sub.size())];
            boot_vals.push_back(survival_at(km_estimate(resampled), horizon));
        }
        res.ci_lo.push_back(quantile(boot_vals, 0.025));
        res.ci_hi.push_back(quantile(boot_vals, 0.975));
    }

    double xm = 0.0, ym = 0.0;
    for (int g = 0; g < n_groups; ++g) {
        xm += x[static_cast<std::size_t>(g)];
        ym += y[static_cast<std::size_t>(g)];
    }
    xm /= n_groups;
    ym /= n_groups;
    double sxx = 0.0, sxy = 0.0;
    for (int g = 0; g < n_groups; ++g) {
        double dx = x[static_cast<std::size_t>(g)] - xm;
        sxx += dx * dx;
        sxy += dx * (y[static_cast<std::size_t>(g)] - ym);
    }
    if (sxx <= 0.0)
        throw NumericError("calibration_fit: predictions identical across groups");
    res.slope = sxy / sxx;
    res.intercept = ym - res.slope * xm;
    for (int g = 0; g < n_groups; ++g)
        res.residuals.push_back(y[static_cast<std::size_t>(g)] -
                                (res.intercept + res.slope * x[static_cast<std::size_t>(g)]));
    return res;
}

LogRankResult risk_group_logrank(const std::vector<double>& scores,
                                 const std::vector<SurvivalOutcome>& outcomes,
                                 const std::vector<double>& quantiles) {
    if (scores.size() != outcomes.size()) throw DataError("score length does not match outcomes");
    if (quantiles.empty()) throw ConfigError("risk_group_logrank: no split quantiles given");
    bool all_equal = std::adjacent_find(scores.begin(), scores.end(),
                                        std::not_equal_to<>()) == scores.end();
    if (all_equal) throw DataError("risk_group_logrank: all scores equal");

    std::vector<double> thresholds;
    for (double q : quantiles) {
        if (q <= 0.0 || q >= 1.0) throw ConfigError("risk_group_logrank: quantiles must be in (0,1)");
        thresholds.push_back(quantile(scores, q));
    }
    std::sort(thresholds.begin(), thresholds.end());

    std::vector<int> groups(scores.size(), 0);
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (double thr : thresholds)
            if (scores[i] > thr) ++groups[i];
    return logrank_test(outcomes, groups);
}

std::string roc_to_csv(const RocCurve& roc) {
    std::ostringstream out;
    out << "fpr,tpr\n";
    for (std::size_t k = 0; k < roc.fpr.size(); ++k)
        out << fmt_num(roc.fpr[k]) << ',' << fmt_num(roc.tpr[k]) << '\n';
    return out.str();
}

std::string pec_to_csv(const PredictionErrorCurves& pec) {
    std::ostringstream out;
    out << "time,null,apparent,dot632plus,oob_q025,oob_q975\n";
    for (std::size_t k = 0; k < pec.grid.size(); ++k)
        out << fmt_num(pec.grid[k]) << ',' << fmt_num(pec.null_model.values[k]) << ','
            << fmt_num(pec.apparent.values[k]) << ',' << fmt_num(pec.dot632plus_curve.values[k])
            << ',' << fmt_num(pec.oob_q025[k]) << ',' << fmt_num(pec.oob_q975[k]) << '\n';
    return out.str();
}

std::string calibration_to_csv(const CalibrationResult& cal) {
    std::ostringstream out;
    out << "group,pred,observed,ci_lo,ci_hi\n";
    for (int g = 0; g < cal.groups; ++g)
        out << (g + 1) << ',' << fmt_num(cal.pred[static_cast<std::size_t>(g)]) << ','
            << fmt_num(cal.observed[static_cast<std::size_t>(g)]) << ','
            << fmt_num(cal.ci_lo[static_cast<std::size_t>(g)]) << ','
            << fmt_num(cal.ci_hi[static_cast<std::size_t>(g)]) << '\n';
    return out.str();
}

}  // namespace survkit
