#include "survkit/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "survkit/rng.hpp"

namespace survkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exposure bookkeeping for the piecewise-constant baseline.  frac(i, j) is
// the fraction of interval j covered by (0, T_i], so H0(T_i) = sum_j g_j
// frac(i, j) when g_j is the hazard increment over interval j.
struct ExposureLayout {
    Matrix frac;                  // n x J
    std::vector<int> event_interval;  // -1 for censored rows
    std::vector<int> event_count;     // events per interval
    std::vector<double> log_len;
};

ExposureLayout make_layout(const std::vector<SurvivalOutcome>& outcomes,
                           const BaselineHazardPrior& baseline) {
    const std::size_t n = outcomes.size();
    const std::size_t J = baseline.intervals();
    ExposureLayout lay;
    lay.frac = Matrix::Zero(n, J);
    lay.event_interval.assign(n, -1);
    lay.event_count.assign(J, 0);
    lay.log_len.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
        lay.log_len[j] = std::log(baseline.cuts[j + 1] - baseline.cuts[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double t = outcomes[i].time;
        for (std::size_t j = 0; j < J; ++j) {
            const double lo = baseline.cuts[j];
            const double hi = baseline.cuts[j + 1];
            if (t <= lo) break;
            lay.frac(i, j) = (std::min(t, hi) - lo) / (hi - lo);
        }
        if (outcomes[i].status == 1) {
            // Interval containing t: (cuts[j-1], cuts[j]].  Events at the far
            // end beyond the last cut cannot occur because the partition
            // extends to the largest observed time.
            std::size_t j = 0;
            while (j + 1 < J && t > baseline.cuts[j + 1]) ++j;
            lay.event_interval[i] = static_cast<int>(j);
            ++lay.event_count[j];
        }
    }
    return lay;
}

double full_loglik_state(const ExposureLayout& lay, const Vector& g, const Vector& eta) {
    const std::size_t n = static_cast<std::size_t>(eta.size());
    Vector cumhaz = lay.frac * g;
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const int j = lay.event_interval[i];
        if (j >= 0) ll += std::log(g[j]) - lay.log_len[j] + eta[i];
        ll -= std::exp(eta[i]) * cumhaz[i];
    }
    return ll;
}

// Per-kind conditional log prior for one coefficient, up to constants.
struct CoefPrior {
    // var is the conditional Gaussian variance where one applies; for the
    // fixed-rate Laplace the density is used directly.
    bool gaussian = true;
    double var = 1.0;
    double laplace_rate = 0.0;

    double logp(double b) const {
        if (gaussian) return -0.5 * b * b / var;
        return -laplace_rate * std::abs(b);
    }
};

struct Sweep {
    std::vector<int> order;  // feature columns in name order
};

Sweep name_order(const std::vector<FeatureMeta>& features) {
    Sweep s;
    s.order.resize(features.size());
    std::iota(s.order.begin(), s.order.end(), 0);
    std::sort(s.order.begin(), s.order.end(), [&](int a, int b) {
        return features[static_cast<std::size_t>(a)].name < features[static_cast<std::size_t>(b)].name;
    });
    return s;
}

}  // namespace

void PriorSpec::validate() const {
    if (laplace_rate <= 0.0) throw ConfigError("laplace rate must be positive");
    if (rate_shape <= 0.0 || rate_rate <= 0.0) throw ConfigError("rate hyperprior parameters must be positive");
    if (!(inclusion_prob > 0.0 && inclusion_prob < 1.0))
        throw ConfigError("inclusion probability must lie in (0, 1)");
    if (slab_shape <= 0.0 || slab_scale <= 0.0) throw ConfigError("slab hyperparameters must be positive");
    if (hs_local_scale <= 0.0 || hs_global_scale <= 0.0)
        throw ConfigError("horseshoe scales must be positive");
    if (mandatory_sd <= 0.0) throw ConfigError("mandatory prior sd must be positive");
}

void BaselineHazardPrior::validate() const {
    if (shape.empty() || rate.size() != shape.size() || cuts.size() != shape.size() + 1)
        throw ConfigError("baseline prior sizes are inconsistent");
    if (cuts.front() != 0.0) throw ConfigError("baseline partition must start at 0");
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        if (!(cuts[j + 1] > cuts[j])) throw ConfigError("baseline cut points must increase");
    }
    for (std::size_t j = 0; j < shape.size(); ++j) {
        if (shape[j] <= 0.0 || rate[j] <= 0.0) throw ConfigError("baseline gamma parameters must be positive");
    }
}

BaselineHazardPrior quantile_hazard_prior(const std::vector<SurvivalOutcome>& outcomes, int J,
                                          double concentration) {
    if (J < 1) throw ConfigError("baseline partition needs at least one interval");
    if (concentration <= 0.0) throw ConfigError("prior concentration must be positive");
    if (outcomes.empty()) throw DataError("no observations");
    std::vector<double> event_times;
    double t_max = 0.0;
    double exposure = 0.0;
    for (const auto& o : outcomes) {
        t_max = std::max(t_max, o.time);
        exposure += o.time;
        if (o.status == 1) event_times.push_back(o.time);
    }
    if (event_times.empty()) throw DataError("no events to anchor the baseline partition");
    if (t_max <= 0.0) throw DataError("all observation times are zero");
    std::sort(event_times.begin(), event_times.end());

    std::vector<double> cuts;
    cuts.push_back(0.0);
    for (int j = 1; j < J; ++j) {
        const double q = quantile(event_times, static_cast<double>(j) / J);
        if (q > cuts.back() && q < t_max) cuts.push_back(q);
    }
    cuts.push_back(t_max);

    const double rate0 = static_cast<double>(event_times.size()) / exposure;
    BaselineHazardPrior prior;
    prior.cuts = cuts;
    const std::size_t m = cuts.size() - 1;
    prior.shape.resize(m);
    prior.rate.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double len = cuts[j + 1] - cuts[j];
        // Increment mean matches the crude rate; total prior weight equals
        // `concentration` pseudo-events spread across the partition.
        prior.shape[j] = concentration * rate0 * len;
        prior.rate[j] = concentration;
    }
    prior.validate();
    return prior;
}

double full_loglik(const SurvivalDataset& ds, const BaselineHazardPrior& baseline,
                   const Vector& increments, const Vector& beta) {
    baseline.validate();
    if (static_cast<std::size_t>(increments.size()) != baseline.intervals())
        throw ConfigError("increment vector does not match the partition");
    if (beta.size() != static_cast<Eigen::Index>(ds.p())) throw ConfigError("coefficient length mismatch");
    ExposureLayout lay = make_layout(ds.outcomes, baseline);
    Vector eta = ds.covariates * beta;
    return full_loglik_state(lay, increments, eta);
}

double log_joint_laplace(const SurvivalDataset& ds, const BaselineHazardPrior& baseline,
                         const Vector& increments, const Vector& beta, double rate,
                         double mandatory_sd) {
    double lp = full_loglik(ds, baseline, increments, beta);
    for (std::size_t j = 0; j < ds.p(); ++j) {
        const double b = beta[static_cast<Eigen::Index>(j)];
        if (ds.features[j].mandatory) {
            lp += -0.5 * b * b / (mandatory_sd * mandatory_sd);
        } else {
            lp += -rate * std::abs(b);
        }
    }
    return lp;
}

PosteriorSamples run_mcmc(const SurvivalDataset& ds, const PriorSpec& prior,
                          const BaselineHazardPrior& baseline, int iterations, int burn_in,
                          std::uint64_t seed, int thinning) {
    prior.validate();
    baseline.validate();
    ds.validate();
    if (iterations < 1) throw ConfigError("iterations must be positive");
    if (burn_in < 0 || burn_in >= iterations)
        throw ConfigError("burn-in must be shorter than the chain");
    if (thinning < 1) throw ConfigError("thinning must be positive");

    const std::size_t n = ds.n();
    const std::size_t p = ds.p();
    const std::size_t J = baseline.intervals();
    const bool ssvs = prior.kind == PriorSpec::Kind::spike_slab;
    const bool hs = prior.kind == PriorSpec::Kind::horseshoe;
    const bool lap = prior.kind == PriorSpec::Kind::laplace;

    ExposureLayout lay = make_layout(ds.outcomes, baseline);
    Sweep sweep = name_order(ds.features);

    // Sufficient statistic for the linear part of an acceptance ratio.
    Vector event_x = Vector::Zero(p);
    for (std::size_t i = 0; i < n; ++i) {
        if (ds.outcomes[i].status == 1) event_x += ds.covariates.row(i).transpose();
    }

    // State.
    Vector beta = Vector::Zero(p);
    Vector g(J);
    for (std::size_t j = 0; j < J; ++j) g[j] = baseline.shape[j] / baseline.rate[j];
    Vector eta = Vector::Zero(n);
    Vector exp_eta = Vector::Ones(n);
    Vector cumhaz = lay.frac * g;

    std::vector<unsigned char> gamma(p, 1);
    Vector tau2 = Vector::Ones(p);    // laplace mixture scales / ssvs slab variances
    Vector lam2 = Vector::Ones(p);    // horseshoe local scales squared
    Vector nu = Vector::Ones(p);
    double global_tau2 = 1.0, xi = 1.0;
    double rate = prior.laplace_rate;

    {
        const double ll0 = full_loglik_state(lay, g, eta);
        if (!std::isfinite(ll0)) throw NumericError("log posterior is not finite at the initial state");
    }

    std::size_t n_pen = 0;
    for (const auto& f : ds.features) n_pen += f.mandatory ? 0u : 1u;

    Rng rng(seed);

    // Adaptive proposal scales, frozen once burn-in ends.
    Vector step(p);
    step.setConstant(0.5 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1))));
    std::vector<int> batch_tries(p, 0), batch_accepts(p, 0);
    long post_tries = 0, post_accepts = 0;
    int adapt_round = 0;

    const int keep = (iterations - burn_in + thinning - 1) / thinning;
    PosteriorSamples out;
    out.kind = prior.kind;
    out.beta = Matrix::Zero(keep, p);
    out.gamma = ssvs ? Matrix::Zero(keep, p) : Matrix();
    out.local_scale = Matrix::Zero(keep, p);
    out.global_scale = Vector::Zero(keep);
    out.hazard = Matrix::Zero(keep, J);
    out.interval_cuts = baseline.cuts;
    out.iterations = iterations;
    out.burn_in = burn_in;
    out.thinning = thinning;
    out.seed = seed;
    out.mandatory.resize(p);
    out.feature_names.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        out.feature_names[j] = ds.features[j].name;
        out.mandatory[j] = ds.features[j].mandatory ? 1 : 0;
    }

    // Log-likelihood change when coefficient col moves by db, given that
    // cumulative hazards are fixed.  Updates eta/exp_eta in place on accept.
    auto loglik_delta = [&](std::size_t col, double db) {
        double d = db * event_x[static_cast<Eigen::Index>(col)];
        for (std::size_t i = 0; i < n; ++i) {
            const double x = ds.covariates(i, col);
            if (x == 0.0) continue;
            d -= (std::exp(eta[i] + x * db) - exp_eta[i]) * cumhaz[i];
        }
        return d;
    };
    auto apply_move = [&](std::size_t col, double db) {
        beta[static_cast<Eigen::Index>(col)] += db;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = ds.covariates(i, col);
            if (x == 0.0) continue;
            eta[i] += x * db;
            exp_eta[i] = std::exp(eta[i]);
        }
    };

    auto coef_prior = [&](std::size_t col) {
        CoefPrior cp;
        if (ds.features[col].mandatory) {
            cp.var = prior.mandatory_sd * prior.mandatory_sd;
        } else if (lap) {
            if (prior.rate_hyperprior) {
                cp.var = tau2[static_cast<Eigen::Index>(col)];
            } else {
                cp.gaussian = false;
                cp.laplace_rate = rate;
            }
        } else if (ssvs) {
            cp.var = tau2[static_cast<Eigen::Index>(col)];
        } else {
            cp.var = global_tau2 * lam2[static_cast<Eigen::Index>(col)];
        }
        return cp;
    };

    for (int it = 0; it < iterations; ++it) {
        const bool adapting = it < burn_in;

        // Coefficient sweep.
        for (int col_i : sweep.order) {
            const std::size_t col = static_cast<std::size_t>(col_i);
            if (ssvs && !ds.features[col].mandatory && gamma[col] == 0) continue;
            const double db = step[col_i] * rng.normal();
            const CoefPrior cp = coef_prior(col);
            const double b0 = beta[col_i];
            const double dlp = loglik_delta(col, db) + cp.logp(b0 + db) - cp.logp(b0);
            ++batch_tries[col];
            if (!adapting) ++post_tries;
            const bool accept = std::isfinite(dlp) && (dlp >= 0.0 || std::log(rng.uniform()) < dlp);
            if (accept) {
                apply_move(col, db);
                ++batch_accepts[col];
                if (!adapting) ++post_accepts;
            }
        }

        // Spike-and-slab birth/death toggles.  A birth draws the proposal
        // from the slab, so the slab density cancels and the ratio reduces to
        // the likelihood ratio times pi/(1-pi); a death is the mirror image.
        if (ssvs) {
            const double logodds = std::log(prior.inclusion_prob) - std::log1p(-prior.inclusion_prob);
            for (int col_i : sweep.order) {
                const std::size_t col = static_cast<std::size_t>(col_i);
                if (ds.features[col].mandatory) continue;
                if (gamma[col] == 0) {
                    const double b = std::sqrt(tau2[col_i]) * rng.normal();
                    const double dlp = loglik_delta(col, b) + logodds;
                    if (std::isfinite(dlp) && (dlp >= 0.0 || std::log(rng.uniform()) < dlp)) {
                        apply_move(col, b);
                        gamma[col] = 1;
                    }
                } else {
                    const double b = beta[col_i];
                    const double dlp = loglik_delta(col, -b) - logodds;
                    if (std::isfinite(dlp) && (dlp >= 0.0 || std::log(rng.uniform()) < dlp)) {
                        apply_move(col, -b);
                        gamma[col] = 0;
                    }
                }
            }
        }

        // Prior latents, visited in the same name order so RNG consumption is
        // independent of column layout.
        if (lap) {
            double sum_tau2 = 0.0;
            for (int col_i : sweep.order) {
                const std::size_t col = static_cast<std::size_t>(col_i);
                if (ds.features[col].mandatory) continue;
                const double ab = std::max(std::abs(beta[col_i]), 1e-10);
                const double inv = rng.inverse_gaussian(rate / ab, rate * rate);
                tau2[col_i] = 1.0 / std::max(inv, 1e-300);
                sum_tau2 += tau2[col_i];
            }
            if (prior.rate_hyperprior && n_pen > 0) {
                const double shape = prior.rate_shape + static_cast<double>(n_pen);
                const double rrate = prior.rate_rate + 0.5 * sum_tau2;
                rate = std::sqrt(rng.gamma(shape, rrate));
            }
        } else if (ssvs) {
            for (int col_i : sweep.order) {
                const std::size_t col = static_cast<std::size_t>(col_i);
                if (ds.features[col].mandatory) continue;
                const double a = prior.slab_shape + 0.5 * gamma[col];
                const double b = prior.slab_scale + 0.5 * gamma[col] * beta[col_i] * beta[col_i];
                tau2[col_i] = rng.inv_gamma(a, b);
            }
        } else if (hs) {
            double ssq = 0.0;  // sum beta_j^2 / lambda_j^2
            for (int col_i : sweep.order) {
                const std::size_t col = static_cast<std::size_t>(col_i);
                if (ds.features[col].mandatory) continue;
                const double b2 = beta[col_i] * beta[col_i];
                lam2[col_i] = rng.inv_gamma(1.0, 1.0 / nu[col_i] + 0.5 * b2 / global_tau2);
                nu[col_i] = rng.inv_gamma(
                    1.0, 1.0 / (prior.hs_local_scale * prior.hs_local_scale) + 1.0 / lam2[col_i]);
                ssq += b2 / lam2[col_i];
            }
            if (n_pen > 0) {
                global_tau2 =
                    rng.inv_gamma(0.5 * (static_cast<double>(n_pen) + 1.0), 1.0 / xi + 0.5 * ssq);
                xi = rng.inv_gamma(
                    1.0, 1.0 / (prior.hs_global_scale * prior.hs_global_scale) + 1.0 / global_tau2);
            }
        }

        // Conjugate baseline increments.
        {
            Vector u = lay.frac.transpose() * exp_eta;
            for (std::size_t j = 0; j < J; ++j) {
                g[j] = rng.gamma(baseline.shape[j] + lay.event_count[j],
                                 baseline.rate[j] + u[static_cast<Eigen::Index>(j)]);
            }
            cumhaz = lay.frac * g;
        }

        // Scale adaptation in batches of 50, aiming for 20-40% acceptance.
        if (adapting) {
            ++adapt_round;
            if (adapt_round % 50 == 0) {
                const double delta = std::min(0.1, 1.0 / std::sqrt(adapt_round / 50.0));
                for (std::size_t c = 0; c < p; ++c) {
                    if (batch_tries[c] == 0) continue;
                    const double acc = static_cast<double>(batch_accepts[c]) / batch_tries[c];
                    if (acc > 0.4) step[static_cast<Eigen::Index>(c)] *= std::exp(delta);
                    else if (acc < 0.2) step[static_cast<Eigen::Index>(c)] *= std::exp(-delta);
                    batch_tries[c] = batch_accepts[c] = 0;
                }
            }
        }

        if (it >= burn_in && (it - burn_in) % thinning == 0) {
            const int d = (it - burn_in) / thinning;
            out.beta.row(d) = beta.transpose();
            if (ssvs) {
                for (std::size_t c = 0; c < p; ++c) out.gamma(d, c) = gamma[c];
            }
            if (hs) {
                // Report the local shrinkage parameter, the reciprocal of the
                // slab scale: large values pull beta_j to zero.  The half-Cauchy
                // is closed under reciprocals, so this draw is still marginally
                // C+(0,1) a priori, and kappa = 1/(1+lambda^2) computed from it
                // is the escape weight used by the selection rule.
                for (std::size_t c = 0; c < p; ++c)
                    out.local_scale(d, c) =
                        1.0 / std::sqrt(lam2[static_cast<Eigen::Index>(c)]);
                out.global_scale[d] = std::sqrt(global_tau2);
            } else {
                out.local_scale.row(d) = tau2.transpose();
                out.global_scale[d] = rate;
            }
            out.hazard.row(d) = g.transpose();
        }
    }

    out.mh_acceptance = post_tries > 0 ? static_cast<double>(post_accepts) / post_tries : 0.0;
    return out;
}

PosteriorSummary posterior_summary(const PosteriorSamples& samples, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("credible level must lie in (0, 1)");
    if (samples.draws() == 0) throw DataError("no retained draws");
    const std::size_t p = samples.p();
    const std::size_t d = samples.draws();
    PosteriorSummary s;
    s.kind = samples.kind;
    s.names = samples.feature_names;
    s.mandatory = samples.mandatory;
    s.level = level;
    s.mean.resize(p);
    s.sd.resize(p);
    s.lower.resize(p);
    s.upper.resize(p);
    const double lo_q = 0.5 * (1.0 - level), hi_q = 1.0 - lo_q;
    std::vector<double> col(d);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < d; ++i) col[i] = samples.beta(i, j);
        const double m = pairwise_sum(col) / static_cast<double>(d);
        double ss = 0.0;
        for (double v : col) ss += (v - m) * (v - m);
        s.mean[static_cast<Eigen::Index>(j)] = m;
        s.sd[static_cast<Eigen::Index>(j)] = d > 1 ? std::sqrt(ss / static_cast<double>(d - 1)) : 0.0;
        s.lower[static_cast<Eigen::Index>(j)] = quantile(col, lo_q);
        s.upper[static_cast<Eigen::Index>(j)] = quantile(col, hi_q);
    }
    if (samples.kind == PriorSpec::Kind::spike_slab) {
        s.inclusion.resize(p);
        for (std::size_t j = 0; j < p; ++j) {
            s.inclusion[static_cast<Eigen::Index>(j)] =
                samples.gamma.col(static_cast<Eigen::Index>(j)).mean();
        }
    }
    if (samples.kind == PriorSpec::Kind::horseshoe) {
        s.kappa.resize(p);
        for (std::size_t j = 0; j < p; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                // local_scale holds the shrinkage parameter (reciprocal slab
                // scale), so this is the escape weight: signals land near 1,
                // heavily shrunk coefficients near 0, lambda == 1 exactly 0.5.
                const double l = samples.local_scale(i, j);
                acc += 1.0 / (1.0 + l * l);
            }
            s.kappa[static_cast<Eigen::Index>(j)] = acc / static_cast<double>(d);
        }
    }
    return s;
}

std::vector<int> select_by_ci(const PosteriorSummary& summary) {
    std::vector<int> out;
    for (std::size_t j = 0; j < summary.names.size(); ++j) {
        if (summary.mandatory[j]) continue;
        const auto k = static_cast<Eigen::Index>(j);
        if (summary.lower[k] > 0.0 || summary.upper[k] < 0.0) out.push_back(static_cast<int>(j));
    }
    return out;
}

std::vector<int> median_probability_model(const PosteriorSummary& summary) {
    if (summary.kind != PriorSpec::Kind::spike_slab)
        throw ConfigError("median probability model requires spike-and-slab draws");
    std::vector<int> out;
    for (std::size_t j = 0; j < summary.names.size(); ++j) {
        if (summary.mandatory[j]) continue;
        if (summary.inclusion[static_cast<Eigen::Index>(j)] > 0.5) out.push_back(static_cast<int>(j));
    }
    return out;
}

std::vector<int> horseshoe_select(const PosteriorSummary& summary, double cutoff) {
    if (summary.kind != PriorSpec::Kind::horseshoe)
        throw ConfigError("shrinkage selection requires horseshoe draws");
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw ConfigError("shrinkage cutoff must lie in (0, 1)");
    std::vector<int> out;
    for (std::size_t j = 0; j < summary.names.size(); ++j) {
        if (summary.mandatory[j]) continue;
        if (summary.kappa[static_cast<Eigen::Index>(j)] >= cutoff) out.push_back(static_cast<int>(j));
    }
    return out;
}

std::string chain_to_csv(const PosteriorSamples& samples) {
    std::ostringstream os;
    const std::size_t p = samples.p();
    const std::size_t J = samples.interval_cuts.size() - 1;
    const bool ssvs = samples.kind == PriorSpec::Kind::spike_slab;
    os << "draw";
    for (const auto& nm : samples.feature_names) os << ",beta_" << nm;
    if (ssvs) {
        for (const auto& nm : samples.feature_names) os << ",gamma_" << nm;
    }
    os << ",global_scale";
    for (std::size_t j = 0; j < J; ++j) os << ",hazard_" << (j + 1);
    os << "\n";
    for (std::size_t i = 0; i < samples.draws(); ++i) {
        os << i;
        for (std::size_t j = 0; j < p; ++j) os << ',' << fmt_num(samples.beta(i, j));
        if (ssvs) {
            for (std::size_t j = 0; j < p; ++j)
                os << ',' << static_cast<int>(samples.gamma(i, j));
        }
        os << ',' << fmt_num(samples.global_scale[static_cast<Eigen::Index>(i)]);
        for (std::size_t j = 0; j < J; ++j) os << ',' << fmt_num(samples.hazard(i, j));
        os << "\n";
    }
    return os.str();
}

std::string summary_to_json(const PosteriorSummary& summary) {
    nlohmann::ordered_json root;
    switch (summary.kind) {
        case PriorSpec::Kind::laplace: root["prior"] = "laplace"; break;
        case PriorSpec::Kind::spike_slab: root["prior"] = "spike_slab"; break;
        case PriorSpec::Kind::horseshoe: root["prior"] = "horseshoe"; break;
    }
    root["level"] = summary.level;
    nlohmann::ordered_json coefs = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < summary.names.size(); ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        nlohmann::ordered_json c;
        c["name"] = summary.names[j];
        c["mandatory"] = summary.mandatory[j] != 0;
        c["mean"] = summary.mean[k];
        c["sd"] = summary.sd[k];
        c["lower"] = summary.lower[k];
        c["upper"] = summary.upper[k];
        if (summary.kind == PriorSpec::Kind::spike_slab) c["inclusion"] = summary.inclusion[k];
        if (summary.kind == PriorSpec::Kind::horseshoe) c["kappa"] = summary.kappa[k];
        coefs.push_back(std::move(c));
    }
    root["coefficients"] = std::move(coefs);
    return root.dump(2) + "\n";
}

}  // namespace survkit
