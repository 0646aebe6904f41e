#include "survkit/nonparametric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "survkit/special.hpp"

namespace survkit {

KMCurve km_estimate(const std::vector<SurvivalOutcome>& outcomes) {
    if (outcomes.empty()) throw DataError("km_estimate: empty input");
    const std::size_t n = outcomes.size();

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return outcomes[a].time < outcomes[b].time;
    });

    KMCurve curve;
    curve.n = n;
    double s = 1.0;
    std::size_t i = 0;
    while (i < n) {
        double t = outcomes[order[i]].time;
        int d = 0;
        std::size_t j = i;
        while (j < n && outcomes[order[j]].time == t) {
            d += outcomes[order[j]].status;
            ++j;
        }
        if (d > 0) {
            int y = static_cast<int>(n - i);  // everyone with time >= t
            s *= 1.0 - static_cast<double>(d) / y;
            curve.times.push_back(t);
            curve.survival.push_back(s);
            curve.at_risk.push_back(y);
            curve.events.push_back(d);
        }
        i = j;
    }
    return curve;
}

double survival_at(const KMCurve& curve, double t) {
    auto it = std::upper_bound(curve.times.begin(), curve.times.end(), t);
    if (it == curve.times.begin()) return 1.0;
    return curve.survival[static_cast<std::size_t>(it - curve.times.begin()) - 1];
}

double survival_before(const KMCurve& curve, double t) {
    auto it = std::lower_bound(curve.times.begin(), curve.times.end(), t);
    if (it == curve.times.begin()) return 1.0;
    return curve.survival[static_cast<std::size_t>(it - curve.times.begin()) - 1];
}

std::optional<double> median_survival(const KMCurve& curve) {
    for (std::size_t k = 0; k < curve.times.size(); ++k)
        if (curve.survival[k] <= 0.5) return curve.times[k];
    return std::nullopt;
}

LogRankResult logrank_test(const std::vector<SurvivalOutcome>& outcomes,
                           const std::vector<int>& groups) {
    if (groups.size() != outcomes.size())
        throw DataError("logrank_test: group labels must match outcomes");
    std::map<int, int> label_to_idx;
    for (int g : groups) label_to_idx.emplace(g, 0);
    int G = 0;
    for (auto& [label, idx] : label_to_idx) idx = G++;
    if (G < 2) throw DataError("logrank_test: need at least two groups");

    const std::size_t n = outcomes.size();
    std::vector<int> gi(n);
    for (std::size_t i = 0; i < n; ++i) gi[i] = label_to_idx[groups[i]];

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return outcomes[a].time < outcomes[b].time;
    });

    Vector observed = Vector::Zero(G);
    Vector expected = Vector::Zero(G);
    Matrix V = Matrix::Zero(G, G);
    std::vector<double> y_group(static_cast<std::size_t>(G), 0.0);
    for (std::size_t i = 0; i < n; ++i) y_group[static_cast<std::size_t>(gi[i])] += 1.0;

    double total_events = 0.0;
    std::size_t i = 0;
    double y_total = static_cast<double>(n);
    while (i < n) {
        double t = outcomes[order[i]].time;
        std::size_t j = i;
        double d_total = 0.0;
        std::vector<double> d_group(static_cast<std::size_t>(G), 0.0);
        while (j < n && outcomes[order[j]].time == t) {
            if (outcomes[order[j]].status == 1) {
                d_total += 1.0;
                d_group[static_cast<std::size_t>(gi[order[j]])] += 1.0;
            }
            ++j;
        }
        if (d_total > 0.0) {
            total_events += d_total;
            for (int g = 0; g < G; ++g) {
                observed[g] += d_group[static_cast<std::size_t>(g)];
                expected[g] += d_total * y_group[static_cast<std::size_t>(g)] / y_total;
            }
            if (y_total > 1.0) {
                double c = d_total * (y_total - d_total) / (y_total - 1.0);
                for (int g = 0; g < G; ++g) {
                    for (int h = 0; h < G; ++h) {
                        double pg = y_group[static_cast<std::size_t>(g)] / y_total;
                        double ph = y_group[static_cast<std::size_t>(h)] / y_total;
                        V(g, h) += c * ((g == h ? pg : 0.0) - pg * ph);
                    }
                }
            }
        }
        // Everyone observed at t leaves the risk sets.
        for (std::size_t l = i; l < j; ++l) y_group[static_cast<std::size_t>(gi[order[l]])] -= 1.0;
        y_total -= static_cast<double>(j - i);
        i = j;
    }
    if (total_events == 0.0) throw DataError("logrank_test: no events in the data");

    // Drop the last group; the quadratic form uses the (G-1)-dim margin.
    int m = G - 1;
    Vector diff = (observed - expected).head(m);
    Matrix Vm = V.topLeftCorner(m, m);
    Vector sol = Vm.completeOrthogonalDecomposition().solve(diff);
    double stat = diff.dot(sol);
    if (stat < 0.0) stat = 0.0;

    LogRankResult res;
    res.statistic = stat;
    res.df = m;
    res.p_value = chi_squared_sf(stat, static_cast<double>(m));
    res.observed.assign(observed.data(), observed.data() + G);
    res.expected.assign(expected.data(), expected.data() + G);
    return res;
}

CensoringModel censoring_km(const std::vector<SurvivalOutcome>& outcomes) {
    std::vector<SurvivalOutcome> flipped(outcomes);
    for (auto& o : flipped) o.status = 1 - o.status;
    CensoringModel model;
    model.curve = km_estimate(flipped);
    return model;
}

std::string km_to_csv(const KMCurve& curve) {
    std::ostringstream out;
    out << "time,survival,at_risk,events\n";
    for (std::size_t k = 0; k < curve.times.size(); ++k)
        out << fmt_num(curve.times[k]) << ',' << fmt_num(curve.survival[k]) << ','
            << curve.at_risk[k] << ',' << curve.events[k] << '\n';
    return out.str();
}

}  // namespace survkit
