// Compares the OpenMP kernels against their serial reference implementations:
// wall time and the largest result difference (which must be exactly zero,
// since the parallel paths reduce in a fixed order).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "survkit/metrics.hpp"
#include "survkit/parallel.hpp"
#include "survkit/penalized.hpp"
#include "survkit/simulate.hpp"

using namespace survkit;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Row {
    const char* name;
    double serial_ms;
    double parallel_ms;
    double max_diff;
};

void print_table(const std::vector<Row>& rows) {
    std::printf("%-28s %12s %12s %10s %12s\n", "kernel", "serial ms", "parallel ms", "speedup",
                "max |diff|");
    for (const auto& r : rows) {
        std::printf("%-28s %12.1f %12.1f %9.2fx %12g\n", r.name, r.serial_ms, r.parallel_ms,
                    r.serial_ms / r.parallel_ms, r.max_diff);
    }
}

template <typename F>
std::pair<double, decltype(std::declval<F>()())> timed(F&& f) {
    const double t0 = now_ms();
    auto result = f();
    return {now_ms() - t0, std::move(result)};
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", max_threads());
    std::vector<Row> rows;

    {
        SimSpec spec;
        spec.n = 300;
        spec.p = 400;
        SurvivalDataset ds = standardize(simulate_cox_data(spec, 7));
        auto [ts, rs] = timed([&] { return univariate_cox_screen_serial(ds, 0.05); });
        auto [tp, rp] = timed([&] { return univariate_cox_screen(ds, 0.05); });
        double diff = 0.0;
        for (std::size_t i = 0; i < rs.second.rows.size(); ++i)
            diff = std::max(diff, std::abs(rs.second.rows[i].p_value - rp.second.rows[i].p_value));
        rows.push_back({"univariate screen", ts, tp, diff});
    }

    {
        SimSpec spec;
        spec.n = 150;
        spec.p = 80;
        SurvivalDataset ds = standardize(simulate_cox_data(spec, 11));
        ResamplingPlan plan = make_cv_folds(ds.outcomes, 3, 5);
        auto [ts, rs] = timed([&] { return cv_select_lambda_serial(ds, 1.0, plan, 30); });
        auto [tp, rp] = timed([&] { return cv_select_lambda(ds, 1.0, plan, 30); });
        double diff = std::abs(rs.lambda_star - rp.lambda_star);
        for (std::size_t l = 0; l < rs.path.cv_mean.size(); ++l)
            diff = std::max(diff, std::abs(rs.path.cv_mean[l] - rp.path.cv_mean[l]));
        rows.push_back({"cross-validated lasso path", ts, tp, diff});
    }

    {
        SimSpec spec;
        spec.n = 120;
        spec.p = 40;
        SurvivalDataset ds = standardize(simulate_cox_data(spec, 13));
        auto [ts, rs] = timed([&] { return stability_selection_serial(ds, 1.0, 10, 5, 0.6, 3); });
        auto [tp, rp] = timed([&] { return stability_selection(ds, 1.0, 10, 5, 0.6, 3); });
        double diff = 0.0;
        for (std::size_t j = 0; j < rs.frequency.size(); ++j)
            diff = std::max(diff, std::abs(rs.frequency[j] - rp.frequency[j]));
        rows.push_back({"stability selection", ts, tp, diff});
    }

    {
        SimSpec spec;
        spec.n = 120;
        spec.p = 20;
        spec.signal_cols = {0, 1};
        SurvivalDataset ds = standardize(simulate_cox_data(spec, 17));
        ResamplingPlan plan = bootstrap_plan(ds.n(), 20, 23);
        PenaltySpec pen;
        pen.lambda = 0.05;
        pen.weights = PenaltySpec::default_weights(ds);
        ModelFitter fitter = [pen](const SurvivalDataset& train, std::uint64_t) {
            CoxFit fit = fit_enet(train, pen);
            return SurvivalModel(
                [fit](const Vector& x, double t) { return predict_survival(fit, x, t); });
        };
        std::vector<double> grid{0.0};
        for (const auto& o : ds.outcomes) {
            if (o.status == 1) grid.push_back(o.time);
        }
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        auto [ts, rs] =
            timed([&] { return prediction_error_curve_serial(ds, fitter, plan, grid, 29); });
        auto [tp, rp] = timed([&] { return prediction_error_curve(ds, fitter, plan, grid, 29); });
        double diff = 0.0;
        for (std::size_t t = 0; t < rs.grid.size(); ++t)
            diff = std::max(diff,
                            std::abs(rs.dot632plus_curve.values[t] - rp.dot632plus_curve.values[t]));
        rows.push_back({"prediction error curves", ts, tp, diff});
    }

    std::printf("\n");
    print_table(rows);
    return 0;
}
