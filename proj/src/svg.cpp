#include "survkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace survkit {

namespace {

// Fixed geometry shared by every plot.
constexpr double kWidth = 640.0, kHeight = 440.0;
constexpr double kLeft = 64.0, kRight = 20.0, kTop = 36.0, kBottom = 48.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* kPalette[] = {"#2b6cb0", "#c53030", "#2f855a", "#b7791f", "#6b46c1",
                          "#00838f", "#ad1457", "#4e342e", "#37474f", "#558b2f"};
constexpr int kPaletteSize = 10;

struct Axis {
    double lo = 0.0, hi = 1.0;
    double x(double v, double x0, double w) const {
        if (hi == lo) return x0 + 0.5 * w;
        return x0 + (v - lo) / (hi - lo) * w;
    }
};

Axis fit_axis(double lo, double hi) {
    if (!(hi > lo)) {
        const double pad = std::max(std::abs(lo), 1.0) * 0.05;
        return {lo - pad, hi + pad};
    }
    return {lo, hi};
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

class Canvas {
  public:
    Canvas(const std::string& title, Axis x, Axis y, const std::string& xlabel,
           const std::string& ylabel)
        : x_(x), y_(y) {
        os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
            << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
        os_ << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
        os_ << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << esc(title) << "</text>\n";
        axes(xlabel, ylabel);
    }

    double px(double v) const { return x_.x(v, kLeft, kPlotW); }
    double py(double v) const { return y_.x(v, kTop + kPlotH, -kPlotH); }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, int color,
                  bool dashed = false) {
        if (xs.empty()) return;
        os_ << "<polyline fill=\"none\" stroke=\"" << kPalette[color % kPaletteSize]
            << "\" stroke-width=\"1.6\"";
        if (dashed) os_ << " stroke-dasharray=\"5 3\"";
        os_ << " points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) os_ << ' ';
            os_ << fmt_num(px(xs[i])) << ',' << fmt_num(py(ys[i]));
        }
        os_ << "\"/>\n";
    }

    // Step function drawn with H/V commands; each value change is exactly one
    // V command.
    void steps(const std::vector<double>& xs, const std::vector<double>& ys, double x_start,
               double y_start, int color) {
        os_ << "<path fill=\"none\" stroke=\"" << kPalette[color % kPaletteSize]
            << "\" stroke-width=\"1.8\" d=\"M " << fmt_num(px(x_start)) << ' '
            << fmt_num(py(y_start));
        double cur = y_start;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            os_ << " H " << fmt_num(px(xs[i]));
            if (ys[i] != cur) {
                os_ << " V " << fmt_num(py(ys[i]));
                cur = ys[i];
            }
        }
        os_ << " H " << fmt_num(kLeft + kPlotW) << "\"/>\n";
    }

    void point(double x, double y, int color, double r = 3.0) {
        os_ << "<circle cx=\"" << fmt_num(px(x)) << "\" cy=\"" << fmt_num(py(y)) << "\" r=\"" << r
            << "\" fill=\"" << kPalette[color % kPaletteSize] << "\"/>\n";
    }

    void vline_segment(double x, double y0, double y1, int color) {
        os_ << "<line x1=\"" << fmt_num(px(x)) << "\" y1=\"" << fmt_num(py(y0)) << "\" x2=\""
            << fmt_num(px(x)) << "\" y2=\"" << fmt_num(py(y1)) << "\" stroke=\""
            << kPalette[color % kPaletteSize] << "\" stroke-width=\"1.2\"/>\n";
    }

    void legend(const std::vector<std::pair<std::string, int>>& entries,
                const std::vector<bool>& dashed = {}) {
        double y = kTop + 14.0;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const double x0 = kLeft + kPlotW - 190.0;
            os_ << "<line x1=\"" << x0 << "\" y1=\"" << y - 4 << "\" x2=\"" << x0 + 26 << "\" y2=\""
                << y - 4 << "\" stroke=\"" << kPalette[entries[i].second % kPaletteSize]
                << "\" stroke-width=\"1.8\"";
            if (i < dashed.size() && dashed[i]) os_ << " stroke-dasharray=\"5 3\"";
            os_ << "/>\n";
            os_ << "<text x=\"" << x0 + 32 << "\" y=\"" << y
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(entries[i].first)
                << "</text>\n";
            y += 16.0;
        }
    }

    std::string finish() {
        os_ << "</svg>\n";
        return os_.str();
    }

  private:
    void axes(const std::string& xlabel, const std::string& ylabel) {
        os_ << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
            << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"#444\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            const double f = i / 5.0;
            const double xv = x_.lo + f * (x_.hi - x_.lo);
            const double yv = y_.lo + f * (y_.hi - y_.lo);
            const double xp = kLeft + f * kPlotW;
            const double yp = kTop + kPlotH - f * kPlotH;
            os_ << "<line x1=\"" << xp << "\" y1=\"" << kTop + kPlotH << "\" x2=\"" << xp
                << "\" y2=\"" << kTop + kPlotH + 5 << "\" stroke=\"#444\"/>\n";
            os_ << "<text x=\"" << xp << "\" y=\"" << kTop + kPlotH + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
                << fmt_num(xv) << "</text>\n";
            os_ << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << yp << "\" x2=\"" << kLeft
                << "\" y2=\"" << yp << "\" stroke=\"#444\"/>\n";
            os_ << "<text x=\"" << kLeft - 8 << "\" y=\"" << yp + 3
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
                << fmt_num(yv) << "</text>\n";
        }
        os_ << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << esc(xlabel) << "</text>\n";
        os_ << "<text x=\"16\" y=\"" << kTop + kPlotH / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 16 " << kTop + kPlotH / 2 << ")\">" << esc(ylabel)
            << "</text>\n";
    }

    Axis x_, y_;
    std::ostringstream os_;
};

}  // namespace

std::string svg_km_plot(const KMCurve& curve, const std::string& title) {
    if (curve.times.empty()) throw DataError("survival curve is empty");
    Axis x = fit_axis(0.0, curve.times.back());
    Axis y{0.0, 1.0};
    Canvas c(title, x, y, "time", "survival probability");
    c.steps(curve.times, curve.survival, 0.0, 1.0, 0);
    return c.finish();
}

std::string svg_path_plot(const LambdaPath& path, const std::string& title) {
    if (path.lambdas.empty() || path.fits.empty()) throw DataError("regularization path is empty");
    const std::size_t p = static_cast<std::size_t>(path.fits.front().coef.size());
    std::vector<double> lx(path.lambdas.size());
    for (std::size_t i = 0; i < lx.size(); ++i) lx[i] = std::log10(path.lambdas[i]);
    double clo = 0.0, chi = 0.0;
    std::vector<char> active(p, 0);
    for (const auto& f : path.fits) {
        for (std::size_t j = 0; j < p; ++j) {
            const double b = f.coef[static_cast<Eigen::Index>(j)];
            if (b != 0.0 || f.mandatory[j]) active[j] = 1;
            clo = std::min(clo, b);
            chi = std::max(chi, b);
        }
    }
    Axis x = fit_axis(lx.back(), lx.front());
    Axis y = fit_axis(clo, chi);
    Canvas c(title, x, y, "log10(lambda)", "coefficient");
    c.polyline({x.lo, x.hi}, {0.0, 0.0}, 8, true);
    int color = 0;
    for (std::size_t j = 0; j < p; ++j) {
        if (!active[j]) continue;
        std::vector<double> ys(path.fits.size());
        for (std::size_t i = 0; i < path.fits.size(); ++i)
            ys[i] = path.fits[i].coef[static_cast<Eigen::Index>(j)];
        c.polyline(lx, ys, color++);
    }
    return c.finish();
}

std::string svg_pec_plot(const PredictionErrorCurves& pec, const std::string& title) {
    if (pec.grid.empty()) throw DataError("prediction error curves are empty");
    double hi = 0.0;
    for (double v : pec.null_model.values) hi = std::max(hi, v);
    for (double v : pec.oob_q975) hi = std::max(hi, v);
    Axis x = fit_axis(pec.grid.front(), pec.grid.back());
    Axis y = fit_axis(0.0, std::max(hi, 0.25) * 1.05);
    Canvas c(title, x, y, "time", "prediction error");
    c.polyline(pec.grid, pec.null_model.values, 8);
    c.polyline(pec.grid, pec.apparent.values, 0);
    c.polyline(pec.grid, pec.dot632plus_curve.values, 1);
    c.polyline(pec.grid, pec.oob_q025, 2, true);
    c.polyline(pec.grid, pec.oob_q975, 2, true);
    c.legend({{"null model", 8},
              {"apparent error", 0},
              {".632+ bootstrap error estimates", 1},
              {"out-of-bag 95% band", 2}},
             {false, false, false, true});
    return c.finish();
}

std::string svg_roc_plot(const RocCurve& roc, const std::string& title) {
    if (roc.fpr.empty()) throw DataError("ROC curve is empty");
    Axis x{0.0, 1.0}, y{0.0, 1.0};
    Canvas c(title, x, y, "false positive rate", "true positive rate");
    c.polyline({0.0, 1.0}, {0.0, 1.0}, 8, true);
    c.polyline(roc.fpr, roc.tpr, 0);
    c.legend({{"AUC = " + fmt_num(roc.auc), 0}});
    return c.finish();
}

std::string svg_calibration_plot(const CalibrationResult& cal, const std::string& title) {
    if (cal.pred.empty()) throw DataError("calibration result is empty");
    Axis x{0.0, 1.0}, y{0.0, 1.0};
    Canvas c(title, x, y, "predicted survival", "observed survival");
    c.polyline({0.0, 1.0}, {0.0, 1.0}, 8, true);
    for (std::size_t g = 0; g < cal.pred.size(); ++g) {
        c.vline_segment(cal.pred[g], cal.ci_lo[g], cal.ci_hi[g], 2);
        c.point(cal.pred[g], cal.observed[g], 0);
    }
    c.legend({{"slope = " + fmt_num(cal.slope), 0}});
    return c.finish();
}

}  // namespace survkit
