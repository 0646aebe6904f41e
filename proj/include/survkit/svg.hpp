#pragma once

#include <string>

#include "survkit/metrics.hpp"
#include "survkit/nonparametric.hpp"
#include "survkit/penalized.hpp"

namespace survkit {

// Self-contained SVG plots.  Output is deterministic: fixed canvas, fixed
// palette, numbers through fmt_num, no timestamps.  Each KM survival drop is
// emitted as one V command in the step path so tests can count drops.

std::string svg_km_plot(const KMCurve& curve, const std::string& title = "Kaplan-Meier estimate");

// Coefficient profiles against log10(lambda); only features that are active
// somewhere on the path (or mandatory) get a polyline.
std::string svg_path_plot(const LambdaPath& path,
                          const std::string& title = "Regularization path");

std::string svg_pec_plot(const PredictionErrorCurves& pec,
                         const std::string& title = "Prediction error curves");

std::string svg_roc_plot(const RocCurve& roc, const std::string& title = "Time-dependent ROC");

std::string svg_calibration_plot(const CalibrationResult& cal,
                                 const std::string& title = "Calibration");

}  // namespace survkit
