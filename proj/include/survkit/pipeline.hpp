#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "survkit/bayes.hpp"
#include "survkit/config.hpp"
#include "survkit/cox.hpp"
#include "survkit/metrics.hpp"
#include "survkit/nonparametric.hpp"
#include "survkit/penalized.hpp"

namespace survkit {

// Pipeline stages in execution order.  Subcommands run a prefix: preprocess
// stops after preselect, fit after fit, validate after calibrate, run/report
// go through emit.
enum class Stage { load, preprocess, preselect, fit, validate, calibrate, emit };

struct ManifestEntry {
    std::string file;
    std::string hash;  // FNV-1a of the bytes written
    std::size_t bytes = 0;
};

struct RunReport {
    RunConfig config;

    KMCurve km;
    bool has_km = false;
    LambdaPath path;
    bool has_path = false;
    CvResult cv;
    bool has_cv = false;
    PredictionErrorCurves pec;
    bool has_pec = false;
    RocCurve roc;
    bool has_roc = false;
    double roc_horizon = 0.0;
    CalibrationResult calibration;
    bool has_calibration = false;
    double calibration_horizon = 0.0;

    nlohmann::ordered_json document;
    std::vector<ManifestEntry> manifest;
    std::vector<std::string> warnings;
    std::string failure_stage;  // empty on success
};

// Runs preprocess -> preselect -> fit -> validate -> calibrate -> emit up to
// `upto`, writing artifacts into config.out_dir as stages complete and the
// report JSON plus manifest at the end.  Infeasible individual metrics are
// recorded as warnings; a stage failure writes a partial report with the
// failing stage recorded, then rethrows.  `kinds` restricts which plots the
// emit stage produces (null = every plot with data; a named kind without data
// is an error).
RunReport run_pipeline(const RunConfig& config, Stage upto = Stage::emit,
                       const std::vector<std::string>* kinds = nullptr);

// Writes SVG + underlying CSV for each requested kind (km, path, pec, roc,
// calibration) into the report's output directory and appends manifest
// entries.  Errors when a requested kind has no data.
std::vector<std::string> emit_plots(RunReport& report, const std::vector<std::string>& kinds);

}  // namespace survkit
