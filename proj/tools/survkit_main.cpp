#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "survkit/pipeline.hpp"

namespace {

using survkit::RunConfig;
using survkit::RunReport;
using survkit::Stage;

// Flag overrides collected in order so later flags win over earlier ones and
// all of them win over the config file.
struct Overrides {
    std::vector<std::pair<std::string, std::string>> pairs;

    void bind(CLI::App* sub, const char* flag, const char* key, const char* desc) {
        sub->add_option_function<std::string>(
            flag, [this, key](const std::string& v) { pairs.emplace_back(key, v); }, desc);
    }
};

void add_common_flags(CLI::App* sub, std::string& config_path, Overrides& ov) {
    sub->add_option("-c,--config", config_path, "config file (INI-style sections)");
    ov.bind(sub, "--input", "data.input", "input CSV with time,status[,id] and covariates");
    ov.bind(sub, "--meta", "data.meta", "feature metadata CSV (name,block,mandatory)");
    ov.bind(sub, "--model", "model.kind",
            "lasso | enet | adaptive | bayes-laplace | ssvs | horseshoe");
    ov.bind(sub, "--alpha", "model.alpha", "elastic-net mixing parameter");
    ov.bind(sub, "--lambda", "model.lambda", "fixed penalty (0 = cross-validated)");
    ov.bind(sub, "--folds", "validate.folds", "cross-validation folds");
    ov.bind(sub, "--bootstrap", "validate.bootstrap", "bootstrap replicates");
    ov.bind(sub, "--iterations", "model.iterations", "MCMC iterations");
    ov.bind(sub, "--burnin", "model.burnin", "MCMC burn-in (-1 = iterations/2)");
    ov.bind(sub, "--horizons", "validate.horizons", "comma-separated evaluation horizons");
    ov.bind(sub, "--tau", "validate.tau", "truncation time (0 = largest horizon)");
    ov.bind(sub, "--seed", "output.seed", "master seed");
    ov.bind(sub, "--out", "output.dir", "output directory");
    sub->add_option_function<std::vector<std::string>>(
        "--set",
        [&ov](const std::vector<std::string>& kvs) {
            for (const auto& kv : kvs) {
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--set expects key=value, got '" + kv + "'");
                ov.pairs.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            }
        },
        "any config key as section.key=value (repeatable)");
}

RunConfig build_config(const std::string& config_path, const Overrides& ov) {
    RunConfig cfg =
        config_path.empty() ? RunConfig() : survkit::parse_config(config_path);
    if (const char* env = std::getenv("SURVKIT_OUT"); env && *env) cfg.out_dir = env;
    for (const auto& [key, value] : ov.pairs) survkit::set_config_key(cfg, key, value);
    return cfg;
}

void print_summary(const RunReport& report) {
    const auto& doc = report.document;
    if (doc.contains("data")) {
        const auto& d = doc["data"];
        std::printf("data: n=%llu p=%llu events=%llu\n",
                    static_cast<unsigned long long>(d["n"].get<std::size_t>()),
                    static_cast<unsigned long long>(d["p_used"].get<std::size_t>()),
                    static_cast<unsigned long long>(d["events"].get<std::size_t>()));
    }
    if (doc.contains("model")) {
        const auto& m = doc["model"];
        std::printf("model: %s, %zu feature(s) in the report\n",
                    m["kind"].get<std::string>().c_str(), m["selected"].size());
        if (m.contains("lambda_star"))
            std::printf("lambda: %s\n", survkit::fmt_num(m["lambda_star"].get<double>()).c_str());
    }
    if (doc.contains("validation")) {
        const auto& v = doc["validation"];
        if (v.contains("harrell"))
            std::printf("concordance (Harrell): %s\n",
                        survkit::fmt_num(v["harrell"]["c_index"].get<double>()).c_str());
        if (v.contains("integrated_brier"))
            std::printf("integrated Brier score: %s\n",
                        survkit::fmt_num(v["integrated_brier"].get<double>()).c_str());
    }
    for (const auto& w : report.warnings) std::printf("warning: %s\n", w.c_str());
    std::printf("wrote %s/report.json (%zu files in manifest)\n", report.config.out_dir.c_str(),
                report.manifest.size() + 1);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"survkit: survival analysis for right-censored, high-dimensional data"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::string plots_arg;

    CLI::App* sub_pre = app.add_subcommand("preprocess", "load, clean, impute, standardize");
    CLI::App* sub_fit = app.add_subcommand("fit", "preprocess and fit the configured model");
    CLI::App* sub_val = app.add_subcommand("validate", "fit plus validation metrics and calibration");
    CLI::App* sub_rep = app.add_subcommand("report", "full run emitting the requested plots");
    CLI::App* sub_run = app.add_subcommand("run", "full pipeline with every available artifact");
    for (CLI::App* sub : {sub_pre, sub_fit, sub_val, sub_rep, sub_run})
        add_common_flags(sub, config_path, ov);
    sub_rep->add_option("--plots", plots_arg, "comma-separated subset of km,path,pec,roc,calibration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const RunConfig cfg = build_config(config_path, ov);
        RunReport report;
        if (sub_pre->parsed()) {
            report = survkit::run_pipeline(cfg, Stage::preselect);
        } else if (sub_fit->parsed()) {
            report = survkit::run_pipeline(cfg, Stage::fit);
        } else if (sub_val->parsed()) {
            report = survkit::run_pipeline(cfg, Stage::calibrate);
        } else if (sub_rep->parsed()) {
            if (plots_arg.empty()) {
                report = survkit::run_pipeline(cfg, Stage::emit);
            } else {
                std::vector<std::string> kinds;
                std::size_t start = 0;
                while (start <= plots_arg.size()) {
                    const std::size_t comma = plots_arg.find(',', start);
                    const std::size_t end = comma == std::string::npos ? plots_arg.size() : comma;
                    if (end > start) kinds.push_back(plots_arg.substr(start, end - start));
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
                report = survkit::run_pipeline(cfg, Stage::emit, &kinds);
            }
        } else {
            report = survkit::run_pipeline(cfg, Stage::emit);
        }
        print_summary(report);
        return 0;
    } catch (const survkit::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const survkit::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const survkit::NumericError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
