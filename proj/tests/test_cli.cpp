#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "survkit/common.hpp"
#include "survkit/config.hpp"
#include "survkit/csv.hpp"
#include "survkit/pipeline.hpp"
#include "survkit/simulate.hpp"

using namespace survkit;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "survkit_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string dataset_csv(const SurvivalDataset& ds) {
    std::ostringstream os;
    os << "time,status";
    for (const auto& f : ds.features) os << "," << f.name;
    os << "\n";
    char buf[40];
    for (std::size_t i = 0; i < ds.n(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", ds.outcomes[i].time);
        os << buf << "," << ds.outcomes[i].status;
        for (Eigen::Index j = 0; j < ds.covariates.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", ds.covariates(i, static_cast<Eigen::Index>(j)));
            os << "," << buf;
        }
        os << "\n";
    }
    return os.str();
}

std::string sim_csv(const fs::path& dir, std::size_t n, std::size_t p, std::uint64_t seed) {
    SimSpec spec;
    spec.n = n;
    spec.p = p;
    if (p < 3) spec.signal_cols = {0};
    const SurvivalDataset ds = simulate_cox_data(spec, seed);
    const fs::path path = dir / "input.csv";
    write_file(path.string(), dataset_csv(ds));
    return path.string();
}

// Table-style toy input: events at 4 and 9, censoring at 1, 5, 11.
std::string toy_csv(const fs::path& dir) {
    const fs::path path = dir / "toy.csv";
    write_file(path.string(),
               "time,status,x1\n"
               "11,0,0.5\n"
               "4,1,1.2\n"
               "5,0,-0.3\n"
               "9,1,0.8\n"
               "1,0,-1.1\n");
    return path.string();
}

RunConfig base_config(const std::string& input, const fs::path& out) {
    RunConfig cfg;
    cfg.input = input;
    cfg.out_dir = out.string();
    cfg.folds = 4;
    cfg.bootstrap = 8;
    cfg.horizons = {2.0, 5.0};
    cfg.cal_groups = 4;
    cfg.seed = 9;
    return cfg;
}

nlohmann::json load_report(const fs::path& out) {
    return nlohmann::json::parse(read_file((out / "report.json").string()));
}

// Every manifest row must hash-match the bytes actually on disk.
void check_manifest(const fs::path& out) {
    std::istringstream is(read_file((out / "manifest.txt").string()));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        REQUIRE(line.size() > 18);
        const std::string hash = line.substr(0, 16);
        const std::string file = line.substr(18);
        CHECK(fnv1a64_hex(read_file((out / file).string())) == hash);
        ++rows;
    }
    CHECK(rows >= 2);
}

std::size_t count_substr(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

int run_shell(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

int run_cli(const std::string& args, const std::string& capture = "") {
    std::string cmd = std::string("\"") + SURVKIT_CLI_PATH + "\" " + args;
    if (capture.empty())
        cmd += " >/dev/null 2>&1";
    else
        cmd += " >\"" + capture + "\" 2>&1";
    return run_shell(cmd);
}

}  // namespace

TEST_CASE("config defaults fill from a minimal file") {
    const RunConfig cfg = parse_config_text("[data]\ninput = x.csv\n");
    CHECK(cfg.input == "x.csv");
    CHECK(cfg.meta.empty());
    CHECK(cfg.max_missing == 0.2);
    CHECK(cfg.impute_k == 5);
    CHECK(cfg.preselect == RunConfig::Preselect::none);
    CHECK(cfg.model == RunConfig::Model::lasso);
    CHECK(cfg.alpha == 0.95);
    CHECK(cfg.lambda == 0.0);
    CHECK(cfg.n_lambda == 100);
    CHECK(cfg.lambda_ratio == 0.01);
    CHECK(cfg.iterations == 20000);
    CHECK(cfg.burnin == -1);
    CHECK(cfg.baseline_intervals == 20);
    CHECK(cfg.folds == 10);
    CHECK(cfg.bootstrap == 100);
    CHECK(cfg.horizons == std::vector<double>{1.0, 3.0, 5.0});
    CHECK(cfg.tau == 0.0);
    CHECK(cfg.cal_groups == 10);
    CHECK(cfg.seed == 1);
    CHECK(cfg.out_dir == "out");
    cfg.validate();
}

TEST_CASE("config text accepts sections comments and whitespace") {
    const RunConfig cfg = parse_config_text(
        "# leading comment\n"
        "[data]\n"
        "input = a.csv   ; trailing note\n"
        "meta=m.csv\n"
        "\n"
        "[model]\n"
        "  kind = enet  \n"
        "alpha = 0.5\n"
        "[validate]\n"
        "horizons = 2, 4, 8\n"
        "folds = 5\n"
        "[output]\n"
        "seed = 42\n"
        "dir = results\n");
    CHECK(cfg.input == "a.csv");
    CHECK(cfg.meta == "m.csv");
    CHECK(cfg.model == RunConfig::Model::enet);
    CHECK(cfg.alpha == 0.5);
    CHECK(cfg.horizons == std::vector<double>{2.0, 4.0, 8.0});
    CHECK(cfg.folds == 5);
    CHECK(cfg.seed == 42);
    CHECK(cfg.out_dir == "results");
}

TEST_CASE("config parse errors name the offending line") {
    CHECK_THROWS_WITH_AS(parse_config_text("[data]\ninput=x\nnot a pair\n"),
                         "expected key = value at line 3", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("[data\ninput=x\n"),
                         "unterminated section at line 1", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("[data]\n = x\n"),
                         "empty key at line 2", ConfigError);
}

TEST_CASE("config rejects unknown sections keys and values") {
    CHECK_THROWS_WITH_AS(parse_config_text("[bogus]\n"),
                         "unknown config section 'bogus'", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("[data]\nbogus = 1\n"),
                         "unknown config key 'data.bogus'", ConfigError);
    CHECK_THROWS_AS(parse_config_text("[validate]\nfolds = abc\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nalpha = wide\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nkind = ridge\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[preprocess]\npreselect = pca\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[validate]\nhorizons = ,\n"), ConfigError);
}

TEST_CASE("model names round trip") {
    const RunConfig::Model kinds[] = {RunConfig::Model::lasso,         RunConfig::Model::enet,
                                      RunConfig::Model::adaptive,      RunConfig::Model::bayes_laplace,
                                      RunConfig::Model::spike_slab,    RunConfig::Model::horseshoe};
    for (RunConfig::Model m : kinds) CHECK(model_from_name(model_name(m)) == m);
    CHECK(model_name(RunConfig::Model::spike_slab) == "ssvs");
    CHECK(model_name(RunConfig::Model::bayes_laplace) == "bayes-laplace");
    CHECK_THROWS_AS(model_from_name("ridge"), ConfigError);
}

TEST_CASE("set_config_key accepts dotted and bare keys") {
    RunConfig cfg;
    set_config_key(cfg, "model.alpha", "0.25");
    CHECK(cfg.alpha == 0.25);
    set_config_key(cfg, "folds", "6");
    CHECK(cfg.folds == 6);
    set_config_key(cfg, "model.kind", "ssvs");
    CHECK(cfg.model == RunConfig::Model::spike_slab);
    set_config_key(cfg, "validate.horizons", "1.5,3");
    CHECK(cfg.horizons == std::vector<double>{1.5, 3.0});
    set_config_key(cfg, "output.dir", "elsewhere");
    CHECK(cfg.out_dir == "elsewhere");
    CHECK_THROWS_WITH_AS(set_config_key(cfg, "model.bogus", "1"),
                         "unknown config key 'model.bogus'", ConfigError);
}

TEST_CASE("config validation rejects out-of-range values") {
    const std::string base = "[data]\ninput = x.csv\n";
    auto expect_bad = [&](const std::string& extra) {
        const RunConfig cfg = parse_config_text(base + extra);
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    };
    expect_bad("[validate]\nfolds = 1\n");
    expect_bad("[model]\nalpha = 1.5\n");
    expect_bad("[model]\nlambda = -1\n");
    expect_bad("[model]\niterations = 0\n");
    expect_bad("[model]\niterations = 100\nburnin = 100\n");
    expect_bad("[model]\nn_lambda = 1\n");
    expect_bad("[model]\nlambda_ratio = 1\n");
    expect_bad("[model]\nadaptive_gamma = 0\n");
    expect_bad("[model]\nprior_rate = 0\n");
    expect_bad("[model]\ninclusion_prob = 1\n");
    expect_bad("[model]\nbaseline_intervals = 0\n");
    expect_bad("[preprocess]\nmax_missing = 1\n");
    expect_bad("[preprocess]\nimpute_k = 0\n");
    expect_bad("[preprocess]\nvariance_fraction = 0\n");
    expect_bad("[preprocess]\nscreen_alpha = 0\n");
    expect_bad("[validate]\nbootstrap = -1\n");
    expect_bad("[validate]\nhorizons = 3, 2\n");
    expect_bad("[validate]\nhorizons = 0\n");
    expect_bad("[validate]\ntau = -1\n");
    expect_bad("[validate]\ncal_groups = 1\n");

    RunConfig cfg = parse_config_text(base);
    cfg.input.clear();
    CHECK_THROWS_WITH_AS(cfg.validate(), "input path is required", ConfigError);
    cfg.input = "x.csv";
    cfg.horizons.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.horizons = {1.0};
    cfg.out_dir.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config round trips through its text form") {
    RunConfig cfg;
    cfg.input = "in.csv";
    cfg.meta = "meta.csv";
    cfg.max_missing = 0.15;
    cfg.impute_k = 7;
    cfg.preselect = RunConfig::Preselect::screen;
    cfg.screen_alpha = 0.1;
    cfg.model = RunConfig::Model::horseshoe;
    cfg.alpha = 0.7;
    cfg.lambda = 0.02;
    cfg.n_lambda = 60;
    cfg.lambda_ratio = 0.05;
    cfg.adaptive_gamma = 2.0;
    cfg.iterations = 4000;
    cfg.burnin = 1000;
    cfg.baseline_intervals = 12;
    cfg.prior_rate = 1.5;
    cfg.inclusion_prob = 0.2;
    cfg.folds = 6;
    cfg.bootstrap = 30;
    cfg.horizons = {1.5, 4.0, 6.5};
    cfg.tau = 6.0;
    cfg.cal_groups = 5;
    cfg.seed = 777;
    cfg.out_dir = "artifacts";

    const RunConfig back = parse_config_text(config_to_string(cfg));
    CHECK(back.input == cfg.input);
    CHECK(back.meta == cfg.meta);
    CHECK(back.max_missing == cfg.max_missing);
    CHECK(back.impute_k == cfg.impute_k);
    CHECK(back.preselect == cfg.preselect);
    CHECK(back.screen_alpha == cfg.screen_alpha);
    CHECK(back.model == cfg.model);
    CHECK(back.alpha == cfg.alpha);
    CHECK(back.lambda == cfg.lambda);
    CHECK(back.n_lambda == cfg.n_lambda);
    CHECK(back.lambda_ratio == cfg.lambda_ratio);
    CHECK(back.adaptive_gamma == cfg.adaptive_gamma);
    CHECK(back.iterations == cfg.iterations);
    CHECK(back.burnin == cfg.burnin);
    CHECK(back.baseline_intervals == cfg.baseline_intervals);
    CHECK(back.prior_rate == cfg.prior_rate);
    CHECK(back.inclusion_prob == cfg.inclusion_prob);
    CHECK(back.folds == cfg.folds);
    CHECK(back.bootstrap == cfg.bootstrap);
    CHECK(back.horizons == cfg.horizons);
    CHECK(back.tau == cfg.tau);
    CHECK(back.cal_groups == cfg.cal_groups);
    CHECK(back.seed == cfg.seed);
    CHECK(back.out_dir == cfg.out_dir);
}

TEST_CASE("preprocess stage writes data artifacts and the km plot") {
    const fs::path dir = fresh_dir("prep");
    const fs::path out = dir / "out";
    RunConfig cfg = base_config(sim_csv(dir, 40, 4, 21), out);
    const RunReport report = run_pipeline(cfg, Stage::preselect);

    CHECK(report.has_km);
    CHECK(report.document.contains("data"));
    CHECK(report.document.contains("preprocess"));
    CHECK_FALSE(report.document.contains("model"));
    for (const char* f : {"processed.csv", "processed_meta.csv", "km.csv", "km.svg",
                          "report.json", "manifest.txt"})
        CHECK(fs::exists(out / f));
    CHECK_FALSE(fs::exists(out / "model.json"));

    const nlohmann::json doc = load_report(out);
    CHECK(doc["tool"]["name"] == "survkit");
    CHECK(doc["provenance"]["seed"] == 9);
    CHECK(doc["data"]["n"] == 40);
    CHECK(doc["data"]["p_used"] == 4);
    CHECK(doc["failure_stage"].is_null());
    check_manifest(out);
}

TEST_CASE("pipeline records the stage that failed") {
    const fs::path dir = fresh_dir("fail");
    const fs::path out = dir / "out";
    RunConfig cfg = base_config((dir / "absent.csv").string(), out);
    CHECK_THROWS_AS(run_pipeline(cfg, Stage::emit), DataError);
    const nlohmann::json doc = load_report(out);
    CHECK(doc["failure_stage"] == "load");
}

TEST_CASE("km plot drops one step per distinct event time") {
    const fs::path dir = fresh_dir("toy");
    const fs::path out = dir / "out";
    RunConfig cfg = base_config(toy_csv(dir), out);
    run_pipeline(cfg, Stage::preselect);
    const std::string svg = read_file((out / "km.svg").string());
    CHECK(count_substr(svg, " V ") == 2);
}

TEST_CASE("fit stage reports the model and regularization path") {
    const fs::path dir = fresh_dir("fit");
    const fs::path out = dir / "out";
    RunConfig cfg = base_config(sim_csv(dir, 80, 6, 33), out);
    const RunReport report = run_pipeline(cfg, Stage::fit);

    CHECK(report.has_path);
    CHECK(report.has_cv);
    const nlohmann::json doc = load_report(out);
    CHECK(doc["model"]["kind"] == "lasso");
    CHECK(doc["model"]["lambda_star"].get<double>() > 0.0);
    CHECK(doc["model"]["selected"].is_array());
    CHECK_FALSE(doc.contains("validation"));
    for (const char* f : {"model.json", "path.csv", "path.svg", "cv.csv"})
        CHECK(fs::exists(out / f));
    CHECK_FALSE(fs::exists(out / "pec.csv"));
    check_manifest(out);
}

TEST_CASE("validate stage keeps metric plots for the report stage") {
    const fs::path dir = fresh_dir("val");
    const fs::path out = dir / "out";
    RunConfig cfg = base_config(sim_csv(dir, 80, 6, 33), out);
    const RunReport report = run_pipeline(cfg, Stage::calibrate);

    const nlohmann::json doc = load_report(out);
    REQUIRE(doc.contains("validation"));
    CHECK(doc["validation"].contains("harrell"));
    CHECK(doc["validation"]["horizons"].size() == 2);
    CHECK(report.has_pec);
    CHECK_FALSE(fs::exists(out / "pec.csv"));
    CHECK_FALSE(fs::exists(out / "roc.csv"));
    CHECK(fs::exists(out / "path.svg"));
}

TEST_CASE("full pipeline emits every artifact with data") {
    const fs::path dir = fresh_dir("full");
    const fs::path out = dir / "out";
    RunConfig cfg = base_config(sim_csv(dir, 120, 6, 45), out);
    const RunReport report = run_pipeline(cfg, Stage::emit);

    REQUIRE(report.has_pec);
    REQUIRE(report.has_roc);
    for (const char* f : {"km.csv", "km.svg", "path.csv", "path.svg", "cv.csv", "pec.csv",
                          "pec.svg", "roc.csv", "roc.svg", "report.json", "manifest.txt"})
        CHECK(fs::exists(out / f));

    const std::string pec_svg = read_file((out / "pec.svg").string());
    CHECK(pec_svg.find("null model") != std::string::npos);
    CHECK(pec_svg.find("apparent error") != std::string::npos);
    CHECK(pec_svg.find(".632+ bootstrap error estimates") != std::string::npos);

    const nlohmann::json doc = load_report(out);
    const auto& pe = doc["validation"]["prediction_error"];
    CHECK(pe["replicates_used"].get<int>() + pe["replicates_failed"].get<int>() == 8);
    if (report.has_calibration) {
        CHECK(fs::exists(out / "calibration.csv"));
        CHECK(fs::exists(out / "calibration.svg"));
        CHECK_FALSE(doc["calibration"].empty());
    }
    check_manifest(out);
}

TEST_CASE("identical configs reproduce every emitted byte") {
    const fs::path dir = fresh_dir("repro");
    const fs::path out = dir / "out";
    RunConfig cfg = base_config(sim_csv(dir, 70, 5, 52), out);
    cfg.bootstrap = 6;

    run_pipeline(cfg, Stage::emit);
    const std::string report1 = read_file((out / "report.json").string());
    const std::string pec1 = read_file((out / "pec.csv").string());
    const std::string km1 = read_file((out / "km.svg").string());

    run_pipeline(cfg, Stage::emit);
    CHECK(read_file((out / "report.json").string()) == report1);
    CHECK(read_file((out / "pec.csv").string()) == pec1);
    CHECK(read_file((out / "km.svg").string()) == km1);

    cfg.seed = 111;
    run_pipeline(cfg, Stage::emit);
    CHECK(read_file((out / "report.json").string()) != report1);
}

TEST_CASE("emit_plots validates requested kinds") {
    const fs::path dir = fresh_dir("plots");
    const fs::path out = dir / "out";
    RunConfig cfg = base_config(sim_csv(dir, 60, 4, 61), out);
    RunReport report = run_pipeline(cfg, Stage::fit);

    const std::vector<std::string> km{"km"};
    CHECK(emit_plots(report, km) == std::vector<std::string>{"km.csv", "km.svg"});
    const std::vector<std::string> pec{"pec"};
    CHECK_THROWS_AS(emit_plots(report, pec), DataError);
    const std::vector<std::string> bogus{"bogus"};
    CHECK_THROWS_WITH_AS(emit_plots(report, bogus), "unknown plot kind 'bogus'", ConfigError);
}

TEST_CASE("cli run completes and prints a summary") {
    const fs::path dir = fresh_dir("cli_run");
    const fs::path out = dir / "out";
    const std::string input = sim_csv(dir, 80, 5, 71);
    const std::string log = (dir / "log.txt").string();

    const int rc = run_cli("run --input \"" + input + "\" --out \"" + out.string() +
                               "\" --folds 3 --bootstrap 5 --horizons 2,5 --seed 9"
                               " --set validate.cal_groups=4",
                           log);
    CHECK(rc == 0);
    const std::string text = read_file(log);
    CHECK(text.find("data: n=80 p=5") != std::string::npos);
    CHECK(text.find("model: lasso") != std::string::npos);
    CHECK(text.find("wrote " + out.string() + "/report.json") != std::string::npos);
    CHECK(fs::exists(out / "pec.csv"));
    check_manifest(out);
}

TEST_CASE("cli subcommands stop at their stage") {
    const fs::path dir = fresh_dir("cli_stages");
    const std::string input = sim_csv(dir, 80, 5, 71);
    const std::string common = " --input \"" + input + "\" --folds 3 --bootstrap 5"
                               " --horizons 2,5 --seed 9 --set validate.cal_groups=4 --out \"";

    const fs::path pre = dir / "pre";
    CHECK(run_cli("preprocess" + common + pre.string() + "\"") == 0);
    CHECK_FALSE(load_report(pre).contains("model"));
    CHECK_FALSE(fs::exists(pre / "model.json"));

    const fs::path fit = dir / "fit";
    CHECK(run_cli("fit" + common + fit.string() + "\"") == 0);
    CHECK(load_report(fit).contains("model"));
    CHECK_FALSE(load_report(fit).contains("validation"));

    const fs::path val = dir / "val";
    CHECK(run_cli("validate" + common + val.string() + "\"") == 0);
    CHECK(load_report(val).contains("validation"));
    CHECK_FALSE(fs::exists(val / "pec.csv"));

    const fs::path rep = dir / "rep";
    CHECK(run_cli("report --plots km" + common + rep.string() + "\"") == 0);
    CHECK(fs::exists(rep / "km.csv"));
    CHECK_FALSE(fs::exists(rep / "path.csv"));
    CHECK_FALSE(fs::exists(rep / "pec.csv"));
}

TEST_CASE("cli exit codes follow the error taxonomy") {
    const fs::path dir = fresh_dir("cli_codes");
    const std::string input = sim_csv(dir, 50, 4, 81);
    const fs::path out = dir / "out";

    CHECK(run_cli("") == 1);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("fit --input \"" + (dir / "absent.csv").string() + "\" --out \"" +
                  out.string() + "\"") == 2);
    CHECK(run_cli("fit --input \"" + input + "\" --folds 1 --out \"" + out.string() + "\"") == 1);

    const fs::path bad_cfg = dir / "bad.ini";
    write_file(bad_cfg.string(), "[data]\ninput = x.csv\nbogus = 1\n");
    CHECK(run_cli("fit --config \"" + bad_cfg.string() + "\"") == 1);

    // A constant covariate standardizes to all zeros, so the adaptive-lasso
    // initial ridge fit is identically zero and the weights are undefined.
    const fs::path flat = dir / "flat.csv";
    std::ostringstream os;
    os << "time,status,x1\n";
    for (int i = 1; i <= 20; ++i) os << i << ",1,3\n";
    write_file(flat.string(), os.str());
    CHECK(run_cli("fit --input \"" + flat.string() + "\" --model adaptive --folds 3 --out \"" +
                  out.string() + "\"") == 3);

    const fs::path rep = dir / "rep";
    CHECK(run_cli("report --plots bogus --input \"" + input + "\" --folds 3 --bootstrap 0"
                  " --horizons 2,5 --out \"" + rep.string() + "\"") == 1);
    CHECK(load_report(rep)["failure_stage"] == "emit");
}

TEST_CASE("cli honors the output environment variable") {
    const fs::path dir = fresh_dir("cli_env");
    const std::string input = sim_csv(dir, 50, 4, 91);
    const fs::path envdir = dir / "from_env";
    const fs::path flagdir = dir / "from_flag";
    const std::string fit_args = " fit --input \"" + input + "\" --folds 3";

    CHECK(run_shell("SURVKIT_OUT=\"" + envdir.string() + "\" \"" SURVKIT_CLI_PATH "\"" +
                    fit_args + " >/dev/null 2>&1") == 0);
    CHECK(fs::exists(envdir / "report.json"));

    CHECK(run_shell("SURVKIT_OUT=\"" + (dir / "ignored").string() + "\" \"" SURVKIT_CLI_PATH
                    "\"" + fit_args + " --out \"" + flagdir.string() + "\" >/dev/null 2>&1") == 0);
    CHECK(fs::exists(flagdir / "report.json"));
    CHECK_FALSE(fs::exists(dir / "ignored"));
}

TEST_CASE("cli flags override config file values") {
    const fs::path dir = fresh_dir("cli_prec");
    const std::string input = sim_csv(dir, 50, 4, 101);
    const fs::path out = dir / "out";
    const fs::path cfg_path = dir / "run.ini";
    write_file(cfg_path.string(), "[data]\ninput = " + input +
                                      "\n[model]\nkind = enet\nalpha = 0.9\n"
                                      "[validate]\nfolds = 5\n[output]\nseed = 1\ndir = " +
                                      (dir / "cfg_out").string() + "\n");

    CHECK(run_cli("fit --config \"" + cfg_path.string() + "\" --seed 4 --folds 3 --out \"" +
                  out.string() + "\" --set model.alpha=0.5") == 0);
    const nlohmann::json doc = load_report(out);
    const RunConfig echoed = parse_config_text(doc["provenance"]["config"].get<std::string>());
    CHECK(echoed.seed == 4);
    CHECK(echoed.folds == 3);
    CHECK(echoed.alpha == 0.5);
    CHECK(echoed.model == RunConfig::Model::enet);
    CHECK(echoed.out_dir == out.string());
    CHECK_FALSE(fs::exists(dir / "cfg_out"));
}

TEST_CASE("cli reruns are byte identical") {
    const fs::path dir = fresh_dir("cli_repro");
    const std::string input = sim_csv(dir, 60, 4, 111);
    const fs::path out = dir / "out";
    const std::string args = "run --input \"" + input + "\" --out \"" + out.string() +
                             "\" --folds 3 --bootstrap 5 --horizons 2,5 --seed 17"
                             " --set validate.cal_groups=4";

    CHECK(run_cli(args) == 0);
    const std::string report1 = read_file((out / "report.json").string());
    const std::string pec1 = read_file((out / "pec.csv").string());
    CHECK(run_cli(args) == 0);
    CHECK(read_file((out / "report.json").string()) == report1);
    CHECK(read_file((out / "pec.csv").string()) == pec1);
}
