#include "survkit/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "survkit/csv.hpp"

namespace survkit {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
    }
}

long long parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + v + "'");
    }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for " + key);
    return out;
}

}  // namespace

const char* model_name(RunConfig::Model m) {
    switch (m) {
        case RunConfig::Model::lasso: return "lasso";
        case RunConfig::Model::enet: return "enet";
        case RunConfig::Model::adaptive: return "adaptive";
        case RunConfig::Model::bayes_laplace: return "bayes-laplace";
        case RunConfig::Model::spike_slab: return "ssvs";
        case RunConfig::Model::horseshoe: return "horseshoe";
    }
    return "lasso";
}

RunConfig::Model model_from_name(const std::string& name) {
    if (name == "lasso") return RunConfig::Model::lasso;
    if (name == "enet") return RunConfig::Model::enet;
    if (name == "adaptive") return RunConfig::Model::adaptive;
    if (name == "bayes-laplace") return RunConfig::Model::bayes_laplace;
    if (name == "ssvs") return RunConfig::Model::spike_slab;
    if (name == "horseshoe") return RunConfig::Model::horseshoe;
    throw ConfigError("unknown model '" + name +
                      "' (expected lasso, enet, adaptive, bayes-laplace, ssvs, horseshoe)");
}

void set_config_key(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
    std::string key = raw_key;
    const std::size_t dot = key.find('.');
    if (dot != std::string::npos) key = key.substr(dot + 1);  // section prefix is cosmetic

    if (key == "input") cfg.input = value;
    else if (key == "meta") cfg.meta = value;
    else if (key == "max_missing") cfg.max_missing = parse_double(key, value);
    else if (key == "impute_k") cfg.impute_k = static_cast<int>(parse_int(key, value));
    else if (key == "preselect") {
        if (value == "none") cfg.preselect = RunConfig::Preselect::none;
        else if (value == "variance") cfg.preselect = RunConfig::Preselect::variance;
        else if (value == "screen") cfg.preselect = RunConfig::Preselect::screen;
        else throw ConfigError("unknown preselect mode '" + value + "'");
    } else if (key == "variance_fraction") cfg.variance_fraction = parse_double(key, value);
    else if (key == "screen_alpha") cfg.screen_alpha = parse_double(key, value);
    else if (key == "model" || key == "kind") cfg.model = model_from_name(value);
    else if (key == "alpha") cfg.alpha = parse_double(key, value);
    else if (key == "lambda") cfg.lambda = parse_double(key, value);
    else if (key == "n_lambda") cfg.n_lambda = static_cast<int>(parse_int(key, value));
    else if (key == "lambda_ratio") cfg.lambda_ratio = parse_double(key, value);
    else if (key == "adaptive_gamma") cfg.adaptive_gamma = parse_double(key, value);
    else if (key == "iterations") cfg.iterations = static_cast<int>(parse_int(key, value));
    else if (key == "burnin") cfg.burnin = static_cast<int>(parse_int(key, value));
    else if (key == "baseline_intervals") cfg.baseline_intervals = static_cast<int>(parse_int(key, value));
    else if (key == "prior_rate") cfg.prior_rate = parse_double(key, value);
    else if (key == "inclusion_prob") cfg.inclusion_prob = parse_double(key, value);
    else if (key == "folds") cfg.folds = static_cast<int>(parse_int(key, value));
    else if (key == "bootstrap") cfg.bootstrap = static_cast<int>(parse_int(key, value));
    else if (key == "horizons") cfg.horizons = parse_list(key, value);
    else if (key == "tau") cfg.tau = parse_double(key, value);
    else if (key == "cal_groups") cfg.cal_groups = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "out" || key == "dir") cfg.out_dir = value;
    else throw ConfigError("unknown config key '" + raw_key + "'");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    static const char* kSections[] = {"data", "preprocess", "model", "validate", "output"};
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            const bool known =
                std::any_of(std::begin(kSections), std::end(kSections),
                            [&](const char* s) { return section == s; });
            if (!known) throw ConfigError("unknown config section '" + section + "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        set_config_key(cfg, section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    return parse_config_text(read_file(path));
}

void RunConfig::validate() const {
    if (input.empty()) throw ConfigError("input path is required");
    if (!(max_missing >= 0.0 && max_missing < 1.0))
        throw ConfigError("max_missing must lie in [0, 1)");
    if (impute_k < 1) throw ConfigError("impute_k must be at least 1");
    if (!(variance_fraction > 0.0 && variance_fraction <= 1.0))
        throw ConfigError("variance_fraction must lie in (0, 1]");
    if (!(screen_alpha > 0.0 && screen_alpha <= 1.0))
        throw ConfigError("screen_alpha must lie in (0, 1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    if (n_lambda < 2) throw ConfigError("n_lambda must be at least 2");
    if (!(lambda_ratio > 0.0 && lambda_ratio < 1.0))
        throw ConfigError("lambda_ratio must lie in (0, 1)");
    if (adaptive_gamma <= 0.0) throw ConfigError("adaptive_gamma must be positive");
    if (iterations < 1) throw ConfigError("iterations must be positive");
    if (burnin >= 0 && burnin >= iterations) throw ConfigError("burnin must be below iterations");
    if (baseline_intervals < 1) throw ConfigError("baseline_intervals must be positive");
    if (prior_rate <= 0.0) throw ConfigError("prior_rate must be positive");
    if (!(inclusion_prob > 0.0 && inclusion_prob < 1.0))
        throw ConfigError("inclusion_prob must lie in (0, 1)");
    if (folds < 2) throw ConfigError("folds must be at least 2");
    if (bootstrap < 0) throw ConfigError("bootstrap must be nonnegative");
    if (horizons.empty()) throw ConfigError("at least one horizon is required");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (horizons[i] <= 0.0) throw ConfigError("horizons must be positive");
        if (i > 0 && horizons[i] <= horizons[i - 1])
            throw ConfigError("horizons must strictly increase");
    }
    if (tau < 0.0) throw ConfigError("tau must be nonnegative");
    if (cal_groups < 2) throw ConfigError("cal_groups must be at least 2");
    if (out_dir.empty()) throw ConfigError("output directory is required");
}

std::string config_to_string(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[data]\n";
    os << "input = " << cfg.input << "\n";
    if (!cfg.meta.empty()) os << "meta = " << cfg.meta << "\n";
    os << "\n[preprocess]\n";
    os << "max_missing = " << fmt_num(cfg.max_missing) << "\n";
    os << "impute_k = " << cfg.impute_k << "\n";
    const char* pre = cfg.preselect == RunConfig::Preselect::none ? "none"
                      : cfg.preselect == RunConfig::Preselect::variance ? "variance"
                                                                        : "screen";
    os << "preselect = " << pre << "\n";
    os << "variance_fraction = " << fmt_num(cfg.variance_fraction) << "\n";
    os << "screen_alpha = " << fmt_num(cfg.screen_alpha) << "\n";
    os << "\n[model]\n";
    os << "kind = " << model_name(cfg.model) << "\n";
    os << "alpha = " << fmt_num(cfg.alpha) << "\n";
    os << "lambda = " << fmt_num(cfg.lambda) << "\n";
    os << "n_lambda = " << cfg.n_lambda << "\n";
    os << "lambda_ratio = " << fmt_num(cfg.lambda_ratio) << "\n";
    os << "adaptive_gamma = " << fmt_num(cfg.adaptive_gamma) << "\n";
    os << "iterations = " << cfg.iterations << "\n";
    os << "burnin = " << cfg.burnin << "\n";
    os << "baseline_intervals = " << cfg.baseline_intervals << "\n";
    os << "prior_rate = " << fmt_num(cfg.prior_rate) << "\n";
    os << "inclusion_prob = " << fmt_num(cfg.inclusion_prob) << "\n";
    os << "\n[validate]\n";
    os << "folds = " << cfg.folds << "\n";
    os << "bootstrap = " << cfg.bootstrap << "\n";
    os << "horizons = ";
    for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
        if (i) os << ',';
        os << fmt_num(cfg.horizons[i]);
    }
    os << "\n";
    os << "tau = " << fmt_num(cfg.tau) << "\n";
    os << "cal_groups = " << cfg.cal_groups << "\n";
    os << "\n[output]\n";
    os << "seed = " << cfg.seed << "\n";
    os << "dir = " << cfg.out_dir << "\n";
    return os.str();
}

}  // namespace survkit
