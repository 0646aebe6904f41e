#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "survkit/common.hpp"

namespace survkit {

struct SurvivalOutcome {
    double time = 0.0;  // observed time, min(event, censoring)
    int status = 0;     // 1 = event, 0 = right-censored
};

struct FeatureMeta {
    std::string name;
    std::string block = "omics";
    bool mandatory = false;
    // Centering/scaling applied by standardize(); unset until then.
    bool has_scale = false;
    double center = 0.0;
    double scale = 1.0;
    bool constant = false;       // zero variance at standardization time
    bool screen_flagged = false; // univariate screen did not converge; kept
};

struct SurvivalDataset {
    std::vector<SurvivalOutcome> outcomes;
    Matrix covariates;  // n x p, missing entries stored as NaN
    std::vector<FeatureMeta> features;
    std::vector<std::string> ids;  // optional row ids, empty if absent

    std::size_t n() const { return outcomes.size(); }
    std::size_t p() const { return features.size(); }
    std::size_t n_events() const;
    bool has_missing() const;
    // Throws DataError when invariants are violated.
    void validate() const;
    int feature_index(const std::string& name) const;
    std::vector<int> mandatory_columns() const;
    std::vector<int> penalized_columns() const;
};

struct ResamplingPlan {
    enum class Kind { cv_folds, bootstrap };
    Kind kind = Kind::cv_folds;
    std::uint64_t seed = 0;
    std::vector<std::vector<int>> in_sample;
    std::vector<std::vector<int>> out_sample;
    std::vector<std::string> warnings;

    std::size_t replicates() const { return in_sample.size(); }
};

// Input CSV: header with `time`, `status`, optional `id`, remaining columns are
// covariates.  Metadata CSV (optional): `name,block,mandatory`.  Features
// without metadata default to block="omics", mandatory=false.
SurvivalDataset load_dataset(const std::string& data_path,
                             const std::string& meta_path = std::string());
SurvivalDataset dataset_from_csv(const std::string& data_text, const std::string& meta_text);

// Drops non-mandatory features whose missing fraction exceeds max_frac.  A
// mandatory feature over the threshold is an error, not a silent drop.
SurvivalDataset filter_missingness(const SurvivalDataset& ds, double max_frac);

// k-nearest-neighbour imputation.  Distance between rows is the per-feature
// sd-rescaled Euclidean distance over mutually observed coordinates,
// normalized by the number of shared coordinates so sparse overlaps compare
// fairly.  Ties broken by row order.
SurvivalDataset impute_knn(const SurvivalDataset& ds, int k);

// Centers and scales every non-constant column to mean 0, sample sd 1 and
// records (center, scale) in FeatureMeta.  Constant columns become all zeros
// and are flagged.
SurvivalDataset standardize(const SurvivalDataset& ds);

// Back-transform a raw covariate row onto the training scale recorded by
// standardize().
Vector standardize_row(const SurvivalDataset& ds, const Vector& raw);

// Keeps the smallest set of non-mandatory features, in decreasing-variance
// order, whose cumulative variance reaches cum_frac of the total non-mandatory
// variance.  Variances are computed on the input scale, so this runs before
// standardize().  Ties broken by column order.
SurvivalDataset variance_preselect(const SurvivalDataset& ds, double cum_frac);

struct ScreenResult {
    struct Row {
        std::string name;
        double beta = 0.0;
        double se = 0.0;
        double p_value = 1.0;
        bool kept = false;
        bool flagged = false;  // univariate fit failed; feature kept
    };
    std::vector<Row> rows;
};

// Univariate Cox screen: keeps non-mandatory features with Wald p <= alpha.
// Non-convergent features are kept and flagged rather than dropped.
std::pair<SurvivalDataset, ScreenResult> univariate_cox_screen(const SurvivalDataset& ds,
                                                               double alpha);
std::pair<SurvivalDataset, ScreenResult> univariate_cox_screen_serial(const SurvivalDataset& ds,
                                                                      double alpha);

// K-fold CV assignment, stratified by event status: events and censored rows
// are shuffled separately and dealt round-robin so every fold sees events
// whenever possible.
ResamplingPlan make_cv_folds(const std::vector<SurvivalOutcome>& outcomes, int k,
                             std::uint64_t seed);

// B bootstrap draws of size n with replacement plus their out-of-bag sets.
ResamplingPlan bootstrap_plan(std::size_t n, int B, std::uint64_t seed);

// Row subset (duplicates allowed, e.g. bootstrap in-sample lists).
SurvivalDataset subset_rows(const SurvivalDataset& ds, const std::vector<int>& rows);
SurvivalDataset subset_features(const SurvivalDataset& ds, const std::vector<int>& cols);

}  // namespace survkit
