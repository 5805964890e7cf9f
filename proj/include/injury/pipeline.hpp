#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/adasyn.hpp"
#include "injury/forest.hpp"
#include "injury/logit.hpp"
#include "injury/metrics.hpp"
#include "injury/selection.hpp"
#include "injury/table.hpp"
#include "injury/tree.hpp"

namespace injury {

struct PipelineConfig {
    bool feature_selection = true;
    bool oversample = true;
    /// Re-run feature selection and tuning on each evaluation fold instead of reusing step 2.
    bool reselect_per_fold = false;
    double train_fraction = 0.3;
    int folds = 3;  // CV folds inside tuning and selection
    std::vector<TreeHyperParams> grid = default_grid();
    TreeHyperParams selection_hp{};  // unlimited depth
    int k_neighbors = 5;
    double balance_ratio = 1.0;
    /// Also evaluate RF, LR, B1-B4 and the ACWR/MSWR combined forecasters.
    bool comparators = false;
    ForestParams forest{};
    LogitParams logit{};
    std::uint64_t seed = 0;

    void validate() const;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

struct PipelineResult {
    EvalReport report;  // decision tree, pooled over both evaluation folds
    std::map<std::string, EvalReport> comparators;
    FeatureSubset selection;
    TreeHyperParams hp;
    DecisionTreeModel model;  // fit on the whole oversampled tuning split
};

/// 30/70 stratified split; on the smaller part oversample, select features and tune;
/// split the larger part into two stratified folds, oversample the fitting fold only,
/// evaluate on the untouched fold, swap, and pool. `aux` optionally carries
/// row-aligned `<w>_EWACWR` columns for the ACWR comparators.
PipelineResult run_pipeline(const TrainingTable& table, const PipelineConfig& cfg,
                            const TrainingTable* aux = nullptr);

struct TrialSummary {
    std::map<std::string, TrialDistribution> forecasters;  // "DT" plus comparators
    std::vector<std::vector<std::string>> selected;        // per-trial feature subsets
};

/// n pipeline runs with seeds mix_seed(base_seed, i).
TrialSummary repeat_trials(const TrainingTable& table, const PipelineConfig& cfg, int n, std::uint64_t base_seed,
                           const TrainingTable* aux = nullptr);

nlohmann::json to_json(const PipelineResult& r);
nlohmann::json to_json(const TrialSummary& s);

/// Rows = forecasters, columns = class, prec, rec, F1, AUC (mean and sd).
void write_comparison_csv(std::ostream& out, const TrialSummary& s);
void write_comparison_text(std::ostream& out, const TrialSummary& s);

/// Display order for comparison rows.
std::vector<std::string> forecaster_order(const TrialSummary& s);

}  // namespace injury
