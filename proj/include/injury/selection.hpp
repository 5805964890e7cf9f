#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/table.hpp"
#include "injury/tree.hpp"

namespace injury {

/// max_depth {2,3,4,5,6,8} x min_samples_leaf {1,2,5,10} x min_samples_split {2,10}.
std::vector<TreeHyperParams> default_grid();

/// Mean injury-class F1 of `hp` trees over stratified k-fold CV of `table`.
double cv_injury_f1(const TrainingTable& table, const TreeHyperParams& hp, int folds, std::uint64_t seed);

/// Grid point with the highest CV injury F1; ties go to the smaller max_depth, then the
/// larger min_samples_leaf, then grid order. Throws Error(InvalidArgument) on an empty grid.
TreeHyperParams tune(const TrainingTable& table, const std::vector<TreeHyperParams>& grid, int folds,
                     std::uint64_t seed);

struct SubsetScore {
    std::size_t size;
    double score;
    std::string dropped;  // feature removed after scoring this size (empty for the last)
};

struct FeatureSubset {
    std::vector<std::string> features;  // table column order
    std::vector<SubsetScore> trace;     // from all features down to one
};

nlohmann::json to_json(const FeatureSubset& s);

/// Recursive elimination: score the current subset by CV, fit on the whole table, drop
/// the feature with the lowest importance (ties: the earlier column), repeat down to one
/// feature. Returns the best-scoring subset, ties going to the smaller subset.
FeatureSubset rfecv(const TrainingTable& table, const TreeHyperParams& hp, int folds, std::uint64_t seed);

}  // namespace injury
