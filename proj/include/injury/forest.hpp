#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/prediction.hpp"
#include "injury/table.hpp"
#include "injury/tree.hpp"

namespace injury {

struct ForestParams {
    int n_trees = 100;
    bool bootstrap = true;
    /// Features tried per split; 0 = floor(sqrt(p)).
    std::size_t max_features = 0;
    TreeHyperParams tree;

    void validate() const;
};

class ForestModel {
public:
    ForestModel() = default;
    ForestModel(std::vector<std::string> names, std::vector<DecisionTreeModel> trees);

    const std::vector<std::string>& feature_names() const { return names_; }
    const std::vector<DecisionTreeModel>& trees() const { return trees_; }

    /// Score = mean of tree leaf fractions; class 1 iff score >= 0.5.
    Prediction predict(std::span<const double> x) const;
    Predictions predict_table(const TrainingTable& table) const;

    nlohmann::json to_json() const;
    static ForestModel from_json(const nlohmann::json& j);

private:
    std::vector<std::string> names_;
    std::vector<DecisionTreeModel> trees_;
};

/// Throws Error(EmptyTable).
ForestModel fit_forest(const TrainingTable& table, const ForestParams& params, std::uint64_t seed);

}  // namespace injury
