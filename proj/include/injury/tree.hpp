#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/prediction.hpp"
#include "injury/random.hpp"
#include "injury/table.hpp"

namespace injury {

struct TreeHyperParams {
    std::optional<int> max_depth;  // nullopt = unlimited
    int min_samples_leaf = 1;
    int min_samples_split = 2;

    void validate() const;
    bool operator==(const TreeHyperParams&) const = default;
};

nlohmann::json to_json(const TreeHyperParams& hp);
TreeHyperParams tree_hyper_params_from_json(const nlohmann::json& j);

struct TreeNode {
    bool leaf = true;
    std::size_t feature = 0;  // index into the model's feature names (decision nodes)
    double threshold = 0.0;   // route left iff value <= threshold
    int left = -1;
    int right = -1;
    std::array<std::size_t, 2> counts{};  // training rows per class reaching this node
    double impurity = 0.0;                // Gini impurity of the node

    std::size_t samples() const { return counts[0] + counts[1]; }
    /// Leaf class: argmax of counts, ties to class 0.
    std::uint8_t predicted_class() const { return counts[1] > counts[0] ? 1 : 0; }
    /// Fraction of injury rows in the node.
    double minority_fraction() const {
        return samples() == 0 ? 0.0 : double(counts[1]) / double(samples());
    }
};

/// Gini impurity 1 - sum p_c^2 of a two-class count pair. Throws Error(EmptyNode) on (0, 0).
double gini(std::size_t n0, std::size_t n1);

/// Binary classification tree stored as a node arena; node 0 is the root.
class DecisionTreeModel {
public:
    DecisionTreeModel() = default;

    /// Validates the arena (children in range, every decision node has two children,
    /// every node reachable exactly once from the root).
    static DecisionTreeModel from_nodes(std::vector<std::string> feature_names, std::vector<TreeNode> nodes,
                                        TreeHyperParams hp = {});

    const std::vector<std::string>& feature_names() const { return names_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeHyperParams& hyper_params() const { return hp_; }

    std::size_t leaf_count() const;
    std::size_t depth() const;

    /// `x` is aligned with feature_names().
    std::size_t leaf_index(std::span<const double> x) const;
    Prediction predict(std::span<const double> x) const;
    /// Name-keyed lookup; throws Error(MissingFeature) if a tested feature is absent.
    Prediction predict(const std::map<std::string, double>& x) const;

    /// For each model feature, its column index in `columns`. Throws Error(MissingFeature).
    std::vector<std::size_t> bind(const std::vector<std::string>& columns) const;
    Predictions predict_table(const TrainingTable& table) const;

    nlohmann::json to_json() const;
    static DecisionTreeModel from_json(const nlohmann::json& j);

private:
    std::vector<std::string> names_;
    std::vector<TreeNode> nodes_;
    TreeHyperParams hp_;
};

/// Greedy CART with Gini splits. Candidate thresholds are midpoints between adjacent
/// distinct values; the split maximizing the weighted impurity decrease is taken,
/// compared exactly in rational arithmetic, ties going to the lowest feature index and
/// then the lowest threshold. Throws Error(EmptyTable).
DecisionTreeModel fit_tree(const TrainingTable& table, const TreeHyperParams& hp, std::uint64_t seed = 0);

struct ImportanceVector {
    std::vector<std::string> names;  // features with at least one split
    std::vector<double> values;      // sums to 1

    std::optional<double> get(std::string_view name) const;
};

/// Normalized Gini importances of the features the tree splits on (empty for a leaf).
ImportanceVector importances(const DecisionTreeModel& model);
/// Unnormalized weighted impurity decrease per model feature (aligned with feature_names()).
std::vector<double> impurity_decrease(const DecisionTreeModel& model);

namespace detail {

/// Shared CART engine. `rows` lists table rows (repeats allowed, e.g. bootstrap).
/// max_features = 0 considers every feature at every node.
DecisionTreeModel grow_tree(const TrainingTable& table, std::span<const std::size_t> rows,
                            const TreeHyperParams& hp, std::size_t max_features, Rng& rng);

}  // namespace detail

}  // namespace injury
