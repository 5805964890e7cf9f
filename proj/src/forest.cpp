#include "injury/forest.hpp"

#include <cmath>
#include <numeric>

#include "injury/error.hpp"
#include "injury/random.hpp"

namespace injury {

void ForestParams::validate() const {
    if (n_trees < 1) throw Error(ErrorKind::ConfigInvalid, "n_trees must be >= 1");
    tree.validate();
}

ForestModel::ForestModel(std::vector<std::string> names, std::vector<DecisionTreeModel> trees)
    : names_(std::move(names)), trees_(std::move(trees)) {}

Prediction ForestModel::predict(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : trees_) s += t.predict(x).score;
    s /= double(trees_.size());
    return {std::uint8_t(s >= 0.5 ? 1 : 0), s};
}

Predictions ForestModel::predict_table(const TrainingTable& table) const {
    std::vector<std::size_t> idx(names_.size());
    for (std::size_t f = 0; f < names_.size(); ++f) idx[f] = table.require_column(names_[f]);
    Predictions out;
    std::vector<double> x(names_.size());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto row = table.row(i);
        for (std::size_t f = 0; f < idx.size(); ++f) x[f] = row[idx[f]];
        out.push_back(predict(x));
    }
    return out;
}

nlohmann::json ForestModel::to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"type", "random_forest"}, {"feature_names", names_}, {"trees", std::move(trees)}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
    try {
        if (j.value("type", "") != "random_forest")
            throw Error(ErrorKind::InvalidArgument, "not a random_forest document");
        std::vector<DecisionTreeModel> trees;
        for (const auto& t : j.at("trees")) trees.push_back(DecisionTreeModel::from_json(t));
        if (trees.empty()) throw Error(ErrorKind::InvalidArgument, "forest without trees");
        return ForestModel(j.at("feature_names").get<std::vector<std::string>>(), std::move(trees));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed forest JSON: ") + e.what());
    }
}

ForestModel fit_forest(const TrainingTable& table, const ForestParams& params, std::uint64_t seed) {
    params.validate();
    if (table.empty()) throw Error(ErrorKind::EmptyTable, "cannot fit a forest on an empty table");
    const std::size_t n = table.rows();
    const std::size_t mf = params.max_features
                               ? params.max_features
                               : std::max<std::size_t>(1, std::size_t(std::floor(std::sqrt(double(table.cols())))));
    std::vector<DecisionTreeModel> trees;
    trees.reserve(std::size_t(params.n_trees));
    std::vector<std::size_t> rows(n);
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(mix_seed(seed, std::uint64_t(t)));
        if (params.bootstrap)
            for (auto& r : rows) r = rng.index(n);
        else
            std::iota(rows.begin(), rows.end(), std::size_t(0));
        trees.push_back(detail::grow_tree(table, rows, params.tree, mf, rng));
    }
    return ForestModel(table.feature_names(), std::move(trees));
}

}  // namespace injury
