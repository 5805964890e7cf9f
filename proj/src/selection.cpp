#include "injury/selection.hpp"

#include <algorithm>
#include <limits>

#include "injury/error.hpp"
#include "injury/metrics.hpp"
#include "injury/splitting.hpp"

namespace injury {

std::vector<TreeHyperParams> default_grid() {
    std::vector<TreeHyperParams> g;
    for (int d : {2, 3, 4, 5, 6, 8})
        for (int leaf : {1, 2, 5, 10})
            for (int split : {2, 10}) g.push_back({d, leaf, split});
    return g;
}

namespace {

struct Folds {
    std::vector<std::vector<std::size_t>> test, train;
};

Folds make_folds(const TrainingTable& table, int k, std::uint64_t seed) {
    Folds f;
    f.test = stratified_folds(table.labels(), k, seed);
    for (const auto& t : f.test) f.train.push_back(complement(t, table.rows()));
    return f;
}

double cv_score(const TrainingTable& table, const Folds& folds, const TreeHyperParams& hp) {
    double total = 0.0;
    for (std::size_t k = 0; k < folds.test.size(); ++k) {
        const auto model = fit_tree(table.subset(folds.train[k]), hp);
        const auto test = table.subset(folds.test[k]);
        const auto pred = model.predict_table(test);
        total += metrics(confusion(test.labels(), pred.classes)).injury().f1;
    }
    return total / double(folds.test.size());
}

int depth_key(const TreeHyperParams& hp) { return hp.max_depth.value_or(std::numeric_limits<int>::max()); }

}  // namespace

double cv_injury_f1(const TrainingTable& table, const TreeHyperParams& hp, int folds, std::uint64_t seed) {
    return cv_score(table, make_folds(table, folds, seed), hp);
}

TreeHyperParams tune(const TrainingTable& table, const std::vector<TreeHyperParams>& grid, int folds,
                     std::uint64_t seed) {
    if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "tuning grid is empty");
    if (grid.size() == 1) return grid.front();
    const auto f = make_folds(table, folds, seed);
    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = cv_score(table, f, grid[i]);
        bool take = s > best_score + 1e-12;
        if (!take && s > best_score - 1e-12) {
            const auto& b = grid[best];
            take = depth_key(grid[i]) < depth_key(b) ||
                   (depth_key(grid[i]) == depth_key(b) && grid[i].min_samples_leaf > b.min_samples_leaf);
        }
        if (take) {
            best = i;
            best_score = std::max(s, best_score);
        }
    }
    return grid[best];
}

nlohmann::json to_json(const FeatureSubset& s) {
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : s.trace) trace.push_back({{"size", t.size}, {"score", t.score}, {"dropped", t.dropped}});
    return {{"features", s.features}, {"trace", std::move(trace)}};
}

FeatureSubset rfecv(const TrainingTable& table, const TreeHyperParams& hp, int folds, std::uint64_t seed) {
    if (table.cols() == 0) throw Error(ErrorKind::InvalidArgument, "rfecv needs at least one feature");
    const auto f = make_folds(table, folds, seed);
    std::vector<std::string> current = table.feature_names();
    FeatureSubset out;
    std::vector<std::string> best_set;
    double best_score = -1.0;
    for (;;) {
        const auto sub = table.select_columns(current);
        const double s = cv_score(sub, f, hp);
        // ties within tolerance favour the later (smaller) subset
        if (s >= best_score - 1e-12) {
            best_score = std::max(s, best_score);
            best_set = current;
        }
        out.trace.push_back({current.size(), s, {}});
        if (current.size() == 1) break;
        const auto dec = impurity_decrease(fit_tree(sub, hp));
        std::size_t drop = 0;
        for (std::size_t j = 1; j < dec.size(); ++j)
            if (dec[j] < dec[drop]) drop = j;
        out.trace.back().dropped = current[drop];
        current.erase(current.begin() + std::ptrdiff_t(drop));
    }
    out.features = std::move(best_set);
    return out;
}

}  // namespace injury
