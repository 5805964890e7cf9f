#include "injury/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "injury/error.hpp"

namespace injury {

void TreeHyperParams::validate() const {
    if (max_depth && *max_depth < 1) throw Error(ErrorKind::ConfigInvalid, "max_depth must be >= 1");
    if (min_samples_leaf < 1) throw Error(ErrorKind::ConfigInvalid, "min_samples_leaf must be >= 1");
    if (min_samples_split < 1) throw Error(ErrorKind::ConfigInvalid, "min_samples_split must be >= 1");
}

nlohmann::json to_json(const TreeHyperParams& hp) {
    nlohmann::json j;
    j["max_depth"] = hp.max_depth ? nlohmann::json(*hp.max_depth) : nlohmann::json(nullptr);
    j["min_samples_leaf"] = hp.min_samples_leaf;
    j["min_samples_split"] = hp.min_samples_split;
    return j;
}

TreeHyperParams tree_hyper_params_from_json(const nlohmann::json& j) {
    TreeHyperParams hp;
    if (j.contains("max_depth") && !j["max_depth"].is_null()) hp.max_depth = j["max_depth"].get<int>();
    hp.min_samples_leaf = j.value("min_samples_leaf", 1);
    hp.min_samples_split = j.value("min_samples_split", 2);
    hp.validate();
    return hp;
}

double gini(std::size_t n0, std::size_t n1) {
    const std::size_t n = n0 + n1;
    if (n == 0) throw Error(ErrorKind::EmptyNode, "gini of an empty node");
    const double p0 = double(n0) / double(n), p1 = double(n1) / double(n);
    return 1.0 - (p0 * p0 + p1 * p1);
}

// ---------------------------------------------------------------------------------
// Model

DecisionTreeModel DecisionTreeModel::from_nodes(std::vector<std::string> feature_names,
                                                std::vector<TreeNode> nodes, TreeHyperParams hp) {
    if (nodes.empty()) throw Error(ErrorKind::InvalidArgument, "tree needs at least one node");
    std::vector<int> seen(nodes.size(), 0);
    std::vector<int> stack{0};
    while (!stack.empty()) {
        const int id = stack.back();
        stack.pop_back();
        if (id < 0 || std::size_t(id) >= nodes.size())
            throw Error(ErrorKind::InvalidArgument, "child index out of range");
        if (seen[std::size_t(id)]++) throw Error(ErrorKind::InvalidArgument, "node reachable twice");
        const auto& n = nodes[std::size_t(id)];
        if (!n.leaf) {
            if (n.feature >= feature_names.size())
                throw Error(ErrorKind::InvalidArgument, "decision node feature out of range");
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw Error(ErrorKind::InvalidArgument, "unreachable node in arena");
    DecisionTreeModel m;
    m.names_ = std::move(feature_names);
    m.nodes_ = std::move(nodes);
    m.hp_ = hp;
    return m;
}

std::size_t DecisionTreeModel::leaf_count() const {
    return std::size_t(std::count_if(nodes_.begin(), nodes_.end(), [](const auto& n) { return n.leaf; }));
}

std::size_t DecisionTreeModel::depth() const {
    std::function<std::size_t(int)> rec = [&](int id) -> std::size_t {
        const auto& n = nodes_[std::size_t(id)];
        return n.leaf ? 0 : 1 + std::max(rec(n.left), rec(n.right));
    };
    return nodes_.empty() ? 0 : rec(0);
}

std::size_t DecisionTreeModel::leaf_index(std::span<const double> x) const {
    std::size_t id = 0;
    while (!nodes_[id].leaf) {
        const auto& n = nodes_[id];
        id = std::size_t(x[n.feature] <= n.threshold ? n.left : n.right);
    }
    return id;
}

Prediction DecisionTreeModel::predict(std::span<const double> x) const {
    const auto& leaf = nodes_[leaf_index(x)];
    return {leaf.predicted_class(), leaf.minority_fraction()};
}

Prediction DecisionTreeModel::predict(const std::map<std::string, double>& x) const {
    std::size_t id = 0;
    while (!nodes_[id].leaf) {
        const auto& n = nodes_[id];
        auto it = x.find(names_[n.feature]);
        if (it == x.end())
            throw Error(ErrorKind::MissingFeature, "input lacks feature '" + names_[n.feature] + "'");
        id = std::size_t(it->second <= n.threshold ? n.left : n.right);
    }
    return {nodes_[id].predicted_class(), nodes_[id].minority_fraction()};
}

std::vector<std::size_t> DecisionTreeModel::bind(const std::vector<std::string>& columns) const {
    std::vector<std::size_t> idx(names_.size(), std::size_t(-1));
    std::vector<bool> used(names_.size(), false);
    for (const auto& n : nodes_)
        if (!n.leaf) used[n.feature] = true;
    for (std::size_t f = 0; f < names_.size(); ++f) {
        auto it = std::find(columns.begin(), columns.end(), names_[f]);
        if (it != columns.end())
            idx[f] = std::size_t(it - columns.begin());
        else if (used[f])
            throw Error(ErrorKind::MissingFeature, "table lacks feature '" + names_[f] + "'");
    }
    return idx;
}

Predictions DecisionTreeModel::predict_table(const TrainingTable& table) const {
    const auto idx = bind(table.feature_names());
    Predictions out;
    out.classes.reserve(table.rows());
    out.scores.reserve(table.rows());
    std::vector<double> x(names_.size(), 0.0);
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto row = table.row(i);
        for (std::size_t f = 0; f < idx.size(); ++f)
            if (idx[f] != std::size_t(-1)) x[f] = row[idx[f]];
        out.push_back(predict(x));
    }
    return out;
}

nlohmann::json DecisionTreeModel::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        nlohmann::json j{{"id", i}, {"leaf", n.leaf}, {"counts", {n.counts[0], n.counts[1]}}, {"impurity", n.impurity}};
        if (!n.leaf) {
            j["feature"] = names_[n.feature];
            j["threshold"] = n.threshold;
            j["left"] = n.left;
            j["right"] = n.right;
        }
        nodes.push_back(std::move(j));
    }
    return {{"type", "decision_tree"},
            {"feature_names", names_},
            {"hyperparams", injury::to_json(hp_)},
            {"nodes", std::move(nodes)}};
}

DecisionTreeModel DecisionTreeModel::from_json(const nlohmann::json& j) {
    try {
        if (j.value("type", "") != "decision_tree")
            throw Error(ErrorKind::InvalidArgument, "not a decision_tree document");
        auto names = j.at("feature_names").get<std::vector<std::string>>();
        std::vector<TreeNode> nodes;
        for (const auto& jn : j.at("nodes")) {
            TreeNode n;
            n.leaf = jn.at("leaf").get<bool>();
            n.counts = {jn.at("counts").at(0).get<std::size_t>(), jn.at("counts").at(1).get<std::size_t>()};
            n.impurity = jn.value("impurity", 0.0);
            if (!n.leaf) {
                const auto fname = jn.at("feature").get<std::string>();
                auto it = std::find(names.begin(), names.end(), fname);
                if (it == names.end())
                    throw Error(ErrorKind::MissingFeature, "node feature '" + fname + "' not in feature_names");
                n.feature = std::size_t(it - names.begin());
                n.threshold = jn.at("threshold").get<double>();
                n.left = jn.at("left").get<int>();
                n.right = jn.at("right").get<int>();
            }
            nodes.push_back(n);
        }
        return from_nodes(std::move(names), std::move(nodes),
                          j.contains("hyperparams") ? tree_hyper_params_from_json(j["hyperparams"]) : TreeHyperParams{});
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed tree JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------------
// Importances

std::vector<double> impurity_decrease(const DecisionTreeModel& model) {
    std::vector<double> out(model.feature_names().size(), 0.0);
    const auto& nodes = model.nodes();
    for (const auto& n : nodes) {
        if (n.leaf) continue;
        const auto& l = nodes[std::size_t(n.left)];
        const auto& r = nodes[std::size_t(n.right)];
        out[n.feature] += double(n.samples()) * n.impurity - double(l.samples()) * l.impurity -
                          double(r.samples()) * r.impurity;
    }
    return out;
}

std::optional<double> ImportanceVector::get(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values[i];
    return std::nullopt;
}

ImportanceVector importances(const DecisionTreeModel& model) {
    ImportanceVector iv;
    const auto dec = impurity_decrease(model);
    std::vector<bool> used(dec.size(), false);
    for (const auto& n : model.nodes())
        if (!n.leaf) used[n.feature] = true;
    double total = 0.0;
    for (std::size_t f = 0; f < dec.size(); ++f)
        if (used[f]) total += std::max(0.0, dec[f]);
    for (std::size_t f = 0; f < dec.size(); ++f) {
        if (!used[f]) continue;
        iv.names.push_back(model.feature_names()[f]);
        iv.values.push_back(total > 0.0 ? std::max(0.0, dec[f]) / total : 0.0);
    }
    return iv;
}

// ---------------------------------------------------------------------------------
// Growing

namespace {

__extension__ typedef unsigned __int128 u128;

/// Sum over children of (sum_c count_c^2) / n_child, kept as an exact fraction
/// numerator / denominator. Larger is purer.
struct SplitScore {
    u128 num = 0;
    u128 den = 1;

    static SplitScore of(std::size_t l0, std::size_t l1, std::size_t r0, std::size_t r1) {
        const u128 nl = l0 + l1, nr = r0 + r1;
        const u128 sl = u128(l0) * l0 + u128(l1) * l1;
        const u128 sr = u128(r0) * r0 + u128(r1) * r1;
        return {sl * nr + sr * nl, nl * nr};
    }
    static SplitScore parent(std::size_t c0, std::size_t c1) {
        return {u128(c0) * c0 + u128(c1) * c1, u128(c0 + c1)};
    }
    bool greater(const SplitScore& o) const { return num * o.den > o.num * den; }
};

class Grower {
public:
    Grower(const TrainingTable& table, std::span<const std::size_t> rows, const TreeHyperParams& hp,
           std::size_t max_features, Rng& rng)
        : p_(table.cols()), n_(rows.size()), hp_(hp), max_features_(max_features), rng_(rng) {
        values_.resize(p_ * n_);
        labels_.resize(n_);
        for (std::size_t s = 0; s < n_; ++s) {
            labels_[s] = table.label(rows[s]);
            const auto row = table.row(rows[s]);
            for (std::size_t j = 0; j < p_; ++j) values_[j * n_ + s] = row[j];
        }
        order_.resize(p_ * n_);
        for (std::size_t j = 0; j < p_; ++j) {
            auto* o = order_.data() + j * n_;
            std::iota(o, o + n_, std::uint32_t(0));
            const double* v = values_.data() + j * n_;
            std::stable_sort(o, o + n_, [v](std::uint32_t a, std::uint32_t b) { return v[a] < v[b]; });
        }
        goes_left_.resize(n_);
        scratch_.resize(n_);
    }

    std::vector<TreeNode> grow() {
        grow_node(0, n_, 0);
        return std::move(nodes_);
    }

private:
    struct Best {
        bool found = false;
        std::size_t feature = 0;
        double threshold = 0.0;
        std::size_t n_left = 0;
        SplitScore score;
    };

    double value(std::size_t j, std::uint32_t s) const { return values_[j * n_ + s]; }

    int grow_node(std::size_t begin, std::size_t end, int depth) {
        const int id = int(nodes_.size());
        nodes_.emplace_back();
        TreeNode node;
        const auto* o0 = order_.data();
        for (std::size_t k = begin; k < end; ++k) ++node.counts[labels_[o0[k]]];
        node.impurity = gini(node.counts[0], node.counts[1]);
        const std::size_t n = end - begin;

        const bool stop = (hp_.max_depth && depth >= *hp_.max_depth) || n < std::size_t(hp_.min_samples_split) ||
                          node.counts[0] == 0 || node.counts[1] == 0;
        Best best;
        if (!stop) best = find_split(begin, end, node.counts);
        if (!best.found) {
            nodes_[std::size_t(id)] = node;
            return id;
        }
        partition(begin, end, best);
        node.leaf = false;
        node.feature = best.feature;
        node.threshold = best.threshold;
        nodes_[std::size_t(id)] = node;
        const int left = grow_node(begin, begin + best.n_left, depth + 1);
        const int right = grow_node(begin + best.n_left, end, depth + 1);
        nodes_[std::size_t(id)].left = left;
        nodes_[std::size_t(id)].right = right;
        return id;
    }

    std::vector<std::size_t> candidate_features() {
        std::vector<std::size_t> f(p_);
        std::iota(f.begin(), f.end(), std::size_t(0));
        if (max_features_ == 0 || max_features_ >= p_) return f;
        for (std::size_t i = 0; i < max_features_; ++i) std::swap(f[i], f[i + rng_.index(p_ - i)]);
        f.resize(max_features_);
        std::sort(f.begin(), f.end());
        return f;
    }

    Best find_split(std::size_t begin, std::size_t end, const std::array<std::size_t, 2>& counts) {
        Best best;
        const SplitScore parent = SplitScore::parent(counts[0], counts[1]);
        const std::size_t n = end - begin;
        const std::size_t min_leaf = std::size_t(hp_.min_samples_leaf);
        for (std::size_t j : candidate_features()) {
            const auto* o = order_.data() + j * n_;
            std::size_t l0 = 0, l1 = 0;
            for (std::size_t k = begin; k + 1 < end; ++k) {
                (labels_[o[k]] ? l1 : l0)++;
                const double a = value(j, o[k]), b = value(j, o[k + 1]);
                if (!(a < b)) continue;
                const std::size_t nl = k + 1 - begin;
                if (nl < min_leaf || n - nl < min_leaf) continue;
                const SplitScore s = SplitScore::of(l0, l1, counts[0] - l0, counts[1] - l1);
                if (!s.greater(parent)) continue;
                if (!best.found || s.greater(best.score)) {
                    double mid = a + (b - a) / 2.0;
                    if (!(mid < b)) mid = a;
                    best = {true, j, mid, nl, s};
                }
            }
        }
        return best;
    }

    void partition(std::size_t begin, std::size_t end, const Best& best) {
        for (std::size_t k = begin; k < end; ++k) {
            const std::uint32_t s = order_[best.feature * n_ + k];
            goes_left_[s] = value(best.feature, s) <= best.threshold;
        }
        for (std::size_t j = 0; j < p_; ++j) {
            auto* o = order_.data() + j * n_;
            std::size_t w = begin, r = 0;
            for (std::size_t k = begin; k < end; ++k) {
                if (goes_left_[o[k]])
                    o[w++] = o[k];
                else
                    scratch_[r++] = o[k];
            }
            std::copy(scratch_.begin(), scratch_.begin() + std::ptrdiff_t(r), o + w);
        }
    }

    std::size_t p_, n_;
    TreeHyperParams hp_;
    std::size_t max_features_;
    Rng& rng_;
    std::vector<double> values_;  // column-major
    std::vector<std::uint8_t> labels_;
    std::vector<std::uint32_t> order_;  // per feature, sample positions sorted by value
    std::vector<std::uint8_t> goes_left_;
    std::vector<std::uint32_t> scratch_;
    std::vector<TreeNode> nodes_;
};

}  // namespace

namespace detail {

DecisionTreeModel grow_tree(const TrainingTable& table, std::span<const std::size_t> rows,
                            const TreeHyperParams& hp, std::size_t max_features, Rng& rng) {
    hp.validate();
    if (rows.empty() || table.empty()) throw Error(ErrorKind::EmptyTable, "cannot fit a tree on an empty table");
    if (table.cols() == 0) throw Error(ErrorKind::EmptyTable, "cannot fit a tree without features");
    Grower g(table, rows, hp, max_features, rng);
    return DecisionTreeModel::from_nodes(table.feature_names(), g.grow(), hp);
}

}  // namespace detail

DecisionTreeModel fit_tree(const TrainingTable& table, const TreeHyperParams& hp, std::uint64_t seed) {
    std::vector<std::size_t> rows(table.rows());
    std::iota(rows.begin(), rows.end(), std::size_t(0));
    Rng rng(seed);
    return detail::grow_tree(table, rows, hp, 0, rng);
}

}  // namespace injury
