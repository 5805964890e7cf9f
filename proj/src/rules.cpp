#include "injury/rules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "injury/error.hpp"

namespace injury {

bool InjuryRule::satisfied_by(const std::map<std::string, double>& x) const {
    for (const auto& c : conditions) {
        auto it = x.find(c.feature);
        if (it == x.end()) throw Error(ErrorKind::MissingFeature, "query lacks feature '" + c.feature + "'");
        if (!c.contains(it->second)) return false;
    }
    return true;
}

std::vector<LeafRegion> extract_regions(const DecisionTreeModel& model) {
    std::vector<LeafRegion> out;
    const auto& nodes = model.nodes();
    const auto& names = model.feature_names();
    std::vector<Condition> path;
    auto rec = [&](auto&& self, int id) -> void {
        const auto& n = nodes[std::size_t(id)];
        if (n.leaf) {
            out.push_back({std::size_t(id), n.predicted_class(), path});
            return;
        }
        const auto& name = names[n.feature];
        auto it = std::find_if(path.begin(), path.end(), [&](const Condition& c) { return c.feature == name; });
        const bool fresh = it == path.end();
        if (fresh) {
            path.push_back({name});
            it = path.end() - 1;
        }
        const std::size_t pos = std::size_t(it - path.begin());
        const Condition saved = path[pos];
        path[pos].hi = std::min(saved.hi, n.threshold);
        self(self, n.left);
        path[pos] = saved;
        path[pos].lo = std::max(saved.lo, n.threshold);
        self(self, n.right);
        path[pos] = saved;
        if (fresh) path.pop_back();
    };
    rec(rec, 0);
    return out;
}

std::vector<InjuryRule> extract_rules(const DecisionTreeModel& model) {
    std::vector<InjuryRule> out;
    for (auto& r : extract_regions(model))
        if (r.cls == 1) out.push_back({std::move(r.conditions), r.leaf, 0.0, std::nullopt});
    return out;
}

std::vector<InjuryRule> rule_stats(std::vector<InjuryRule> rules, const TrainingTable& table) {
    const std::size_t injuries = table.count_label(1);
    for (auto& r : rules) {
        std::vector<std::size_t> cols;
        for (const auto& c : r.conditions) cols.push_back(table.require_column(c.feature));
        std::size_t covered = 0, hit = 0;
        for (std::size_t i = 0; i < table.rows(); ++i) {
            bool ok = true;
            for (std::size_t k = 0; k < cols.size() && ok; ++k) ok = r.conditions[k].contains(table.at(i, cols[k]));
            if (!ok) continue;
            ++covered;
            hit += table.label(i);
        }
        r.frequency = injuries ? double(hit) / double(injuries) : 0.0;
        r.accuracy = covered ? std::optional<double>(double(hit) / double(covered)) : std::nullopt;
    }
    return rules;
}

namespace {

std::string fixed2(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string describe(const Condition& c) {
    const bool has_lo = std::isfinite(c.lo), has_hi = std::isfinite(c.hi);
    if (has_lo && has_hi) return fixed2(c.lo) + " < " + c.feature + " <= " + fixed2(c.hi);
    if (has_lo) return c.feature + " > " + fixed2(c.lo);
    if (has_hi) return c.feature + " <= " + fixed2(c.hi);
    return c.feature + " any";
}

std::string percent(double v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.0f%%", 100.0 * v);
    return buf;
}

nlohmann::json bound(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json rules_to_json(const std::vector<InjuryRule>& rules) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rules) {
        nlohmann::json conds = nlohmann::json::array();
        for (const auto& c : r.conditions) conds.push_back({{"feature", c.feature}, {"lo", bound(c.lo)}, {"hi", bound(c.hi)}});
        arr.push_back({{"conditions", std::move(conds)},
                       {"frequency", r.frequency},
                       {"accuracy", r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr)},
                       {"leaf", r.leaf}});
    }
    return {{"rules", std::move(arr)}};
}

std::vector<InjuryRule> rules_from_json(const nlohmann::json& j) {
    std::vector<InjuryRule> out;
    try {
        for (const auto& jr : j.at("rules")) {
            InjuryRule r;
            for (const auto& jc : jr.at("conditions")) {
                Condition c{jc.at("feature").get<std::string>()};
                if (!jc.at("lo").is_null()) c.lo = jc["lo"].get<double>();
                if (!jc.at("hi").is_null()) c.hi = jc["hi"].get<double>();
                r.conditions.push_back(std::move(c));
            }
            r.frequency = jr.at("frequency").get<double>();
            if (!jr.at("accuracy").is_null()) r.accuracy = jr["accuracy"].get<double>();
            r.leaf = jr.value("leaf", std::size_t(0));
            out.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed handbook JSON: ") + e.what());
    }
    return out;
}

std::string render_handbook(std::vector<InjuryRule> rules, HandbookFormat format) {
    std::stable_sort(rules.begin(), rules.end(), [](const InjuryRule& a, const InjuryRule& b) {
        return a.frequency != b.frequency ? a.frequency > b.frequency : a.leaf < b.leaf;
    });
    if (format == HandbookFormat::Json) return rules_to_json(rules).dump(2) + "\n";
    std::ostringstream os;
    if (rules.empty()) {
        os << "No injury rules: the model never predicts an injury.\n";
        return os.str();
    }
    os << "Injury rules (" << rules.size() << ")\n";
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const auto& r = rules[i];
        os << "\nRule " << i + 1 << "  (Freq " << percent(r.frequency) << ", Acc "
           << (r.accuracy ? percent(*r.accuracy) : std::string("n/a")) << ")\n";
        for (const auto& c : r.conditions) os << "  " << describe(c) << "\n";
        if (r.conditions.empty()) os << "  always\n";
    }
    return os.str();
}

}  // namespace injury
