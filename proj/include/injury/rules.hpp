#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/table.hpp"
#include "injury/tree.hpp"

namespace injury {

/// lo < value <= hi, matching the tree's "go left iff value <= threshold" routing.
struct Condition {
    std::string feature;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double v) const { return v > lo && v <= hi; }
    bool operator==(const Condition&) const = default;
};

/// Conjunction of conditions leading to one leaf.
struct LeafRegion {
    std::size_t leaf = 0;
    std::uint8_t cls = 0;
    std::vector<Condition> conditions;  // one per tested feature, in first-tested order
};

struct InjuryRule {
    std::vector<Condition> conditions;
    std::size_t leaf = 0;
    double frequency = 0.0;          // covered injuries / all injuries
    std::optional<double> accuracy;  // covered injuries / covered rows; absent with no coverage

    /// Throws Error(MissingFeature) when a condition's feature is absent.
    bool satisfied_by(const std::map<std::string, double>& x) const;
    bool operator==(const InjuryRule&) const = default;
};

/// Regions of every leaf, in node order. They partition the feature space.
std::vector<LeafRegion> extract_regions(const DecisionTreeModel& model);

/// One rule per injury-class leaf (empty when the tree never predicts an injury).
std::vector<InjuryRule> extract_rules(const DecisionTreeModel& model);

/// Fills frequency and accuracy from a labeled table.
std::vector<InjuryRule> rule_stats(std::vector<InjuryRule> rules, const TrainingTable& table);

enum class HandbookFormat { Text, Json };

/// Rules ordered by descending frequency (then leaf id).
std::string render_handbook(std::vector<InjuryRule> rules, HandbookFormat format);
nlohmann::json rules_to_json(const std::vector<InjuryRule>& rules);
std::vector<InjuryRule> rules_from_json(const nlohmann::json& j);

}  // namespace injury
