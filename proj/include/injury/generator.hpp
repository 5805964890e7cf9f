#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/features.hpp"
#include "injury/rules.hpp"
#include "injury/season.hpp"

namespace injury {

/// Two-component lognormal mixture matched to a target mean and standard deviation.
struct WorkloadDistribution {
    double mean = 1.0;
    double sd = 1.0;
};

/// Injury mechanism: when every condition holds on a session's feature row the player is
/// injured (onset the next day) with `probability`.
struct PlantedRule {
    std::string name;
    std::vector<Condition> conditions;
    double probability = 1.0;
};

struct GeneratorConfig {
    int n_players = 26;
    int weeks = 23;
    int sessions_per_week = 4;
    std::string start_date = "2013-08-05";
    /// Per workload feature, in workload order. d_HSR, Acc_3 and Dec_3 are drawn as
    /// fractions of d_TOT, Acc_2 and Dec_2 so that they never exceed them.
    std::array<WorkloadDistribution, kWorkloadCount> workload;
    double light_weight = 0.6;      // weight of the light mixture component
    double between_share = 0.5;     // share of variance explained by the light/heavy split
    /// Log-sd of a weekly per-player factor on the d_HSR share of d_TOT.
    double hsr_week_sigma = 0.2;
    std::vector<PlantedRule> rules;
    double base_rate = 0.001;       // per-session injury probability outside the rules
    double preseason_injury_rate = 0.0;  // players entering the season with one prior injury
    int min_days_absent = 4;
    int max_days_absent = 16;
    double game_probability = 0.8;  // chance of an official game in a week
    std::uint64_t seed = 0;

    GeneratorConfig();
    void validate() const;
};

GeneratorConfig generator_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeneratorConfig& c);

struct LedgerEntry {
    std::string player_id;
    Date onset;
    std::string cause;  // planted rule name, "base" or "preseason"
    std::optional<Date> session_date;  // session whose features triggered the injury
};

struct GeneratedSeason {
    SeasonLog log;
    std::vector<LedgerEntry> ledger;
};

/// Throws Error(ConfigInvalid).
GeneratedSeason generate(const GeneratorConfig& cfg);

nlohmann::json to_json(const std::vector<LedgerEntry>& ledger);

}  // namespace injury
