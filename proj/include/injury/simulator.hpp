#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/features.hpp"
#include "injury/metrics.hpp"
#include "injury/pipeline.hpp"
#include "injury/season.hpp"

namespace injury {

struct SimulatorConfig {
    PipelineConfig pipeline{};  // oversampling, selection, grid, comparators, seed
    FeatureSpec features{};
    int horizon_days = kDefaultHorizonDays;
    int start_week = 6;

    void validate() const;
};

struct InjuryOutcome {
    std::size_t injury_index;
    std::string player_id;
    Date session_date;  // the labeled session
    bool detected;      // the decision tree predicted 1 for it
};

struct WeeklyOutcome {
    int week = 0;  // model trained through this week, predicting week + 1
    Date train_end;
    std::size_t train_rows = 0;
    std::size_t train_positives = 0;
    std::size_t predicted_rows = 0;
    bool degenerate = false;  // no injury examples yet, all-0 predictions
    bool oversampled = false;
    std::vector<std::string> selected_features;
    nlohmann::json hyperparams;
    std::vector<InjuryOutcome> injuries;
    std::map<std::string, ConfusionMatrix> weekly;      // per forecaster
    std::map<std::string, ConfusionMatrix> cumulative;  // per forecaster since start_week
    /// Latest date of any row used for training and latest onset whose label was visible.
    Date latest_train_date;
    std::optional<Date> latest_visible_onset;

    double cumulative_f1(const std::string& forecaster = "DT") const;
};

/// 1-based 7-day block of `d` counted from `first`.
int week_of(Date first, Date d);

/// Walk-forward retraining: for each week i >= start_week, train on every row dated up to
/// the end of week i (labels visible only if the injury began by then) and predict the
/// sessions of week i + 1. Throws Error(InsufficientHistory) when the log spans fewer
/// than start_week + 1 weeks.
std::vector<WeeklyOutcome> walk_forward(const SeasonLog& log, const SimulatorConfig& cfg);

struct FeatureTrace {
    std::vector<std::pair<int, std::vector<std::string>>> weeks;
    /// First week from which the subset never changes again.
    int stabilization_week = 0;
};

FeatureTrace feature_trace(const std::vector<WeeklyOutcome>& outcomes);

struct Money {
    std::int64_t cents = 0;

    static constexpr Money units(std::int64_t u) { return {u * 100}; }
    std::string to_string() const;
    auto operator<=>(const Money&) const = default;
};

constexpr Money cost(std::int64_t absence_days, Money daily_salary) { return {absence_days * daily_salary.cents}; }

struct CostReport {
    std::int64_t total_absence_days = 0;
    Money daily_salary;
    Money total_cost;
    std::int64_t preventable_days = 0;
    Money savings;
    double percent_decrease = 0.0;  // savings / total cost
    std::size_t injuries = 0;
    std::size_t detected = 0;
};

/// Preventable days sum the absence of injuries whose labeled session was predicted 1,
/// assuming a stopped player avoids the injury entirely.
CostReport savings(const std::vector<WeeklyOutcome>& outcomes, const std::vector<InjuryRecord>& injuries,
                   Money daily_salary);

nlohmann::json to_json(const WeeklyOutcome& w);
nlohmann::json to_json(const CostReport& c);
nlohmann::json to_json(const FeatureTrace& t);

/// week, cumulative F1 per forecaster, injuries detected and missed that week.
void write_fig3_csv(std::ostream& out, const std::vector<WeeklyOutcome>& outcomes);

}  // namespace injury
