#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/season.hpp"
#include "injury/table.hpp"

namespace injury {

struct FeatureSpec {
    int ewma_span = 6;          // training sessions
    int acwr_acute_days = 6;    // calendar days
    int acwr_chronic_days = 27; // calendar days
    int mswr_window_days = 7;   // calendar days
    double acwr_cap = 5.0;
    double mswr_cap = 10.0;

    /// Throws Error(ConfigInvalid) on violated invariants.
    void validate() const;
};

inline constexpr std::size_t kFeatureCount = 55;

/// Column layout: 12 daily workload, 6 personal (Age, BMI, Role, PI, PlayTime, Games),
/// 12 `<w>_EWMA`, 12 `<w>_ACWR`, 12 `<w>_MSWR`, then `PI_EWMA`.
const std::vector<std::string>& feature_names();

std::string ewma_name(Workload w);
std::string acwr_name(Workload w);
std::string mswr_name(Workload w);
inline constexpr std::string_view kPiEwmaName = "PI_EWMA";
inline constexpr std::string_view kRoleName = "Role";

inline double ewma_alpha(int span) { return 2.0 / (double(span) + 1.0); }

/// Recursive EWMA: out[0] = in[0], out[t] = a*in[t] + (1-a)*out[t-1], a = 2/(span+1).
/// Throws Error(EmptySeries) for an empty input and Error(InvalidArgument) for span < 1.
std::vector<double> ewma(std::span<const double> series, int span);

/// EWMA of a player's cumulative prior-injury count, one entry per training session.
/// The series must be non-decreasing and non-negative.
std::vector<double> pi_ewma(std::span<const double> injury_counts, int span);

struct DatedValue {
    Date date;
    double value;
};

/// Mean over entries with date in [as_of - window_days + 1, as_of]; nullopt when none.
/// `history` must be chronological.
std::optional<double> rolling_mean(std::span<const DatedValue> history, int window_days, Date as_of);

/// Acute/chronic mean ratio capped at spec.acwr_cap (0 when both are 0, the cap when
/// only chronic is 0). nullopt when the chronic window holds no sessions.
std::optional<double> acwr(std::span<const DatedValue> history, Date as_of, const FeatureSpec& spec);

/// Mean over sample standard deviation in the trailing mswr_window_days, capped at
/// spec.mswr_cap; the cap is returned for fewer than two sessions or std < 1e-9.
/// nullopt when the window is empty.
std::optional<double> mswr(std::span<const DatedValue> history, Date as_of, const FeatureSpec& spec);

/// One feature's dated history from a player's sessions.
std::vector<DatedValue> workload_history(std::span<const TrainingSession> sessions, Workload w);

/// Incremental per-player feature builder. Sessions must be pushed in date order.
class FeatureAccumulator {
public:
    FeatureAccumulator(const PlayerProfile& profile, const FeatureSpec& spec);

    /// Appends the session and returns its 55-value feature row, or nullopt when the
    /// chronic window is empty (the row is still added to the history).
    std::optional<std::vector<double>> push(const TrainingSession& session, int prior_injuries);

    std::size_t sessions_seen() const { return history_[0].size(); }

private:
    PlayerProfile profile_;
    FeatureSpec spec_;
    std::vector<std::vector<DatedValue>> history_;  // per workload feature
    std::vector<double> ewma_state_;
    double pi_state_ = 0.0;
};

/// Number of `injuries` of this player whose onset is strictly before `date`.
int prior_injury_count(std::span<const InjuryRecord> player_injuries, Date date);

struct BuildSummary {
    std::size_t rows = 0;
    std::size_t positives = 0;
    std::size_t dropped_rows = 0;
    std::size_t excluded_sessions = 0;
    std::size_t orphan_injuries = 0;
};

nlohmann::json to_json(const BuildSummary& s);

struct TableBuild {
    TrainingTable table;
    BuildSummary summary;
};

/// One row per labeled session (player order, chronological within player).
TableBuild build_training_table(const LabelingResult& labeled, const SeasonLog& log,
                                const FeatureSpec& spec = {});

}  // namespace injury
