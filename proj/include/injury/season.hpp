#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "injury/date.hpp"

namespace injury {

enum class Role : std::uint8_t { CentralBack = 0, Fullback, Midfielder, Winger, Forward };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

/// The twelve per-session GPS workload aggregates, in canonical column order.
enum class Workload : std::uint8_t {
    TotalDistance = 0,  // d_TOT
    HighSpeedRunning,   // d_HSR
    MetabolicDistance,  // d_MET
    HighMetabolicLoad,  // d_HML
    HighMetabolicLoadPerMinute,  // d_HML/m
    ExplosiveDistance,  // d_EXP
    Acc2,
    Acc3,
    Dec2,
    Dec3,
    DynamicStressLoad,  // DSL
    FatigueIndex,       // FI
};

inline constexpr std::size_t kWorkloadCount = 12;

/// Display names used for feature columns, e.g. "d_HML/m".
inline constexpr std::array<std::string_view, kWorkloadCount> kWorkloadNames = {
    "d_TOT", "d_HSR", "d_MET", "d_HML", "d_HML/m", "d_EXP",
    "Acc_2", "Acc_3", "Dec_2", "Dec_3", "DSL",     "FI"};

/// Column names in sessions.csv.
inline constexpr std::array<std::string_view, kWorkloadCount> kWorkloadCsvNames = {
    "d_tot", "d_hsr", "d_met", "d_hml", "d_hml_m", "d_exp",
    "acc2",  "acc3",  "dec2",  "dec3",  "dsl",     "fi"};

using WorkloadValues = std::array<double, kWorkloadCount>;

inline double& at(WorkloadValues& w, Workload f) { return w[std::size_t(f)]; }
inline double at(const WorkloadValues& w, Workload f) { return w[std::size_t(f)]; }

struct PlayerProfile {
    std::string player_id;
    int age = 0;
    double height_cm = 0.0;
    double body_mass_kg = 0.0;
    Role role = Role::Midfielder;

    double bmi() const {
        const double m = height_cm / 100.0;
        return body_mass_kg / (m * m);
    }
};

struct TrainingSession {
    std::string player_id;
    Date date;
    WorkloadValues workload{};
    double play_time = 0.0;  // minutes in previous games
    int games = 0;           // prior official games
};

struct InjuryRecord {
    std::string player_id;
    Date onset;
    int days_absent = 1;

    /// Inclusive absence window [onset, onset + days_absent].
    bool covers(Date d) const { return d >= onset && d <= onset.plus_days(days_absent); }
};

/// A validated season. sessions[i] holds players[i]'s sessions in date order; injuries
/// are grouped by player (in player order) and sorted by onset within a player.
struct SeasonLog {
    std::vector<PlayerProfile> players;
    std::vector<std::vector<TrainingSession>> sessions;
    std::vector<InjuryRecord> injuries;

    std::optional<std::size_t> player_index(std::string_view id) const;
    std::size_t session_count() const;
    std::vector<InjuryRecord> injuries_of(std::string_view player_id) const;

    /// Validate invariants and normalize ordering. Throws Error with a kind naming the
    /// violated invariant.
    static SeasonLog assemble(std::vector<PlayerProfile> players,
                              std::vector<TrainingSession> sessions,
                              std::vector<InjuryRecord> injuries);
};

/// Check a single session's value invariants (non-negativity, Acc_3 <= Acc_2,
/// Dec_3 <= Dec_2, d_HSR <= d_TOT). Returns the violated rule, or nullopt.
std::optional<std::string> check_session(const TrainingSession& s);

SeasonLog parse_season(const std::filesystem::path& sessions_file,
                       const std::filesystem::path& injuries_file,
                       const std::filesystem::path& players_file);

SeasonLog parse_season(std::istream& sessions, std::istream& injuries, std::istream& players);

void write_players_csv(std::ostream& out, const SeasonLog& log);
void write_sessions_csv(std::ostream& out, const SeasonLog& log);
void write_injuries_csv(std::ostream& out, const SeasonLog& log);

inline constexpr std::string_view kSessionsHeader =
    "player_id,date,d_tot,d_hsr,d_met,d_hml,d_hml_m,d_exp,acc2,acc3,dec2,dec3,dsl,fi,play_time,games";
inline constexpr std::string_view kInjuriesHeader = "player_id,onset_date,days_absent";
inline constexpr std::string_view kPlayersHeader = "player_id,age,height_cm,mass_kg,role";

// ---------------------------------------------------------------------------------
// Labels

struct LabeledSession {
    TrainingSession session;
    std::uint8_t label = 0;
    /// Set on label-1 sessions: the onset of the attributed injury and its index in
    /// SeasonLog::injuries.
    std::optional<Date> injury_onset;
    std::optional<std::size_t> injury_index;
};

struct OrphanInjury {
    std::size_t injury_index;
    std::string player_id;
    Date onset;
    std::string reason;
};

struct LabelingResult {
    std::vector<LabeledSession> sessions;  // player order, chronological within player
    std::vector<OrphanInjury> orphans;
    std::size_t excluded_sessions = 0;  // dropped because inside an absence window
};

inline constexpr int kDefaultHorizonDays = 3;

/// Attach each injury to its player's most recent preceding (non-excluded) session if
/// the gap is at most horizon_days; otherwise the injury is reported as orphaned.
/// Sessions inside any absence window of their player are dropped.
LabelingResult assign_labels(const SeasonLog& log, int horizon_days = kDefaultHorizonDays);

}  // namespace injury
