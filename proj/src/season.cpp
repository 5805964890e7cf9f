#include "injury/season.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "injury/csv.hpp"
#include "injury/error.hpp"

namespace injury {

namespace {

constexpr std::array<std::string_view, 5> kRoleNames = {"CentralBack", "Fullback", "Midfielder",
                                                        "Winger", "Forward"};

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto lower = [](char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; };
        if (lower(a[i]) != lower(b[i])) return false;
    }
    return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open '" + path.string() + "'");
    return in;
}

/// Splits the header and data rows of one CSV stream, checking the header exactly.
class CsvTable {
public:
    CsvTable(std::istream& in, std::string name, std::string_view header) : name_(std::move(name)) {
        csv::LineReader reader(in);
        std::string line;
        if (!reader.next(line))
            throw RowError(ErrorKind::MalformedRow, name_, 1, "<header>", "file is empty");
        if (csv::trim(line) != header)
            throw RowError(ErrorKind::MalformedRow, name_, 1, "<header>",
                           "expected header '" + std::string(header) + "'");
        for (auto h : csv::split(header)) columns_.emplace_back(h);
        while (reader.next(line)) {
            if (csv::trim(line).empty()) continue;
            rows_.push_back({reader.line_number(), line});
        }
    }

    struct Row {
        std::size_t line;
        std::string text;
    };

    const std::vector<Row>& rows() const { return rows_; }
    const std::string& name() const { return name_; }

    std::vector<std::string_view> fields(const Row& row) const {
        auto f = csv::split(row.text);
        if (f.size() != columns_.size()) {
            const std::string col = f.size() < columns_.size() ? columns_[f.size()] : "<extra>";
            throw RowError(ErrorKind::MalformedRow, name_, row.line, col,
                           "expected " + std::to_string(columns_.size()) + " fields, found " +
                               std::to_string(f.size()));
        }
        for (auto& s : f) s = csv::trim(s);
        return f;
    }

    double real(const Row& row, std::string_view field, std::size_t col) const {
        auto v = csv::parse_double(field);
        if (!v || !std::isfinite(*v))
            throw RowError(ErrorKind::MalformedRow, name_, row.line, columns_[col],
                           "not a number: '" + std::string(field) + "'");
        return *v;
    }

    long long integer(const Row& row, std::string_view field, std::size_t col) const {
        auto v = csv::parse_int(field);
        if (!v)
            throw RowError(ErrorKind::MalformedRow, name_, row.line, columns_[col],
                           "not an integer: '" + std::string(field) + "'");
        return *v;
    }

    Date date(const Row& row, std::string_view field, std::size_t col) const {
        auto d = Date::parse(field);
        if (!d)
            throw RowError(ErrorKind::MalformedRow, name_, row.line, columns_[col],
                           "not an ISO-8601 date: '" + std::string(field) + "'");
        return *d;
    }

    const std::string& column(std::size_t i) const { return columns_[i]; }

private:
    std::string name_;
    std::vector<std::string> columns_;
    std::vector<Row> rows_;
};

}  // namespace

std::string_view to_string(Role role) { return kRoleNames[std::size_t(role)]; }

std::optional<Role> parse_role(std::string_view text) {
    text = csv::trim(text);
    for (std::size_t i = 0; i < kRoleNames.size(); ++i)
        if (iequals(text, kRoleNames[i])) return Role(i);
    return std::nullopt;
}

std::optional<std::string> check_session(const TrainingSession& s) {
    for (std::size_t i = 0; i < kWorkloadCount; ++i) {
        if (!std::isfinite(s.workload[i])) return std::string(kWorkloadNames[i]) + " is not finite";
        if (s.workload[i] < 0.0) return std::string(kWorkloadNames[i]) + " >= 0 violated";
    }
    if (at(s.workload, Workload::Acc3) > at(s.workload, Workload::Acc2))
        return std::string("Acc_3 <= Acc_2 violated");
    if (at(s.workload, Workload::Dec3) > at(s.workload, Workload::Dec2))
        return std::string("Dec_3 <= Dec_2 violated");
    if (at(s.workload, Workload::HighSpeedRunning) > at(s.workload, Workload::TotalDistance))
        return std::string("d_HSR <= d_TOT violated");
    if (!(s.play_time >= 0.0)) return std::string("play_time >= 0 violated");
    if (s.games < 0) return std::string("games >= 0 violated");
    return std::nullopt;
}

std::optional<std::size_t> SeasonLog::player_index(std::string_view id) const {
    for (std::size_t i = 0; i < players.size(); ++i)
        if (players[i].player_id == id) return i;
    return std::nullopt;
}

std::size_t SeasonLog::session_count() const {
    std::size_t n = 0;
    for (const auto& s : sessions) n += s.size();
    return n;
}

std::vector<InjuryRecord> SeasonLog::injuries_of(std::string_view player_id) const {
    std::vector<InjuryRecord> out;
    for (const auto& inj : injuries)
        if (inj.player_id == player_id) out.push_back(inj);
    return out;
}

SeasonLog SeasonLog::assemble(std::vector<PlayerProfile> players,
                              std::vector<TrainingSession> sessions,
                              std::vector<InjuryRecord> injuries) {
    SeasonLog log;
    std::map<std::string, std::size_t, std::less<>> index;
    for (auto& p : players) {
        if (p.player_id.empty())
            throw Error(ErrorKind::MalformedRow, "player with empty id");
        if (p.age <= 0 || !(p.height_cm > 0.0) || !(p.body_mass_kg > 0.0))
            throw Error(ErrorKind::MalformedRow,
                        "player '" + p.player_id + "': age, height and mass must be positive");
        if (!index.emplace(p.player_id, log.players.size()).second)
            throw Error(ErrorKind::MalformedRow, "duplicate player '" + p.player_id + "'");
        log.players.push_back(std::move(p));
    }
    log.sessions.resize(log.players.size());
    for (auto& s : sessions) {
        auto it = index.find(s.player_id);
        if (it == index.end())
            throw Error(ErrorKind::UnknownPlayer, "session for unknown player '" + s.player_id + "'");
        if (auto bad = check_session(s))
            throw Error(ErrorKind::NegativeWorkload,
                        "session " + s.player_id + " " + s.date.to_string() + ": " + *bad);
        log.sessions[it->second].push_back(std::move(s));
    }
    for (auto& per_player : log.sessions) {
        std::stable_sort(per_player.begin(), per_player.end(),
                         [](const auto& a, const auto& b) { return a.date < b.date; });
        for (std::size_t i = 1; i < per_player.size(); ++i)
            if (per_player[i].date == per_player[i - 1].date)
                throw Error(ErrorKind::DuplicateSession,
                            "player '" + per_player[i].player_id + "' has two sessions on " +
                                per_player[i].date.to_string());
    }
    std::vector<std::vector<InjuryRecord>> grouped(log.players.size());
    for (auto& inj : injuries) {
        auto it = index.find(inj.player_id);
        if (it == index.end())
            throw Error(ErrorKind::UnknownPlayer, "injury for unknown player '" + inj.player_id + "'");
        if (inj.days_absent < 1)
            throw Error(ErrorKind::InvalidInjury, "injury of '" + inj.player_id + "' on " +
                                                      inj.onset.to_string() + ": days_absent >= 1 violated");
        grouped[it->second].push_back(std::move(inj));
    }
    for (auto& g : grouped) {
        std::stable_sort(g.begin(), g.end(), [](const auto& a, const auto& b) { return a.onset < b.onset; });
        for (std::size_t i = 1; i < g.size(); ++i)
            if (g[i].onset == g[i - 1].onset)
                throw Error(ErrorKind::InvalidInjury, "player '" + g[i].player_id +
                                                          "' has two injuries with onset " +
                                                          g[i].onset.to_string());
        for (auto& inj : g) log.injuries.push_back(std::move(inj));
    }
    return log;
}

SeasonLog parse_season(std::istream& sessions_in, std::istream& injuries_in, std::istream& players_in) {
    CsvTable players_csv(players_in, "players.csv", kPlayersHeader);
    std::vector<PlayerProfile> players;
    std::set<std::string, std::less<>> known;
    for (const auto& row : players_csv.rows()) {
        auto f = players_csv.fields(row);
        PlayerProfile p;
        p.player_id = std::string(f[0]);
        if (p.player_id.empty())
            throw RowError(ErrorKind::MalformedRow, players_csv.name(), row.line, "player_id", "empty id");
        if (!known.insert(p.player_id).second)
            throw RowError(ErrorKind::MalformedRow, players_csv.name(), row.line, "player_id",
                           "duplicate player '" + p.player_id + "'");
        p.age = int(players_csv.integer(row, f[1], 1));
        p.height_cm = players_csv.real(row, f[2], 2);
        p.body_mass_kg = players_csv.real(row, f[3], 3);
        auto role = parse_role(f[4]);
        if (!role)
            throw RowError(ErrorKind::MalformedRow, players_csv.name(), row.line, "role",
                           "unknown role '" + std::string(f[4]) + "'");
        p.role = *role;
        if (p.age <= 0)
            throw RowError(ErrorKind::MalformedRow, players_csv.name(), row.line, "age", "must be > 0");
        if (!(p.height_cm > 0.0))
            throw RowError(ErrorKind::MalformedRow, players_csv.name(), row.line, "height_cm", "must be > 0");
        if (!(p.body_mass_kg > 0.0))
            throw RowError(ErrorKind::MalformedRow, players_csv.name(), row.line, "mass_kg", "must be > 0");
        players.push_back(std::move(p));
    }

    CsvTable sessions_csv(sessions_in, "sessions.csv", kSessionsHeader);
    std::vector<TrainingSession> sessions;
    std::set<std::pair<std::string, long>> seen;
    for (const auto& row : sessions_csv.rows()) {
        auto f = sessions_csv.fields(row);
        TrainingSession s;
        s.player_id = std::string(f[0]);
        if (!known.contains(s.player_id))
            throw RowError(ErrorKind::UnknownPlayer, sessions_csv.name(), row.line, "player_id",
                           "unknown player '" + s.player_id + "'");
        s.date = sessions_csv.date(row, f[1], 1);
        for (std::size_t i = 0; i < kWorkloadCount; ++i) s.workload[i] = sessions_csv.real(row, f[2 + i], 2 + i);
        s.play_time = sessions_csv.real(row, f[14], 14);
        s.games = int(sessions_csv.integer(row, f[15], 15));
        for (std::size_t i = 0; i < kWorkloadCount; ++i)
            if (s.workload[i] < 0.0)
                throw RowError(ErrorKind::NegativeWorkload, sessions_csv.name(), row.line,
                               sessions_csv.column(2 + i), "workload values must be >= 0");
        if (auto bad = check_session(s)) {
            std::string col = "<row>";
            if (bad->starts_with("Acc_3")) col = "acc3";
            else if (bad->starts_with("Dec_3")) col = "dec3";
            else if (bad->starts_with("d_HSR")) col = "d_hsr";
            else if (bad->starts_with("play_time")) col = "play_time";
            else if (bad->starts_with("games")) col = "games";
            throw RowError(ErrorKind::NegativeWorkload, sessions_csv.name(), row.line, col, *bad);
        }
        if (!seen.insert({s.player_id, s.date.serial()}).second)
            throw RowError(ErrorKind::DuplicateSession, sessions_csv.name(), row.line, "date",
                           "second session for '" + s.player_id + "' on " + s.date.to_string());
        sessions.push_back(std::move(s));
    }

    CsvTable injuries_csv(injuries_in, "injuries.csv", kInjuriesHeader);
    std::vector<InjuryRecord> injuries;
    for (const auto& row : injuries_csv.rows()) {
        auto f = injuries_csv.fields(row);
        InjuryRecord inj;
        inj.player_id = std::string(f[0]);
        if (!known.contains(inj.player_id))
            throw RowError(ErrorKind::UnknownPlayer, injuries_csv.name(), row.line, "player_id",
                           "unknown player '" + inj.player_id + "'");
        inj.onset = injuries_csv.date(row, f[1], 1);
        const long long days = injuries_csv.integer(row, f[2], 2);
        if (days < 1)
            throw RowError(ErrorKind::InvalidInjury, injuries_csv.name(), row.line, "days_absent",
                           "days_absent >= 1 violated");
        inj.days_absent = int(days);
        injuries.push_back(std::move(inj));
    }

    return SeasonLog::assemble(std::move(players), std::move(sessions), std::move(injuries));
}

SeasonLog parse_season(const std::filesystem::path& sessions_file,
                       const std::filesystem::path& injuries_file,
                       const std::filesystem::path& players_file) {
    auto s = open_input(sessions_file);
    auto i = open_input(injuries_file);
    auto p = open_input(players_file);
    return parse_season(s, i, p);
}

void write_players_csv(std::ostream& out, const SeasonLog& log) {
    out << kPlayersHeader << '\n';
    for (const auto& p : log.players)
        out << p.player_id << ',' << p.age << ',' << csv::format_double(p.height_cm) << ','
            << csv::format_double(p.body_mass_kg) << ',' << to_string(p.role) << '\n';
}

void write_sessions_csv(std::ostream& out, const SeasonLog& log) {
    out << kSessionsHeader << '\n';
    for (const auto& per_player : log.sessions)
        for (const auto& s : per_player) {
            out << s.player_id << ',' << s.date.to_string();
            for (double v : s.workload) out << ',' << csv::format_double(v);
            out << ',' << csv::format_double(s.play_time) << ',' << s.games << '\n';
        }
}

void write_injuries_csv(std::ostream& out, const SeasonLog& log) {
    out << kInjuriesHeader << '\n';
    for (const auto& inj : log.injuries)
        out << inj.player_id << ',' << inj.onset.to_string() << ',' << inj.days_absent << '\n';
}

LabelingResult assign_labels(const SeasonLog& log, int horizon_days) {
    if (horizon_days < 1) throw Error(ErrorKind::InvalidArgument, "horizon_days must be >= 1");
    LabelingResult result;
    std::vector<std::vector<std::size_t>> injuries_by_player(log.players.size());
    for (std::size_t k = 0; k < log.injuries.size(); ++k)
        injuries_by_player[*log.player_index(log.injuries[k].player_id)].push_back(k);

    for (std::size_t p = 0; p < log.players.size(); ++p) {
        const auto& sessions = log.sessions[p];
        const auto& inj_idx = injuries_by_player[p];

        std::vector<bool> excluded(sessions.size(), false);
        for (std::size_t s = 0; s < sessions.size(); ++s)
            for (std::size_t k : inj_idx)
                if (log.injuries[k].covers(sessions[s].date)) excluded[s] = true;

        std::vector<std::optional<std::size_t>> attributed(sessions.size());
        for (std::size_t k : inj_idx) {
            const auto& inj = log.injuries[k];
            std::optional<std::size_t> candidate;
            for (std::size_t s = 0; s < sessions.size() && sessions[s].date < inj.onset; ++s)
                if (!excluded[s]) candidate = s;
            if (!candidate || sessions[*candidate].date.days_until(inj.onset) > horizon_days) {
                result.orphans.push_back({k, inj.player_id, inj.onset,
                                          "no session within " + std::to_string(horizon_days) +
                                              " days before onset"});
                continue;
            }
            if (attributed[*candidate]) {
                result.orphans.push_back({k, inj.player_id, inj.onset,
                                          "preceding session already attributed to an earlier injury"});
                continue;
            }
            attributed[*candidate] = k;
        }

        for (std::size_t s = 0; s < sessions.size(); ++s) {
            if (excluded[s]) {
                ++result.excluded_sessions;
                continue;
            }
            LabeledSession ls;
            ls.session = sessions[s];
            if (attributed[s]) {
                ls.label = 1;
                ls.injury_index = *attributed[s];
                ls.injury_onset = log.injuries[*attributed[s]].onset;
            }
            result.sessions.push_back(std::move(ls));
        }
    }
    return result;
}

}  // namespace injury
