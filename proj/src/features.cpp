#include "injury/features.hpp"

#include <algorithm>
#include <cmath>

#include "injury/error.hpp"

namespace injury {

void FeatureSpec::validate() const {
    if (ewma_span < 1) throw Error(ErrorKind::ConfigInvalid, "ewma_span must be >= 1");
    if (acwr_acute_days < 1 || acwr_chronic_days < 1 || mswr_window_days < 1)
        throw Error(ErrorKind::ConfigInvalid, "window lengths must be >= 1");
    if (acwr_acute_days >= acwr_chronic_days)
        throw Error(ErrorKind::ConfigInvalid, "acwr_acute_days must be < acwr_chronic_days");
    if (!(acwr_cap > 0.0) || !(mswr_cap > 0.0)) throw Error(ErrorKind::ConfigInvalid, "caps must be > 0");
}

std::string ewma_name(Workload w) { return std::string(kWorkloadNames[std::size_t(w)]) + "_EWMA"; }
std::string acwr_name(Workload w) { return std::string(kWorkloadNames[std::size_t(w)]) + "_ACWR"; }
std::string mswr_name(Workload w) { return std::string(kWorkloadNames[std::size_t(w)]) + "_MSWR"; }

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (auto w : kWorkloadNames) n.emplace_back(w);
        for (auto p : {"Age", "BMI", "Role", "PI", "PlayTime", "Games"}) n.emplace_back(p);
        for (std::size_t i = 0; i < kWorkloadCount; ++i) n.push_back(ewma_name(Workload(i)));
        for (std::size_t i = 0; i < kWorkloadCount; ++i) n.push_back(acwr_name(Workload(i)));
        for (std::size_t i = 0; i < kWorkloadCount; ++i) n.push_back(mswr_name(Workload(i)));
        n.emplace_back(kPiEwmaName);
        return n;
    }();
    return names;
}

std::vector<double> ewma(std::span<const double> series, int span) {
    if (series.empty()) throw Error(ErrorKind::EmptySeries, "ewma of an empty series");
    if (span < 1) throw Error(ErrorKind::InvalidArgument, "ewma span must be >= 1");
    const double a = ewma_alpha(span);
    std::vector<double> out(series.size());
    out[0] = series[0];
    for (std::size_t t = 1; t < series.size(); ++t) out[t] = a * series[t] + (1.0 - a) * out[t - 1];
    return out;
}

std::vector<double> pi_ewma(std::span<const double> injury_counts, int span) {
    for (std::size_t t = 0; t < injury_counts.size(); ++t) {
        if (injury_counts[t] < 0.0) throw Error(ErrorKind::InvalidArgument, "injury counts must be >= 0");
        if (t > 0 && injury_counts[t] < injury_counts[t - 1])
            throw Error(ErrorKind::InvalidArgument, "injury counts must be non-decreasing");
    }
    return ewma(injury_counts, span);
}

namespace {

/// Entries of a chronological history with date in [as_of - window + 1, as_of].
std::span<const DatedValue> window_of(std::span<const DatedValue> history, int window_days, Date as_of) {
    const Date first = as_of.plus_days(-(window_days - 1));
    auto end = std::upper_bound(history.begin(), history.end(), as_of,
                                [](Date d, const DatedValue& v) { return d < v.date; });
    auto begin = std::lower_bound(history.begin(), end, first,
                                  [](const DatedValue& v, Date d) { return v.date < d; });
    return {begin, end};
}

}  // namespace

std::optional<double> rolling_mean(std::span<const DatedValue> history, int window_days, Date as_of) {
    auto w = window_of(history, window_days, as_of);
    if (w.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& v : w) sum += v.value;
    return sum / double(w.size());
}

std::optional<double> acwr(std::span<const DatedValue> history, Date as_of, const FeatureSpec& spec) {
    const auto chronic = rolling_mean(history, spec.acwr_chronic_days, as_of);
    if (!chronic) return std::nullopt;
    const double acute = rolling_mean(history, spec.acwr_acute_days, as_of).value_or(0.0);
    if (*chronic == 0.0) return acute == 0.0 ? 0.0 : spec.acwr_cap;
    return std::min(acute / *chronic, spec.acwr_cap);
}

std::optional<double> mswr(std::span<const DatedValue> history, Date as_of, const FeatureSpec& spec) {
    auto w = window_of(history, spec.mswr_window_days, as_of);
    if (w.empty()) return std::nullopt;
    if (w.size() < 2) return spec.mswr_cap;
    double mean = 0.0;
    for (const auto& v : w) mean += v.value;
    mean /= double(w.size());
    double ss = 0.0;
    for (const auto& v : w) ss += (v.value - mean) * (v.value - mean);
    const double sd = std::sqrt(ss / double(w.size() - 1));
    if (sd < 1e-9) return spec.mswr_cap;
    return std::min(mean / sd, spec.mswr_cap);
}

std::vector<DatedValue> workload_history(std::span<const TrainingSession> sessions, Workload w) {
    std::vector<DatedValue> out;
    out.reserve(sessions.size());
    for (const auto& s : sessions) out.push_back({s.date, at(s.workload, w)});
    return out;
}

int prior_injury_count(std::span<const InjuryRecord> player_injuries, Date date) {
    int n = 0;
    for (const auto& inj : player_injuries)
        if (inj.onset < date) ++n;
    return n;
}

FeatureAccumulator::FeatureAccumulator(const PlayerProfile& profile, const FeatureSpec& spec)
    : profile_(profile), spec_(spec), history_(kWorkloadCount), ewma_state_(kWorkloadCount, 0.0) {
    spec_.validate();
}

std::optional<std::vector<double>> FeatureAccumulator::push(const TrainingSession& session, int prior_injuries) {
    const bool first = history_[0].empty();
    if (!first && !(history_[0].back().date < session.date))
        throw Error(ErrorKind::InvalidArgument, "sessions must be pushed in strictly increasing date order");
    const double a = ewma_alpha(spec_.ewma_span);
    for (std::size_t i = 0; i < kWorkloadCount; ++i) {
        history_[i].push_back({session.date, session.workload[i]});
        ewma_state_[i] = first ? session.workload[i] : a * session.workload[i] + (1.0 - a) * ewma_state_[i];
    }
    pi_state_ = first ? double(prior_injuries) : a * double(prior_injuries) + (1.0 - a) * pi_state_;

    std::vector<double> row;
    row.reserve(kFeatureCount);
    for (double v : session.workload) row.push_back(v);
    row.push_back(double(profile_.age));
    row.push_back(profile_.bmi());
    row.push_back(double(static_cast<int>(profile_.role)));
    row.push_back(double(prior_injuries));
    row.push_back(session.play_time);
    row.push_back(double(session.games));
    for (double v : ewma_state_) row.push_back(v);
    for (std::size_t i = 0; i < kWorkloadCount; ++i) {
        auto r = acwr(history_[i], session.date, spec_);
        if (!r) return std::nullopt;
        row.push_back(*r);
    }
    for (std::size_t i = 0; i < kWorkloadCount; ++i) {
        auto m = mswr(history_[i], session.date, spec_);
        if (!m) return std::nullopt;
        row.push_back(*m);
    }
    row.push_back(pi_state_);
    return row;
}

nlohmann::json to_json(const BuildSummary& s) {
    return {{"rows", s.rows},
            {"positives", s.positives},
            {"dropped_rows", s.dropped_rows},
            {"excluded_sessions", s.excluded_sessions},
            {"orphan_injuries", s.orphan_injuries}};
}

TableBuild build_training_table(const LabelingResult& labeled, const SeasonLog& log, const FeatureSpec& spec) {
    spec.validate();
    TableBuild out{TrainingTable(feature_names()), {}};
    out.summary.excluded_sessions = labeled.excluded_sessions;
    out.summary.orphan_injuries = labeled.orphans.size();
    out.table.reserve(labeled.sessions.size());

    std::size_t i = 0;
    while (i < labeled.sessions.size()) {
        const std::string& pid = labeled.sessions[i].session.player_id;
        const auto p = log.player_index(pid);
        if (!p) throw Error(ErrorKind::UnknownPlayer, "labeled session for unknown player '" + pid + "'");
        const auto injuries = log.injuries_of(pid);
        FeatureAccumulator acc(log.players[*p], spec);
        for (; i < labeled.sessions.size() && labeled.sessions[i].session.player_id == pid; ++i) {
            const auto& ls = labeled.sessions[i];
            auto row = acc.push(ls.session, prior_injury_count(injuries, ls.session.date));
            if (!row) {
                ++out.summary.dropped_rows;
                continue;
            }
            RowMeta meta{pid, ls.session.date, ls.injury_onset, ls.injury_index, false};
            out.table.append(*row, ls.label, std::move(meta));
        }
    }
    out.summary.rows = out.table.rows();
    out.summary.positives = out.table.count_label(1);
    return out;
}

}  // namespace injury
