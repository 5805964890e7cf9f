#include "injury/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "injury/error.hpp"
#include "injury/random.hpp"

namespace injury {

std::string_view to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::B1: return "B1";
        case BaselineKind::B2: return "B2";
        case BaselineKind::B3: return "B3";
        case BaselineKind::B4: return "B4";
    }
    return "?";
}

Baseline fit_baseline(BaselineKind kind, const TrainingTable& fit_table) {
    Baseline b{kind, 0.0};
    if (!fit_table.empty()) b.prevalence = double(fit_table.count_label(1)) / double(fit_table.rows());
    return b;
}

Predictions baseline_predict(const Baseline& b, const TrainingTable& table, std::uint64_t seed) {
    Predictions out;
    Rng rng(seed);
    std::size_t pi = 0;
    if (b.kind == BaselineKind::B4) pi = table.require_column(kPiEwmaName);
    for (std::size_t i = 0; i < table.rows(); ++i) {
        std::uint8_t c = 0;
        switch (b.kind) {
            case BaselineKind::B1: c = rng.bernoulli(b.prevalence); break;
            case BaselineKind::B2: c = 0; break;
            case BaselineKind::B3: c = 1; break;
            case BaselineKind::B4: c = table.at(i, pi) > 0.0; break;
        }
        out.push_back({c, double(c)});
    }
    return out;
}

Predictions baseline_predict(BaselineKind kind, const TrainingTable& table, std::uint64_t seed) {
    return baseline_predict(fit_baseline(kind, table), table, seed);
}

// ---------------------------------------------------------------------------------

std::string ewacwr_name(Workload w) { return std::string(kWorkloadNames[std::size_t(w)]) + "_EWACWR"; }

namespace {

std::optional<double> windowed_ewma(std::span<const DatedValue> history, Date as_of, int days) {
    const Date from = as_of.plus_days(-(days - 1));
    const double a = ewma_alpha(days);
    std::optional<double> s;
    for (const auto& h : history) {
        if (h.date < from || h.date > as_of) continue;
        s = s ? a * h.value + (1.0 - a) * *s : h.value;
    }
    return s;
}

}  // namespace

std::optional<double> acwr_method_value(std::span<const DatedValue> history, Date as_of, const FeatureSpec& spec) {
    const auto chronic = windowed_ewma(history, as_of, 28);
    if (!chronic) return std::nullopt;
    const double acute = windowed_ewma(history, as_of, 7).value_or(0.0);
    if (*chronic == 0.0) return acute == 0.0 ? 0.0 : spec.acwr_cap;
    return std::min(acute / *chronic, spec.acwr_cap);
}

TrainingTable method_acwr_table(const TrainingTable& table, const LabelingResult& labeled, const FeatureSpec& spec) {
    std::map<std::string, std::vector<TrainingSession>> by_player;
    for (const auto& ls : labeled.sessions) by_player[ls.session.player_id].push_back(ls.session);
    std::map<std::string, std::vector<std::vector<DatedValue>>> hist;
    for (const auto& [id, sessions] : by_player) {
        auto& h = hist[id];
        for (std::size_t w = 0; w < kWorkloadCount; ++w) h.push_back(workload_history(sessions, Workload(w)));
    }
    std::vector<std::string> names;
    for (std::size_t w = 0; w < kWorkloadCount; ++w) names.push_back(ewacwr_name(Workload(w)));
    TrainingTable out(names);
    out.reserve(table.rows());
    std::vector<double> row(kWorkloadCount);
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& meta = table.meta(i);
        auto it = hist.find(meta.player_id);
        if (it == hist.end())
            throw Error(ErrorKind::UnknownPlayer, "no sessions for player '" + meta.player_id + "'");
        for (std::size_t w = 0; w < kWorkloadCount; ++w) {
            // keep only the history up to the row date so the window never sees the future
            const auto& h = it->second[w];
            auto end = std::upper_bound(h.begin(), h.end(), meta.date,
                                        [](Date d, const DatedValue& v) { return d < v.date; });
            row[w] = acwr_method_value(std::span<const DatedValue>(h.data(), std::size_t(end - h.begin())),
                                       meta.date, spec)
                         .value_or(0.0);
        }
        out.append(row, table.label(i), meta);
    }
    return out;
}

TrainingTable hconcat(const TrainingTable& a, const TrainingTable& b) {
    if (a.rows() != b.rows()) throw Error(ErrorKind::InvalidArgument, "hconcat needs equal row counts");
    auto names = a.feature_names();
    names.insert(names.end(), b.feature_names().begin(), b.feature_names().end());
    TrainingTable out(names);
    out.reserve(a.rows());
    std::vector<double> row(names.size());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::copy(a.row(i).begin(), a.row(i).end(), row.begin());
        std::copy(b.row(i).begin(), b.row(i).end(), row.begin() + std::ptrdiff_t(a.cols()));
        out.append(row, a.label(i), a.meta(i));
    }
    return out;
}

// ---------------------------------------------------------------------------------

int murray_group(double v) {
    if (v < 0.5) return 0;
    if (v < 1.0) return 1;
    if (v < 1.5) return 2;
    if (v < 2.0) return 3;
    return 4;
}

std::vector<double> quintile_edges(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorKind::EmptySeries, "quintiles of an empty column");
    std::sort(values.begin(), values.end());
    std::vector<double> edges;
    const double last = double(values.size() - 1);
    for (double q : {0.2, 0.4, 0.6, 0.8}) {
        const double h = q * last;
        edges.push_back(0.5 * (values[std::size_t(std::floor(h))] + values[std::size_t(std::ceil(h))]));
    }
    return edges;
}

namespace {

int quintile_group(double v, const std::vector<double>& edges) {
    return int(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

constexpr std::array<std::string_view, 5> kMurrayLabels = {"VeryLow", "Low", "Moderate", "High", "VeryHigh"};

}  // namespace

std::vector<GroupLikelihood> group_likelihood(const TrainingTable& table, std::string_view column,
                                              Grouping grouping) {
    const std::size_t j = table.require_column(column);
    std::vector<GroupLikelihood> g(5);
    std::vector<double> edges;
    if (grouping == Grouping::Murray) {
        const double b[6] = {0.0, 0.5, 1.0, 1.5, 2.0, INFINITY};
        for (int k = 0; k < 5; ++k) g[std::size_t(k)] = {std::string(kMurrayLabels[std::size_t(k)]), b[k], b[k + 1], 0, 0, {}};
    } else {
        edges = quintile_edges(table.column(j));
        for (std::size_t k = 0; k < 5; ++k)
            g[k] = {"Q" + std::to_string(k + 1), k == 0 ? -INFINITY : edges[k - 1], k == 4 ? INFINITY : edges[k], 0, 0, {}};
    }
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const double v = table.at(i, j);
        auto& grp = g[std::size_t(grouping == Grouping::Murray ? murray_group(v) : quintile_group(v, edges))];
        (table.label(i) ? grp.injured : grp.uninjured)++;
    }
    for (auto& grp : g)
        if (grp.uninjured > 0) grp.il = double(grp.injured) / double(grp.uninjured);
    return g;
}

nlohmann::json to_json(const std::vector<GroupLikelihood>& groups) {
    nlohmann::json out = nlohmann::json::array();
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    for (const auto& g : groups)
        out.push_back({{"group", g.label}, {"lo", num(g.lo)}, {"hi", num(g.hi)}, {"injured", g.injured},
                       {"uninjured", g.uninjured}, {"il", g.il ? nlohmann::json(*g.il) : nlohmann::json(nullptr)}});
    return out;
}

std::string_view to_string(MonoMethod m) {
    switch (m) {
        case MonoMethod::AcwrMurray: return "ACWR";
        case MonoMethod::AcwrQuintile: return "ACWR_Q";
        case MonoMethod::MswrQuintile: return "MSWR";
    }
    return "?";
}

std::string_view to_string(Combine c) {
    switch (c) {
        case Combine::Single: return "single";
        case Combine::Vote: return "vote";
        case Combine::All: return "all";
        case Combine::One: return "one";
    }
    return "?";
}

MonoForecaster fit_mono(const TrainingTable& fit_table, MonoMethod method) {
    MonoForecaster m;
    m.method = method;
    for (std::size_t w = 0; w < kWorkloadCount; ++w)
        m.columns.push_back(method == MonoMethod::MswrQuintile ? mswr_name(Workload(w)) : ewacwr_name(Workload(w)));
    for (const auto& c : m.columns) {
        fit_table.require_column(c);
        if (method == MonoMethod::AcwrMurray) continue;
        const auto groups = group_likelihood(fit_table, c, Grouping::Quintile);
        std::vector<double> edges;
        for (std::size_t k = 0; k + 1 < groups.size(); ++k) edges.push_back(groups[k].hi);
        // highest injury likelihood; a group with injuries and no uninjured rows ranks first
        int best = -1;
        double best_il = 0.0;
        for (std::size_t k = 0; k < groups.size(); ++k) {
            if (groups[k].injured == 0) continue;
            const double il = groups[k].il.value_or(INFINITY);
            if (best < 0 || il > best_il) {
                best = int(k);
                best_il = il;
            }
        }
        m.edges.push_back(std::move(edges));
        m.risk_group.push_back(best);
    }
    return m;
}

Predictions mono_predict(const MonoForecaster& m, const TrainingTable& table, Combine combine, Workload feature) {
    std::vector<std::size_t> cols;
    for (const auto& c : m.columns) cols.push_back(table.require_column(c));
    auto fires = [&](std::size_t i, std::size_t w) {
        const double v = table.at(i, cols[w]);
        if (m.method == MonoMethod::AcwrMurray) return v < 1.0;
        return m.risk_group[w] >= 0 && quintile_group(v, m.edges[w]) == m.risk_group[w];
    };
    Predictions out;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        std::uint8_t c;
        if (combine == Combine::Single) {
            c = fires(i, std::size_t(feature));
        } else {
            std::size_t n = 0;
            for (std::size_t w = 0; w < kWorkloadCount; ++w) n += fires(i, w);
            c = combine == Combine::Vote ? n >= 7 : combine == Combine::All ? n == kWorkloadCount : n >= 1;
        }
        out.push_back({c, double(c)});
    }
    return out;
}

Predictions mono_forecast(const TrainingTable& table, Workload feature, MonoMethod method, Combine combine) {
    return mono_predict(fit_mono(table, method), table, combine, feature);
}

}  // namespace injury
