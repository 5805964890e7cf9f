#include "injury/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "injury/adasyn.hpp"
#include "injury/baselines.hpp"
#include "injury/csv.hpp"
#include "injury/error.hpp"
#include "injury/random.hpp"

namespace injury {

void SimulatorConfig::validate() const {
    pipeline.validate();
    features.validate();
    if (horizon_days < 1) throw Error(ErrorKind::ConfigInvalid, "horizon_days must be >= 1");
    if (start_week < 1) throw Error(ErrorKind::ConfigInvalid, "start_week must be >= 1");
}

double WeeklyOutcome::cumulative_f1(const std::string& forecaster) const {
    auto it = cumulative.find(forecaster);
    return it == cumulative.end() ? 0.0 : metrics(it->second).injury().f1;
}

int week_of(Date first, Date d) { return int(first.days_until(d) / 7) + 1; }

namespace {

std::vector<std::uint8_t> zeros(std::size_t n) { return std::vector<std::uint8_t>(n, 0); }

}  // namespace

std::vector<WeeklyOutcome> walk_forward(const SeasonLog& log, const SimulatorConfig& cfg) {
    cfg.validate();
    const auto labeled = assign_labels(log, cfg.horizon_days);
    const auto full = build_training_table(labeled, log, cfg.features).table;
    if (full.empty()) throw Error(ErrorKind::InsufficientHistory, "season has no usable sessions");

    Date first = full.meta(0).date, last = first;
    for (std::size_t i = 0; i < full.rows(); ++i) {
        first = std::min(first, full.meta(i).date);
        last = std::max(last, full.meta(i).date);
    }
    const int n_weeks = week_of(first, last);
    if (n_weeks < cfg.start_week + 1)
        throw Error(ErrorKind::InsufficientHistory, "season spans " + std::to_string(n_weeks) +
                                                        " weeks, need at least " + std::to_string(cfg.start_week + 1));

    const auto& pc = cfg.pipeline;
    std::vector<WeeklyOutcome> out;
    std::map<std::string, ConfusionMatrix> cumulative;
    for (int week = cfg.start_week; week < n_weeks; ++week) {
        const std::uint64_t seed = pc.seed;
        WeeklyOutcome wo;
        wo.week = week;
        wo.train_end = first.plus_days(7 * week - 1);

        std::vector<std::size_t> train_rows, test_rows;
        for (std::size_t i = 0; i < full.rows(); ++i) {
            const int w = week_of(first, full.meta(i).date);
            if (w <= week)
                train_rows.push_back(i);
            else if (w == week + 1)
                test_rows.push_back(i);
        }
        auto train = full.subset(train_rows);
        wo.latest_train_date = first;
        for (std::size_t i = 0; i < train.rows(); ++i) {
            const auto& m = train.meta(i);
            wo.latest_train_date = std::max(wo.latest_train_date, m.date);
            // the label only exists once the injury has happened
            if (train.label(i) && !(m.injury_onset && *m.injury_onset <= wo.train_end))
                train.set_label(i, 0);
            if (train.label(i))
                wo.latest_visible_onset = wo.latest_visible_onset ? std::max(*wo.latest_visible_onset, *m.injury_onset)
                                                                  : *m.injury_onset;
        }
        const auto test = full.subset(test_rows);
        wo.train_rows = train.rows();
        wo.train_positives = train.count_label(1);
        wo.predicted_rows = test.rows();
        wo.degenerate = wo.train_positives == 0;

        std::map<std::string, std::vector<std::uint8_t>> preds;
        if (wo.degenerate) {
            preds["DT"] = zeros(test.rows());
        } else {
            TrainingTable fit = train;
            if (pc.oversample && wo.train_positives >= 2) {
                fit = adasyn(train, {pc.k_neighbors, pc.balance_ratio, mix_seed(seed, 1), {std::string(kRoleName)}}).table;
                wo.oversampled = true;
            }
            const auto subset = pc.feature_selection ? rfecv(fit, pc.selection_hp, pc.folds, mix_seed(seed, 2)).features
                                                     : fit.feature_names();
            const auto fit_sel = fit.select_columns(subset);
            const auto hp = tune(fit_sel, pc.grid, pc.folds, mix_seed(seed, 3));
            wo.selected_features = subset;
            wo.hyperparams = to_json(hp);
            preds["DT"] = fit_tree(fit_sel, hp).predict_table(test).classes;
            if (pc.comparators) {
                preds["RF"] = fit_forest(fit_sel, pc.forest, mix_seed(seed, 4)).predict_table(test).classes;
                preds["LR"] = fit_logit(fit_sel, pc.logit).predict_table(test).classes;
            }
        }
        if (pc.comparators) {
            if (wo.degenerate) preds["RF"] = preds["LR"] = zeros(test.rows());
            for (auto k : {BaselineKind::B1, BaselineKind::B2, BaselineKind::B3, BaselineKind::B4})
                preds[std::string(to_string(k))] =
                    baseline_predict(fit_baseline(k, train), test, mix_seed(seed, 5)).classes;
        }
        for (const auto& [name, p] : preds) {
            wo.weekly[name] = confusion(test.labels(), p);
            cumulative[name] += wo.weekly[name];
        }
        wo.cumulative = cumulative;
        const auto& dt = preds["DT"];
        for (std::size_t i = 0; i < test.rows(); ++i)
            if (test.label(i) && test.meta(i).injury_index)
                wo.injuries.push_back({*test.meta(i).injury_index, test.meta(i).player_id, test.meta(i).date, dt[i] == 1});
        out.push_back(std::move(wo));
    }
    return out;
}

FeatureTrace feature_trace(const std::vector<WeeklyOutcome>& outcomes) {
    FeatureTrace t;
    for (const auto& w : outcomes) t.weeks.emplace_back(w.week, w.selected_features);
    if (t.weeks.empty()) return t;
    std::size_t k = t.weeks.size() - 1;
    while (k > 0 && t.weeks[k - 1].second == t.weeks.back().second) --k;
    t.stabilization_week = t.weeks[k].first;
    return t;
}

std::string Money::to_string() const {
    char buf[48];
    const std::int64_t a = cents < 0 ? -cents : cents;
    std::snprintf(buf, sizeof buf, "%s%lld.%02lld", cents < 0 ? "-" : "", static_cast<long long>(a / 100),
                  static_cast<long long>(a % 100));
    return buf;
}

CostReport savings(const std::vector<WeeklyOutcome>& outcomes, const std::vector<InjuryRecord>& injuries,
                   Money daily_salary) {
    CostReport r;
    r.daily_salary = daily_salary;
    r.injuries = injuries.size();
    for (const auto& inj : injuries) r.total_absence_days += inj.days_absent;
    std::vector<bool> detected(injuries.size(), false);
    for (const auto& w : outcomes)
        for (const auto& io : w.injuries)
            if (io.detected && io.injury_index < injuries.size()) detected[io.injury_index] = true;
    for (std::size_t i = 0; i < injuries.size(); ++i)
        if (detected[i]) {
            r.preventable_days += injuries[i].days_absent;
            ++r.detected;
        }
    r.total_cost = cost(r.total_absence_days, daily_salary);
    r.savings = cost(r.preventable_days, daily_salary);
    r.percent_decrease = r.total_cost.cents ? double(r.savings.cents) / double(r.total_cost.cents) : 0.0;
    return r;
}

nlohmann::json to_json(const WeeklyOutcome& w) {
    nlohmann::json j{{"week", w.week},
                     {"train_end", w.train_end.to_string()},
                     {"train_rows", w.train_rows},
                     {"train_positives", w.train_positives},
                     {"predicted_rows", w.predicted_rows},
                     {"degenerate", w.degenerate},
                     {"oversampled", w.oversampled},
                     {"selected_features", w.selected_features},
                     {"hyperparams", w.hyperparams},
                     {"latest_train_date", w.latest_train_date.to_string()}};
    j["latest_visible_onset"] = w.latest_visible_onset ? nlohmann::json(w.latest_visible_onset->to_string()) : nlohmann::json(nullptr);
    nlohmann::json inj = nlohmann::json::array();
    for (const auto& i : w.injuries)
        inj.push_back({{"injury_index", i.injury_index}, {"player_id", i.player_id},
                       {"session_date", i.session_date.to_string()}, {"detected", i.detected}});
    j["injuries"] = std::move(inj);
    for (const auto& [name, cm] : w.cumulative) {
        j["cumulative"][name] = {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}, {"f1", w.cumulative_f1(name)}};
        const auto& wk = w.weekly.at(name);
        j["weekly"][name] = {{"tp", wk.tp}, {"fp", wk.fp}, {"tn", wk.tn}, {"fn", wk.fn}};
    }
    return j;
}

nlohmann::json to_json(const CostReport& c) {
    return {{"total_absence_days", c.total_absence_days},
            {"daily_salary", c.daily_salary.to_string()},
            {"total_cost", c.total_cost.to_string()},
            {"preventable_days", c.preventable_days},
            {"savings", c.savings.to_string()},
            {"percent_decrease", c.percent_decrease},
            {"injuries", c.injuries},
            {"detected", c.detected},
            {"assumption", "a player stopped before a predicted injury avoids it entirely"}};
}

nlohmann::json to_json(const FeatureTrace& t) {
    nlohmann::json weeks = nlohmann::json::array();
    for (const auto& [w, f] : t.weeks) weeks.push_back({{"week", w}, {"features", f}});
    return {{"weeks", std::move(weeks)}, {"stabilization_week", t.stabilization_week}};
}

void write_fig3_csv(std::ostream& out, const std::vector<WeeklyOutcome>& outcomes) {
    std::vector<std::string> names;
    if (!outcomes.empty())
        for (const auto& [name, cm] : outcomes.front().cumulative) names.push_back(name);
    // decision tree first, the rest alphabetical
    std::stable_partition(names.begin(), names.end(), [](const std::string& n) { return n == "DT"; });
    out << "week";
    for (const auto& n : names) out << ",cumulative_f1_" << n;
    out << ",detected,missed\n";
    for (const auto& w : outcomes) {
        out << w.week + 1;
        for (const auto& n : names) out << ',' << csv::format_double(w.cumulative_f1(n));
        std::size_t det = 0;
        for (const auto& i : w.injuries) det += i.detected;
        out << ',' << det << ',' << w.injuries.size() - det << '\n';
    }
}

}  // namespace injury
