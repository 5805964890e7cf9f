#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "injury/error.hpp"
#include "injury/features.hpp"
#include "injury/generator.hpp"
#include "injury/simulator.hpp"

using namespace injury;

namespace {

SeasonLog small_season(std::uint64_t seed, int weeks = 12) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.n_players = 14;
    cfg.weeks = weeks;
    return generate(cfg).log;
}

SimulatorConfig quick() {
    SimulatorConfig c;
    c.pipeline.grid = {{3, 1, 2}, {5, 2, 2}};
    c.pipeline.seed = 3;
    return c;
}

}  // namespace

TEST(Cost, ExactProducts) {
    static_assert(cost(139, Money::units(83)).cents == 1153700);
    EXPECT_EQ(cost(107, Money::units(83)), Money::units(8881));
    EXPECT_EQ(Money::units(11583).to_string(), "11583.00");
    EXPECT_EQ(Money{-5}.to_string(), "-0.05");
    EXPECT_EQ(cost(0, Money::units(83)).cents, 0);
}

TEST(Cost, SavingsRecount) {
    std::vector<InjuryRecord> inj{{"a", Date(2020, 1, 5), 10}, {"b", Date(2020, 1, 9), 4}, {"a", Date(2020, 2, 1), 7}};
    WeeklyOutcome w1, w2;
    w1.injuries = {{0, "a", Date(2020, 1, 4), true}, {1, "b", Date(2020, 1, 8), false}};
    w2.injuries = {{2, "a", Date(2020, 1, 31), true}};
    auto r = savings({w1, w2}, inj, Money::units(83));
    EXPECT_EQ(r.total_absence_days, 21);
    EXPECT_EQ(r.preventable_days, 17);
    EXPECT_EQ(r.total_cost, cost(21, Money::units(83)));
    EXPECT_EQ(r.savings, cost(17, Money::units(83)));
    EXPECT_DOUBLE_EQ(r.percent_decrease, 17.0 / 21.0);
    EXPECT_EQ(r.detected, 2u);
    auto none = savings({}, {}, Money::units(83));
    EXPECT_EQ(none.percent_decrease, 0.0);
}

TEST(Weeks, Blocks) {
    const Date d(2020, 1, 1);
    EXPECT_EQ(week_of(d, d), 1);
    EXPECT_EQ(week_of(d, d.plus_days(6)), 1);
    EXPECT_EQ(week_of(d, d.plus_days(7)), 2);
}

TEST(WalkForward, NoLookAhead) {
    const auto log = small_season(21);
    const auto cfg = quick();
    const auto out = walk_forward(log, cfg);
    ASSERT_EQ(out.size(), 6u);
    const auto full = build_training_table(assign_labels(log), log).table;
    std::map<std::string, ConfusionMatrix> sum;
    for (const auto& w : out) {
        EXPECT_LE(w.latest_train_date, w.train_end);
        if (w.latest_visible_onset) EXPECT_LE(*w.latest_visible_onset, w.train_end);
        for (const auto& io : w.injuries) EXPECT_GT(io.session_date, w.train_end);
        for (const auto& [k, cm] : w.weekly) sum[k] += cm;
        EXPECT_EQ(sum, w.cumulative);
        EXPECT_EQ(w.weekly.at("DT").total(), w.predicted_rows);
    }
    // Features of every row are unchanged when the season is truncated at that row's week end.
    const Date cut = out.front().train_end;
    SeasonLog head = log;
    for (auto& ss : head.sessions) std::erase_if(ss, [&](const TrainingSession& s) { return s.date > cut; });
    std::erase_if(head.injuries, [&](const InjuryRecord& r) { return r.onset > cut; });
    const auto partial = build_training_table(assign_labels(head), head).table;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < partial.rows(); ++i)
        for (std::size_t j = 0; j < full.rows(); ++j)
            if (full.meta(j).player_id == partial.meta(i).player_id && full.meta(j).date == partial.meta(i).date) {
                EXPECT_TRUE(std::equal(partial.row(i).begin(), partial.row(i).end(), full.row(j).begin()));
                ++checked;
            }
    EXPECT_GT(checked, 100u);
}

TEST(WalkForward, ZeroInjurySeasonIsDegenerate) {
    GeneratorConfig g;
    g.seed = 2;
    g.n_players = 6;
    g.weeks = 9;
    g.rules.clear();
    g.base_rate = 0.0;
    g.preseason_injury_rate = 0.0;
    auto log = generate(g).log;
    ASSERT_TRUE(log.injuries.empty());
    auto out = walk_forward(log, quick());
    for (const auto& w : out) {
        EXPECT_TRUE(w.degenerate);
        EXPECT_EQ(w.cumulative_f1(), 0.0);
    }
}

TEST(WalkForward, InsufficientHistory) {
    auto log = small_season(4, 5);
    try {
        walk_forward(log, quick());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientHistory);
    }
}

TEST(WalkForward, DeterministicAndSerializable) {
    const auto log = small_season(5, 10);
    auto a = walk_forward(log, quick()), b = walk_forward(log, quick());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json(a[i]).dump(), to_json(b[i]).dump());
    std::ostringstream csv;
    write_fig3_csv(csv, a);
    const std::string text = csv.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), std::ptrdiff_t(a.size() + 1));
}

TEST(Trace, StabilizationWeek) {
    std::vector<WeeklyOutcome> w(5);
    for (int i = 0; i < 5; ++i) {
        w[i].week = 6 + i;
        w[i].selected_features = {"a", "b"};
    }
    EXPECT_EQ(feature_trace(w).stabilization_week, 6);
    w[1].selected_features = {"a"};
    EXPECT_EQ(feature_trace(w).stabilization_week, 8);
    w[4].selected_features = {"c"};
    EXPECT_EQ(feature_trace(w).stabilization_week, 10);
}
