#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "injury/error.hpp"
#include "injury/features.hpp"
#include "injury/generator.hpp"
#include "injury/random.hpp"
#include "support.hpp"

using namespace injury;

namespace {

// Closed form: out[t] = (1-a)^t x0 + sum_{k=1..t} a (1-a)^(t-k) x_k.
double ewma_closed(const std::vector<double>& x, std::size_t t, int span) {
    const double a = 2.0 / (span + 1.0);
    double v = std::pow(1 - a, double(t)) * x[0];
    for (std::size_t k = 1; k <= t; ++k) v += a * std::pow(1 - a, double(t - k)) * x[k];
    return v;
}

std::vector<DatedValue> random_history(Rng& rng, std::size_t n, Date start) {
    std::vector<DatedValue> h;
    Date d = start;
    for (std::size_t i = 0; i < n; ++i) {
        d = d.plus_days(1 + long(rng.index(3)));
        h.push_back({d, rng.uniform(0.0, 100.0)});
    }
    return h;
}

std::vector<double> brute_window(const std::vector<DatedValue>& h, int days, Date as_of) {
    std::vector<double> v;
    for (const auto& e : h)
        if (e.date <= as_of && as_of.days_until(e.date) > -days) v.push_back(e.value);
    return v;
}

}  // namespace

TEST(Ewma, MatchesClosedForm) {
    Rng rng(4);
    for (int span : {1, 2, 6, 10}) {
        std::vector<double> x(40);
        for (auto& v : x) v = rng.uniform(0.0, 10.0);
        auto e = ewma(x, span);
        for (std::size_t t = 0; t < x.size(); ++t) EXPECT_NEAR(e[t], ewma_closed(x, t, span), 1e-9);
    }
}

TEST(Ewma, Errors) {
    EXPECT_THROW(ewma(std::vector<double>{}, 6), Error);
    EXPECT_THROW(ewma(std::vector<double>{1.0}, 0), Error);
    EXPECT_THROW(pi_ewma(std::vector<double>{1.0, 0.0}, 6), Error);
}

TEST(PiEwma, NeverInjuredIsZero) {
    for (double v : pi_ewma(std::vector<double>(20, 0.0), 6)) EXPECT_EQ(v, 0.0);
}

TEST(PiEwma, FirstReturnDays) {
    auto v = pi_ewma(std::vector<double>{0, 1, 1, 1}, 6);
    EXPECT_NEAR(v[1], 0.29, 0.005);
    EXPECT_NEAR(v[2], 0.49, 0.005);
    EXPECT_NEAR(v[3], 0.64, 0.005);
}

TEST(PiEwma, SecondReturnAfterConvergence) {
    std::vector<double> c{0};
    while (true) {
        c.push_back(1);
        if (pi_ewma(c, 6).back() > 0.975) break;
    }
    c.push_back(2);
    EXPECT_NEAR(pi_ewma(c, 6).back(), 1.27, 0.01);
}

TEST(Windows, RollingMeanAcwrMswrMatchBruteForce) {
    Rng rng(9);
    FeatureSpec spec;
    for (int trial = 0; trial < 50; ++trial) {
        auto h = random_history(rng, 30, Date(2020, 1, 1));
        const Date as_of = h[rng.index(h.size())].date;
        auto chronic = brute_window(h, 27, as_of), acute = brute_window(h, 6, as_of), ms = brute_window(h, 7, as_of);
        auto mean = [](const std::vector<double>& v) {
            double s = 0;
            for (double x : v) s += x;
            return s / double(v.size());
        };
        EXPECT_NEAR(*rolling_mean(h, 27, as_of), mean(chronic), 1e-9);
        const double expect_acwr = std::min(5.0, (acute.empty() ? 0.0 : mean(acute)) / mean(chronic));
        EXPECT_NEAR(*acwr(h, as_of, spec), expect_acwr, 1e-9);
        if (ms.size() >= 2) {
            const double m = mean(ms);
            double ss = 0;
            for (double x : ms) ss += (x - m) * (x - m);
            EXPECT_NEAR(*mswr(h, as_of, spec), std::min(10.0, m / std::sqrt(ss / double(ms.size() - 1))), 1e-9);
        }
    }
}

TEST(Windows, EdgeCases) {
    FeatureSpec spec;
    const Date d(2020, 1, 10);
    std::vector<DatedValue> flat{{d.plus_days(-2), 2}, {d.plus_days(-1), 2}, {d, 2}};
    EXPECT_EQ(*mswr(flat, d, spec), spec.mswr_cap);
    std::vector<DatedValue> two{{d.plus_days(-1), 1}, {d, 3}};
    EXPECT_NEAR(*mswr(two, d, spec), 2.0 / std::sqrt(2.0), 1e-12);
    EXPECT_FALSE(mswr(two, d.plus_days(-5), spec));
    std::vector<DatedValue> old{{d.plus_days(-20), 10}};
    EXPECT_EQ(*acwr(old, d, spec), 0.0);
    std::vector<DatedValue> zero_then_load{{d.plus_days(-20), 0}, {d, 5}};
    EXPECT_NEAR(*acwr(zero_then_load, d, spec), 2.0, 1e-12);
    std::vector<DatedValue> spike{{d.plus_days(-20), 0}, {d.plus_days(-19), 0}, {d.plus_days(-18), 0},
                                  {d.plus_days(-17), 0}, {d.plus_days(-16), 0}, {d, 100}};
    EXPECT_EQ(*acwr(spike, d, spec), spec.acwr_cap);
}

TEST(Table, ColumnLayout) {
    const auto& n = feature_names();
    ASSERT_EQ(n.size(), kFeatureCount);
    EXPECT_EQ(n[0], "d_TOT");
    EXPECT_EQ(n[12], "Age");
    EXPECT_EQ(n[15], "PI");
    EXPECT_EQ(n[18], "d_TOT_EWMA");
    EXPECT_EQ(n[31], "d_HSR_ACWR");
    EXPECT_EQ(n[42], "d_TOT_MSWR");
    EXPECT_EQ(n[54], "PI_EWMA");
}

TEST(Table, BuildMatchesDirectComputation) {
    GeneratorConfig cfg;
    cfg.n_players = 5;
    cfg.weeks = 10;
    cfg.seed = 11;
    const auto log = generate(cfg).log;
    const auto labeled = assign_labels(log);
    const auto built = build_training_table(labeled, log);
    const auto& t = built.table;
    EXPECT_EQ(built.summary.rows + built.summary.dropped_rows, labeled.sessions.size());
    std::size_t pos = 0;
    for (const auto& s : labeled.sessions) pos += s.label;
    EXPECT_EQ(t.count_label(1), pos);

    const std::size_t hsr_ewma = t.require_column("d_HSR_EWMA"), pi = t.require_column("PI"),
                      pie = t.require_column("PI_EWMA"), acwr_c = t.require_column("d_TOT_ACWR");
    // Player 0: recompute from the labeled sessions of that player.
    std::vector<double> hsr, counts;
    std::vector<DatedValue> tot;
    const auto injuries = log.injuries_of(log.players[0].player_id);
    std::size_t row = 0;
    for (const auto& ls : labeled.sessions) {
        if (ls.session.player_id != log.players[0].player_id) break;
        hsr.push_back(at(ls.session.workload, Workload::HighSpeedRunning));
        counts.push_back(prior_injury_count(injuries, ls.session.date));
        tot.push_back({ls.session.date, at(ls.session.workload, Workload::TotalDistance)});
        ASSERT_EQ(t.meta(row).date, ls.session.date);
        EXPECT_NEAR(t.at(row, hsr_ewma), ewma(hsr, 6).back(), 1e-9);
        EXPECT_EQ(t.at(row, pi), counts.back());
        EXPECT_NEAR(t.at(row, pie), pi_ewma(counts, 6).back(), 1e-12);
        EXPECT_NEAR(t.at(row, acwr_c), *acwr(tot, ls.session.date, {}), 1e-12);
        ++row;
    }
    EXPECT_GT(row, 10u);
    for (double v : t.values()) EXPECT_TRUE(std::isfinite(v));
    for (std::size_t i = 0; i < t.rows(); ++i) {
        EXPECT_GE(t.at(i, pie), 0.0);
        EXPECT_EQ(t.at(i, pie) > 0.0, t.at(i, pi) > 0.0 || (i > 0 && t.meta(i - 1).player_id == t.meta(i).player_id &&
                                                          t.at(i - 1, pie) > 0.0));
    }
}

TEST(Table, CsvRoundTrip) {
    Rng rng(1);
    auto t = testing_support::random_table(rng, 20, 4);
    std::stringstream ss;
    t.write_csv(ss, true);
    auto back = TrainingTable::read_csv(ss);
    EXPECT_EQ(back.feature_names(), t.feature_names());
    EXPECT_EQ(back.labels(), t.labels());
    for (std::size_t i = 0; i < t.rows(); ++i) EXPECT_EQ(back.meta(i).date, t.meta(i).date);
    EXPECT_TRUE(std::equal(back.values().begin(), back.values().end(), t.values().begin()));
}
