#include <gtest/gtest.h>

#include <cmath>

#include "injury/error.hpp"
#include "injury/features.hpp"
#include "injury/generator.hpp"

using namespace injury;

TEST(Generator, MomentsMatchTargets) {
    GeneratorConfig cfg;
    cfg.seed = 17;
    const auto log = generate(cfg).log;
    ASSERT_GE(log.session_count(), 500u);
    for (std::size_t w = 0; w < kWorkloadCount; ++w) {
        double s = 0, ss = 0;
        std::size_t n = 0;
        for (const auto& player : log.sessions)
            for (const auto& x : player) {
                s += x.workload[w];
                ss += x.workload[w] * x.workload[w];
                ++n;
            }
        const double mean = s / double(n), sd = std::sqrt(ss / double(n) - mean * mean);
        EXPECT_NEAR(mean, cfg.workload[w].mean, 0.1 * cfg.workload[w].mean) << kWorkloadNames[w];
        EXPECT_NEAR(sd, cfg.workload[w].sd, 0.1 * cfg.workload[w].sd) << kWorkloadNames[w];
    }
    for (const auto& player : log.sessions)
        for (const auto& x : player) EXPECT_FALSE(check_session(x));
}

TEST(Generator, LedgerMatchesInjuries) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        GeneratorConfig cfg;
        cfg.seed = seed;
        cfg.preseason_injury_rate = 0.3;
        auto g = generate(cfg);
        EXPECT_EQ(g.ledger.size(), g.log.injuries.size());
        for (const auto& e : g.ledger) EXPECT_TRUE(e.cause == "preseason" || e.session_date);
    }
}

TEST(Generator, PlantedInjuriesSatisfyTheirRule) {
    GeneratorConfig cfg;
    cfg.seed = 23;
    auto g = generate(cfg);
    const auto table = build_training_table(assign_labels(g.log), g.log).table;
    std::size_t checked = 0;
    for (const auto& e : g.ledger) {
        if (e.cause == "base" || e.cause == "preseason") continue;
        const PlantedRule* rule = nullptr;
        for (const auto& r : cfg.rules)
            if (r.name == e.cause) rule = &r;
        ASSERT_NE(rule, nullptr) << e.cause;
        bool found = false;
        for (std::size_t i = 0; i < table.rows(); ++i) {
            if (table.meta(i).player_id != e.player_id || table.meta(i).date != *e.session_date) continue;
            found = true;
            for (const auto& c : rule->conditions) EXPECT_TRUE(c.contains(table.at(i, table.require_column(c.feature))));
            EXPECT_EQ(e.onset, e.session_date->plus_days(1));
        }
        EXPECT_TRUE(found);
        ++checked;
    }
    EXPECT_GT(checked, 20u);
}

TEST(Generator, ZeroProbabilitiesGiveNoInjuries) {
    GeneratorConfig cfg;
    for (auto& r : cfg.rules) r.probability = 0.0;
    cfg.base_rate = 0.0;
    cfg.preseason_injury_rate = 0.0;
    EXPECT_TRUE(generate(cfg).log.injuries.empty());
}

TEST(Generator, DeterministicAndConfigurable) {
    GeneratorConfig cfg;
    cfg.seed = 9;
    cfg.n_players = 5;
    cfg.weeks = 4;
    EXPECT_EQ(to_json(generate(cfg).ledger), to_json(generate(cfg).ledger));
    auto back = generator_config_from_json(to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg));
    EXPECT_EQ(generate(back).log.session_count(), generate(cfg).log.session_count());
    cfg.base_rate = 2.0;
    EXPECT_THROW(generate(cfg), Error);
    EXPECT_THROW(generator_config_from_json(nlohmann::json::parse(R"({"n_players": 0})")), Error);
}
