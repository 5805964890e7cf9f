#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "injury/random.hpp"
#include "injury/season.hpp"
#include "injury/table.hpp"

namespace testing_support {

inline std::vector<std::string> names(std::size_t p, const std::string& prefix = "x") {
    std::vector<std::string> n;
    for (std::size_t j = 0; j < p; ++j) n.push_back(prefix + std::to_string(j));
    return n;
}

/// Integer-valued features in [0, levels), labels Bernoulli(prevalence); at least one of each class.
inline injury::TrainingTable random_table(injury::Rng& rng, std::size_t n, std::size_t p, int levels = 5,
                                          double prevalence = 0.3) {
    injury::TrainingTable t(names(p));
    std::vector<double> x(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = double(rng.index(std::size_t(levels)));
        std::uint8_t y = rng.bernoulli(prevalence) ? 1 : 0;
        if (i == 0) y = 1;
        if (i == 1) y = 0;
        t.append(x, y, {"p", injury::Date(2020, 1, 1).plus_days(long(i)), {}, {}, false});
    }
    return t;
}

/// Label 1 iff x0 > 0.6 and x1 <= 0.4, plus `noise` pure-noise columns, all U[0, 1).
inline injury::TrainingTable planted_table(injury::Rng& rng, std::size_t n, std::size_t noise) {
    injury::TrainingTable t(names(2 + noise));
    std::vector<double> x(2 + noise);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& v : x) v = rng.uniform();
        const std::uint8_t y = x[0] > 0.6 && x[1] <= 0.4;
        t.append(x, y, {"p", injury::Date(2020, 1, 1).plus_days(long(i)), {}, {}, false});
    }
    return t;
}

inline injury::TrainingSession session(const std::string& id, injury::Date d, double scale = 1.0) {
    injury::TrainingSession s;
    s.player_id = id;
    s.date = d;
    s.workload = {4000 * scale, 150 * scale, 1200 * scale, 500 * scale, 9 * scale, 400 * scale,
                  60 * scale,   15 * scale,  60 * scale,   20 * scale,  110 * scale, 0.6 * scale};
    return s;
}

inline injury::PlayerProfile player(const std::string& id, int age = 25) {
    return {id, age, 180.0, 75.0, injury::Role::Midfielder};
}

}  // namespace testing_support
