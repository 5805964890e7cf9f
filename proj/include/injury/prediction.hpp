#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace injury {

struct Prediction {
    std::uint8_t cls = 0;
    double score = 0.0;  // ranking score for the injury class, in [0, 1]
};

/// Hard classes plus ranking scores for a batch of rows.
struct Predictions {
    std::vector<std::uint8_t> classes;
    std::vector<double> scores;

    std::size_t size() const { return classes.size(); }
    void push_back(Prediction p) {
        classes.push_back(p.cls);
        scores.push_back(p.score);
    }
};

}  // namespace injury
