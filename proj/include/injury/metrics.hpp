#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace injury {

/// Positive class = injury.
struct ConfusionMatrix {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    void add(std::uint8_t truth, std::uint8_t predicted);
    ConfusionMatrix& operator+=(const ConfusionMatrix& o);
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Index 0 = no-injury class, 1 = injury class. 0/0 evaluates to 0.
struct Metrics {
    ClassMetrics cls[2];
    const ClassMetrics& injury() const { return cls[1]; }
};

Metrics metrics(const ConfusionMatrix& cm);
double f1_score(double precision, double recall);

/// Mann-Whitney AUC with ties counted as 1/2. Throws Error(OneClassOnly).
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct EvalReport {
    ConfusionMatrix confusion;
    Metrics metrics;
    std::optional<double> auc;  // absent when the evaluated rows hold a single class
    std::uint64_t seed = 0;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<std::string> selected_features;
    nlohmann::json hyperparams;
};

EvalReport make_report(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> classes,
                       std::span<const double> scores);
nlohmann::json to_json(const EvalReport& r);

/// Per-metric values across repeated trials. Keys: prec_0, rec_0, f1_0, prec_1, rec_1, f1_1, auc.
struct TrialDistribution {
    std::map<std::string, std::vector<double>> values;
    std::size_t trials = 0;

    void add(const EvalReport& r);
    double mean(const std::string& key) const;
    /// Sample standard deviation (0 for fewer than two values).
    double sd(const std::string& key) const;
};

nlohmann::json to_json(const TrialDistribution& d);

}  // namespace injury
