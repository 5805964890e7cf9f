#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "injury/features.hpp"
#include "injury/prediction.hpp"
#include "injury/season.hpp"
#include "injury/table.hpp"

namespace injury {

enum class BaselineKind { B1, B2, B3, B4 };

std::string_view to_string(BaselineKind k);

/// Fitted reference forecaster. B1 draws class 1 with the fit table's prevalence.
struct Baseline {
    BaselineKind kind = BaselineKind::B2;
    double prevalence = 0.0;
};

Baseline fit_baseline(BaselineKind kind, const TrainingTable& fit_table);

/// Hard predictions; the score equals the class. B4 predicts 1 iff PI_EWMA > 0 and
/// throws Error(MissingColumn) without that column.
Predictions baseline_predict(const Baseline& b, const TrainingTable& table, std::uint64_t seed);
/// Fits on `table` itself.
Predictions baseline_predict(BaselineKind kind, const TrainingTable& table, std::uint64_t seed);

// ---------------------------------------------------------------------------------
// Mono-dimensional ACWR / MSWR forecasters

/// Column holding the exponentially weighted acute/chronic ratio of a workload feature.
std::string ewacwr_name(Workload w);

/// Acute (7-day) over chronic (28-day) EWMA ratio, each EWMA running over the sessions
/// inside its window with span equal to the window length. Capping follows acwr().
/// nullopt when the chronic window is empty.
std::optional<double> acwr_method_value(std::span<const DatedValue> history, Date as_of,
                                        const FeatureSpec& spec = {});

/// Twelve `<w>_EWACWR` columns aligned with `table` rows (looked up by player and date
/// in the labeled sessions).
TrainingTable method_acwr_table(const TrainingTable& table, const LabelingResult& labeled,
                                const FeatureSpec& spec = {});

/// Column-wise concatenation of two tables with equal row counts (meta from `a`).
TrainingTable hconcat(const TrainingTable& a, const TrainingTable& b);

enum class Grouping { Murray, Quintile };

struct GroupLikelihood {
    std::string label;
    double lo = 0.0;  // [lo, hi)
    double hi = 0.0;
    std::size_t injured = 0;
    std::size_t uninjured = 0;
    std::optional<double> il;  // injured / uninjured; absent when uninjured == 0
};

/// Murray bounds [0,0.5), [0.5,1), [1,1.5), [1.5,2), [2,inf).
int murray_group(double acwr);
/// Quintile edges at 20/40/60/80% with midpoint interpolation between order statistics.
std::vector<double> quintile_edges(std::vector<double> values);

std::vector<GroupLikelihood> group_likelihood(const TrainingTable& table, std::string_view column,
                                              Grouping grouping);
nlohmann::json to_json(const std::vector<GroupLikelihood>& groups);

enum class MonoMethod { AcwrMurray, AcwrQuintile, MswrQuintile };
enum class Combine { Single, Vote, All, One };

std::string_view to_string(MonoMethod m);
std::string_view to_string(Combine c);

/// Per-feature firing rule, frozen on a fit table.
struct MonoForecaster {
    MonoMethod method = MonoMethod::AcwrMurray;
    std::vector<std::string> columns;           // 12, workload order
    std::vector<std::vector<double>> edges;     // quintile edges per column (quintile methods)
    std::vector<int> risk_group;                // highest-IL group per column, -1 = never fires
};

MonoForecaster fit_mono(const TrainingTable& fit_table, MonoMethod method);

/// Single uses `feature`; Vote fires on at least 7 of 12 features, All on 12, One on 1.
Predictions mono_predict(const MonoForecaster& m, const TrainingTable& table, Combine combine,
                         Workload feature = Workload::TotalDistance);

/// Fits on `table` itself.
Predictions mono_forecast(const TrainingTable& table, Workload feature, MonoMethod method, Combine combine);

}  // namespace injury
