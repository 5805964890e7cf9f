#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "injury/table.hpp"

namespace injury {

struct ResamplingConfig {
    int k_neighbors = 5;
    double balance_ratio = 1.0;  // beta in (0, 1]
    std::uint64_t seed = 0;
    /// Ordinal columns: interpolated, then rounded to the nearest integer code.
    std::vector<std::string> rounded_columns = {"Role"};

    void validate() const;
};

struct ResampleStats {
    std::size_t n_minority = 0;
    std::size_t n_majority = 0;
    std::size_t generated = 0;
    /// Fraction of majority points among each minority point's k nearest neighbours.
    std::vector<double> majority_ratio;
    /// Synthetic points generated from each minority point (minority order = table order).
    std::vector<std::size_t> allocation;
    /// Indices (into the input table) of the minority rows, aligned with the vectors above.
    std::vector<std::size_t> minority_rows;
    /// All minority points coincide; synthesis degenerates to duplication.
    bool degenerate = false;
};

struct Resampled {
    TrainingTable table;  // input rows first (unchanged), then synthetic rows
    ResampleStats stats;
};

/// Adaptive synthetic oversampling of the label-1 class. Distances are Euclidean over
/// columns standardized on the input table. Appends
/// round(beta * (n_majority - n_minority)) synthetic rows, allocated to minority points
/// in proportion to their majority-neighbour ratio by largest remainder, each placed at
/// x_i + lambda * (x_z - x_i) for a uniformly drawn minority neighbour x_z and
/// lambda ~ U[0, 1). Throws Error(TooFewMinority) with fewer than two minority rows.
Resampled adasyn(const TrainingTable& table, const ResamplingConfig& cfg);

}  // namespace injury
