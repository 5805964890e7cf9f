#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "injury/table.hpp"

namespace injury {

struct SplitIndices {
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
};

/// Per class, round(fraction * count) rows go to part a, drawn without replacement.
/// Both parts keep table order. Throws Error(InvalidArgument) for fraction outside (0, 1)
/// and Error(ClassTooSmall) when a class would leave either part empty of that class.
SplitIndices stratified_split_indices(std::span<const std::uint8_t> labels, double fraction, std::uint64_t seed);

struct TablePair {
    TrainingTable a;
    TrainingTable b;
};

TablePair stratified_split(const TrainingTable& table, double fraction, std::uint64_t seed);

/// Test-row indices of k stratified folds (each sorted). Rows of each class are shuffled
/// and dealt round-robin, so fold class counts differ by at most one.
/// Throws Error(InvalidArgument) for k < 2 or k > number of rows.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::uint8_t> labels, int k,
                                                       std::uint64_t seed);

/// All indices in [0, n) not in `fold` (which must be sorted).
std::vector<std::size_t> complement(std::span<const std::size_t> fold, std::size_t n);

}  // namespace injury
