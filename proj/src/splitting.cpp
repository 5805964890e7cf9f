#include "injury/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "injury/error.hpp"
#include "injury/random.hpp"

namespace injury {

SplitIndices stratified_split_indices(std::span<const std::uint8_t> labels, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorKind::InvalidArgument, "fraction must be in (0, 1)");
    Rng rng(seed);
    std::vector<bool> in_a(labels.size(), false);
    for (std::uint8_t c : {std::uint8_t(0), std::uint8_t(1)}) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) rows.push_back(i);
        const auto take = std::size_t(std::round(fraction * double(rows.size())));
        if (take == 0 || take == rows.size())
            throw Error(ErrorKind::ClassTooSmall, "class " + std::to_string(c) + " has " +
                                                      std::to_string(rows.size()) +
                                                      " rows, too few to appear in both parts");
        rng.shuffle(std::span<std::size_t>(rows));
        for (std::size_t k = 0; k < take; ++k) in_a[rows[k]] = true;
    }
    SplitIndices out;
    for (std::size_t i = 0; i < labels.size(); ++i) (in_a[i] ? out.a : out.b).push_back(i);
    return out;
}

TablePair stratified_split(const TrainingTable& table, double fraction, std::uint64_t seed) {
    const auto idx = stratified_split_indices(table.labels(), fraction, seed);
    return {table.subset(idx.a), table.subset(idx.b)};
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const std::uint8_t> labels, int k,
                                                       std::uint64_t seed) {
    if (k < 2 || std::size_t(k) > labels.size())
        throw Error(ErrorKind::InvalidArgument, "fold count must be in [2, rows]");
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    std::size_t next = 0;
    for (std::uint8_t c : {std::uint8_t(0), std::uint8_t(1)}) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) rows.push_back(i);
        rng.shuffle(std::span<std::size_t>(rows));
        // continue dealing where the previous class stopped so fold sizes stay balanced
        for (std::size_t r : rows) folds[next++ % folds.size()].push_back(r);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

std::vector<std::size_t> complement(std::span<const std::size_t> fold, std::size_t n) {
    std::vector<std::size_t> out;
    out.reserve(n - fold.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (j < fold.size() && fold[j] == i)
            ++j;
        else
            out.push_back(i);
    }
    return out;
}

}  // namespace injury
