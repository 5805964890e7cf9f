#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "injury/date.hpp"

namespace injury {

/// Per-row bookkeeping carried alongside the feature values.
struct RowMeta {
    std::string player_id;
    Date date;
    /// For label-1 rows: the injury onset, i.e. the first day the label is observable.
    std::optional<Date> injury_onset;
    std::optional<std::size_t> injury_index;
    bool synthetic = false;
};

/// Read-only view of one row.
struct TrainingExample {
    const RowMeta& meta;
    std::span<const double> features;
    std::uint8_t label;
};

/// Row-major labeled design matrix with fixed, named columns.
class TrainingTable {
public:
    TrainingTable() = default;
    explicit TrainingTable(std::vector<std::string> feature_names);

    std::size_t rows() const { return labels_.size(); }
    std::size_t cols() const { return names_.size(); }
    bool empty() const { return labels_.empty(); }

    const std::vector<std::string>& feature_names() const { return names_; }
    std::optional<std::size_t> column_index(std::string_view name) const;
    /// Throws Error(MissingColumn) when absent.
    std::size_t require_column(std::string_view name) const;

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols(), cols()}; }
    std::span<double> row(std::size_t i) { return {values_.data() + i * cols(), cols()}; }
    double at(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
    std::span<const double> values() const { return values_; }

    std::uint8_t label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::uint8_t>& labels() const { return labels_; }
    void set_label(std::size_t i, std::uint8_t y) { labels_[i] = y; }

    const RowMeta& meta(std::size_t i) const { return meta_[i]; }
    TrainingExample example(std::size_t i) const { return {meta_[i], row(i), labels_[i]}; }

    void append(std::span<const double> values, std::uint8_t label, RowMeta meta);
    void reserve(std::size_t n);

    std::size_t count_label(std::uint8_t y) const;
    std::vector<double> column(std::size_t j) const;

    TrainingTable subset(std::span<const std::size_t> rows) const;
    TrainingTable select_columns(std::span<const std::string> names) const;
    /// Appends every row of `other`; column names must match.
    void append_rows(const TrainingTable& other);

    /// CSV: optional `player_id,date` key columns, the feature names, then `label`.
    void write_csv(std::ostream& out, bool with_keys = false) const;
    static TrainingTable read_csv(std::istream& in);

    bool operator==(const TrainingTable& other) const;

private:
    std::vector<std::string> names_;
    std::vector<double> values_;
    std::vector<std::uint8_t> labels_;
    std::vector<RowMeta> meta_;
};

}  // namespace injury
