#include "injury/table.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <ostream>

#include "injury/csv.hpp"
#include "injury/error.hpp"

namespace injury {

TrainingTable::TrainingTable(std::vector<std::string> feature_names) : names_(std::move(feature_names)) {}

std::optional<std::size_t> TrainingTable::column_index(std::string_view name) const {
    for (std::size_t j = 0; j < names_.size(); ++j)
        if (names_[j] == name) return j;
    return std::nullopt;
}

std::size_t TrainingTable::require_column(std::string_view name) const {
    if (auto j = column_index(name)) return *j;
    throw Error(ErrorKind::MissingColumn, "table has no column '" + std::string(name) + "'");
}

void TrainingTable::append(std::span<const double> values, std::uint8_t label, RowMeta meta) {
    assert(values.size() == cols());
    values_.insert(values_.end(), values.begin(), values.end());
    labels_.push_back(label);
    meta_.push_back(std::move(meta));
}

void TrainingTable::reserve(std::size_t n) {
    values_.reserve(n * cols());
    labels_.reserve(n);
    meta_.reserve(n);
}

std::size_t TrainingTable::count_label(std::uint8_t y) const {
    return std::size_t(std::count(labels_.begin(), labels_.end(), y));
}

std::vector<double> TrainingTable::column(std::size_t j) const {
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < rows(); ++i) out[i] = at(i, j);
    return out;
}

TrainingTable TrainingTable::subset(std::span<const std::size_t> rows) const {
    TrainingTable out(names_);
    out.reserve(rows.size());
    for (std::size_t i : rows) out.append(row(i), labels_[i], meta_[i]);
    return out;
}

TrainingTable TrainingTable::select_columns(std::span<const std::string> names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(require_column(n));
    TrainingTable out(std::vector<std::string>(names.begin(), names.end()));
    out.reserve(rows());
    std::vector<double> buf(idx.size());
    for (std::size_t i = 0; i < rows(); ++i) {
        for (std::size_t k = 0; k < idx.size(); ++k) buf[k] = at(i, idx[k]);
        out.append(buf, labels_[i], meta_[i]);
    }
    return out;
}

void TrainingTable::append_rows(const TrainingTable& other) {
    if (other.names_ != names_) throw Error(ErrorKind::InvalidArgument, "append_rows: column mismatch");
    values_.insert(values_.end(), other.values_.begin(), other.values_.end());
    labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
    meta_.insert(meta_.end(), other.meta_.begin(), other.meta_.end());
}

void TrainingTable::write_csv(std::ostream& out, bool with_keys) const {
    if (with_keys) out << "player_id,date,";
    for (const auto& n : names_) out << n << ',';
    out << "label\n";
    for (std::size_t i = 0; i < rows(); ++i) {
        if (with_keys) out << meta_[i].player_id << ',' << meta_[i].date.to_string() << ',';
        for (double v : row(i)) out << csv::format_double(v) << ',';
        out << int(labels_[i]) << '\n';
    }
}

TrainingTable TrainingTable::read_csv(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw RowError(ErrorKind::MalformedRow, "table.csv", 1, "<header>", "file is empty");
    auto header = csv::split(line);
    if (header.empty() || csv::trim(header.back()) != "label")
        throw RowError(ErrorKind::MalformedRow, "table.csv", 1, "<header>", "last column must be 'label'");
    const bool with_keys = header.size() >= 3 && csv::trim(header[0]) == "player_id" &&
                           csv::trim(header[1]) == "date";
    const std::size_t first = with_keys ? 2 : 0;
    std::vector<std::string> names;
    for (std::size_t j = first; j + 1 < header.size(); ++j) names.emplace_back(csv::trim(header[j]));
    TrainingTable table(names);
    std::vector<double> buf(names.size());
    while (reader.next(line)) {
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        if (f.size() != header.size())
            throw RowError(ErrorKind::MalformedRow, "table.csv", reader.line_number(), "<row>",
                           "expected " + std::to_string(header.size()) + " fields");
        RowMeta meta;
        if (with_keys) {
            meta.player_id = std::string(csv::trim(f[0]));
            auto d = Date::parse(csv::trim(f[1]));
            if (!d) throw RowError(ErrorKind::MalformedRow, "table.csv", reader.line_number(), "date", "bad date");
            meta.date = *d;
        }
        for (std::size_t j = 0; j < names.size(); ++j) {
            auto v = csv::parse_double(f[first + j]);
            if (!v || !std::isfinite(*v))
                throw RowError(ErrorKind::MalformedRow, "table.csv", reader.line_number(), names[j],
                               "not a finite number");
            buf[j] = *v;
        }
        auto y = csv::parse_int(f.back());
        if (!y || (*y != 0 && *y != 1))
            throw RowError(ErrorKind::MalformedRow, "table.csv", reader.line_number(), "label", "must be 0 or 1");
        table.append(buf, std::uint8_t(*y), std::move(meta));
    }
    return table;
}

bool TrainingTable::operator==(const TrainingTable& other) const {
    if (names_ != other.names_ || labels_ != other.labels_ || values_.size() != other.values_.size()) return false;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (std::bit_cast<std::uint64_t>(values_[i]) != std::bit_cast<std::uint64_t>(other.values_[i])) return false;
    for (std::size_t i = 0; i < meta_.size(); ++i)
        if (meta_[i].player_id != other.meta_[i].player_id || meta_[i].date != other.meta_[i].date ||
            meta_[i].synthetic != other.meta_[i].synthetic)
            return false;
    return true;
}

}  // namespace injury
