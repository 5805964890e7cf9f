#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace injury {

enum class ErrorKind {
    MalformedRow,
    UnknownPlayer,
    DuplicateSession,
    NegativeWorkload,
    InvalidInjury,
    MissingFile,
    EmptySeries,
    TooFewMinority,
    EmptyTable,
    EmptyNode,
    MissingFeature,
    MissingColumn,
    NonConvergence,
    OneClassOnly,
    ClassTooSmall,
    InsufficientHistory,
    ConfigInvalid,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Every recoverable failure in the library is raised as an Error carrying a kind.
/// Validation kinds (input files, schemas) map to CLI exit code 1.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Row-level input error with the 1-based line number and the offending column.
class RowError : public Error {
public:
    RowError(ErrorKind kind, std::string file, std::size_t line, std::string column,
             const std::string& detail);

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::string file_;
    std::size_t line_;
    std::string column_;
};

}  // namespace injury
