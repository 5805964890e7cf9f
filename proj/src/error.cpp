#include "injury/error.hpp"

namespace injury {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::UnknownPlayer: return "UnknownPlayer";
    case ErrorKind::DuplicateSession: return "DuplicateSession";
    case ErrorKind::NegativeWorkload: return "NegativeWorkload";
    case ErrorKind::InvalidInjury: return "InvalidInjury";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::EmptySeries: return "EmptySeries";
    case ErrorKind::TooFewMinority: return "TooFewMinority";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::EmptyNode: return "EmptyNode";
    case ErrorKind::MissingFeature: return "MissingFeature";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::OneClassOnly: return "OneClassOnly";
    case ErrorKind::ClassTooSmall: return "ClassTooSmall";
    case ErrorKind::InsufficientHistory: return "InsufficientHistory";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

RowError::RowError(ErrorKind kind, std::string file, std::size_t line, std::string column,
                   const std::string& detail)
    : Error(kind, file + ":" + std::to_string(line) + " column '" + column + "': " + detail),
      file_(std::move(file)),
      line_(line),
      column_(std::move(column)) {}

}  // namespace injury
