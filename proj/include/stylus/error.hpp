#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stylus {

enum class ErrorKind {
    MissingPaper,
    DuplicatePaper,
    ParseFailure,
    EmptyVocabulary,
    LabelMismatch,
    InvalidK,
    RankTooLarge,
    DimensionMismatch,
    MissingDoc,
    MalformedRow,
    NonFiniteValue,
    DegenerateTotals,
    EmptyInput,
    SingleClass,
    NonFiniteFeature,
    InvalidParam,
    NoOccurrences,
    UncoveredWord,
    DegenerateSample,
    UnknownTable,
    InvalidConfig,
    SchemaViolation,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Message without the kind prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

}  // namespace stylus
