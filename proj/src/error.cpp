#include "stylus/error.hpp"

namespace stylus {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::MissingPaper: return "MissingPaper";
        case ErrorKind::DuplicatePaper: return "DuplicatePaper";
        case ErrorKind::ParseFailure: return "ParseFailure";
        case ErrorKind::EmptyVocabulary: return "EmptyVocabulary";
        case ErrorKind::LabelMismatch: return "LabelMismatch";
        case ErrorKind::InvalidK: return "InvalidK";
        case ErrorKind::RankTooLarge: return "RankTooLarge";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::MissingDoc: return "MissingDoc";
        case ErrorKind::MalformedRow: return "MalformedRow";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::DegenerateTotals: return "DegenerateTotals";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::SingleClass: return "SingleClass";
        case ErrorKind::NonFiniteFeature: return "NonFiniteFeature";
        case ErrorKind::InvalidParam: return "InvalidParam";
        case ErrorKind::NoOccurrences: return "NoOccurrences";
        case ErrorKind::UncoveredWord: return "UncoveredWord";
        case ErrorKind::DegenerateSample: return "DegenerateSample";
        case ErrorKind::UnknownTable: return "UnknownTable";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::SchemaViolation: return "SchemaViolation";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace stylus
