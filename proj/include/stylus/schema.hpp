#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace stylus {

enum class Cell { Any, Text, Integer, Count, Real, NonNegative, Probability };

/// Column rules for a CSV file. The last rule repeats for any further
/// columns; an empty header accepts any header of the right width.
struct CsvSchema {
    std::vector<std::string> header;
    std::vector<Cell> cells;
};

/// Raises SchemaViolation naming the file and line of the first bad cell.
void validate_csv(std::string_view text, const CsvSchema& schema, std::string_view name);

enum class JsonDocument { Corpus, LdaModel, ScreenReport, LassoModel, OddsReport, EvalReport };

/// Checks required members, their types and value ranges.
void validate_json(std::string_view text, JsonDocument kind, std::string_view name);

const CsvSchema& predictions_schema();
const CsvSchema& density_schema();
const CsvSchema& wordcloud_schema();
const CsvSchema& mw_models_schema();
const CsvSchema& tdm_schema();
const CsvSchema& embedding_schema();

/// Validates `text` against the schema, then writes it to `path`.
void write_checked(const std::filesystem::path& path, const std::string& text, const CsvSchema& schema);
void write_checked(const std::filesystem::path& path, const std::string& text, JsonDocument kind);

/// Runs a stream writer into a string.
template <class Writer>
std::string render(Writer&& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

}  // namespace stylus
