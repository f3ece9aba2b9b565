#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace spreadcast::csv {

/// Shortest round-trip decimal form; NaN prints as "NA".
std::string format(double v);

/// Parses a numeric cell; "", "NA" and "NaN" give NaN. Throws SchemaError
/// naming `where` on anything else that is not a number.
double parse(std::string_view cell, const std::string& where);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Line-oriented reader that tracks the line number for diagnostics.
class Reader {
public:
    /// Throws SchemaError if the file cannot be opened or is empty.
    explicit Reader(const std::filesystem::path& file);

    const std::vector<std::string>& header() const noexcept { return header_; }
    /// Next data row; false at end of file. Blank lines are skipped.
    bool next(std::vector<std::string_view>& cells);
    /// "file:line" of the row last returned.
    std::string where() const;
    /// Throws SchemaError unless the header equals `expected`.
    void expect_header(const std::vector<std::string>& expected) const;

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::string line_;
    std::vector<std::string> header_;
    long lineno_ = 0;
};

/// Writes rows with a trailing newline each; text is written verbatim.
class Writer {
public:
    explicit Writer(const std::filesystem::path& file);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
};

}  // namespace spreadcast::csv
