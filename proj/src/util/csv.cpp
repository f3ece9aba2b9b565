#include "spreadcast/util/csv.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "spreadcast/errors.hpp"

namespace spreadcast::csv {

std::string format(double v) {
    if (std::isnan(v)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse(std::string_view cell, const std::string& where) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
        cell.remove_suffix(1);
    }
    if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw SchemaError(where + ": '" + std::string(cell) + "' is not a number");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

Reader::Reader(const std::filesystem::path& file) : path_(file), in_(file) {
    if (!in_) throw SchemaError(file.string() + ": cannot open");
    std::string first;
    while (std::getline(in_, first)) {
        ++lineno_;
        if (!first.empty() && first.back() == '\r') first.pop_back();
        if (!first.empty()) break;
    }
    if (first.empty()) throw SchemaError(file.string() + ": file is empty");
    for (auto c : split(first)) header_.emplace_back(c);
}

bool Reader::next(std::vector<std::string_view>& cells) {
    while (std::getline(in_, line_)) {
        ++lineno_;
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        if (line_.empty()) continue;
        cells = split(line_);
        if (cells.size() != header_.size()) {
            throw SchemaError(where() + ": expected " + std::to_string(header_.size()) +
                              " columns, found " + std::to_string(cells.size()));
        }
        return true;
    }
    return false;
}

std::string Reader::where() const { return path_.string() + ":" + std::to_string(lineno_); }

void Reader::expect_header(const std::vector<std::string>& expected) const {
    if (header_ != expected) {
        std::string want;
        for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
        throw SchemaError(path_.string() + ":1: header must be '" + want + "'");
    }
}

Writer::Writer(const std::filesystem::path& file) : out_(file, std::ios::binary) {
    if (!out_) throw SchemaError(file.string() + ": cannot open for writing");
}

void Writer::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

}  // namespace spreadcast::csv
