#include "efqs/result_table.hpp"

#include "efqs/errors.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>

namespace efqs {

ResultTable::ResultTable(std::string name, std::vector<std::string> columns) : name_(std::move(name)), columns_(std::move(columns)) {}

void ResultTable::add_row(std::vector<Cell> row) {
    if(row.size() != columns_.size())
        throw ShapeError(fmt::format("row of width {} for table '{}' with {} columns", row.size(), name_, columns_.size()));
    rows_.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& column) const {
    const auto it = std::find(columns_.begin(), columns_.end(), column);
    if(it == columns_.end()) throw ShapeError(fmt::format("table '{}' has no column '{}'", name_, column));
    return static_cast<std::size_t>(it - columns_.begin());
}

double ResultTable::number(std::size_t row, const std::string& column) const {
    const Cell& c = rows_.at(row).at(column_index(column));
    if(const auto* d = std::get_if<double>(&c)) return *d;
    if(const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    throw ShapeError(fmt::format("column '{}' of table '{}' is not numeric", column, name_));
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

std::string quote_if_needed(const std::string& s) {
    if(s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for(char ch : s) {
        if(ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

struct CellFormatter {
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& v) const { return quote_if_needed(v); }
};

} // namespace

std::string ResultTable::to_csv() const {
    std::string out;
    for(std::size_t i = 0; i < columns_.size(); ++i) {
        if(i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for(const auto& row : rows_) {
        for(std::size_t i = 0; i < row.size(); ++i) {
            if(i) out += ',';
            out += std::visit(CellFormatter{}, row[i]);
        }
        out += '\n';
    }
    return out;
}

void ResultTable::write_csv(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if(!f) throw ConfigError(fmt::format("cannot open '{}' for writing", path.string()));
    f << to_csv();
    if(!f) throw ConfigError(fmt::format("failed writing '{}'", path.string()));
}

} // namespace efqs
