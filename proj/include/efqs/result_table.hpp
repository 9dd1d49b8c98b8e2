#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace efqs {

using Cell = std::variant<long long, double, std::string>;

/// Rectangular table of results; serialized as CSV with doubles at 17 significant digits.
class ResultTable {
public:
    ResultTable(std::string name, std::vector<std::string> columns);

    /// Throws ShapeError if the row width differs from the schema.
    void add_row(std::vector<Cell> row);

    const std::string&              name() const { return name_; }
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

    std::size_t column_index(const std::string& column) const;
    /// Numeric value of a long long or double cell.
    double number(std::size_t row, const std::string& column) const;

    /// Config hash, code version, timestamp. Not part of the CSV body.
    std::map<std::string, std::string> metadata;

    std::string to_csv() const;
    void        write_csv(const std::filesystem::path& path) const;

private:
    std::string                    name_;
    std::vector<std::string>       columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// %.17g
std::string format_double(double v);

} // namespace efqs
