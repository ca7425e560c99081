// table.hpp: tab-separated output tables with a '#' metadata block

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cqed {

// 17 significant digits (exact double round trip); NaN is written as "nan".
std::string format_number(double value);

class Table {
public:
    explicit Table(std::vector<std::string> columns);

    void meta(std::string key, std::string value);
    void meta(std::string key, double value);
    void add_row(const std::vector<double>& values);
    void add_cells(std::vector<std::string> cells);

    std::size_t row_count() const { return rows_.size(); }
    std::string render() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::pair<std::string, std::string>> meta_;
    std::vector<std::vector<std::string>> rows_;
};

// Writes to a sibling temporary file and renames it over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace cqed
