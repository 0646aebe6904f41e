#pragma once

#include <string>
#include <vector>

namespace survkit {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t ncol() const { return header.size(); }
    std::size_t nrow() const { return rows.size(); }
    // Index of a column name, -1 if absent.
    int column(const std::string& name) const;
};

// Comma-separated, first row is the header, optional quoting with doubled
// quotes inside quoted fields, tolerates trailing \r.  Ragged rows are a
// DataError.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

std::vector<std::string> split_csv_line(const std::string& line);

// Writes rows of preformatted cells; caller controls number formatting.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Missing-value convention shared by loaders: empty string or the literal NA.
bool is_missing_token(const std::string& tok);

}  // namespace survkit
