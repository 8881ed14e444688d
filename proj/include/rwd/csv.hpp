#pragma once

#include <string>
#include <vector>

namespace rwd {

// Comma-split with no quoting; the file formats here are plain
// numeric tables.
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_numbers;  // 1-based source line per row

    int column(const std::string& name) const;  // -1 when absent
};

// Reads a CSV with a header row, skipping blank lines. Throws
// ParseError on a missing file.
CsvTable read_csv(const std::string& path);

}  // namespace rwd
