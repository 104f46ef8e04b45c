#pragma once

#include <istream>
#include <string>
#include <vector>

namespace cambrian::csv {

/// Reads RFC-4180 style records. A double-quoted field may span lines and hold
/// separators or doubled quotes. Blank lines are skipped.
/// Each returned record carries the 1-based physical line it started on.
struct Record {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

std::vector<Record> read(std::istream& in, char delimiter = ',');

} // namespace cambrian::csv
