#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <iosfwd>

namespace quntherm {

// Shortest round-trip decimal representation (locale independent, '.' as
// decimal separator).  Used for every numeric CSV cell so outputs are
// byte-reproducible.
std::string format_double(double v);

// Strict number parse; throws std::invalid_argument naming `what`.
double parse_double(std::string_view s, const char* what);

std::vector<std::string> split_csv_line(const std::string& line);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    void row(const std::vector<std::string>& cells);

private:
    std::unique_ptr<std::ofstream> out_;
};

}  // namespace quntherm
