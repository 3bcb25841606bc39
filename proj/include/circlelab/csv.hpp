// CSV emission with a leading comment header carrying the manifest hash.
// Bodies are byte-stable across runs for identical inputs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace circlelab {

std::string format_double(double v);  // shortest round-trip (%.17g)

std::uint64_t fnv1a(const std::string& data);

struct CsvTable {
    std::vector<std::string> comments;  // emitted as "# ..." lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_string() const;
    void write(const std::string& path) const;
};

} // namespace circlelab
