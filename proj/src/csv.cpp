#include "circlelab/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace circlelab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string CsvTable::to_string() const {
    std::ostringstream os;
    for (const std::string& c : comments) os << "# " << c << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) os << ',';
        os << columns[i];
    }
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << row[i];
        }
        os << "\n";
    }
    return os.str();
}

void CsvTable::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    out << to_string();
}

} // namespace circlelab
