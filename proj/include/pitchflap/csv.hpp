#pragma once

// Deterministic CSV emission. Doubles are printed with max_digits10 so
// repeated runs are byte-identical and values round-trip exactly.

#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace pitchflap::csv {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", std::numeric_limits<double>::max_digits10, v);
    return buf;
}

struct Writer {
    std::string body;

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) body += ',';
            body += cols[i];
        }
        body += '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body += ',';
            body += cells[i];
        }
        body += '\n';
    }
};

} // namespace pitchflap::csv
