#include "spinlang/csv.hpp"

#include <cstdio>

namespace spinlang::csv {

std::string number(double value) {
    char buf[64];
    const int n = std::snprintf(buf, sizeof buf, "%.12g", value);
    std::string s(buf, static_cast<std::size_t>(n));
    if (s == "-0") s = "0";
    return s;
}

void write_row(std::ostream& out, const ObservableRow& row) {
    std::string line;
    line.reserve(128);
    line += row.model;
    line += ',' + std::to_string(row.side);
    line += ',' + std::to_string(row.state_len);
    line += ',' + number(row.temperature);
    line += ',' + row.trial;
    line += ',' + std::to_string(row.sweep);
    line += ',' + number(row.energy);
    line += ',';
    if (row.centered) line += number(*row.centered);
    line += ',' + std::to_string(row.seed);
    line += ',';
    line += row.source;
    line += '\n';
    out << line;
}

void write_row(std::ostream& out, const HistogramRow& row) {
    std::string line;
    line.reserve(96);
    line += row.model;
    line += ',' + std::to_string(row.side);
    line += ',' + std::to_string(row.state_len);
    line += ',' + number(row.temperature);
    line += ',' + std::to_string(row.distance);
    line += ',' + number(row.probability);
    line += ',';
    line += row.kind;
    line += '\n';
    out << line;
}

}  // namespace spinlang::csv
