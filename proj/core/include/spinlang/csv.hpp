#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace spinlang::csv {

inline constexpr std::string_view observable_header =
    "model,M,L,T,trial,sweep,energy,centered_energy,seed,source";
inline constexpr std::string_view histogram_header = "model,M,L,T,distance,probability,kind";

/// 12 significant digits, shortest %g form.
std::string number(double value);

struct ObservableRow {
    std::string_view model;
    int side = 0;
    int state_len = 0;
    double temperature = 0.0;
    std::string trial;  ///< trial index, or "agg:sd=<value>" on aggregate rows
    std::int64_t sweep = 0;
    double energy = 0.0;
    std::optional<double> centered;
    std::uint64_t seed = 0;
    std::string_view source = "simulation";
};

struct HistogramRow {
    std::string_view model;
    int side = 0;
    int state_len = 0;
    double temperature = 0.0;
    int distance = 0;
    double probability = 0.0;
    std::string_view kind;  ///< "edge" or "preferred"
};

void write_row(std::ostream& out, const ObservableRow& row);
void write_row(std::ostream& out, const HistogramRow& row);

}  // namespace spinlang::csv
