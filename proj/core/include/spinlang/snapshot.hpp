#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "spinlang/lattice.hpp"

namespace spinlang {

// Snapshot text format:
//   line 1      "M L"
//   M*M lines   L entries of "+1" or "-1" separated by single spaces, row-major
// Every line ends in '\n'; no trailing whitespace.

void write_snapshot(std::ostream& out, const Lattice& lattice);
std::string format_snapshot(const Lattice& lattice);

/// Throws ParseError (with the offending line number) on any deviation from the format.
Lattice read_snapshot(std::istream& in);
Lattice parse_snapshot(const std::string& text);

/// Throws IoError if the file cannot be opened or written.
void save_snapshot(const std::filesystem::path& path, const Lattice& lattice);
Lattice load_snapshot(const std::filesystem::path& path);

}  // namespace spinlang
