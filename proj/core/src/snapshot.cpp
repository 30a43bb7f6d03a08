#include "spinlang/snapshot.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "spinlang/errors.hpp"

namespace spinlang {
namespace {

bool parse_positive(std::string_view token, int& value) {
    if (token.empty() || token.front() == '+' || token.front() == '-') return false;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(' ', start);
        tokens.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return tokens;
}

}  // namespace

void write_snapshot(std::ostream& out, const Lattice& lattice) {
    out << lattice.side() << ' ' << lattice.state_len() << '\n';
    std::string line;
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
        line.clear();
        for (int k = 0; k < lattice.state_len(); ++k) {
            if (k != 0) line += ' ';
            line += lattice.spin(n, k) > 0 ? "+1" : "-1";
        }
        line += '\n';
        out << line;
    }
}

std::string format_snapshot(const Lattice& lattice) {
    std::ostringstream out;
    write_snapshot(out, lattice);
    return out.str();
}

Lattice read_snapshot(std::istream& in) {
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_snapshot(text);
}

Lattice parse_snapshot(const std::string& text) {
    std::vector<std::string_view> lines;
    std::string_view rest(text);
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        if (nl == std::string_view::npos) {
            throw ParseError(lines.size() + 1, "missing terminating newline");
        }
        lines.push_back(rest.substr(0, nl));
        rest.remove_prefix(nl + 1);
    }
    if (lines.empty()) throw ParseError(1, "empty snapshot");

    const auto header = split_spaces(lines[0]);
    int side = 0;
    int state_len = 0;
    if (header.size() != 2 || !parse_positive(header[0], side) ||
        !parse_positive(header[1], state_len)) {
        throw ParseError(1, "header must be two decimal integers 'M L'");
    }
    if (side < 2) throw ParseError(1, "side length must be >= 2");
    if (state_len < 1) throw ParseError(1, "state length must be >= 1");

    Lattice lattice(side, state_len);
    const std::size_t expected = lattice.node_count();
    const std::size_t body = lines.size() - 1;
    if (body < expected) {
        throw ParseError(lines.size() + 1, "row count mismatch: expected " +
                                               std::to_string(expected) + " node lines, found " +
                                               std::to_string(body));
    }
    if (body > expected) {
        throw ParseError(expected + 2, "row count mismatch: expected " + std::to_string(expected) +
                                           " node lines, found " + std::to_string(body));
    }
    for (std::size_t n = 0; n < expected; ++n) {
        const std::size_t line_no = n + 2;
        const auto tokens = split_spaces(lines[n + 1]);
        if (tokens.size() != static_cast<std::size_t>(state_len)) {
            throw ParseError(line_no, "expected " + std::to_string(state_len) + " entries, found " +
                                          std::to_string(tokens.size()));
        }
        for (int k = 0; k < state_len; ++k) {
            if (tokens[k] == "-1") {
                lattice.flip(n, k);
            } else if (tokens[k] != "+1") {
                throw ParseError(line_no, "invalid spin entry '" + std::string(tokens[k]) +
                                              "' (expected +1 or -1)");
            }
        }
    }
    return lattice;
}

void save_snapshot(const std::filesystem::path& path, const Lattice& lattice) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open snapshot for writing: " + path.string());
    write_snapshot(out, lattice);
    out.flush();
    if (!out) throw IoError("failed writing snapshot: " + path.string());
}

Lattice load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot: " + path.string());
    return read_snapshot(in);
}

}  // namespace spinlang
