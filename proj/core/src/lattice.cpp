#include "spinlang/lattice.hpp"

#include <stdexcept>
#include <string>

namespace spinlang {

SpinState::SpinState(std::vector<int> spins) {
    spins_.reserve(spins.size());
    for (int s : spins) {
        if (s != 1 && s != -1) {
            throw std::invalid_argument("spin value must be +1 or -1, got " + std::to_string(s));
        }
        spins_.push_back(static_cast<std::int8_t>(s));
    }
}

SpinState SpinState::uniform(std::size_t length, int spin) {
    return SpinState(std::vector<int>(length, spin));
}

int hamming(const SpinState& a, const SpinState& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("hamming: state lengths differ (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    int d = 0;
    for (std::size_t k = 0; k < a.size(); ++k) d += a[k] != b[k] ? 1 : 0;
    return d;
}

int dot(const SpinState& a, const SpinState& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: state lengths differ (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    int sum = 0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
    return sum;
}

std::array<NodeIndex, 4> neighbors(NodeIndex x, int side) {
    if (side < 2) throw std::invalid_argument("neighbors: side must be >= 2");
    if (x.row < 0 || x.row >= side || x.col < 0 || x.col >= side) {
        throw std::invalid_argument("neighbors: node (" + std::to_string(x.row) + "," +
                                    std::to_string(x.col) + ") out of range");
    }
    const int up = x.row == 0 ? side - 1 : x.row - 1;
    const int down = x.row + 1 == side ? 0 : x.row + 1;
    const int left = x.col == 0 ? side - 1 : x.col - 1;
    const int right = x.col + 1 == side ? 0 : x.col + 1;
    return {NodeIndex{up, x.col}, NodeIndex{down, x.col}, NodeIndex{x.row, left},
            NodeIndex{x.row, right}};
}

Lattice::Lattice(int side, int state_len) : side_(side), state_len_(state_len) {
    if (side < 2) throw std::invalid_argument("lattice side must be >= 2");
    if (state_len < 1) throw std::invalid_argument("state length must be >= 1");
    words_per_node_ = (static_cast<std::size_t>(state_len) + 63) / 64;
    bits_.assign(node_count() * words_per_node_, ~std::uint64_t{0});
    // Bits beyond L stay zero so popcounts only see real components.
    if (const int tail = state_len % 64; tail != 0) {
        const std::uint64_t mask = (std::uint64_t{1} << tail) - 1;
        for (std::size_t n = 0; n < node_count(); ++n) {
            bits_[n * words_per_node_ + words_per_node_ - 1] = mask;
        }
    }
}

std::size_t Lattice::flat(NodeIndex x) const {
    if (x.row < 0 || x.row >= side_ || x.col < 0 || x.col >= side_) {
        throw std::invalid_argument("node (" + std::to_string(x.row) + "," +
                                    std::to_string(x.col) + ") out of range");
    }
    return static_cast<std::size_t>(x.row) * side_ + x.col;
}

NodeIndex Lattice::node(std::size_t flat) const {
    if (flat >= node_count()) throw std::invalid_argument("flat node index out of range");
    return NodeIndex{static_cast<int>(flat / side_), static_cast<int>(flat % side_)};
}

void Lattice::set_spin(std::size_t node, int component, int value) {
    if (value != 1 && value != -1) throw std::invalid_argument("spin value must be +1 or -1");
    if (spin(node, component) != value) flip(node, component);
}

SpinState Lattice::state(std::size_t node) const {
    std::vector<int> s(state_len_);
    for (int k = 0; k < state_len_; ++k) s[k] = spin(node, k);
    return SpinState(std::move(s));
}

void Lattice::set_state(std::size_t node, const SpinState& s) {
    if (s.size() != static_cast<std::size_t>(state_len_)) {
        throw std::invalid_argument("set_state: state length does not match lattice");
    }
    if (node >= node_count()) throw std::invalid_argument("set_state: node out of range");
    for (int k = 0; k < state_len_; ++k) set_spin(node, k, s[k]);
}

Lattice init_lattice(int side, int state_len, InitMode mode, RngSeed seed) {
    Lattice lattice(side, state_len);
    if (mode == InitMode::uniform_up) return lattice;
    Rng rng(seed);
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
        for (int k = 0; k < state_len; ++k) {
            if (!rng.coin()) lattice.flip(n, k);
        }
    }
    return lattice;
}

}  // namespace spinlang
