#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "spinlang/rng.hpp"

namespace spinlang {

/// One node's state: L spins, each exactly -1 or +1.
class SpinState {
public:
    SpinState() = default;
    /// Throws std::invalid_argument if any entry is not +-1.
    explicit SpinState(std::vector<int> spins);
    SpinState(std::initializer_list<int> spins) : SpinState(std::vector<int>(spins)) {}

    static SpinState uniform(std::size_t length, int spin);

    std::size_t size() const noexcept { return spins_.size(); }
    int operator[](std::size_t k) const { return spins_[k]; }
    std::span<const std::int8_t> spins() const noexcept { return spins_; }

    friend bool operator==(const SpinState&, const SpinState&) = default;

private:
    std::vector<std::int8_t> spins_;
};

/// Number of positions where a and b differ. Throws on length mismatch.
int hamming(const SpinState& a, const SpinState& b);
/// Sum of elementwise products; equals L - 2 * hamming(a, b).
int dot(const SpinState& a, const SpinState& b);

struct NodeIndex {
    int row = 0;
    int col = 0;

    friend bool operator==(const NodeIndex&, const NodeIndex&) = default;
};

/// Toroidal neighbours in the order up, down, left, right. For side == 2 the
/// result contains each distinct neighbour twice.
std::array<NodeIndex, 4> neighbors(NodeIndex x, int side);

/// Flat (row-major) neighbour indices, same order; no range checks.
inline std::array<std::size_t, 4> neighbor_slots(std::size_t row, std::size_t col, int side) noexcept {
    const auto m = static_cast<std::size_t>(side);
    const std::size_t up = (row == 0 ? m - 1 : row - 1) * m + col;
    const std::size_t down = (row + 1 == m ? 0 : row + 1) * m + col;
    const std::size_t left = row * m + (col == 0 ? m - 1 : col - 1);
    const std::size_t right = row * m + (col + 1 == m ? 0 : col + 1);
    return {up, down, left, right};
}

inline std::array<std::size_t, 4> neighbor_slots(std::size_t flat, int side) noexcept {
    const auto m = static_cast<std::size_t>(side);
    return neighbor_slots(flat / m, flat % m, side);
}

/// M x M periodic grid of L-spin states.
///
/// Spins are bit-packed per node (bit set means +1) so Hamming distances
/// reduce to popcounts over ceil(L/64) words. All public accessors speak +-1.
class Lattice {
public:
    /// Uniform +1 lattice. Throws std::invalid_argument if side < 2 or state_len < 1.
    Lattice(int side, int state_len);

    int side() const noexcept { return side_; }
    int state_len() const noexcept { return state_len_; }
    std::size_t node_count() const noexcept { return static_cast<std::size_t>(side_) * side_; }
    std::size_t spin_count() const noexcept { return node_count() * state_len_; }
    std::size_t words_per_node() const noexcept { return words_per_node_; }

    std::size_t flat(NodeIndex x) const;
    NodeIndex node(std::size_t flat) const;

    int spin(std::size_t node, int component) const noexcept {
        const std::uint64_t w = bits_[node * words_per_node_ + (component >> 6)];
        return ((w >> (component & 63)) & 1U) != 0 ? 1 : -1;
    }
    int spin(NodeIndex x, int component) const { return spin(flat(x), component); }

    void flip(std::size_t node, int component) noexcept {
        bits_[node * words_per_node_ + (component >> 6)] ^= std::uint64_t{1} << (component & 63);
    }
    void set_spin(std::size_t node, int component, int value);

    SpinState state(std::size_t node) const;
    SpinState state(NodeIndex x) const { return state(flat(x)); }
    void set_state(std::size_t node, const SpinState& s);
    void set_state(NodeIndex x, const SpinState& s) { set_state(flat(x), s); }

    std::span<const std::uint64_t> words(std::size_t node) const noexcept {
        return {bits_.data() + node * words_per_node_, words_per_node_};
    }

    int hamming(std::size_t a, std::size_t b) const noexcept {
        if (words_per_node_ == 1) {
            return std::popcount(bits_[a] ^ bits_[b]);
        }
        int d = 0;
        const std::uint64_t* pa = bits_.data() + a * words_per_node_;
        const std::uint64_t* pb = bits_.data() + b * words_per_node_;
        for (std::size_t w = 0; w < words_per_node_; ++w) d += std::popcount(pa[w] ^ pb[w]);
        return d;
    }
    int dot(std::size_t a, std::size_t b) const noexcept { return state_len_ - 2 * hamming(a, b); }

    friend bool operator==(const Lattice&, const Lattice&) = default;

private:
    int side_;
    int state_len_;
    std::size_t words_per_node_;
    std::vector<std::uint64_t> bits_;
};

enum class InitMode { random, uniform_up };

/// Random mode draws every spin as an independent fair coin, row-major by node
/// then component.
Lattice init_lattice(int side, int state_len, InitMode mode, RngSeed seed);

}  // namespace spinlang
