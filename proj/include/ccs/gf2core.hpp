#pragma once

#include <cstdint>
#include <cstddef>
#include <compare>
#include <string>
#include <vector>

#include "ccs/rng.hpp"

namespace ccs {

/// Bit vector over GF(2), packed into 64-bit words, bit i at word i/64,
/// position i%64.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    /// Low `n` bits of `value`; bit b of the vector = bit b of value.
    static BitVector from_bits(std::uint64_t value, std::size_t n);

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const {
        return (w_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool v) {
        const std::uint64_t m = 1ull << (i & 63);
        if (v)
            w_[i >> 6] |= m;
        else
            w_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { w_[i >> 6] ^= 1ull << (i & 63); }

    void xor_assign(const BitVector& other);

    bool is_zero() const;
    std::size_t popcount() const;

    /// Interpret as an unsigned integer, bit b weighted 2^b. size() <= 64.
    std::uint64_t to_bits() const { return w_.empty() ? 0 : w_[0]; }

    /// Bits [lo, lo+len) as a new vector.
    BitVector slice(std::size_t lo, std::size_t len) const;

    /// Append other's bits after this vector's bits.
    void append(const BitVector& other);

    std::string to_string() const;  // e.g. "101", bit 0 first

    const std::vector<std::uint64_t>& words() const { return w_; }

    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.n_ == b.n_ && a.w_ == b.w_;
    }
    friend std::strong_ordering operator<=>(const BitVector& a, const BitVector& b) {
        if (auto c = a.n_ <=> b.n_; c != 0) return c;
        for (std::size_t i = 0; i < a.w_.size(); ++i)
            if (auto c = a.w_[i] <=> b.w_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

private:
    friend BitVector matvec_mod2(const BitVector& v, const class BitMatrix& G);

    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

/// Dense GF(2) matrix, rows bit-packed.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), w_(rows * wpr_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const {
        return (w_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool v) {
        const std::uint64_t m = 1ull << (c & 63);
        std::uint64_t& word = w_[r * wpr_ + (c >> 6)];
        if (v)
            word |= m;
        else
            word &= ~m;
    }

    const std::uint64_t* row(std::size_t r) const { return w_.data() + r * wpr_; }
    std::uint64_t* row(std::size_t r) { return w_.data() + r * wpr_; }
    std::size_t words_per_row() const { return wpr_; }

    BitVector row_vector(std::size_t r) const;

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.w_ == b.w_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> w_;
};

/// Each entry iid uniform over {0,1}.
BitMatrix sample_uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng);
BitVector sample_uniform_vector(std::size_t n, Rng& rng);

/// v^T G over GF(2): XOR of rows of G selected by set bits of v.
/// v.size() must equal G.rows(); result has G.cols() bits.
BitVector matvec_mod2(const BitVector& v, const BitMatrix& G);

/// Rank over GF(2) by row elimination (takes a copy).
std::size_t rank_mod2(BitMatrix G);

}  // namespace ccs
