#include "ccs/gf2core.hpp"

#include <bit>
#include <stdexcept>

namespace ccs {

BitVector BitVector::from_bits(std::uint64_t value, std::size_t n) {
    if (n > 64) throw std::invalid_argument("from_bits: n > 64");
    BitVector v(n);
    if (n > 0) {
        const std::uint64_t mask = (n == 64) ? ~0ull : ((1ull << n) - 1);
        v.w_[0] = value & mask;
    }
    return v;
}

void BitVector::xor_assign(const BitVector& other) {
    if (other.n_ != n_) throw std::invalid_argument("xor_assign: size mismatch");
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= other.w_[i];
}

bool BitVector::is_zero() const {
    for (auto w : w_)
        if (w) return false;
    return true;
}

std::size_t BitVector::popcount() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

BitVector BitVector::slice(std::size_t lo, std::size_t len) const {
    if (lo + len > n_) throw std::invalid_argument("slice: out of range");
    BitVector out(len);
    for (std::size_t i = 0; i < len; ++i) out.set(i, get(lo + i));
    return out;
}

void BitVector::append(const BitVector& other) {
    const std::size_t base = n_;
    n_ += other.n_;
    w_.resize((n_ + 63) / 64, 0);
    for (std::size_t i = 0; i < other.n_; ++i)
        if (other.get(i)) set(base + i, true);
}

std::string BitVector::to_string() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitVector BitMatrix::row_vector(std::size_t r) const {
    BitVector v(cols_);
    for (std::size_t c = 0; c < cols_; ++c)
        if (get(r, c)) v.set(c, true);
    return v;
}

BitMatrix sample_uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    BitMatrix m(rows, cols);
    const std::uint64_t top_mask =
        (cols % 64 == 0) ? ~0ull : ((1ull << (cols % 64)) - 1);
    for (std::size_t r = 0; r < rows; ++r) {
        std::uint64_t* w = m.row(r);
        for (std::size_t k = 0; k < m.words_per_row(); ++k) w[k] = rng.next_u64();
        if (m.words_per_row() > 0) w[m.words_per_row() - 1] &= top_mask;
    }
    return m;
}

BitVector sample_uniform_vector(std::size_t n, Rng& rng) {
    BitVector v(n);
    for (std::size_t i = 0; i < n; ++i)
        if (rng.next_bit()) v.set(i, true);
    return v;
}

BitVector matvec_mod2(const BitVector& v, const BitMatrix& G) {
    if (v.size() != G.rows()) throw std::invalid_argument("matvec_mod2: size mismatch");
    BitVector out(G.cols());
    const std::size_t wpr = G.words_per_row();
    for (std::size_t r = 0; r < G.rows(); ++r) {
        if (!v.get(r)) continue;
        const std::uint64_t* row = G.row(r);
        for (std::size_t k = 0; k < wpr; ++k) out.w_[k] ^= row[k];
    }
    return out;
}

std::size_t rank_mod2(BitMatrix G) {
    const std::size_t rows = G.rows(), cols = G.cols(), wpr = G.words_per_row();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows && !G.get(pivot, c)) ++pivot;
        if (pivot == rows) continue;
        if (pivot != rank) {
            std::uint64_t* a = G.row(rank);
            std::uint64_t* b = G.row(pivot);
            for (std::size_t k = 0; k < wpr; ++k) std::swap(a[k], b[k]);
        }
        const std::uint64_t* pr = G.row(rank);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank || !G.get(r, c)) continue;
            std::uint64_t* w = G.row(r);
            for (std::size_t k = 0; k < wpr; ++k) w[k] ^= pr[k];
        }
        ++rank;
    }
    return rank;
}

}  // namespace ccs
