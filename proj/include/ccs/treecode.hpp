#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ccs/gf2core.hpp"
#include "ccs/rng.hpp"

namespace ccs {

/// Split of a B-bit message into n fragments of J bits each: fragment j
/// carries m[j] information bits followed by l[j] parity bits, with
/// m[0] = J, l[0] = 0, m[j] + l[j] = J, sum(m) = B, sum(l) = n*J - B.
struct ParityProfile {
    int n = 0;
    int J = 0;
    std::vector<int> m;  // size n
    std::vector<int> l;  // size n

    int B() const;
    int M() const { return n * J; }

    /// Build from the parity allocation l[1..n-1] (l[0] implicitly 0),
    /// with m[j] = J - l[j]. Throws std::invalid_argument when inconsistent
    /// with B.
    static ParityProfile from_parity(int B, int n, int J, const std::vector<int>& parity);

    void validate() const;
};

/// Generator matrices G(l, j) for 0 <= l < j <= n-1, of shape m[l] x l[j],
/// entries iid uniform over {0,1}. Fixed for the lifetime of a code.
struct TreeCodebook {
    ParityProfile profile;
    std::map<std::pair<int, int>, BitMatrix> gen;

    const BitMatrix& at(int l, int j) const { return gen.at({l, j}); }

    static TreeCodebook sample(const ParityProfile& profile, Rng& rng);
};

/// Encode a B-bit message into n coded fragments of J bits each
/// (info bits first, parity bits after).
std::vector<BitVector> encode(const BitVector& w, const TreeCodebook& cb);

/// Parity check of fragment `path[j]` against info bits of path[0..j-1].
bool check_parity_stage(const std::vector<BitVector>& path, const TreeCodebook& cb, int j);

/// Column index of a coded fragment, bit 0 of the fragment being the most
/// significant bit (fragment "101" -> 5).
std::uint32_t fragment_to_index(const BitVector& frag);
BitVector index_to_fragment(std::uint32_t index, int J);

struct DecodeStats {
    std::vector<long long> survivors;  // survivors[j], j in [0, n-1]; [0] = roots
    long long parity_checks = 0;       // parity bits evaluated
    long long nodes_visited = 0;       // children examined
    long long roots = 0;
    long long decoded = 0;    // roots with exactly one surviving path
    long long ambiguous = 0;  // roots with more than one surviving path

    void merge(const DecodeStats& o);
};

struct RootDecodeResult {
    std::optional<BitVector> message;       // set iff exactly one survivor
    std::vector<long long> survivors;       // per stage, index 0..n-1 (index 0 is 1)
};

/// Stage-by-stage decode of the tree rooted at lists[0][root]. Fragments on
/// each list must be distinct J-bit vectors.
RootDecodeResult tree_decode_root(const std::vector<std::vector<BitVector>>& lists,
                                  const TreeCodebook& cb, std::size_t root,
                                  DecodeStats* stats = nullptr);

/// Decode every root on lists[0]; returns the recovered messages, sorted and
/// deduplicated.
std::vector<BitVector> tree_decode(const std::vector<std::vector<BitVector>>& lists,
                                   const TreeCodebook& cb, DecodeStats* stats = nullptr);

}  // namespace ccs
