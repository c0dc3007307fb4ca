#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace ccs {

/// Equality pattern of a candidate path of length j: entry s[q] identifies
/// which transmitted message supplies the fragment at position q. s[0] = 1
/// is the root message; a position introducing a new message is labeled
/// q + 1, a repeat copies an earlier label. There are Bell(j) patterns of
/// length j.
struct PatternSeq {
    std::vector<int> s;

    int length() const { return static_cast<int>(s.size()); }
    int distinct() const;
};

unsigned long long stirling2(int n, int k);
unsigned long long bell_number(int n);

std::vector<PatternSeq> enumerate_patterns(int j);

/// Number of candidate index vectors with pattern s when K messages are on
/// each list: (K-1)(K-2)...(K-d+1) for d distinct labels.
double class_size(const PatternSeq& s, int K);

/// Probability that exactly the parity checks at positions q with bit q of
/// `subset_mask` set fail, the others pass, conditioned on the pattern.
/// m[i] is the information bit count at position i; position q's check fails
/// only if the candidate's info prefix differs from the root path's.
double event_probability(const PatternSeq& s, std::uint32_t subset_mask,
                         const std::vector<int>& m);

/// Probability generating function of a pattern: map from the parity-bit
/// exponent e = sum_{q in S} l_q to the total probability of the subsets S
/// with that exponent. eval(x) gives Phi_s(x).
struct SparsePgf {
    std::map<long long, double> mass;

    double eval(double x) const;
};

SparsePgf pattern_pgf(const PatternSeq& s, const std::vector<int>& m,
                      const std::vector<int>& l);

/// Exact expected number of erroneous paths surviving stage j-1:
///   E[L_{j-1}] = sum_{s in P_j} n(s) Phi_s(1/2) - 1.
/// m holds m_0..m_{j-1}; l holds l_1..l_{j-1}. Enumerates patterns
/// explicitly, intended for small j.
double expected_surviving_exact(int K, const std::vector<int>& m,
                                const std::vector<int>& l, int j);

/// E[L_j] for every j in [1, levels] in one fused depth-first sweep over
/// (pattern, subset) pairs. m needs levels+1 entries, l needs `levels`.
std::vector<double> expected_surviving_exact_series(int K, const std::vector<int>& m,
                                                    const std::vector<int>& l, int levels);

}  // namespace ccs
