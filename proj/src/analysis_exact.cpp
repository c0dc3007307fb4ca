#include "ccs/analysis_exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ccs {

int PatternSeq::distinct() const {
    std::vector<int> seen;
    for (int v : s)
        if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
    return static_cast<int>(seen.size());
}

unsigned long long stirling2(int n, int k) {
    if (n < 0 || k < 0) throw std::invalid_argument("stirling2: negative argument");
    if (k > n) return 0;
    if (n == 0) return 1;  // k == 0 here
    if (k == 0) return 0;
    std::vector<unsigned long long> row(k + 1, 0);
    row[0] = 1;  // S(0, 0)
    for (int i = 1; i <= n; ++i) {
        for (int j = std::min(i, k); j >= 1; --j)
            row[j] = (j <= i - 1 ? row[j] * j : 0) + row[j - 1];
        row[0] = 0;
    }
    return row[k];
}

unsigned long long bell_number(int n) {
    unsigned long long b = 0;
    for (int k = 0; k <= n; ++k) b += stirling2(n, k);
    return b;
}

std::vector<PatternSeq> enumerate_patterns(int j) {
    if (j < 1) throw std::invalid_argument("enumerate_patterns: j must be >= 1");
    std::vector<PatternSeq> out;
    PatternSeq cur;
    cur.s.assign(j, 0);
    cur.s[0] = 1;
    auto rec = [&](auto&& self, int q) -> void {
        if (q == j) {
            out.push_back(cur);
            return;
        }
        std::vector<int> labels;
        for (int i = 0; i < q; ++i)
            if (std::find(labels.begin(), labels.end(), cur.s[i]) == labels.end())
                labels.push_back(cur.s[i]);
        for (int v : labels) {
            cur.s[q] = v;
            self(self, q + 1);
        }
        cur.s[q] = q + 1;  // new message at position q
        self(self, q + 1);
    };
    rec(rec, 1);
    return out;
}

double class_size(const PatternSeq& s, int K) {
    const int d = s.distinct();
    double n = 1.0;
    for (int i = 1; i < d; ++i) n *= (K - i);
    return n < 0.0 ? 0.0 : n;
}

double event_probability(const PatternSeq& s, std::uint32_t subset_mask,
                         const std::vector<int>& m) {
    const int j = s.length();
    if (static_cast<int>(m.size()) < j)
        throw std::invalid_argument("event_probability: m too short for pattern");
    auto in_set = [&](int q) { return (subset_mask >> q) & 1u; };
    // M(q): info bits at earlier positions held by other messages.
    auto bigM = [&](int q) {
        int acc = 0;
        for (int i = 0; i < q; ++i)
            if (s.s[i] != s.s[q]) acc += m[i];
        return acc;
    };
    // Last earlier passing-check position with the same message, if any.
    auto last_pass_same = [&](int q) -> int {
        for (int p = q - 1; p >= 1; --p)
            if (!in_set(p) && s.s[p] == s.s[q]) return p;
        return -1;
    };
    double prob = 1.0;
    for (int q = 1; q < j; ++q) {
        const int p = last_pass_same(q);
        const int delta = bigM(q) - (p >= 0 ? bigM(p) : 0);
        if (!in_set(q)) {
            prob *= std::exp2(-static_cast<double>(delta));
        } else {
            bool later_pass_same = false;
            for (int t = q + 1; t < j; ++t)
                if (!in_set(t) && s.s[t] == s.s[q]) later_pass_same = true;
            if (later_pass_same) return 0.0;  // failed here, yet passes later: impossible
            bool earlier_fail_same = false;
            for (int t = 1; t < q; ++t)
                if (in_set(t) && s.s[t] == s.s[q]) earlier_fail_same = true;
            if (earlier_fail_same) continue;  // already conditioned on a mismatch
            prob *= 1.0 - std::exp2(-static_cast<double>(delta));
        }
        if (prob == 0.0) return 0.0;
    }
    return prob;
}

double SparsePgf::eval(double x) const {
    double acc = 0.0;
    for (const auto& [e, c] : mass) acc += c * std::pow(x, static_cast<double>(e));
    return acc;
}

SparsePgf pattern_pgf(const PatternSeq& s, const std::vector<int>& m,
                      const std::vector<int>& l) {
    const int j = s.length();
    if (static_cast<int>(l.size()) < j - 1)
        throw std::invalid_argument("pattern_pgf: l too short for pattern");
    SparsePgf pgf;
    for (std::uint32_t mask = 0; mask < (1u << (j - 1)); ++mask) {
        const std::uint32_t subset = mask << 1;  // positions 1..j-1
        const double p = event_probability(s, subset, m);
        if (p == 0.0) continue;
        long long e = 0;
        for (int q = 1; q < j; ++q)
            if ((subset >> q) & 1u) e += l[q - 1];
        pgf.mass[e] += p;
    }
    return pgf;
}

double expected_surviving_exact(int K, const std::vector<int>& m,
                                const std::vector<int>& l, int j) {
    if (j < 1) throw std::invalid_argument("expected_surviving_exact: j must be >= 1");
    double acc = 0.0;
    for (const PatternSeq& s : enumerate_patterns(j))
        acc += class_size(s, K) * pattern_pgf(s, m, l).eval(0.5);
    return acc - 1.0;
}

namespace {

/// Fused sweep over (pattern, subset) pairs. Positions are assigned one at a
/// time; each position picks a message (an existing pattern label or a fresh
/// one) and whether its parity check passes or fails. State is tracked per
/// label: info bits seen, the M value at the last passing position, and
/// whether a failing position exists (which both makes later failures free
/// and forbids later passes for that label).
struct ExactSweep {
    int levels;
    int K;
    const std::vector<int>& m;
    std::vector<double> pow2neg;   // 2^-t
    std::vector<double> xfail;     // 2^-l_q contributed by a failing check
    std::vector<double> acc;

    std::vector<int> sum_m;        // per label: info bits at its positions
    std::vector<int> last_pass_m;  // per label: M at last passing position
    std::vector<char> has_fail;    // per label
    int d = 1;                     // labels in use (root included)
    int pref_m = 0;                // total info bits at positions < q

    ExactSweep(int K_, const std::vector<int>& m_, const std::vector<int>& l_, int levels_)
        : levels(levels_), K(K_), m(m_), acc(levels_ + 1, 0.0) {
        int total = 0;
        for (int i = 0; i <= levels; ++i) total += m[i];
        pow2neg.resize(total + 1);
        for (int t = 0; t <= total; ++t) pow2neg[t] = std::exp2(-static_cast<double>(t));
        xfail.resize(levels);
        for (int q = 0; q < levels; ++q) xfail[q] = std::exp2(-static_cast<double>(l_[q]));
        sum_m.assign(levels + 1, 0);
        last_pass_m.assign(levels + 1, 0);
        has_fail.assign(levels + 1, 0);
        sum_m[0] = m[0];
        pref_m = m[0];
    }

    void run() { descend(1, 1.0); }

    void descend(int q, double w) {
        const int mq = m[q];
        for (int v = 0; v <= d && v <= q; ++v) {
            const bool fresh = (v == d);
            double cw = w;
            if (fresh) {
                if (K - d <= 0) break;
                cw *= (K - d);
            }
            const int big_m = pref_m - sum_m[v];
            // passing check at q
            if (!has_fail[v]) {
                const double wp = cw * pow2neg[big_m - last_pass_m[v]];
                if (wp != 0.0) place(q, v, fresh, /*fail=*/false, big_m, wp);
            }
            // failing check at q
            double wf = cw * xfail[q - 1];
            if (!fresh && has_fail[v]) {
                // mismatch already established for this label
            } else {
                wf *= 1.0 - pow2neg[big_m - last_pass_m[v]];
            }
            if (wf != 0.0) place(q, v, fresh, /*fail=*/true, big_m, wf);
        }
    }

    void place(int q, int v, bool fresh, bool fail, int big_m, double w) {
        acc[q] += w;
        if (q == levels) return;
        const int save_last = last_pass_m[v];
        const char save_fail = has_fail[v];
        if (fresh) ++d;
        sum_m[v] += m[q];
        pref_m += m[q];
        if (fail)
            has_fail[v] = 1;
        else
            last_pass_m[v] = big_m;
        descend(q + 1, w);
        if (fresh) --d;
        sum_m[v] -= m[q];
        pref_m -= m[q];
        last_pass_m[v] = save_last;
        has_fail[v] = save_fail;
    }
};

}  // namespace

std::vector<double> expected_surviving_exact_series(int K, const std::vector<int>& m,
                                                    const std::vector<int>& l, int levels) {
    if (levels < 1) throw std::invalid_argument("exact series: levels must be >= 1");
    if (static_cast<int>(m.size()) < levels + 1 || static_cast<int>(l.size()) < levels)
        throw std::invalid_argument("exact series: m needs levels+1 entries, l needs levels");
    if (K < 1) throw std::invalid_argument("exact series: K must be >= 1");
    ExactSweep sweep(K, m, l, levels);
    sweep.run();
    std::vector<double> out(levels);
    for (int j = 1; j <= levels; ++j) out[j - 1] = sweep.acc[j] - 1.0;
    return out;
}

}  // namespace ccs
