#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "ccs/analysis_approx.hpp"
#include "ccs/analysis_exact.hpp"
#include "ccs/treecode.hpp"
#include "doctest.h"

using namespace ccs;

TEST_CASE("profile validation") {
    CHECK_NOTHROW(ParityProfile::from_parity(40, 6, 10, {2, 4, 4, 4, 6}));
    // parity must leave sum(m) = B
    CHECK_THROWS_AS(ParityProfile::from_parity(40, 6, 10, {2, 4, 4, 4, 5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ParityProfile::from_parity(40, 6, 10, {2, 4, 4, 4}),
                    std::invalid_argument);
    // l_j > J makes m_j negative
    CHECK_THROWS_AS(ParityProfile::from_parity(29, 4, 10, {11, 10, 10}),
                    std::invalid_argument);
    ParityProfile bad;
    bad.n = 2;
    bad.J = 3;
    bad.m = {2, 1};  // m[0] must equal J
    bad.l = {1, 2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("hand-worked encode") {
    ParityProfile p;
    p.n = 2;
    p.J = 3;
    p.m = {3, 1};
    p.l = {0, 2};
    TreeCodebook cb;
    cb.profile = p;
    BitMatrix g(3, 2);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 2; ++c) g.set(r, c, true);
    cb.gen[{0, 1}] = g;

    BitVector w = BitVector::from_bits(0b1101, 4);  // bits 1,0,1,1
    REQUIRE(w.to_string() == "1011");
    std::vector<BitVector> frags = encode(w, cb);
    REQUIRE(frags.size() == 2);
    CHECK(frags[0].to_string() == "101");
    CHECK(frags[1].to_string() == "100");
    CHECK(check_parity_stage(frags, cb, 1));
    frags[1].flip(2);
    CHECK(!check_parity_stage(frags, cb, 1));
}

TEST_CASE("fragment index mapping") {
    CHECK(fragment_to_index(BitVector::from_bits(0b101, 3)) == 5);
    CHECK(index_to_fragment(5, 3).to_string() == "101");
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        BitVector f = sample_uniform_vector(12, rng);
        CHECK(index_to_fragment(fragment_to_index(f), 12) == f);
    }
}

TEST_CASE("encoded fragments satisfy every stage check") {
    Rng rng(5);
    ParityProfile p = ParityProfile::from_parity(30, 4, 12, {4, 6, 8});
    TreeCodebook cb = TreeCodebook::sample(p, rng);
    for (int t = 0; t < 20; ++t) {
        BitVector w = sample_uniform_vector(30, rng);
        std::vector<BitVector> frags = encode(w, cb);
        for (int j = 1; j < p.n; ++j) CHECK(check_parity_stage(frags, cb, j));
        // flip a parity bit: the check at that stage must fail
        std::vector<BitVector> bad = frags;
        bad[2].flip(p.m[2]);
        CHECK(!check_parity_stage(bad, cb, 2));
    }
}

TEST_CASE("single-entry lists decode to the planted message") {
    Rng rng(9);
    ParityProfile p = ParityProfile::from_parity(30, 4, 12, {4, 6, 8});
    TreeCodebook cb = TreeCodebook::sample(p, rng);
    BitVector w = sample_uniform_vector(30, rng);
    std::vector<BitVector> frags = encode(w, cb);
    std::vector<std::vector<BitVector>> lists(p.n);
    for (int j = 0; j < p.n; ++j) lists[j] = {frags[j]};
    DecodeStats stats;
    std::vector<BitVector> rec = tree_decode(lists, cb, &stats);
    REQUIRE(rec.size() == 1);
    CHECK(rec[0] == w);
    CHECK(stats.decoded == 1);
    CHECK(stats.nodes_visited == p.n - 1);
    CHECK(stats.parity_checks == 4 + 6 + 8);
}

TEST_CASE("a zero-parity stage keeps every child") {
    Rng rng(12);
    ParityProfile p = ParityProfile::from_parity(24, 3, 10, {0, 6});
    TreeCodebook cb = TreeCodebook::sample(p, rng);
    std::vector<BitVector> frags = encode(sample_uniform_vector(24, rng), cb);
    std::vector<std::vector<BitVector>> lists(3);
    lists[0] = {frags[0]};
    lists[1] = {frags[1]};
    for (int d = 0; d < 7; ++d) lists[1].push_back(sample_uniform_vector(10, rng));
    lists[2] = {frags[2]};
    DecodeStats stats;
    tree_decode(lists, cb, &stats);
    CHECK(stats.survivors[1] == 8);  // nothing pruned at the l=0 stage
}

TEST_CASE("planted fragment collisions create ambiguity, never wrong output") {
    // two messages sharing their root fragment: the shared root sees two
    // surviving paths and must refuse to decode
    Rng rng(21);
    ParityProfile p = ParityProfile::from_parity(24, 3, 12, {6, 6});
    int ambiguous_seen = 0;
    for (int t = 0; t < 50; ++t) {
        Rng trng = rng.substream(t);
        TreeCodebook cb = TreeCodebook::sample(p, trng);
        BitVector w1 = sample_uniform_vector(24, trng);
        BitVector w2 = w1;
        for (std::size_t i = 12; i < 24; ++i) w2.set(i, trng.next_bit());
        if (w2 == w1) continue;
        std::vector<BitVector> f1 = encode(w1, cb), f2 = encode(w2, cb);
        REQUIRE(f1[0] == f2[0]);
        std::vector<std::vector<BitVector>> lists(3);
        lists[0] = {f1[0]};
        lists[1] = {f1[1], f2[1]};
        lists[2] = {f1[2], f2[2]};
        if (f1[1] == f2[1] || f1[2] == f2[2]) continue;
        DecodeStats stats;
        std::vector<BitVector> rec = tree_decode(lists, cb, &stats);
        CHECK(rec.empty());
        CHECK(stats.ambiguous == 1);
        ++ambiguous_seen;
    }
    CHECK(ambiguous_seen > 30);
}

TEST_CASE("full lists of encoded messages decode with small failure rate") {
    // five users, the wide profile of the reference operating point; failure
    // probability is bounded by E[L_10] for K = 5
    ParityProfile p =
        ParityProfile::from_parity(75, 11, 15, {6, 8, 8, 8, 8, 8, 8, 8, 13, 15});
    const int users = 5;
    const double bound = ptree_bound(users, {6, 8, 8, 8, 8, 8, 8, 8, 13, 15});
    const int draws = 1000;
    int failures = 0;
    Rng rng(33);
    for (int t = 0; t < draws; ++t) {
        Rng trng = rng.substream(t);
        TreeCodebook cb = TreeCodebook::sample(p, trng);
        std::vector<std::vector<BitVector>> lists(p.n);
        std::vector<BitVector> msgs;
        for (int u = 0; u < users; ++u) {
            msgs.push_back(sample_uniform_vector(75, trng));
            std::vector<BitVector> frags = encode(msgs.back(), cb);
            for (int j = 0; j < p.n; ++j) lists[j].push_back(frags[j]);
        }
        std::vector<BitVector> rec = tree_decode(lists, cb, nullptr);
        for (const BitVector& w : msgs) {
            bool found = false;
            for (const BitVector& r : rec) found = found || r == w;
            if (!found) ++failures;
        }
    }
    const double n = static_cast<double>(draws) * users;
    const double phat = failures / n;
    // per-user failure probability is at most `bound`
    CHECK(phat <= bound + 3.0 * std::sqrt(bound * (1.0 - bound) / n));
}

TEST_CASE("mean survivors track the exact analysis") {
    // small profile, fragments of K full messages on each list: mean
    // survivors at stage j estimates E[L_j] + 1
    ParityProfile p = ParityProfile::from_parity(16, 4, 7, {3, 4, 5});
    const int K = 6;
    const std::vector<int> m = {7, 4, 3, 2};
    const std::vector<int> l = {3, 4, 5};
    const std::vector<double> exact = expected_surviving_exact_series(K, m, l, 3);

    const int trials = 40000;
    std::vector<double> sum(3, 0.0), sq(3, 0.0);
    Rng rng(77);
    for (int t = 0; t < trials; ++t) {
        Rng trng = rng.substream(t);
        TreeCodebook cb = TreeCodebook::sample(p, trng);
        std::vector<std::vector<BitVector>> lists(p.n);
        for (int u = 0; u < K; ++u) {
            std::vector<BitVector> frags = encode(sample_uniform_vector(16, trng), cb);
            for (int j = 0; j < p.n; ++j) lists[j].push_back(frags[j]);
        }
        RootDecodeResult res = tree_decode_root(lists, cb, 0);
        for (int j = 1; j <= 3; ++j) {
            sum[j - 1] += res.survivors[j];
            sq[j - 1] += static_cast<double>(res.survivors[j]) * res.survivors[j];
        }
    }
    for (int j = 0; j < 3; ++j) {
        const double mean = sum[j] / trials;
        const double var = (sq[j] - sum[j] * sum[j] / trials) / (trials - 1);
        const double se = std::sqrt(var / trials);
        CHECK(std::abs(mean - (exact[j] + 1.0)) < 3.0 * se + 1e-9);
    }
}
