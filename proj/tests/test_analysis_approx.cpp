#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "ccs/analysis_approx.hpp"
#include "ccs/rng.hpp"
#include "doctest.h"

using namespace ccs;

TEST_CASE("closed form matches the recursion on random draws") {
    Rng rng(404);
    for (int t = 0; t < 1000; ++t) {
        const int K = 2 + static_cast<int>(rng.next_below(400));
        const int stages = 1 + static_cast<int>(rng.next_below(12));
        std::vector<int> l(stages);
        for (int& v : l) v = static_cast<int>(rng.next_below(16));
        const std::vector<double> a = expected_surviving_approx(K, l);
        const std::vector<double> b = expected_surviving_recursive(K, l);
        REQUIRE(a.size() == b.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double rel = std::abs(a[j] - b[j]) / std::max(1e-300, std::abs(b[j]));
            CHECK(rel <= 1e-10);
        }
    }
}

TEST_CASE("pinned survivor values") {
    // K = 2, l = (1, 1): E[L_2] = 1
    CHECK(expected_surviving_approx(2, {1, 1})[1] == doctest::Approx(1.0).epsilon(1e-12));
    // uniform allocation at the wide operating point
    const std::vector<int> uni(10, 9);
    CHECK(expected_surviving_approx(200, uni)[9] ==
          doctest::Approx(0.6378).epsilon(2e-4));
    // K = 1: a lone user never has erroneous companions
    for (double v : expected_surviving_approx(1, {2, 3})) CHECK(v == 0.0);
}

TEST_CASE("survivor counts shrink when parity grows") {
    const std::vector<double> weak = expected_surviving_approx(50, {4, 4, 4});
    const std::vector<double> strong = expected_surviving_approx(50, {8, 8, 8});
    for (int j = 0; j < 3; ++j) CHECK(strong[j] < weak[j]);
}

TEST_CASE("complexity formulas") {
    const std::vector<int> uni(10, 9);
    const double nodes = expected_complexity_nodes(200, uni);
    const double checks = expected_complexity_checks(200, uni);
    CHECK(nodes == doctest::Approx(3066.0).epsilon(5e-4));
    // uniform parity: every stage check costs 9 bits, so checks = 9 * nodes
    CHECK(checks == doctest::Approx(9.0 * nodes).epsilon(1e-12));
    CHECK(checks == doctest::Approx(27594.0).epsilon(5e-4));

    // one user, no pruning pressure: (n-1) K nodes exactly
    CHECK(expected_complexity_nodes(1, {3, 3, 3}) == doctest::Approx(3.0));
}

TEST_CASE("error probability composition") {
    CHECK(pe_compose(0.1, 0.01, 2) == doctest::Approx(0.11791).epsilon(1e-10));
    CHECK(pe_compose(0.0, 0.0, 5) == 0.0);
    CHECK(pe_compose(1.0, 0.0, 5) == 1.0);
    // the linear bound dominates the composition
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
        const double pt = rng.next_double() * 0.5;
        const double pc = rng.next_double() * 0.1;
        const int n = 1 + static_cast<int>(rng.next_below(12));
        CHECK(pe_compose(pt, pc, n) <= pe_upper_bound(pt, pc, n) + 1e-12);
    }
    CHECK_THROWS_AS(pe_compose(-0.1, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(pe_compose(0.1, 0.0, 0), std::invalid_argument);
}

TEST_CASE("asymptotic bounds") {
    // Ka = 16, n = 4, delta = 2, c1 = 2: P = (n - 1 + delta) log2 Ka = 20,
    // bound = 2^-8 + 1/15
    const double t = trailing_survivor_bound(16.0, 4, 20.0, 2.0);
    CHECK(t == doctest::Approx(1.0 / 256.0 + 1.0 / 15.0).epsilon(1e-12));
    CHECK(t == doctest::Approx(0.07057).epsilon(1e-3));

    CHECK(uniform_survivor_bound(100.0, 9) == doctest::Approx(100.0 / 412.0).epsilon(1e-12));
    CHECK_THROWS_AS(uniform_survivor_bound(600.0, 9), std::invalid_argument);

    // the uniform bound dominates the finite-n expectation
    for (int ka : {50, 100, 200})
        for (int l : {9, 12, 15}) {
            const std::vector<int> uni(10, l);
            CHECK(uniform_survivor_bound(ka, l) >=
                  expected_surviving_approx(ka, uni)[9]);
        }
}
