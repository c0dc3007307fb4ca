#include "ccs/analysis_approx.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ccs {

namespace {

void check_args(int K, const std::vector<int>& l) {
    if (K < 1) throw std::invalid_argument("survivor analysis: K must be >= 1");
    for (int lj : l)
        if (lj < 0) throw std::invalid_argument("survivor analysis: l_j must be >= 0");
}

}  // namespace

std::vector<double> expected_surviving_approx(int K, const std::vector<int>& l) {
    check_args(K, l);
    const int stages = static_cast<int>(l.size());
    std::vector<double> out(stages, 0.0);
    if (K == 1) return out;
    const double lgK = std::log2(static_cast<double>(K));
    const double lgK1 = std::log2(static_cast<double>(K - 1));
    for (int j = 1; j <= stages; ++j) {
        double acc = 0.0;
        double lsum = 0.0;
        for (int q = j; q >= 1; --q) {
            lsum += l[q - 1];
            acc += std::exp2((j - q) * lgK + lgK1 - lsum);
        }
        out[j - 1] = acc;
    }
    return out;
}

std::vector<double> expected_surviving_recursive(int K, const std::vector<int>& l) {
    check_args(K, l);
    std::vector<double> out(l.size(), 0.0);
    double prev = 0.0;
    for (std::size_t j = 1; j <= l.size(); ++j) {
        const double p = std::exp2(-static_cast<double>(l[j - 1]));
        const double cur = (j == 1) ? (K - 1) * p : p * K * prev + p * (K - 1);
        out[j - 1] = cur;
        prev = cur;
    }
    return out;
}

double expected_complexity_nodes(int K, const std::vector<int>& l) {
    const std::vector<double> el = expected_surviving_approx(K, l);
    const int stages = static_cast<int>(l.size());
    double s = 0.0;
    for (int j = 1; j <= stages - 1; ++j) s += el[j - 1];
    return stages * static_cast<double>(K) + K * s;
}

double expected_complexity_checks(int K, const std::vector<int>& l) {
    const std::vector<double> el = expected_surviving_approx(K, l);
    const int stages = static_cast<int>(l.size());
    double s = std::accumulate(l.begin(), l.end(), 0.0);
    for (int j = 1; j <= stages - 1; ++j) s += l[j] * el[j - 1];
    return K * s;
}

double ptree_bound(int K, const std::vector<int>& l) {
    if (l.empty()) return 0.0;
    return expected_surviving_approx(K, l).back();
}

double pe_compose(double p_tree, double p_cs, int n) {
    if (p_tree < 0.0 || p_tree > 1.0 || p_cs < 0.0 || p_cs > 1.0 || n < 1)
        throw std::invalid_argument("pe_compose: probabilities in [0,1], n >= 1");
    return 1.0 - (1.0 - p_tree) * std::pow(1.0 - p_cs, n);
}

double pe_upper_bound(double p_tree, double p_cs, int n) {
    if (p_tree < 0.0 || p_cs < 0.0 || n < 1)
        throw std::invalid_argument("pe_upper_bound: probabilities >= 0, n >= 1");
    return n * p_cs + p_tree;
}

double trailing_survivor_bound(double ka, int n, double p_total, double c1) {
    if (ka <= 1.0 || n < 2 || c1 <= 1.0)
        throw std::invalid_argument("trailing_survivor_bound: need Ka > 1, n >= 2, c1 > 1");
    const double denom = std::pow(ka, c1 - 1.0) - 1.0;
    if (denom <= 0.0) throw std::invalid_argument("trailing_survivor_bound: Ka^(c1-1) <= 1");
    return std::exp2((n - 1) * std::log2(ka) - p_total) + 1.0 / denom;
}

double uniform_survivor_bound(double ka, int l) {
    const double cap = std::exp2(static_cast<double>(l));
    if (!(cap > ka)) throw std::invalid_argument("uniform_survivor_bound: requires 2^l > Ka");
    return ka / (cap - ka);
}

}  // namespace ccs
