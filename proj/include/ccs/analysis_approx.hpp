#pragma once

#include <vector>

namespace ccs {

/// Expected erroneous surviving paths under the approximation that all list
/// fragments are distinct: for each stage j in [1, n-1],
///   E[L_j] = sum_{q=1..j} K^(j-q) (K-1) prod_{t=q..j} 2^(-l_t).
/// `l` holds the parity allocation l_1..l_{n-1}. Evaluated in log2 space so
/// large K and parity budgets stay finite.
std::vector<double> expected_surviving_approx(int K, const std::vector<int>& l);

/// Same quantity through the equivalent recursion
///   E[L_1] = (K-1) p_1,  E[L_j] = p_j K E[L_{j-1}] + p_j (K-1),
/// with p_j = 2^(-l_j). Kept as an independent route for cross-checking.
std::vector<double> expected_surviving_recursive(int K, const std::vector<int>& l);

/// Expected tree decoder node visits per root times K:
///   (n-1) K + K sum_{j=1..n-2} E[L_j].
double expected_complexity_nodes(int K, const std::vector<int>& l);

/// Expected parity bits evaluated per root:
///   K ( sum_j l_j + sum_{j=1..n-2} l_{j+1} E[L_j] ).
double expected_complexity_checks(int K, const std::vector<int>& l);

/// Markov bound on the tree error probability: p_tree <= E[L_{n-1}].
double ptree_bound(int K, const std::vector<int>& l);

/// Per-user error probability when a message is lost if any of its n
/// fragments is missed by CS (prob p_cs each, independent) or the tree stage
/// fails (prob p_tree): 1 - (1 - p_tree)(1 - p_cs)^n.
double pe_compose(double p_tree, double p_cs, int n);

/// First-order upper bound n p_cs + p_tree.
double pe_upper_bound(double p_tree, double p_cs, int n);

/// Asymptotic bound for a trailing parity profile with total parity
/// P = (n - 1 + delta) log2(Ka) and growth exponent c1:
///   E[L_{n-1}] <= 2^((n-1) log2 Ka - P) + 1 / (Ka^(c1 - 1) - 1).
double trailing_survivor_bound(double ka, int n, double p_total, double c1);

/// Asymptotic bound for the uniform profile l_j = l (requires 2^l > Ka):
///   E[L_{n-1}] <= Ka / (2^l - Ka).
double uniform_survivor_bound(double ka, int l);

}  // namespace ccs
