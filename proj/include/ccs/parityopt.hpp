#pragma once

#include <string>
#include <vector>

namespace ccs {

/// Parity allocation design problem: choose l_1..l_{n-1} in [0, J] with
/// sum l_j = n J - B, minimizing the expected decode node count
/// (n-1) K + K sum_{j<=n-2} E[L_j] subject to E[L_{n-1}] <= eps_tree,
/// with E[L_j] the distinct-fragment approximation.
struct OptProblem {
    int B = 0;
    int n = 0;
    int J = 0;
    int K = 0;
    double eps_tree = 0.0;

    int budget() const { return n * J - B; }
    void validate() const;
};

struct AllocationEval {
    double survivors = 0.0;  // E[L_{n-1}]
    double objective = 0.0;  // expected node count
    bool feasible = false;
    std::string reason;
};

/// Evaluate an integer allocation against the constraint set.
AllocationEval evaluate_allocation(const OptProblem& prob, const std::vector<int>& l);

struct OptResult {
    bool feasible = false;
    std::vector<int> l;           // integer allocation (empty when infeasible)
    std::vector<double> relaxed;  // continuous solution of the relaxation
    double objective = 0.0;
    double survivors = 0.0;
};

/// Continuous relaxation by a log-barrier interior method, followed by
/// nearest-integer rounding with budget repair and a local exchange polish.
OptResult optimize_allocation(const OptProblem& prob);

}  // namespace ccs
