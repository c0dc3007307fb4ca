#include "ccs/parityopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccs/analysis_approx.hpp"

namespace ccs {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

/// E[L_j] of the distinct-fragment approximation at a real-valued
/// allocation, plus gradients. All terms are positive exponentials of
/// linear functions of x, so everything below is smooth and convex.
struct Relaxation {
    int s;  // n - 1
    double lgK, lgK1;
    double K;

    explicit Relaxation(const OptProblem& p)
        : s(p.n - 1),
          lgK(std::log2(static_cast<double>(p.K))),
          lgK1(p.K > 1 ? std::log2(static_cast<double>(p.K - 1))
                       : -std::numeric_limits<double>::infinity()),
          K(p.K) {}

    // survivors[j-1] = E[L_j]; grad_terms[q-1][j-1] = term(q, j)
    void terms(const std::vector<double>& x, std::vector<std::vector<double>>& t) const {
        t.assign(s, std::vector<double>(s, 0.0));
        if (std::isinf(lgK1)) return;
        std::vector<double> pref(s + 1, 0.0);
        for (int i = 0; i < s; ++i) pref[i + 1] = pref[i] + x[i];
        for (int j = 1; j <= s; ++j)
            for (int q = 1; q <= j; ++q)
                t[q - 1][j - 1] = std::exp2((j - q) * lgK + lgK1 - (pref[j] - pref[q - 1]));
    }

    double survivors_last(const std::vector<std::vector<double>>& t) const {
        double g = 0.0;
        for (int q = 1; q <= s; ++q) g += t[q - 1][s - 1];
        return g;
    }

    // dE[L_last]/dx_k = -ln2 * sum_{q <= k} term(q, last)
    void survivors_last_grad(const std::vector<std::vector<double>>& t,
                             std::vector<double>& grad) const {
        grad.assign(s, 0.0);
        double run = 0.0;
        for (int k = 1; k <= s; ++k) {
            run += t[k - 1][s - 1];
            grad[k - 1] = -kLn2 * run;
        }
    }

    double objective(const std::vector<std::vector<double>>& t) const {
        double acc = s * K;
        for (int j = 1; j <= s - 1; ++j)
            for (int q = 1; q <= j; ++q) acc += K * t[q - 1][j - 1];
        return acc;
    }

    void objective_grad(const std::vector<std::vector<double>>& t,
                        std::vector<double>& grad) const {
        grad.assign(s, 0.0);
        for (int j = 1; j <= s - 1; ++j)
            for (int q = 1; q <= j; ++q)
                for (int k = q; k <= j; ++k) grad[k - 1] -= kLn2 * K * t[q - 1][j - 1];
    }
};

/// Euclidean projection onto { 0 <= x_i <= J, sum x_i = T }.
std::vector<double> project_capped_simplex(std::vector<double> y, double J, double T) {
    const int n = static_cast<int>(y.size());
    double lo = -J - 1.0, hi = J + 1.0;
    for (double v : y) {
        lo = std::min(lo, v - J - 1.0);
        hi = std::max(hi, v + 1.0);
    }
    for (int it = 0; it < 200; ++it) {
        const double tau = 0.5 * (lo + hi);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += std::clamp(y[i] - tau, 0.0, J);
        if (sum > T)
            lo = tau;
        else
            hi = tau;
    }
    const double tau = 0.5 * (lo + hi);
    for (int i = 0; i < n; ++i) y[i] = std::clamp(y[i] - tau, 0.0, J);
    return y;
}

/// Minimize E[L_{n-1}] over the allocation polytope by projected gradient.
/// Returns the minimizing point; used both for feasibility detection and as
/// an interior starting point.
std::vector<double> minimize_survivors(const OptProblem& p, const Relaxation& rel) {
    const int s = p.n - 1;
    const double T = p.budget();
    std::vector<double> x(s, T / s);
    std::vector<std::vector<double>> t;
    std::vector<double> grad;
    rel.terms(x, t);
    double g = rel.survivors_last(t);
    double step = 1.0;
    for (int it = 0; it < 4000; ++it) {
        rel.survivors_last_grad(t, grad);
        double gnorm = 0.0;
        for (double v : grad) gnorm += v * v;
        if (gnorm < 1e-30) break;
        bool moved = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> y(s);
            for (int i = 0; i < s; ++i) y[i] = x[i] - step * grad[i];
            y = project_capped_simplex(std::move(y), p.J, T);
            std::vector<std::vector<double>> t2;
            rel.terms(y, t2);
            const double g2 = rel.survivors_last(t2);
            if (g2 < g) {
                x = std::move(y);
                t = std::move(t2);
                g = g2;
                step *= 2.0;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
    return x;
}

struct BarrierEval {
    double f = 0.0, g = 0.0, value = 0.0;
    bool interior = false;
};

BarrierEval barrier_value(const OptProblem& p, const Relaxation& rel,
                          const std::vector<double>& x, double mu) {
    BarrierEval e;
    std::vector<std::vector<double>> t;
    rel.terms(x, t);
    e.g = rel.survivors_last(t);
    e.f = rel.objective(t);
    const double slack = p.eps_tree - e.g;
    if (slack <= 0.0) return e;
    double phi = -std::log(slack);
    for (double xi : x) {
        if (xi <= 0.0 || xi >= p.J) return e;
        phi -= std::log(xi) + std::log(p.J - xi);
    }
    e.interior = true;
    e.value = e.f + mu * phi;
    return e;
}

std::vector<double> barrier_grad(const OptProblem& p, const Relaxation& rel,
                                 const std::vector<double>& x, double mu) {
    const int s = p.n - 1;
    std::vector<std::vector<double>> t;
    rel.terms(x, t);
    const double slack = p.eps_tree - rel.survivors_last(t);
    std::vector<double> gf, gg;
    rel.objective_grad(t, gf);
    rel.survivors_last_grad(t, gg);
    std::vector<double> grad(s);
    for (int i = 0; i < s; ++i)
        grad[i] = gf[i] + mu * (gg[i] / slack - 1.0 / x[i] + 1.0 / (p.J - x[i]));
    // restrict to the budget hyperplane
    double mean = 0.0;
    for (double v : grad) mean += v;
    mean /= s;
    for (double& v : grad) v -= mean;
    return grad;
}

std::vector<double> solve_barrier(const OptProblem& p, const Relaxation& rel,
                                  std::vector<double> x0) {
    const int s = p.n - 1;
    std::vector<double> x = std::move(x0);
    const int n_constraints = 2 * s + 1;
    // the barrier starts on the objective's scale, then decays until the gap
    // proxy mu * #constraints is negligible against the objective
    double mu = std::max(1.0, std::abs(barrier_value(p, rel, x, 0.0).f)) / n_constraints;
    for (int outer = 0; outer < 400; ++outer) {
        BarrierEval cur = barrier_value(p, rel, x, mu);
        double step = 0.25;
        for (int inner = 0; inner < 2000; ++inner) {
            std::vector<double> grad = barrier_grad(p, rel, x, mu);
            double gnorm = 0.0;
            for (double v : grad) gnorm += v * v;
            gnorm = std::sqrt(gnorm);
            if (gnorm < 1e-12 * std::max(1.0, std::abs(cur.value))) break;
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt) {
                std::vector<double> y(s);
                for (int i = 0; i < s; ++i) y[i] = x[i] - step * grad[i] / gnorm;
                BarrierEval e = barrier_value(p, rel, y, mu);
                if (e.interior && e.value < cur.value - 1e-14 * std::abs(cur.value)) {
                    x = std::move(y);
                    cur = e;
                    step = std::min(step * 2.0, 4.0);
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        if (mu * n_constraints < 1e-8 * std::max(1.0, std::abs(cur.f))) break;
        mu *= 0.5;
    }
    return x;
}

}  // namespace

void OptProblem::validate() const {
    if (n < 2 || J < 1 || K < 1 || B < 1)
        throw std::invalid_argument("optimize: need n >= 2, J >= 1, K >= 1, B >= 1");
    if (budget() < 1 || budget() > (n - 1) * J)
        throw std::invalid_argument("optimize: parity budget outside [1, (n-1)J]");
    if (eps_tree <= 0.0)
        throw std::invalid_argument("optimize: eps_tree must be positive");
}

AllocationEval evaluate_allocation(const OptProblem& prob, const std::vector<int>& l) {
    prob.validate();
    AllocationEval e;
    if (static_cast<int>(l.size()) != prob.n - 1) {
        e.reason = "allocation needs n-1 entries";
        return e;
    }
    int sum = 0;
    for (int v : l) {
        if (v < 0 || v > prob.J) {
            e.reason = "allocation entry outside [0, J]";
            return e;
        }
        sum += v;
    }
    e.survivors = ptree_bound(prob.K, l);
    e.objective = expected_complexity_nodes(prob.K, l);
    if (sum != prob.budget()) {
        e.reason = "allocation does not meet the parity budget";
        return e;
    }
    if (e.survivors > prob.eps_tree) {
        e.reason = "survivor constraint violated";
        return e;
    }
    e.feasible = true;
    return e;
}

OptResult optimize_allocation(const OptProblem& prob) {
    prob.validate();
    const int s = prob.n - 1;
    const int T = prob.budget();
    OptResult res;

    auto finish_integer = [&](std::vector<int> l) {
        // exchange polish: move single parity bits between stages while the
        // constraint holds and the objective improves
        auto eval = [&](const std::vector<int>& a) {
            return std::pair<double, double>{ptree_bound(prob.K, a),
                                             expected_complexity_nodes(prob.K, a)};
        };
        auto [g, f] = eval(l);
        // repair toward feasibility first
        for (int pass = 0; pass < 16 * s * s && g > prob.eps_tree; ++pass) {
            double best_g = g;
            int ba = -1, bb = -1;
            for (int a = 0; a < s; ++a) {
                if (l[a] >= prob.J) continue;
                for (int b = 0; b < s; ++b) {
                    if (b == a || l[b] <= 0) continue;
                    ++l[a], --l[b];
                    const double g2 = ptree_bound(prob.K, l);
                    if (g2 < best_g) {
                        best_g = g2;
                        ba = a;
                        bb = b;
                    }
                    --l[a], ++l[b];
                }
            }
            if (ba < 0) break;
            ++l[ba], --l[bb];
            g = best_g;
        }
        if (g > prob.eps_tree) return false;
        f = expected_complexity_nodes(prob.K, l);
        for (int pass = 0; pass < 16 * s * s; ++pass) {
            double best_f = f;
            int ba = -1, bb = -1;
            for (int a = 0; a < s; ++a) {
                if (l[a] >= prob.J) continue;
                for (int b = 0; b < s; ++b) {
                    if (b == a || l[b] <= 0) continue;
                    ++l[a], --l[b];
                    if (ptree_bound(prob.K, l) <= prob.eps_tree) {
                        const double f2 = expected_complexity_nodes(prob.K, l);
                        if (f2 < best_f - 1e-9) {
                            best_f = f2;
                            ba = a;
                            bb = b;
                        }
                    }
                    --l[a], ++l[b];
                }
            }
            if (ba < 0) break;
            ++l[ba], --l[bb];
            f = best_f;
        }
        res.feasible = true;
        res.l = std::move(l);
        res.objective = f;
        res.survivors = ptree_bound(prob.K, res.l);
        return true;
    };

    if (T == 0 || T == s * prob.J) {
        std::vector<int> l(s, T == 0 ? 0 : prob.J);
        res.relaxed.assign(s, static_cast<double>(l[0]));
        if (ptree_bound(prob.K, l) <= prob.eps_tree) finish_integer(std::move(l));
        return res;
    }

    const Relaxation rel(prob);

    // feasibility of the relaxation
    std::vector<double> x_min = minimize_survivors(prob, rel);
    std::vector<std::vector<double>> t;
    rel.terms(x_min, t);
    const double g_min = rel.survivors_last(t);
    if (g_min > prob.eps_tree) {
        res.relaxed = x_min;
        return res;
    }

    // strictly interior start: walk from the uniform point toward the
    // survivor minimizer just far enough that the constraint holds with
    // margin; that keeps the starting objective moderate
    const double center = static_cast<double>(T) / s;
    auto blend = [&](double alpha) {
        std::vector<double> y(s);
        for (int i = 0; i < s; ++i)
            y[i] = (1.0 - alpha) * center + alpha * x_min[i];
        return y;
    };
    auto survivors_at = [&](const std::vector<double>& y) {
        std::vector<std::vector<double>> ty;
        rel.terms(y, ty);
        return rel.survivors_last(ty);
    };
    const double target = prob.eps_tree * 0.9;
    double alpha = 0.0;
    if (survivors_at(blend(0.0)) > target) {
        double lo = 0.0, hi = 1.0;  // survivors decrease toward x_min
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (survivors_at(blend(mid)) > target)
                lo = mid;
            else
                hi = mid;
        }
        alpha = hi;
    }
    std::vector<double> x0 = blend(alpha);
    bool strict = survivors_at(x0) < prob.eps_tree;
    for (double v : x0) strict = strict && v > 0.0 && v < prob.J;
    if (!strict) {
        // fall back to the survivor minimizer nudged off the box boundary
        for (double a = 1e-6; a <= 0.5; a *= 4.0) {
            std::vector<double> y(s);
            for (int i = 0; i < s; ++i) y[i] = (1.0 - a) * x_min[i] + a * center;
            bool ok = survivors_at(y) < prob.eps_tree;
            for (double v : y) ok = ok && v > 0.0 && v < prob.J;
            if (ok) {
                x0 = std::move(y);
                break;
            }
        }
    }

    std::vector<double> x = solve_barrier(prob, rel, x0);
    res.relaxed = x;

    std::vector<int> l(s);
    int sum = 0;
    for (int i = 0; i < s; ++i) {
        l[i] = static_cast<int>(std::lround(x[i]));
        l[i] = std::clamp(l[i], 0, prob.J);
        sum += l[i];
    }
    // restore the budget one bit at a time, taking the move that keeps the
    // survivor constraint slackest
    while (sum != T) {
        const int dir = sum < T ? 1 : -1;
        int best = -1;
        double best_g = std::numeric_limits<double>::infinity();
        for (int i = 0; i < s; ++i) {
            const int v = l[i] + dir;
            if (v < 0 || v > prob.J) continue;
            l[i] = v;
            const double g = ptree_bound(prob.K, l);
            if (g < best_g) {
                best_g = g;
                best = i;
            }
            l[i] = v - dir;
        }
        if (best < 0) return res;  // box saturated, cannot meet budget
        l[best] += dir;
        sum += dir;
    }
    finish_integer(std::move(l));
    return res;
}

}  // namespace ccs
