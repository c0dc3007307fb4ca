#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ccs/csengine.hpp"
#include "ccs/treecode.hpp"

namespace ccs {

/// Raised for malformed configuration (bad key, bad value, inconsistent
/// parameters). The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    // code
    int b = 40;
    int n = 6;
    int j = 10;
    std::vector<int> alloc;  // l_1..l_{n-1}

    // load
    int ka = 10;
    int kdelta = 10;
    int k_list = -1;  // list size K; -1 means ka + kdelta

    // channel and sensing matrix
    std::string matrix_kind = "antipodal";  // antipodal | gaussian
    std::string matrix_file;                // optional import, overrides kind
    int rows_per_slot = -1;                 // -1 means ceil(3 * ka * j)
    double es = 1.0;
    double ebn0 = std::numeric_limits<double>::quiet_NaN();  // dB; overrides es
    double sigma2 = 1.0;

    // decoder
    int sic_iterations = 0;
    double nnls_tol = 1e-6;
    int nnls_max_iters = 500;

    // oracle CS mode: lists are ground-truth fragments plus distractors,
    // with optional per-(user, slot) erasure
    bool oracle_cs = false;
    double oracle_erasure_p = 0.0;

    // campaign
    long trials = 100;
    std::uint64_t seed = 1;
    int threads = 1;

    int effective_k() const { return k_list > 0 ? k_list : ka + kdelta; }
    int effective_rows() const;
    void validate() const;
    ParityProfile profile() const;
};

/// Parse a flat key = value configuration (# starts a comment). Throws
/// ConfigError naming the offending line.
SimConfig parse_config(std::istream& in);
SimConfig parse_config_file(const std::string& path);

struct TrialResult {
    int recovered_true = 0;   // transmitted messages recovered
    int recovered_total = 0;  // size of the output set
    bool overflow = false;    // output larger than ka (flagged, not truncated)
    long long tree_checks = 0;
    long long cs_solves = 0;
    long long cs_iters = 0;
    int sic_rounds_used = 0;
};

TrialResult run_trial(const SimConfig& cfg, const TreeCodebook& cb,
                      const SensingMatrix* a, Rng rng);

struct CampaignResult {
    SimConfig cfg;
    long trials = 0;
    double pe = 0.0;      // missed messages / (trials * ka)
    double pe_stderr = 0.0;  // from per-trial miss fractions
    double ci_lo = 0.0, ci_hi = 0.0;  // Wilson 95%
    double mean_tree_checks = 0.0;
    double mean_cs_iters = 0.0;  // per NNLS solve; 0 in oracle mode
    long overflow_trials = 0;
    double es = 0.0;
    double ebn0_db = std::numeric_limits<double>::quiet_NaN();
};

CampaignResult run_campaign(const SimConfig& cfg);

/// Wilson 95% confidence interval for `hits` successes in `n` draws.
std::pair<double, double> wilson_interval(double hits, double n);

/// Mean tree-decoder survivors per stage for the root of a planted message,
/// lists holding the fragments of K iid uniform messages (codebook resampled
/// each trial). Index j holds stage j; the true path is included, so the
/// curve estimates E[L_j] + 1.
struct SurvivorCurve {
    std::vector<double> mean;
    std::vector<double> std_error;
    long trials = 0;
};

SurvivorCurve simulate_survivor_curve(const ParityProfile& profile, int K, long trials,
                                      std::uint64_t seed, int threads);

std::string campaign_csv_header();
std::string campaign_csv_row(const CampaignResult& r);
std::string campaign_json(const CampaignResult& r);

}  // namespace ccs
