#include "ccs/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "ccs/channel.hpp"

namespace ccs {

int SimConfig::effective_rows() const {
    if (rows_per_slot > 0) return rows_per_slot;
    return static_cast<int>(std::ceil(3.0 * ka * j));
}

ParityProfile SimConfig::profile() const {
    return ParityProfile::from_parity(b, n, j, alloc);
}

void SimConfig::validate() const {
    try {
        profile();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (j > 24) throw ConfigError("config: j above 24 is not supported (2^j columns)");
    if (ka < 1) throw ConfigError("config: ka must be >= 1");
    if (kdelta < 0) throw ConfigError("config: kdelta must be >= 0");
    if (k_list == 0 || k_list < -1) throw ConfigError("config: k must be >= 1");
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
    if (sic_iterations < 0) throw ConfigError("config: sic_iterations must be >= 0");
    if (oracle_erasure_p < 0.0 || oracle_erasure_p > 1.0)
        throw ConfigError("config: oracle_erasure_p must be in [0, 1]");
    if (!oracle_cs) {
        if (effective_rows() < 1) throw ConfigError("config: rows_per_slot must be >= 1");
        if (matrix_kind != "antipodal" && matrix_kind != "gaussian")
            throw ConfigError("config: matrix_kind must be antipodal or gaussian");
        if (std::isnan(ebn0) && es <= 0.0)
            throw ConfigError("config: need es > 0 or ebn0_db");
        if (sigma2 < 0.0) throw ConfigError("config: sigma2 must be >= 0");
        if (nnls_tol <= 0.0 || nnls_max_iters < 1)
            throw ConfigError("config: nnls_tol > 0 and nnls_max_iters >= 1 required");
    }
    if (oracle_erasure_p > 0.0 && !oracle_cs)
        throw ConfigError("config: oracle_erasure_p requires oracle_cs = 1");
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& v, int line) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        try {
            std::size_t pos = 0;
            out.push_back(std::stoi(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("config line " + std::to_string(line) +
                              ": bad integer list entry '" + item + "'");
        }
    }
    return out;
}

template <typename T, typename F>
T parse_scalar(const std::string& v, int line, F conv) {
    try {
        std::size_t pos = 0;
        T out = conv(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line) + ": bad value '" + v + "'");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw ConfigError("config line " + std::to_string(line) + ": bad boolean '" + v + "'");
}

}  // namespace

SimConfig parse_config(std::istream& in) {
    SimConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty value");
        auto as_int = [&] {
            return parse_scalar<int>(val, lineno, [](const std::string& s, std::size_t* p) {
                return std::stoi(s, p);
            });
        };
        auto as_long = [&] {
            return parse_scalar<long>(val, lineno, [](const std::string& s, std::size_t* p) {
                return std::stol(s, p);
            });
        };
        auto as_double = [&] {
            return parse_scalar<double>(val, lineno, [](const std::string& s, std::size_t* p) {
                return std::stod(s, p);
            });
        };
        if (key == "b") cfg.b = as_int();
        else if (key == "n") cfg.n = as_int();
        else if (key == "j") cfg.j = as_int();
        else if (key == "alloc") cfg.alloc = parse_int_list(val, lineno);
        else if (key == "ka") cfg.ka = as_int();
        else if (key == "kdelta") cfg.kdelta = as_int();
        else if (key == "k") cfg.k_list = as_int();
        else if (key == "matrix_kind") cfg.matrix_kind = val;
        else if (key == "matrix_file") cfg.matrix_file = val;
        else if (key == "rows_per_slot") cfg.rows_per_slot = as_int();
        else if (key == "es") cfg.es = as_double();
        else if (key == "ebn0_db") cfg.ebn0 = as_double();
        else if (key == "sigma2") cfg.sigma2 = as_double();
        else if (key == "sic_iterations") cfg.sic_iterations = as_int();
        else if (key == "nnls_tol") cfg.nnls_tol = as_double();
        else if (key == "nnls_max_iters") cfg.nnls_max_iters = as_int();
        else if (key == "oracle_cs") cfg.oracle_cs = parse_bool(val, lineno);
        else if (key == "oracle_erasure_p") cfg.oracle_erasure_p = as_double();
        else if (key == "trials") cfg.trials = as_long();
        else if (key == "seed")
            cfg.seed = parse_scalar<std::uint64_t>(
                val, lineno,
                [](const std::string& s, std::size_t* p) { return std::stoull(s, p); });
        else if (key == "threads") cfg.threads = as_int();
        else
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
    }
    cfg.validate();
    return cfg;
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return parse_config(in);
}

namespace {

constexpr std::uint64_t kCodeTag = 0x636f6465;
constexpr std::uint64_t kMatrixTag = 0x6d617472;
constexpr std::uint64_t kTrialTag = 0x747269616cull;
constexpr std::uint64_t kListTag = 0x6c697374;
constexpr std::uint64_t kNoiseTag = 0x6e6f697365ull;

std::vector<BitVector> draw_distinct_messages(int count, int bits, Rng& rng) {
    std::set<BitVector> seen;
    std::vector<BitVector> out;
    while (static_cast<int>(out.size()) < count) {
        BitVector w = sample_uniform_vector(bits, rng);
        if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
}

std::vector<std::vector<BitVector>> dedupe_lists(std::vector<std::vector<BitVector>> lists) {
    for (auto& lst : lists) {
        std::sort(lst.begin(), lst.end());
        lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
    }
    return lists;
}

template <typename F>
void parallel_for(long count, int threads, F&& fn) {
    if (threads <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&] {
        for (;;) {
            const long i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int use = std::min<long>(threads, count);
    pool.reserve(use);
    for (int t = 0; t < use; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

TrialResult run_trial(const SimConfig& cfg, const TreeCodebook& cb,
                      const SensingMatrix* a, Rng rng) {
    const ParityProfile& p = cb.profile;
    const int K = cfg.effective_k();
    TrialResult tr;

    std::vector<BitVector> truth = draw_distinct_messages(cfg.ka, p.B(), rng);
    std::vector<std::vector<BitVector>> user_frags(cfg.ka);
    for (int u = 0; u < cfg.ka; ++u) user_frags[u] = encode(truth[u], cb);

    std::set<BitVector> recovered;
    DecodeStats stats;

    if (cfg.oracle_cs) {
        Rng lrng = rng.substream(kListTag);
        std::vector<std::vector<BitVector>> lists(p.n);
        for (int s = 0; s < p.n; ++s) {
            for (int u = 0; u < cfg.ka; ++u) {
                // an erased fragment is swapped for a fresh random one, so the
                // list size (and thus the interference level) stays put
                if (cfg.oracle_erasure_p > 0.0 &&
                    lrng.next_double() < cfg.oracle_erasure_p)
                    lists[s].push_back(sample_uniform_vector(p.J, lrng));
                else
                    lists[s].push_back(user_frags[u][s]);
            }
            for (int d = cfg.ka; d < K; ++d)
                lists[s].push_back(sample_uniform_vector(p.J, lrng));
        }
        for (const BitVector& w : tree_decode(dedupe_lists(std::move(lists)), cb, &stats))
            recovered.insert(w);
    } else {
        const std::size_t rows = a->rows();
        std::vector<std::vector<std::uint32_t>> slot_cols(p.n);
        for (int s = 0; s < p.n; ++s) {
            slot_cols[s].reserve(cfg.ka);
            for (int u = 0; u < cfg.ka; ++u)
                slot_cols[s].push_back(fragment_to_index(user_frags[u][s]));
        }
        std::vector<std::vector<double>> y(p.n);
        for (int s = 0; s < p.n; ++s) {
            Rng nrng = rng.substream(kNoiseTag + s);
            y[s] = awgn_observe(a->superimpose(slot_cols[s]), nrng, cfg.sigma2);
        }
        const NnlsOptions opt{cfg.nnls_tol, cfg.nnls_max_iters};

        auto decode_round = [&](const std::vector<std::vector<double>>& obs, int k) {
            std::vector<std::vector<BitVector>> lists(p.n);
            for (int s = 0; s < p.n; ++s) {
                NnlsResult diag;
                lists[s] = cs_decode_slot(*a, obs[s], k, opt, &diag).fragments;
                tr.cs_solves += 1;
                tr.cs_iters += diag.iters;
            }
            return tree_decode(lists, cb, &stats);
        };

        for (const BitVector& w : decode_round(y, K)) recovered.insert(w);

        for (int round = 0; round < cfg.sic_iterations; ++round) {
            const int kprime = cfg.ka - static_cast<int>(recovered.size()) + cfg.kdelta;
            if (kprime < 1) break;
            std::vector<std::uint32_t> rec_cols;
            std::vector<std::vector<double>> resid(p.n);
            for (int s = 0; s < p.n; ++s) resid[s] = y[s];
            for (const BitVector& w : recovered) {
                const std::vector<BitVector> frags = encode(w, cb);
                for (int s = 0; s < p.n; ++s) {
                    const float* colp = a->col(fragment_to_index(frags[s]));
                    for (std::size_t r = 0; r < rows; ++r) resid[s][r] -= colp[r];
                }
            }
            const std::size_t before = recovered.size();
            for (const BitVector& w : decode_round(resid, kprime)) recovered.insert(w);
            if (recovered.size() == before) break;
            tr.sic_rounds_used = round + 1;
        }
    }

    tr.recovered_total = static_cast<int>(recovered.size());
    tr.overflow = tr.recovered_total > cfg.ka;
    for (const BitVector& w : truth)
        if (recovered.count(w)) ++tr.recovered_true;
    tr.tree_checks = stats.parity_checks;
    return tr;
}

CampaignResult run_campaign(const SimConfig& cfg) {
    cfg.validate();
    CampaignResult out;
    out.cfg = cfg;
    out.trials = cfg.trials;

    Rng root(cfg.seed);
    Rng crng = root.substream(kCodeTag);
    const TreeCodebook cb = TreeCodebook::sample(cfg.profile(), crng);

    SensingMatrix a;
    double es = cfg.es;
    if (!cfg.oracle_cs) {
        const long long n_total =
            static_cast<long long>(cfg.effective_rows()) * cfg.n;
        if (!std::isnan(cfg.ebn0)) es = es_for_ebn0(cfg.ebn0, n_total, cfg.b);
        if (!cfg.matrix_file.empty()) {
            a = import_matrix(cfg.matrix_file);
            if (a.cols() != (1ull << cfg.j))
                throw ConfigError("config: matrix_file column count must be 2^j");
        } else {
            Rng mrng = root.substream(kMatrixTag);
            a = SensingMatrix::sample(
                cfg.matrix_kind == "gaussian" ? MatrixKind::Gaussian : MatrixKind::Antipodal,
                cfg.effective_rows(), 1ull << cfg.j, es, mrng);
        }
        out.es = es;
        out.ebn0_db = ebn0_db(es, n_total, cfg.b);
    }

    std::vector<TrialResult> results(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](long t) {
        Rng trng = root.substream(kTrialTag + static_cast<std::uint64_t>(t));
        results[t] = run_trial(cfg, cb, cfg.oracle_cs ? nullptr : &a, trng);
    });

    double miss_sum = 0.0, miss_sq = 0.0;
    long long checks = 0, solves = 0, iters = 0;
    for (const TrialResult& r : results) {
        const double f = static_cast<double>(cfg.ka - r.recovered_true) / cfg.ka;
        miss_sum += f;
        miss_sq += f * f;
        checks += r.tree_checks;
        solves += r.cs_solves;
        iters += r.cs_iters;
        if (r.overflow) ++out.overflow_trials;
    }
    out.pe = miss_sum / cfg.trials;
    if (cfg.trials > 1) {
        const double var =
            std::max(0.0, (miss_sq - miss_sum * miss_sum / cfg.trials) / (cfg.trials - 1));
        out.pe_stderr = std::sqrt(var / cfg.trials);
    }
    auto [lo, hi] = wilson_interval(miss_sum * cfg.ka, static_cast<double>(cfg.trials) * cfg.ka);
    out.ci_lo = lo;
    out.ci_hi = hi;
    out.mean_tree_checks = static_cast<double>(checks) / cfg.trials;
    out.mean_cs_iters = solves > 0 ? static_cast<double>(iters) / solves : 0.0;
    return out;
}

std::pair<double, double> wilson_interval(double hits, double n) {
    if (n <= 0.0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double phat = hits / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SurvivorCurve simulate_survivor_curve(const ParityProfile& profile, int K, long trials,
                                      std::uint64_t seed, int threads) {
    profile.validate();
    if (K < 1 || trials < 1)
        throw std::invalid_argument("survivor curve: K and trials must be >= 1");
    const int stages = profile.n - 1;
    SurvivorCurve curve;
    curve.trials = trials;
    curve.mean.assign(stages, 0.0);
    curve.std_error.assign(stages, 0.0);

    const int use = std::max(1, threads);
    std::vector<std::vector<double>> sums(use, std::vector<double>(stages, 0.0));
    std::vector<std::vector<double>> sqs(use, std::vector<double>(stages, 0.0));

    Rng root(seed);
    auto body = [&](long lo, long hi, int wid) {
        for (long t = lo; t < hi; ++t) {
            Rng trng = root.substream(kTrialTag + static_cast<std::uint64_t>(t));
            TreeCodebook cb = TreeCodebook::sample(profile, trng);
            std::vector<std::vector<BitVector>> lists(profile.n);
            for (int u = 0; u < K; ++u) {
                BitVector w = sample_uniform_vector(profile.B(), trng);
                std::vector<BitVector> frags = encode(w, cb);
                for (int s = 0; s < profile.n; ++s) lists[s].push_back(std::move(frags[s]));
            }
            RootDecodeResult res = tree_decode_root(lists, cb, 0);
            for (int j = 1; j <= stages; ++j) {
                const double v = static_cast<double>(res.survivors[j]);
                sums[wid][j - 1] += v;
                sqs[wid][j - 1] += v * v;
            }
        }
    };
    if (use == 1) {
        body(0, trials, 0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < use; ++w) {
            const long lo = trials * w / use, hi = trials * (w + 1) / use;
            pool.emplace_back(body, lo, hi, w);
        }
        for (auto& th : pool) th.join();
    }
    for (int j = 0; j < stages; ++j) {
        double s = 0.0, sq = 0.0;
        for (int w = 0; w < use; ++w) {
            s += sums[w][j];
            sq += sqs[w][j];
        }
        curve.mean[j] = s / trials;
        if (trials > 1) {
            const double var = std::max(0.0, (sq - s * s / trials) / (trials - 1));
            curve.std_error[j] = std::sqrt(var / trials);
        }
    }
    return curve;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

std::string campaign_csv_header() {
    return "ka,ebn0_db,trials,pe,ci_lo,ci_hi,mean_tree_checks,mean_cs_iters";
}

std::string campaign_csv_row(const CampaignResult& r) {
    std::ostringstream os;
    os << r.cfg.ka << ',' << (std::isnan(r.ebn0_db) ? "nan" : fmt(r.ebn0_db)) << ','
       << r.trials << ',' << fmt(r.pe) << ',' << fmt(r.ci_lo) << ',' << fmt(r.ci_hi) << ','
       << fmt(r.mean_tree_checks) << ',' << fmt(r.mean_cs_iters);
    return os.str();
}

std::string campaign_json(const CampaignResult& r) {
    std::ostringstream os;
    os.precision(12);
    os << "{\n"
       << "  \"ka\": " << r.cfg.ka << ",\n"
       << "  \"trials\": " << r.trials << ",\n"
       << "  \"pe\": " << r.pe << ",\n"
       << "  \"pe_stderr\": " << r.pe_stderr << ",\n"
       << "  \"ci_lo\": " << r.ci_lo << ",\n"
       << "  \"ci_hi\": " << r.ci_hi << ",\n"
       << "  \"mean_tree_checks\": " << r.mean_tree_checks << ",\n"
       << "  \"mean_cs_iters\": " << r.mean_cs_iters << ",\n"
       << "  \"overflow_trials\": " << r.overflow_trials << ",\n";
    if (std::isnan(r.ebn0_db))
        os << "  \"ebn0_db\": null,\n";
    else
        os << "  \"ebn0_db\": " << r.ebn0_db << ",\n";
    os << "  \"es\": " << r.es << ",\n"
       << "  \"seed\": " << r.cfg.seed << ",\n"
       << "  \"oracle_cs\": " << (r.cfg.oracle_cs ? "true" : "false") << "\n"
       << "}\n";
    return os.str();
}

}  // namespace ccs
