#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ccs/analysis_approx.hpp"
#include "ccs/analysis_exact.hpp"
#include "ccs/channel.hpp"
#include "ccs/csengine.hpp"
#include "ccs/parityopt.hpp"
#include "ccs/sim.hpp"

namespace {

constexpr int kExitBadConfig = 1;
constexpr int kExitInfeasible = 2;

std::vector<int> parse_alloc(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

void write_out(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw ccs::ConfigError("cannot open output file " + out_path);
    os << content;
}

ccs::SimConfig load_config(const std::string& path, std::uint64_t seed, int threads,
                           long trials) {
    ccs::SimConfig cfg = ccs::parse_config_file(path);
    if (seed != 0) cfg.seed = seed;
    if (threads > 0) cfg.threads = threads;
    if (trials > 0) cfg.trials = trials;
    cfg.validate();
    return cfg;
}

int run_simulate(const std::string& config, std::uint64_t seed, int threads, long trials,
                 const std::string& out) {
    ccs::CampaignResult r = ccs::run_campaign(load_config(config, seed, threads, trials));
    write_out(out, ccs::campaign_json(r));
    std::cerr << ccs::campaign_csv_header() << '\n' << ccs::campaign_csv_row(r) << '\n';
    return 0;
}

int run_sweep(const std::string& config, std::uint64_t seed, int threads, long trials,
              const std::vector<double>& ebn0s, const std::vector<int>& kas,
              const std::string& out) {
    ccs::SimConfig base = load_config(config, seed, threads, trials);
    std::ostringstream os;
    os << ccs::campaign_csv_header() << '\n';
    auto run_point = [&](ccs::SimConfig cfg) {
        os << ccs::campaign_csv_row(ccs::run_campaign(cfg)) << '\n';
    };
    if (!ebn0s.empty()) {
        for (double e : ebn0s) {
            ccs::SimConfig cfg = base;
            cfg.ebn0 = e;
            run_point(cfg);
        }
    } else if (!kas.empty()) {
        for (int ka : kas) {
            ccs::SimConfig cfg = base;
            cfg.ka = ka;
            run_point(cfg);
        }
    } else {
        run_point(base);
    }
    write_out(out, os.str());
    return 0;
}

int run_analyze_approx(int k, const std::string& alloc_s, const std::string& out) {
    const std::vector<int> l = parse_alloc(alloc_s);
    const std::vector<double> el = ccs::expected_surviving_approx(k, l);
    std::ostringstream os;
    os << "stage,expected_surviving\n";
    for (std::size_t j = 0; j < el.size(); ++j) os << (j + 1) << ',' << el[j] << '\n';
    os << "# expected_nodes = " << ccs::expected_complexity_nodes(k, l) << '\n';
    os << "# expected_checks = " << ccs::expected_complexity_checks(k, l) << '\n';
    write_out(out, os.str());
    return 0;
}

int run_analyze_exact(int k, const std::string& alloc_s, int jbits,
                      const std::string& out) {
    const std::vector<int> l = parse_alloc(alloc_s);
    const int n = static_cast<int>(l.size()) + 1;
    std::vector<int> m(n);
    m[0] = jbits;
    for (int j = 1; j < n; ++j) {
        m[j] = jbits - l[j - 1];
        if (m[j] < 0) throw ccs::ConfigError("alloc entry exceeds jbits");
    }
    const std::vector<double> el = ccs::expected_surviving_exact_series(k, m, l, n - 1);
    std::ostringstream os;
    os << "stage,expected_surviving\n";
    for (std::size_t j = 0; j < el.size(); ++j) os << (j + 1) << ',' << el[j] << '\n';
    write_out(out, os.str());
    return 0;
}

int run_optimize(int b, int n, int jbits, int k, double eps, const std::string& out) {
    ccs::OptProblem prob{b, n, jbits, k, eps};
    ccs::OptResult res = ccs::optimize_allocation(prob);
    if (!res.feasible) {
        std::cerr << "infeasible: no allocation meets the survivor constraint\n";
        return kExitInfeasible;
    }
    std::ostringstream os;
    os << "alloc=";
    for (std::size_t i = 0; i < res.l.size(); ++i) os << (i ? "," : "") << res.l[i];
    os << "\nobjective=" << res.objective << "\nsurvivors=" << res.survivors << '\n';
    write_out(out, os.str());
    return 0;
}

int run_export_matrix(const std::string& kind, int jbits, int rows, double es,
                      std::uint64_t seed, const std::string& out) {
    if (out.empty()) throw ccs::ConfigError("export-matrix requires --out");
    ccs::Rng rng(seed, 2);
    ccs::SensingMatrix a = ccs::SensingMatrix::sample(
        kind == "gaussian" ? ccs::MatrixKind::Gaussian : ccs::MatrixKind::Antipodal,
        static_cast<std::size_t>(rows), 1ull << jbits, es, rng);
    ccs::export_matrix(a, out);
    std::cerr << "wrote " << rows << " x " << (1ull << jbits) << " matrix to " << out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coded compressed sensing toolkit"};
    app.require_subcommand(1);

    std::string config, out, alloc_s, kind = "antipodal";
    std::uint64_t seed = 0;
    int threads = 0;
    long trials = 0;
    int k = 0, b = 0, n = 0, jbits = 0, rows = 0;
    double eps = 0.0, es = 1.0;
    std::vector<double> ebn0s;
    std::vector<int> kas;

    auto* sim = app.add_subcommand("simulate", "run one campaign from a config file");
    sim->add_option("--config", config)->required();
    sim->add_option("--seed", seed);
    sim->add_option("--threads", threads);
    sim->add_option("--trials", trials);
    sim->add_option("--out", out);

    auto* sweep = app.add_subcommand("sweep", "run campaigns over an Eb/N0 or Ka grid");
    sweep->add_option("--config", config)->required();
    sweep->add_option("--ebn0", ebn0s)->delimiter(',');
    sweep->add_option("--ka", kas)->delimiter(',');
    sweep->add_option("--seed", seed);
    sweep->add_option("--threads", threads);
    sweep->add_option("--trials", trials);
    sweep->add_option("--out", out);

    auto* aa = app.add_subcommand("analyze-approx", "survivor curve, distinct-fragment model");
    aa->add_option("--k", k)->required();
    aa->add_option("--alloc", alloc_s)->required();
    aa->add_option("--out", out);

    auto* ae = app.add_subcommand("analyze-exact", "survivor curve, exact pattern analysis");
    ae->add_option("--k", k)->required();
    ae->add_option("--alloc", alloc_s)->required();
    ae->add_option("--jbits", jbits)->required();
    ae->add_option("--threads", threads);
    ae->add_option("--out", out);

    auto* op = app.add_subcommand("optimize-parity", "parity allocation design");
    op->add_option("--b", b)->required();
    op->add_option("--n", n)->required();
    op->add_option("--jbits", jbits)->required();
    op->add_option("--k", k)->required();
    op->add_option("--eps", eps)->required();
    op->add_option("--out", out);

    auto* em = app.add_subcommand("export-matrix", "sample and write a sensing matrix");
    em->add_option("--kind", kind)->check(CLI::IsMember({"antipodal", "gaussian"}));
    em->add_option("--jbits", jbits)->required();
    em->add_option("--rows", rows)->required();
    em->add_option("--es", es);
    em->add_option("--seed", seed);
    em->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadConfig;
    }

    try {
        if (sim->parsed()) return run_simulate(config, seed, threads, trials, out);
        if (sweep->parsed()) return run_sweep(config, seed, threads, trials, ebn0s, kas, out);
        if (aa->parsed()) return run_analyze_approx(k, alloc_s, out);
        if (ae->parsed()) return run_analyze_exact(k, alloc_s, jbits, out);
        if (op->parsed()) return run_optimize(b, n, jbits, k, eps, out);
        if (em->parsed()) return run_export_matrix(kind, jbits, rows, es, seed, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadConfig;
    }
    return 0;
}
