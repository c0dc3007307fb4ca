#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <sstream>

#include "ccs/analysis_approx.hpp"
#include "ccs/sim.hpp"
#include "doctest.h"

using namespace ccs;

namespace {

SimConfig tiny_config() {
    // heavy parity (E[L_2] ~ 1e-3) so tree ambiguity is negligible here
    SimConfig cfg;
    cfg.b = 12;
    cfg.n = 3;
    cfg.j = 10;
    cfg.alloc = {8, 10};
    cfg.ka = 2;
    cfg.kdelta = 2;
    cfg.rows_per_slot = 48;
    cfg.sigma2 = 0.0;
    cfg.trials = 30;
    cfg.seed = 7;
    return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
    std::istringstream in(
        "b = 40\n"
        "n = 6\n"
        "j = 10          # fragment width\n"
        "alloc = 2,4,4,4,6\n"
        "\n"
        "ka = 10\n"
        "kdelta = 5\n"
        "ebn0_db = 7.5\n"
        "oracle_cs = true\n"
        "trials = 250\n"
        "seed = 42\n");
    SimConfig cfg = parse_config(in);
    CHECK(cfg.b == 40);
    CHECK(cfg.alloc == std::vector<int>{2, 4, 4, 4, 6});
    CHECK(cfg.kdelta == 5);
    CHECK(cfg.effective_k() == 15);
    CHECK(cfg.ebn0 == doctest::Approx(7.5));
    CHECK(cfg.oracle_cs);
    CHECK(cfg.trials == 250);
    CHECK(cfg.seed == 42);
    // defaults survive when keys are absent
    CHECK(cfg.effective_rows() == 300);
    CHECK(cfg.sic_iterations == 0);
}

TEST_CASE("config errors name the offending line") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_WITH_AS(parse("b = 40\nbogus_key = 3\n"),
                         doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("b = forty\n"), doctest::Contains("line 1"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("b 40\n"), doctest::Contains("line 1"), ConfigError);
    CHECK_THROWS_AS(parse("trials = -5\n"), ConfigError);
    // structurally inconsistent: alloc does not leave sum(m) = b
    SimConfig cfg = tiny_config();
    cfg.alloc = {8, 9};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = tiny_config();
    cfg.matrix_kind = "banded";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(parse_config_file("no_such_config.cfg"), ConfigError);
}

TEST_CASE("campaigns with the same seed agree exactly") {
    SimConfig cfg = tiny_config();
    CampaignResult r1 = run_campaign(cfg);
    CampaignResult r2 = run_campaign(cfg);
    CHECK(campaign_csv_row(r1) == campaign_csv_row(r2));
    CHECK(r1.pe == r2.pe);
    CHECK(r1.mean_tree_checks == r2.mean_tree_checks);
    CHECK(r1.mean_cs_iters == r2.mean_cs_iters);

    cfg.threads = 4;
    CampaignResult r4 = run_campaign(cfg);
    // threading only partitions trials, it must not change any result
    CHECK(campaign_csv_row(r4) == campaign_csv_row(r1));

    cfg.threads = 1;
    cfg.seed = 8;
    CampaignResult r3 = run_campaign(cfg);
    CHECK(campaign_csv_row(r3) != campaign_csv_row(r1));
}

TEST_CASE("noiseless matrix-mode trials recover every message") {
    SimConfig cfg = tiny_config();
    CampaignResult r = run_campaign(cfg);
    CHECK(r.pe == 0.0);
    CHECK(r.overflow_trials == 0);
    CHECK(r.mean_cs_iters > 0.0);
    CHECK(r.ci_lo < 1e-12);
    CHECK(r.ci_hi < 0.15);
}

TEST_CASE("oracle mode misses only through tree ambiguity") {
    SimConfig cfg = tiny_config();
    cfg.oracle_cs = true;
    cfg.b = 30;
    cfg.n = 4;
    cfg.j = 12;
    cfg.alloc = {4, 6, 8};
    cfg.ka = 6;
    cfg.kdelta = 6;
    cfg.trials = 400;
    CampaignResult r = run_campaign(cfg);
    // lists are exact, so the miss rate is bounded by E[L_{n-1}] at K = 12
    const double bound = ptree_bound(cfg.effective_k(), cfg.alloc);
    CHECK(r.pe <= bound + 3.0 * r.pe_stderr);
    CHECK(r.mean_cs_iters == 0.0);  // no NNLS solves in oracle mode
    CHECK(r.mean_tree_checks > 0.0);
}

TEST_CASE("oracle erasures compose with the tree loss") {
    SimConfig cfg = tiny_config();
    cfg.oracle_cs = true;
    cfg.b = 30;
    cfg.n = 4;
    cfg.j = 12;
    cfg.alloc = {4, 6, 8};
    cfg.ka = 6;
    cfg.kdelta = 6;
    cfg.trials = 5000;
    cfg.threads = 4;
    // calibrate the tree loss with the same codebook and no erasures
    CampaignResult clean = run_campaign(cfg);
    cfg.oracle_erasure_p = 0.05;
    CampaignResult r = run_campaign(cfg);
    const double want = pe_compose(clean.pe, 0.05, cfg.n);
    const double sigma = std::sqrt(r.pe_stderr * r.pe_stderr +
                                   clean.pe_stderr * clean.pe_stderr);
    CHECK(std::abs(r.pe - want) < 4.0 * sigma + 1e-4);
    CHECK(r.ci_lo <= r.pe);
    CHECK(r.pe <= r.ci_hi);
}

TEST_CASE("sic recovers a user the first pass misses") {
    // two users, list size 1: the first pass can hold only the stronger
    // hypothesis per slot, the second pass decodes the remaining user from
    // the cleaned observation
    SimConfig cfg = tiny_config();
    cfg.ka = 2;
    cfg.kdelta = 0;
    cfg.k_list = 1;
    cfg.rows_per_slot = 96;
    cfg.sic_iterations = 2;
    cfg.trials = 40;
    CampaignResult with_sic = run_campaign(cfg);
    cfg.sic_iterations = 0;
    CampaignResult without = run_campaign(cfg);
    CHECK(without.pe >= 0.45);          // one of two users always missing at best
    CHECK(with_sic.pe < without.pe);    // cleanup passes recover the rest
    CHECK(with_sic.pe < 0.10);
}

TEST_CASE("wilson interval") {
    auto [lo, hi] = wilson_interval(0.0, 100.0);
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(0.0370).epsilon(1e-2));
    auto [lo2, hi2] = wilson_interval(50.0, 100.0);
    CHECK(lo2 == doctest::Approx(0.404).epsilon(1e-2));
    CHECK(hi2 == doctest::Approx(0.596).epsilon(1e-2));
    CHECK(lo2 < 0.5);
    CHECK(hi2 > 0.5);
    auto [lo3, hi3] = wilson_interval(100.0, 100.0);
    CHECK(hi3 == 1.0);
    CHECK(lo3 > 0.9);
}

TEST_CASE("csv shape") {
    CHECK(campaign_csv_header() ==
          "ka,ebn0_db,trials,pe,ci_lo,ci_hi,mean_tree_checks,mean_cs_iters");
    SimConfig cfg = tiny_config();
    CampaignResult r = run_campaign(cfg);
    const std::string row = campaign_csv_row(r);
    int commas = 0;
    for (char c : row) commas += c == ',';
    CHECK(commas == 7);
    CHECK(row.substr(0, 2) == "2,");
    const std::string js = campaign_json(r);
    CHECK(js.find("\"pe\"") != std::string::npos);
    CHECK(js.find("\"trials\": 30") != std::string::npos);
}

TEST_CASE("survivor curve shape and determinism") {
    ParityProfile p = ParityProfile::from_parity(8, 3, 6, {4, 6});
    SurvivorCurve a = simulate_survivor_curve(p, 4, 2000, 11, 3);
    SurvivorCurve b = simulate_survivor_curve(p, 4, 2000, 11, 1);
    REQUIRE(a.mean.size() == 2);
    CHECK(a.trials == 2000);
    for (std::size_t j = 0; j < a.mean.size(); ++j) {
        CHECK(a.mean[j] == b.mean[j]);  // thread count must not matter
        CHECK(a.mean[j] >= 1.0);        // the planted path always survives
        CHECK(a.std_error[j] >= 0.0);
    }
}
