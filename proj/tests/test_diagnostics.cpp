#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "repohealth/diagnostics.hpp"
#include "repohealth/rng.hpp"

using namespace repohealth;

namespace {

std::vector<std::vector<double>> iid_normal_chains(int m, int n, std::uint64_t seed) {
    std::vector<std::vector<double>> chains(m);
    for (int c = 0; c < m; ++c) {
        Rng rng(seed + static_cast<std::uint64_t>(c) * 1000);
        chains[c].resize(n);
        for (auto& v : chains[c]) v = rng.normal();
    }
    return chains;
}

// AR(1) with autocorrelation rho has integrated time (1+rho)/(1-rho).
std::vector<std::vector<double>> ar1_chains(int m, int n, double rho, std::uint64_t seed) {
    std::vector<std::vector<double>> chains(m);
    const double innovation = std::sqrt(1.0 - rho * rho);
    for (int c = 0; c < m; ++c) {
        Rng rng(seed + static_cast<std::uint64_t>(c) * 977);
        chains[c].resize(n);
        double x = rng.normal();
        for (int i = 0; i < n; ++i) {
            x = rho * x + innovation * rng.normal();
            chains[c][i] = x;
        }
    }
    return chains;
}

}  // namespace

TEST_CASE("iid chains pass the convergence gate") {
    auto chains = iid_normal_chains(4, 3000, 11);
    auto d = diagnose(chains);
    CHECK(d.rhat > 0.99);
    CHECK(d.rhat < 1.01);
    CHECK(d.ess > 0.7 * 12000.0);
    CHECK(d.mcse < 0.02);
    CHECK_FALSE(d.degenerate);
}

TEST_CASE("ess tracks the analytic autocorrelation time of an AR(1) process") {
    const double rho = 0.6;
    auto chains = ar1_chains(4, 20000, rho, 5);
    auto d = diagnose(chains);
    const double tau = (1.0 + rho) / (1.0 - rho);  // = 4
    const double expected = 4.0 * 20000.0 / tau;
    CHECK(d.ess > 0.8 * expected);
    CHECK(d.ess < 1.25 * expected);
}

TEST_CASE("duplicated identical chains look mixed because duplication is invisible within chains") {
    // within-chain autocorrelation cannot see across-chain duplication, and
    // split means agree, so neither penalty triggers; ESS stays at the scale
    // of the total draw count
    Rng rng(42);
    std::vector<double> base(3000);
    for (auto& v : base) v = rng.normal();
    std::vector<std::vector<double>> chains(4, base);
    auto d = diagnose(chains);
    CHECK(d.rhat < 1.01);
    CHECK(d.ess >= 3000.0);  // at least the draws of one chain
    CHECK(d.mcse < 0.02);
}

TEST_CASE("constant draws are flagged degenerate with zero ess") {
    std::vector<std::vector<double>> chains(4, std::vector<double>(500, 1.25));
    auto d = diagnose(chains);
    CHECK(d.degenerate);
    CHECK(d.ess == 0.0);
}

TEST_CASE("separated chains blow up rhat") {
    auto chains = iid_normal_chains(4, 1000, 3);
    for (auto& v : chains[0]) v += 10.0;  // one chain stuck elsewhere
    auto d = diagnose(chains);
    CHECK(d.rhat > 1.5);
}

TEST_CASE("mcse is the posterior sd over the square root of ess") {
    auto chains = ar1_chains(4, 5000, 0.4, 17);
    auto d = diagnose(chains);
    std::vector<double> pooled;
    for (const auto& c : chains) {
        std::size_t half = c.size() / 2;
        pooled.insert(pooled.end(), c.begin(), c.begin() + 2 * half);
    }
    double mean = 0.0;
    for (double v : pooled) mean += v;
    mean /= static_cast<double>(pooled.size());
    double var = 0.0;
    for (double v : pooled) var += (v - mean) * (v - mean);
    var /= static_cast<double>(pooled.size() - 1);
    CHECK(d.mcse == Catch::Approx(std::sqrt(var) / std::sqrt(d.ess)).epsilon(1e-9));
}

TEST_CASE("diagnostics require at least two chains") {
    std::vector<std::vector<double>> one(1, std::vector<double>(100, 0.0));
    CHECK_THROWS_AS(diagnose(one), RepoHealthError);
}
