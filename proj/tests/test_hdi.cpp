#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "repohealth/hdi.hpp"
#include "repohealth/rng.hpp"

using namespace repohealth;

namespace {

// Exhaustive narrowest-window search over the sorted samples.
Hdi oracle_hdi(std::vector<double> samples, double mass) {
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    auto k = static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n) - 1e-9));
    k = std::min(std::max<std::size_t>(k, 1), n);
    double best_width = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (std::size_t i = 0; i + k <= n; ++i) {
        double width = samples[i + k - 1] - samples[i];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    return {samples[best], samples[best + k - 1], mass};
}

}  // namespace

TEST_CASE("hdi of constant samples is degenerate") {
    std::vector<double> samples(200, 3.5);
    auto h = hdi(samples);
    CHECK(h.low == 3.5);
    CHECK(h.high == 3.5);
}

TEST_CASE("hdi enforces its sample-count precondition") {
    std::vector<double> few(99, 1.0);
    CHECK_THROWS_AS(hdi(few), RepoHealthError);
    CHECK_THROWS_AS(hdi(std::vector<double>(200, 0.0), 1.5), RepoHealthError);
}

TEST_CASE("hdi equals the exhaustive search on distinct sorted samples") {
    std::vector<double> samples;
    for (int i = 0; i < 1000; ++i) samples.push_back(std::sqrt(static_cast<double>(i)));
    auto got = hdi(samples, 0.95);
    auto want = oracle_hdi(samples, 0.95);
    CHECK(got.low == want.low);
    CHECK(got.high == want.high);
}

TEST_CASE("hdi equals the exhaustive search on random sample sets") {
    Rng rng(20240517);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 100 + rng.index(901);  // up to 1000
        double mass = 0.5 + 0.49 * rng.uniform01();
        std::vector<double> samples(n);
        for (auto& s : samples) {
            // a mix of shapes: normal, exponential, bimodal
            switch (trial % 3) {
                case 0: s = rng.normal(); break;
                case 1: s = rng.exponential(); break;
                default: s = rng.normal() + (rng.uniform01() < 0.3 ? 6.0 : 0.0); break;
            }
        }
        auto got = hdi(samples, mass);
        auto want = oracle_hdi(samples, mass);
        CHECK(got.low == want.low);
        CHECK(got.high == want.high);
    }
}

TEST_CASE("hdi of a skewed sample beats the equal-tailed interval") {
    Rng rng(7);
    std::vector<double> samples(5000);
    for (auto& s : samples) s = rng.exponential();
    auto h = hdi(samples, 0.95);
    std::sort(samples.begin(), samples.end());
    double lo_q = samples[static_cast<std::size_t>(0.025 * 5000)];
    double hi_q = samples[static_cast<std::size_t>(0.975 * 5000) - 1];
    CHECK(h.high - h.low < hi_q - lo_q);
    CHECK(h.low <= samples[10]);  // the mode of an exponential sits at zero
}

TEST_CASE("no strictly narrower covering window exists") {
    Rng rng(99);
    std::vector<double> samples(600);
    for (auto& s : samples) s = rng.normal();
    auto h = hdi(samples, 0.95);
    std::sort(samples.begin(), samples.end());
    auto k = static_cast<std::size_t>(std::ceil(0.95 * 600.0 - 1e-9));
    for (std::size_t i = 0; i + k <= samples.size(); ++i)
        CHECK(samples[i + k - 1] - samples[i] >= h.high - h.low);
}
