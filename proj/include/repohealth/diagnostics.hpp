#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "repohealth/common.hpp"

namespace repohealth {

struct ParamDiagnostics {
    double mcse = 0.0;
    double rhat = 1.0;
    double ess = 0.0;
    bool degenerate = false;  // zero-variance draws; ESS defined as 0
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace detail

// Split-chain convergence diagnostics for one parameter given chains × draws
// samples. R-hat follows the split potential-scale-reduction formula; ESS
// uses the variogram autocorrelation estimate with Geyer initial-monotone
// truncation; MCSE is pooled posterior sd over sqrt(ESS).
inline ParamDiagnostics diagnose(const std::vector<std::vector<double>>& chains) {
    if (chains.size() < 2) throw RepoHealthError("diagnostics require at least 2 chains");
    std::size_t n_min = std::numeric_limits<std::size_t>::max();
    for (const auto& c : chains) n_min = std::min(n_min, c.size());
    if (n_min < 4) throw RepoHealthError("diagnostics require at least 4 draws per chain");

    // split each chain in half
    std::vector<std::vector<double>> split;
    const std::size_t half = n_min / 2;
    for (const auto& c : chains) {
        split.emplace_back(c.begin(), c.begin() + half);
        split.emplace_back(c.begin() + half, c.begin() + 2 * half);
    }
    const std::size_t m = split.size();
    const std::size_t n = half;

    std::vector<double> chain_means(m), chain_vars(m);
    for (std::size_t c = 0; c < m; ++c) {
        chain_means[c] = detail::mean_of(split[c]);
        chain_vars[c] = detail::sample_variance(split[c]);
    }
    const double w = detail::mean_of(chain_vars);
    const double between = detail::sample_variance(chain_means);  // = B/n
    const double var_plus = (static_cast<double>(n - 1) / static_cast<double>(n)) * w + between;

    std::vector<double> pooled;
    pooled.reserve(m * n);
    for (const auto& c : split) pooled.insert(pooled.end(), c.begin(), c.end());
    const double pooled_sd = std::sqrt(detail::sample_variance(pooled));

    ParamDiagnostics d;
    if (!(pooled_sd > 0.0)) {
        d.degenerate = true;
        d.ess = 0.0;
        d.mcse = 0.0;
        d.rhat = 1.0;
        return d;
    }
    d.rhat = w > 0.0 ? std::sqrt(var_plus / w) : std::numeric_limits<double>::infinity();

    // variogram estimate of the lag-t autocorrelation of the combined chains
    auto rho = [&](std::size_t t) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m; ++c)
            for (std::size_t i = 0; i + t < n; ++i) {
                double diff = split[c][i] - split[c][i + t];
                acc += diff * diff;
            }
        double vt = acc / static_cast<double>(m * (n - t));
        return 1.0 - vt / (2.0 * var_plus);
    };

    double tau = 1.0;  // rho_0 == 1 enters via the first pair below
    double prev_pair = std::numeric_limits<double>::infinity();
    double pair_sum = 0.0;
    for (std::size_t t = 1; t + 1 < n; t += 2) {
        double pair = rho(t) + rho(t + 1);
        if (pair < 0.0) break;
        pair = std::min(pair, prev_pair);  // enforce monotone decrease
        prev_pair = pair;
        pair_sum += pair;
        if (t > 2 * n / 3) break;
    }
    tau = 1.0 + 2.0 * pair_sum;
    tau = std::max(tau, 1e-12);

    d.ess = static_cast<double>(m * n) / tau;
    d.mcse = pooled_sd / std::sqrt(d.ess);
    return d;
}

}  // namespace repohealth
