#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "repohealth/common.hpp"

namespace repohealth {

// Highest density interval: among all windows of ceil(mass*N) consecutive
// sorted samples, the narrowest one.
struct Hdi {
    double low = 0.0;
    double high = 0.0;
    double mass = 0.95;

    bool contains(double v) const { return v >= low && v <= high; }
};

inline Hdi hdi(std::vector<double> samples, double mass = 0.95) {
    if (samples.size() < 100) throw RepoHealthError("hdi requires at least 100 samples");
    if (!(mass > 0.0 && mass < 1.0)) throw RepoHealthError("hdi mass must lie in (0, 1)");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    // guard against 0.95*N landing one ulp above an integer
    auto k = static_cast<std::size_t>(std::ceil(mass * static_cast<double>(n) - 1e-9));
    k = std::min(std::max<std::size_t>(k, 1), n);

    std::size_t best = 0;
    double best_width = samples[k - 1] - samples[0];
    for (std::size_t i = 1; i + k <= n; ++i) {
        double width = samples[i + k - 1] - samples[i];
        if (width < best_width) {
            best_width = width;
            best = i;
        }
    }
    return {samples[best], samples[best + k - 1], mass};
}

}  // namespace repohealth
