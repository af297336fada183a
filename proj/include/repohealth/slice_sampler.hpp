#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "repohealth/common.hpp"
#include "repohealth/rng.hpp"

namespace repohealth {

using LogDensity = std::function<double(const std::vector<double>&)>;

// Coordinate slice sampler with covariance preconditioning. During warmup
// the proposal frame is re-estimated from progressively longer windows of
// draws; afterwards the frame is frozen, so all posterior draws come from a
// fixed transition kernel. Slice directions are the Cholesky columns of the
// estimated covariance, which keeps mixing fast on correlated ridges.
class SliceSampler {
public:
    struct Options {
        std::size_t warmup = 1000;
        std::size_t draws = 3000;
        double width = 2.0;  // in whitened units
        int max_stepout = 64;
        int max_shrink = 256;
    };

    SliceSampler(LogDensity logp, Options opts) : logp_(std::move(logp)), opts_(opts) {}

    // Returns draws-by-dim posterior samples for one chain.
    std::vector<std::vector<double>> run(std::vector<double> theta, Rng& rng) const {
        const std::size_t dim = theta.size();
        std::vector<std::vector<double>> directions = identity(dim);
        double lp = logp_(theta);
        if (!std::isfinite(lp)) throw RepoHealthError("slice sampler started outside the support");

        std::vector<std::vector<double>> window;
        std::vector<std::vector<double>> out;
        out.reserve(opts_.draws);

        // warmup adaptation checkpoints at 10%, 30%, 60%, 100%
        std::vector<std::size_t> checkpoints;
        for (double f : {0.1, 0.3, 0.6, 1.0}) {
            auto c = static_cast<std::size_t>(static_cast<double>(opts_.warmup) * f);
            if (c >= 8 && (checkpoints.empty() || c > checkpoints.back())) checkpoints.push_back(c);
        }

        const std::size_t total = opts_.warmup + opts_.draws;
        std::size_t next_checkpoint = 0;
        for (std::size_t it = 0; it < total; ++it) {
            for (std::size_t j = 0; j < dim; ++j) slice_move(theta, lp, directions[j], rng);
            if (it < opts_.warmup) {
                window.push_back(theta);
                if (next_checkpoint < checkpoints.size() && it + 1 == checkpoints[next_checkpoint]) {
                    refresh_directions(window, directions);
                    window.clear();
                    ++next_checkpoint;
                }
            } else {
                out.push_back(theta);
            }
        }
        return out;
    }

private:
    static std::vector<std::vector<double>> identity(std::size_t dim) {
        std::vector<std::vector<double>> directions(dim, std::vector<double>(dim, 0.0));
        for (std::size_t j = 0; j < dim; ++j) directions[j][j] = 1.0;
        return directions;
    }

    // One univariate slice update along `dir` (Neal 2003, stepping out +
    // shrinkage). Out-of-support points simply evaluate to -inf.
    void slice_move(std::vector<double>& theta, double& lp, const std::vector<double>& dir, Rng& rng) const {
        const double y = lp + std::log(rng.uniform01());

        auto eval = [&](double s) {
            std::vector<double> cand(theta.size());
            for (std::size_t k = 0; k < theta.size(); ++k) cand[k] = theta[k] + s * dir[k];
            double v = logp_(cand);
            return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
        };

        const double w = opts_.width;
        double lo = -w * rng.uniform01();
        double hi = lo + w;
        for (int k = 0; k < opts_.max_stepout && eval(lo) > y; ++k) lo -= w;
        for (int k = 0; k < opts_.max_stepout && eval(hi) > y; ++k) hi += w;

        for (int k = 0; k < opts_.max_shrink; ++k) {
            double s = rng.uniform(lo, hi);
            double cand_lp = eval(s);
            if (cand_lp > y) {
                for (std::size_t q = 0; q < theta.size(); ++q) theta[q] += s * dir[q];
                lp = cand_lp;
                return;
            }
            if (s < 0.0) lo = s;
            else hi = s;
        }
        // shrinkage exhausted: stay put (current point is always in the slice)
    }

    // Estimate the sample covariance of the window and take its Cholesky
    // columns as the new slice directions.
    static void refresh_directions(const std::vector<std::vector<double>>& window,
                                   std::vector<std::vector<double>>& directions) {
        const std::size_t n = window.size();
        if (n < 8) return;
        const std::size_t dim = window.front().size();
        std::vector<double> mean(dim, 0.0);
        for (const auto& row : window)
            for (std::size_t j = 0; j < dim; ++j) mean[j] += row[j];
        for (auto& m : mean) m /= static_cast<double>(n);

        std::vector<std::vector<double>> cov(dim, std::vector<double>(dim, 0.0));
        for (const auto& row : window)
            for (std::size_t a = 0; a < dim; ++a)
                for (std::size_t b = 0; b <= a; ++b)
                    cov[a][b] += (row[a] - mean[a]) * (row[b] - mean[b]);
        double trace = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = 0; b <= a; ++b) cov[a][b] /= static_cast<double>(n - 1);
            trace += cov[a][a];
        }
        const double jitter = std::max(trace / static_cast<double>(dim), 1e-12) * 1e-6;
        for (std::size_t a = 0; a < dim; ++a) cov[a][a] += jitter;

        // lower Cholesky
        std::vector<std::vector<double>> chol(dim, std::vector<double>(dim, 0.0));
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = 0; b <= a; ++b) {
                double s = cov[a][b];
                for (std::size_t k = 0; k < b; ++k) s -= chol[a][k] * chol[b][k];
                if (a == b) {
                    if (s <= 0.0) return;  // keep previous frame
                    chol[a][a] = std::sqrt(s);
                } else {
                    chol[a][b] = s / chol[b][b];
                }
            }
        }
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t a = 0; a < dim; ++a) directions[j][a] = chol[a][j];
    }

    LogDensity logp_;
    Options opts_;
};

}  // namespace repohealth
