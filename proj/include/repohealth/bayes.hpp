#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "repohealth/common.hpp"
#include "repohealth/csv.hpp"
#include "repohealth/diagnostics.hpp"
#include "repohealth/hdi.hpp"
#include "repohealth/rng.hpp"
#include "repohealth/slice_sampler.hpp"

namespace repohealth {

enum class ModelKind { Gaussian, Poisson };

inline const char* to_string(ModelKind k) { return k == ModelKind::Gaussian ? "gaussian" : "poisson"; }

struct Standardized {
    std::vector<double> zs;
    double mean = 0.0;
    double sd = 1.0;
};

// Linear rescaling to mean 0, sd 1 (sample standard deviation, n-1).
inline Standardized standardize(const std::vector<double>& xs) {
    if (xs.size() < 2) throw RepoHealthError("standardize requires at least 2 values");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    if (!(sd > 0.0)) throw RepoHealthError("standardize: zero variance, model degenerate");
    Standardized out;
    out.mean = mean;
    out.sd = sd;
    out.zs.reserve(xs.size());
    for (double x : xs) out.zs.push_back((x - mean) / sd);
    return out;
}

// Model-ready observations for one (sustainability, quality) pair. For
// Gaussian models of a continuous predictor, x holds standardized values and
// the transform record keeps the native mean/sd; for dormancy models the
// group vector is set instead. Poisson predictors stay in native units and
// are log-transformed at fit time.
struct ObservationSet {
    std::string predictor_id;
    std::string quality_id;
    ModelKind kind = ModelKind::Gaussian;
    std::vector<double> x;
    std::vector<double> y;
    std::size_t n_excluded = 0;
    std::optional<double> x_mean;  // standardization record (Gaussian continuous)
    std::optional<double> x_sd;
    std::optional<std::vector<bool>> dormant;  // per-observation group (STA-6)

    std::size_t size() const { return y.size(); }
};

struct JoinedRow {
    std::string project_id;
    std::optional<double> x;
    std::optional<double> y;
};

inline bool poisson_rejected_predictor(std::string_view predictor_id) {
    return predictor_id == "STA-4" || predictor_id == "STA-7" || predictor_id == "TEC-1";
}

inline bool gaussian_quality(std::string_view quality_id) {
    return quality_id == "swq1" || quality_id == "swq2_1" || quality_id == "swq2_6" ||
           quality_id == "SWQ-1" || quality_id == "SWQ-2.1" || quality_id == "SWQ-2.6";
}

enum class PrepareStatus { Ok, InsufficientData, DegeneratePredictor, RejectedPredictor };

struct PrepareResult {
    PrepareStatus status = PrepareStatus::Ok;
    std::optional<ObservationSet> obs;
    std::size_t candidates = 0;  // rows with both values present
    std::size_t included = 0;
    std::size_t excluded = 0;  // transform-driven drops
};

// Applies the model's transform rules and exclusion bookkeeping:
//  - Gaussian: drop y <= 0 (log undefined); standardize x unless STA-6.
//  - Poisson: drop x <= 0 (log undefined) and non-integer or negative y;
//    STA-4, STA-7, TEC-1 are rejected outright.
//  - fewer than min_rows surviving rows refuses the fit.
inline PrepareResult prepare_observations(const std::vector<JoinedRow>& rows, const std::string& predictor_id,
                                          const std::string& quality_id, ModelKind kind,
                                          std::size_t min_rows = 10) {
    PrepareResult result;
    const bool is_dormancy = predictor_id == "STA-6";

    if (kind == ModelKind::Poisson && poisson_rejected_predictor(predictor_id)) {
        result.status = PrepareStatus::RejectedPredictor;
        return result;
    }

    ObservationSet obs;
    obs.predictor_id = predictor_id;
    obs.quality_id = quality_id;
    obs.kind = kind;
    std::vector<double> raw_x;
    for (const auto& row : rows) {
        if (!row.x || !row.y) continue;
        ++result.candidates;
        const double x = *row.x;
        const double y = *row.y;
        bool keep = true;
        if (kind == ModelKind::Gaussian) {
            keep = y > 0.0;
        } else {
            keep = y >= 0.0 && std::abs(y - std::round(y)) < 1e-9;
            if (!is_dormancy) keep = keep && x > 0.0;
        }
        if (!keep) {
            ++result.excluded;
            continue;
        }
        raw_x.push_back(x);
        obs.y.push_back(y);
    }
    result.included = obs.y.size();
    obs.n_excluded = result.excluded;
    if (result.included < min_rows) {
        result.status = PrepareStatus::InsufficientData;
        return result;
    }

    if (is_dormancy) {
        std::vector<bool> groups;
        groups.reserve(raw_x.size());
        for (double x : raw_x) groups.push_back(x != 0.0);
        obs.dormant = std::move(groups);
        obs.x = std::move(raw_x);
    } else if (kind == ModelKind::Gaussian) {
        try {
            auto std_x = standardize(raw_x);
            obs.x = std::move(std_x.zs);
            obs.x_mean = std_x.mean;
            obs.x_sd = std_x.sd;
        } catch (const RepoHealthError&) {
            result.status = PrepareStatus::DegeneratePredictor;
            return result;
        }
    } else {
        obs.x = std::move(raw_x);
    }
    result.obs = std::move(obs);
    return result;
}

struct ModelConfig {
    int chains = 4;
    int draws = 3000;
    int warmup = 1000;
    std::uint64_t seed = 0;
    double hdi_mass = 0.95;
    double coef_prior_sd = 10.0;   // alpha and intercept
    double delta_prior_sd = 1.0;   // dormancy effects
    double sigma_low = 1e-3;
    double sigma_high = 10.0;
    int retries = 2;  // reseeded attempts after a failed diagnostics check
    double mcse_threshold = 0.02;
    double rhat_threshold = 1.01;
    double ess_threshold = 400.0;
};

struct ParamSamples {
    std::string name;
    std::vector<std::vector<double>> chains;  // chains x draws

    std::vector<double> pooled() const {
        std::vector<double> out;
        for (const auto& c : chains) out.insert(out.end(), c.begin(), c.end());
        return out;
    }
};

struct Posterior {
    ModelKind kind = ModelKind::Gaussian;
    bool dormancy_model = false;
    std::vector<ParamSamples> params;
    std::map<std::string, ParamDiagnostics> diagnostics;
    bool converged = false;
    int attempts = 0;
    double mcse_max = 0.0;
    double rhat_max = 0.0;

    const ParamSamples* find(std::string_view name) const {
        for (const auto& p : params)
            if (p.name == name) return &p;
        return nullptr;
    }
};

namespace detail {

struct ModelSpec {
    std::vector<std::string> names;      // reported parameter names
    LogDensity logp;                     // over the sampling parameterization
    std::function<std::vector<double>(Rng&)> init;
    // maps a sampled point to reported parameters (identity by default)
    std::function<std::vector<double>(const std::vector<double>&)> report;
};

inline double normal_logpdf_unnorm(double v, double sd) { return -0.5 * (v / sd) * (v / sd); }

inline ModelSpec gaussian_spec(const ObservationSet& obs, const ModelConfig& cfg) {
    ModelSpec spec;
    std::vector<double> ly;
    ly.reserve(obs.y.size());
    for (double y : obs.y) ly.push_back(std::log(y));
    double ly_mean = 0.0;
    for (double v : ly) ly_mean += v;
    ly_mean /= static_cast<double>(ly.size());
    double ly_sd = 0.0;
    for (double v : ly) ly_sd += (v - ly_mean) * (v - ly_mean);
    ly_sd = std::sqrt(ly_sd / std::max<std::size_t>(1, ly.size() - 1));

    const double coef_sd = cfg.coef_prior_sd;
    const double delta_sd = cfg.delta_prior_sd;
    const double sig_lo = cfg.sigma_low, sig_hi = cfg.sigma_high;

    if (!obs.dormant) {
        // theta = (alpha, beta, sigma); log(y) ~ N(beta + alpha*z, sigma)
        const std::vector<double> z = obs.x;
        spec.names = {"alpha", "beta", "sigma"};
        spec.logp = [ly, z, coef_sd, sig_lo, sig_hi](const std::vector<double>& t) {
            const double alpha = t[0], beta = t[1], sigma = t[2];
            if (sigma < sig_lo || sigma > sig_hi) return -std::numeric_limits<double>::infinity();
            double lp = normal_logpdf_unnorm(alpha, coef_sd) + normal_logpdf_unnorm(beta, coef_sd);
            const double inv2 = 1.0 / (2.0 * sigma * sigma);
            lp -= static_cast<double>(ly.size()) * std::log(sigma);
            for (std::size_t i = 0; i < ly.size(); ++i) {
                const double r = ly[i] - beta - alpha * z[i];
                lp -= r * r * inv2;
            }
            return lp;
        };
        spec.init = [ly_mean, ly_sd, sig_lo, sig_hi](Rng& rng) {
            double s = std::clamp(std::max(ly_sd, 0.05) * std::exp(0.3 * rng.normal()), sig_lo * 2.0,
                                  sig_hi * 0.9);
            return std::vector<double>{0.3 * rng.normal(), ly_mean + 0.3 * rng.normal(), s};
        };
    } else {
        // theta = (beta, delta_dormant, delta_non_dormant, sigma)
        const std::vector<bool> groups = *obs.dormant;
        spec.names = {"beta", "delta_dormant", "delta_non_dormant", "sigma"};
        spec.logp = [ly, groups, coef_sd, delta_sd, sig_lo, sig_hi](const std::vector<double>& t) {
            const double beta = t[0], dd = t[1], dn = t[2], sigma = t[3];
            if (sigma < sig_lo || sigma > sig_hi) return -std::numeric_limits<double>::infinity();
            double lp = normal_logpdf_unnorm(beta, coef_sd) + normal_logpdf_unnorm(dd, delta_sd) +
                        normal_logpdf_unnorm(dn, delta_sd);
            const double inv2 = 1.0 / (2.0 * sigma * sigma);
            lp -= static_cast<double>(ly.size()) * std::log(sigma);
            for (std::size_t i = 0; i < ly.size(); ++i) {
                const double r = ly[i] - beta - (groups[i] ? dd : dn);
                lp -= r * r * inv2;
            }
            return lp;
        };
        spec.init = [ly_mean, ly_sd, sig_lo, sig_hi](Rng& rng) {
            double s = std::clamp(std::max(ly_sd, 0.05) * std::exp(0.3 * rng.normal()), sig_lo * 2.0,
                                  sig_hi * 0.9);
            return std::vector<double>{ly_mean + 0.3 * rng.normal(), 0.5 * rng.normal(), 0.5 * rng.normal(), s};
        };
    }
    return spec;
}

inline ModelSpec poisson_spec(const ObservationSet& obs, const ModelConfig& cfg) {
    ModelSpec spec;
    const double coef_sd = cfg.coef_prior_sd;
    const double delta_sd = cfg.delta_prior_sd;
    double y_mean = 0.0;
    for (double y : obs.y) y_mean += y;
    y_mean /= static_cast<double>(obs.y.size());
    const double b0 = std::log(y_mean + 0.1);

    auto safe_rate_term = [](double eta, double y) {
        if (eta > 500.0) return -std::numeric_limits<double>::infinity();
        return y * eta - std::exp(eta);
    };

    if (!obs.dormant) {
        // sampled as (b, a) over centered log-x; reported beta = b - a*m
        std::vector<double> u;
        u.reserve(obs.x.size());
        double m = 0.0;
        for (double x : obs.x) {
            u.push_back(std::log(x));
            m += u.back();
        }
        m /= static_cast<double>(u.size());
        for (auto& v : u) v -= m;
        const std::vector<double> y = obs.y;

        spec.names = {"alpha", "beta"};
        spec.logp = [y, u, m, coef_sd, safe_rate_term](const std::vector<double>& t) {
            const double a = t[0], b = t[1];
            const double beta = b - a * m;
            double lp = normal_logpdf_unnorm(a, coef_sd) + normal_logpdf_unnorm(beta, coef_sd);
            for (std::size_t i = 0; i < y.size(); ++i) {
                lp += safe_rate_term(b + a * u[i], y[i]);
                if (!std::isfinite(lp)) return -std::numeric_limits<double>::infinity();
            }
            return lp;
        };
        spec.init = [b0](Rng& rng) {
            return std::vector<double>{0.3 * rng.normal(), b0 + 0.3 * rng.normal()};
        };
        spec.report = [m](const std::vector<double>& t) {
            return std::vector<double>{t[0], t[1] - t[0] * m};
        };
    } else {
        const std::vector<bool> groups = *obs.dormant;
        const std::vector<double> y = obs.y;
        spec.names = {"beta", "delta_dormant", "delta_non_dormant"};
        spec.logp = [y, groups, coef_sd, delta_sd, safe_rate_term](const std::vector<double>& t) {
            const double beta = t[0], dd = t[1], dn = t[2];
            double lp = normal_logpdf_unnorm(beta, coef_sd) + normal_logpdf_unnorm(dd, delta_sd) +
                        normal_logpdf_unnorm(dn, delta_sd);
            for (std::size_t i = 0; i < y.size(); ++i) {
                lp += safe_rate_term(beta + (groups[i] ? dd : dn), y[i]);
                if (!std::isfinite(lp)) return -std::numeric_limits<double>::infinity();
            }
            return lp;
        };
        spec.init = [b0](Rng& rng) {
            return std::vector<double>{b0 + 0.3 * rng.normal(), 0.5 * rng.normal(), 0.5 * rng.normal()};
        };
    }
    return spec;
}

}  // namespace detail

// Runs the configured chains for one model, retrying with fresh sub-seeds
// when the diagnostics contract (MCSE, R-hat, ESS per parameter) fails.
inline Posterior fit_model(const ObservationSet& obs, const ModelConfig& cfg) {
    if (obs.y.empty()) throw RepoHealthError("fit_model: empty observation set");
    if (cfg.chains < 2) throw RepoHealthError("fit_model: at least 2 chains required");

    detail::ModelSpec spec =
        obs.kind == ModelKind::Gaussian ? detail::gaussian_spec(obs, cfg) : detail::poisson_spec(obs, cfg);

    Posterior post;
    post.kind = obs.kind;
    post.dormancy_model = obs.dormant.has_value();

    const std::size_t dim = spec.names.size();
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        post.attempts = attempt + 1;
        post.params.assign(dim, {});
        for (std::size_t p = 0; p < dim; ++p) {
            post.params[p].name = spec.names[p];
            post.params[p].chains.assign(cfg.chains, {});
        }

        const std::uint64_t attempt_seed = hash_combine(cfg.seed, static_cast<std::uint64_t>(attempt));
        SliceSampler sampler(spec.logp, {static_cast<std::size_t>(cfg.warmup),
                                         static_cast<std::size_t>(cfg.draws), 2.0, 64, 256});
        for (int c = 0; c < cfg.chains; ++c) {
            Rng rng(hash_combine(attempt_seed, static_cast<std::uint64_t>(c)));
            auto draws = sampler.run(spec.init(rng), rng);
            for (auto& draw : draws) {
                std::vector<double> reported = spec.report ? spec.report(draw) : draw;
                for (std::size_t p = 0; p < dim; ++p) post.params[p].chains[c].push_back(reported[p]);
            }
        }

        post.diagnostics.clear();
        post.mcse_max = 0.0;
        post.rhat_max = 0.0;
        bool ok = true;
        for (const auto& param : post.params) {
            auto d = diagnose(param.chains);
            post.mcse_max = std::max(post.mcse_max, d.mcse);
            post.rhat_max = std::max(post.rhat_max, d.rhat);
            if (d.degenerate || d.mcse >= cfg.mcse_threshold || d.rhat >= cfg.rhat_threshold ||
                d.ess < cfg.ess_threshold)
                ok = false;
            post.diagnostics[param.name] = d;
        }
        post.converged = ok;
        if (ok) break;
    }
    return post;
}

inline Posterior fit_gaussian(const ObservationSet& obs, const ModelConfig& cfg) {
    if (obs.kind != ModelKind::Gaussian) throw RepoHealthError("fit_gaussian: observation set is not Gaussian");
    return fit_model(obs, cfg);
}

inline Posterior fit_poisson(const ObservationSet& obs, const ModelConfig& cfg) {
    if (obs.kind != ModelKind::Poisson) throw RepoHealthError("fit_poisson: observation set is not Poisson");
    return fit_model(obs, cfg);
}

// ---- decisions ----------------------------------------------------------

enum class Direction { NoEvidence, Increase, Decrease };
enum class QualityImpact { None, Improves, Degrades };

inline const char* to_string(Direction d) {
    switch (d) {
        case Direction::NoEvidence: return "NoEvidence";
        case Direction::Increase: return "Increase";
        case Direction::Decrease: return "Decrease";
    }
    return "?";
}

inline const char* to_string(QualityImpact q) {
    switch (q) {
        case QualityImpact::None: return "None";
        case QualityImpact::Improves: return "Improves";
        case QualityImpact::Degrades: return "Degrades";
    }
    return "?";
}

// SWQ-2.1 (coverage) is the only quality metric where larger is better.
inline bool quality_higher_is_better(std::string_view quality_id) {
    return quality_id == "SWQ-2.1" || quality_id == "swq2_1";
}

// Predictors whose raw increase means a sustainability decline; a reporting
// flag may re-express their matrix symbol, the stored decision never flips.
inline bool flip_set_member(std::string_view predictor_id) {
    return predictor_id == "STA-2" || predictor_id == "STA-5" || predictor_id == "STA-9" ||
           predictor_id == "TEC-2";
}

struct ImpactDecision {
    std::string sust_row_id;  // e.g. "COM-1", "STA-6-dormant", "STA-6-contrast"
    std::string parameter;    // posterior parameter the HDI is over
    Hdi hdi;
    Direction direction = Direction::NoEvidence;
    QualityImpact quality_impact = QualityImpact::None;
    bool higher_is_better = false;
    bool flip_member = false;
};

inline Direction classify_direction(const Hdi& h) {
    if (h.contains(0.0)) return Direction::NoEvidence;
    return h.low > 0.0 ? Direction::Increase : Direction::Decrease;
}

inline QualityImpact classify_impact(Direction d, bool higher_is_better) {
    if (d == Direction::NoEvidence) return QualityImpact::None;
    const bool quality_rises = d == Direction::Increase;
    return quality_rises == higher_is_better ? QualityImpact::Improves : QualityImpact::Degrades;
}

// Decisions for one converged posterior: one row for a continuous predictor
// (its alpha), or per-delta rows plus the dormant-minus-non-dormant contrast
// for STA-6.
inline std::vector<ImpactDecision> decide_impact(const Posterior& post, const std::string& predictor_id,
                                                 const std::string& quality_id, double mass = 0.95) {
    if (!post.converged) throw RepoHealthError("decide_impact: posterior did not converge");
    const bool hib = quality_higher_is_better(quality_id);
    const bool flip = flip_set_member(predictor_id);

    auto make = [&](const std::string& row_id, const std::string& param, std::vector<double> samples) {
        ImpactDecision d;
        d.sust_row_id = row_id;
        d.parameter = param;
        d.hdi = hdi(std::move(samples), mass);
        d.direction = classify_direction(d.hdi);
        d.quality_impact = classify_impact(d.direction, hib);
        d.higher_is_better = hib;
        d.flip_member = flip;
        return d;
    };

    std::vector<ImpactDecision> out;
    if (!post.dormancy_model) {
        const auto* alpha = post.find("alpha");
        if (!alpha) throw RepoHealthError("decide_impact: posterior has no alpha parameter");
        out.push_back(make(predictor_id, "alpha", alpha->pooled()));
    } else {
        const auto* dd = post.find("delta_dormant");
        const auto* dn = post.find("delta_non_dormant");
        if (!dd || !dn) throw RepoHealthError("decide_impact: posterior has no dormancy parameters");
        out.push_back(make(predictor_id + "-dormant", "delta_dormant", dd->pooled()));
        out.push_back(make(predictor_id + "-non-dormant", "delta_non_dormant", dn->pooled()));
        auto as = dd->pooled();
        auto bs = dn->pooled();
        std::vector<double> contrast(as.size());
        for (std::size_t i = 0; i < as.size(); ++i) contrast[i] = as[i] - bs[i];
        out.push_back(make(predictor_id + "-contrast", "delta_dormant - delta_non_dormant", std::move(contrast)));
    }
    return out;
}

// ---- effect sizes -------------------------------------------------------

struct GaussianEffect {
    double pct_low = 0.0;   // percent change per 1-sd predictor increase
    double pct_high = 0.0;
    double predictor_sd = 0.0;  // native units
};

inline GaussianEffect effect_gaussian(const Hdi& alpha_hdi, double predictor_sd) {
    return {(std::exp(alpha_hdi.low) - 1.0) * 100.0, (std::exp(alpha_hdi.high) - 1.0) * 100.0, predictor_sd};
}

struct PoissonEffect {
    double unit_low = 0.0;  // outcome-unit change per 10% predictor increase
    double unit_high = 0.0;
};

inline PoissonEffect effect_poisson(const Hdi& alpha_hdi) {
    return {0.1 * alpha_hdi.low, 0.1 * alpha_hdi.high};
}

// ---- posterior predictive check ----------------------------------------

struct PpcSummary {
    double observed_mean = 0.0;
    double observed_sd = 0.0;
    double mean_low = 0.0, mean_high = 0.0;  // 95% interval of replicate means
    double sd_low = 0.0, sd_high = 0.0;      // 95% interval of replicate sds
    bool ok = false;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

// Simulates replicate outcome sets from thinned posterior draws and checks
// whether the observed mean and sd sit inside the central 95% of the
// replicate distribution. Gaussian models replicate on the log scale the
// model was fit on.
inline PpcSummary posterior_predictive_check(const Posterior& post, const ObservationSet& obs,
                                             std::uint64_t seed, std::size_t n_reps = 200) {
    std::vector<double> outcome;
    outcome.reserve(obs.y.size());
    if (post.kind == ModelKind::Gaussian)
        for (double y : obs.y) outcome.push_back(std::log(y));
    else
        for (double y : obs.y) outcome.push_back(y);

    PpcSummary s;
    s.observed_mean = detail::mean_of(outcome);
    s.observed_sd = std::sqrt(detail::sample_variance(outcome));

    // per-observation linear predictor builder
    auto predictor_of = [&](const std::map<std::string, double>& draw, std::size_t i) {
        if (post.dormancy_model) {
            double delta = (*obs.dormant)[i] ? draw.at("delta_dormant") : draw.at("delta_non_dormant");
            return draw.at("beta") + delta;
        }
        double x = post.kind == ModelKind::Poisson ? std::log(obs.x[i]) : obs.x[i];
        return draw.at("beta") + draw.at("alpha") * x;
    };

    const std::size_t total = post.params.front().pooled().size();
    const std::size_t stride = std::max<std::size_t>(1, total / n_reps);
    std::vector<std::vector<double>> pooled;
    for (const auto& p : post.params) pooled.push_back(p.pooled());

    Rng rng(hash_combine(seed, std::string_view("ppc")));
    std::vector<double> rep_means, rep_sds;
    for (std::size_t d = 0; d < total; d += stride) {
        std::map<std::string, double> draw;
        for (std::size_t p = 0; p < post.params.size(); ++p) draw[post.params[p].name] = pooled[p][d];
        std::vector<double> rep(outcome.size());
        for (std::size_t i = 0; i < outcome.size(); ++i) {
            double eta = predictor_of(draw, i);
            if (post.kind == ModelKind::Gaussian) {
                rep[i] = rng.normal(eta, draw.at("sigma"));
            } else {
                double lambda = std::exp(std::min(eta, 30.0));
                rep[i] = static_cast<double>(rng.poisson(lambda));
            }
        }
        rep_means.push_back(detail::mean_of(rep));
        rep_sds.push_back(std::sqrt(detail::sample_variance(rep)));
    }
    std::sort(rep_means.begin(), rep_means.end());
    std::sort(rep_sds.begin(), rep_sds.end());
    s.mean_low = detail::quantile_sorted(rep_means, 0.025);
    s.mean_high = detail::quantile_sorted(rep_means, 0.975);
    s.sd_low = detail::quantile_sorted(rep_sds, 0.025);
    s.sd_high = detail::quantile_sorted(rep_sds, 0.975);
    s.ok = s.observed_mean >= s.mean_low && s.observed_mean <= s.mean_high && s.observed_sd >= s.sd_low &&
           s.observed_sd <= s.sd_high;
    return s;
}

// Posterior export: one CSV per fit, rows ordered chain, then draw, then
// parameter declaration order.
inline const char* kPosteriorCsvHeader = "chain,draw,parameter,value";

inline void write_posterior_csv(std::ostream& out, const Posterior& post) {
    out << kPosteriorCsvHeader << "\n";
    if (post.params.empty()) return;
    const std::size_t chains = post.params.front().chains.size();
    for (std::size_t c = 0; c < chains; ++c) {
        const std::size_t draws = post.params.front().chains[c].size();
        for (std::size_t d = 0; d < draws; ++d)
            for (const auto& p : post.params)
                out << csv::join_row({std::to_string(c), std::to_string(d), p.name,
                                      format_double(p.chains[c][d])});
    }
}

}  // namespace repohealth
