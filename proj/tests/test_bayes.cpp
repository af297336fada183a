#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "repohealth/bayes.hpp"

using namespace repohealth;

namespace {

ModelConfig quick_config(std::uint64_t seed) {
    ModelConfig cfg;
    cfg.chains = 4;
    cfg.draws = 1500;
    cfg.warmup = 600;
    cfg.seed = seed;
    return cfg;
}

ObservationSet simulate_gaussian(double alpha, double beta, double sigma, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<JoinedRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = 100.0 + 30.0 * rng.normal();  // native units, standardized by prepare
        rows[i].project_id = "p" + std::to_string(i);
        rows[i].x = x;
        rows[i].y = 0.0;  // filled after standardization below
    }
    // standardize first so the generating process matches the fitted model
    std::vector<double> xs;
    for (const auto& r : rows) xs.push_back(*r.x);
    auto z = standardize(xs);
    Rng noise(seed + 1);
    for (std::size_t i = 0; i < n; ++i)
        rows[i].y = std::exp(beta + alpha * z.zs[i] + sigma * noise.normal());
    auto prep = prepare_observations(rows, "COM-1", "SWQ-1", ModelKind::Gaussian);
    REQUIRE(prep.status == PrepareStatus::Ok);
    return *prep.obs;
}

ObservationSet simulate_poisson(double alpha, double beta, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<JoinedRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.normal();  // log-predictor
        double lambda = std::exp(beta + alpha * u);
        rows[i].project_id = "p" + std::to_string(i);
        rows[i].x = std::exp(u);
        rows[i].y = static_cast<double>(rng.poisson(lambda));
    }
    auto prep = prepare_observations(rows, "COM-1", "SWQ-2.3", ModelKind::Poisson);
    REQUIRE(prep.status == PrepareStatus::Ok);
    return *prep.obs;
}

double posterior_mean(const Posterior& post, const std::string& name) {
    auto samples = post.find(name)->pooled();
    double mean = 0.0;
    for (double v : samples) mean += v;
    return mean / static_cast<double>(samples.size());
}

Posterior synthetic_alpha_posterior(std::vector<double> alpha_samples) {
    Posterior post;
    post.kind = ModelKind::Gaussian;
    post.converged = true;
    ParamSamples p;
    p.name = "alpha";
    std::size_t half = alpha_samples.size() / 2;
    p.chains = {std::vector<double>(alpha_samples.begin(), alpha_samples.begin() + half),
                std::vector<double>(alpha_samples.begin() + half, alpha_samples.end())};
    post.params.push_back(std::move(p));
    return post;
}

}  // namespace

TEST_CASE("standardize maps a symmetric triple onto unit steps") {
    auto s = standardize({1.0, 2.0, 3.0});
    CHECK(s.mean == 2.0);
    CHECK(s.sd == 1.0);
    REQUIRE(s.zs.size() == 3);
    CHECK(s.zs[0] == -1.0);
    CHECK(s.zs[1] == 0.0);
    CHECK(s.zs[2] == 1.0);
}

TEST_CASE("standardize rejects constant input") {
    CHECK_THROWS_AS(standardize({4.0, 4.0, 4.0}), RepoHealthError);
    CHECK_THROWS_AS(standardize({4.0}), RepoHealthError);
}

TEST_CASE("standardize round-trips through the inverse transform") {
    Rng rng(66);
    std::vector<double> xs(50);
    for (auto& x : xs) x = 5000.0 + 300.0 * rng.normal();
    auto s = standardize(xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK(std::abs(s.zs[i] * s.sd + s.mean - xs[i]) < 1e-9);
}

TEST_CASE("prepare_observations drops zero outcomes for the Gaussian model") {
    std::vector<JoinedRow> rows(13);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].project_id = "p" + std::to_string(i);
        rows[i].x = static_cast<double>(i + 1);
        rows[i].y = i < 3 ? 0.0 : 1.5;
    }
    auto prep = prepare_observations(rows, "COM-2", "SWQ-1", ModelKind::Gaussian);
    REQUIRE(prep.status == PrepareStatus::Ok);
    CHECK(prep.excluded == 3);
    CHECK(prep.included == 10);
    CHECK(prep.obs->n_excluded == 3);
    CHECK(prep.obs->x_mean.has_value());
}

TEST_CASE("poisson models reject the predictors whose log transform collapses") {
    std::vector<JoinedRow> rows(20);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].x = 1.0;
        rows[i].y = 2.0;
    }
    for (const auto* predictor : {"STA-4", "STA-7", "TEC-1"}) {
        auto prep = prepare_observations(rows, predictor, "SWQ-2.2", ModelKind::Poisson);
        CHECK(prep.status == PrepareStatus::RejectedPredictor);
    }
    // the same predictors are fine under the Gaussian model
    std::vector<JoinedRow> grows(12);
    Rng rng(3);
    for (auto& r : grows) {
        r.x = rng.uniform(1.0, 5.0);
        r.y = rng.uniform(0.5, 2.0);
    }
    CHECK(prepare_observations(grows, "STA-4", "SWQ-1", ModelKind::Gaussian).status == PrepareStatus::Ok);
}

TEST_CASE("poisson exclusions: non-positive predictors and non-integer outcomes") {
    std::vector<JoinedRow> rows(14);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].x = i == 0 ? 0.0 : static_cast<double>(i);
        rows[i].y = i == 1 ? 2.5 : 3.0;
    }
    auto prep = prepare_observations(rows, "COM-1", "SWQ-2.2", ModelKind::Poisson);
    REQUIRE(prep.status == PrepareStatus::Ok);
    CHECK(prep.excluded == 2);
    CHECK(prep.included == 12);
}

TEST_CASE("too few surviving rows refuses the fit") {
    std::vector<JoinedRow> rows(9);
    for (auto& r : rows) {
        r.x = 1.0;
        r.y = 1.0;
    }
    auto prep = prepare_observations(rows, "COM-1", "SWQ-1", ModelKind::Gaussian);
    CHECK(prep.status == PrepareStatus::InsufficientData);
}

TEST_CASE("constant predictors are degenerate for the Gaussian model") {
    std::vector<JoinedRow> rows(15);
    for (auto& r : rows) {
        r.x = 7.0;
        r.y = 2.0;
    }
    auto prep = prepare_observations(rows, "COM-1", "SWQ-1", ModelKind::Gaussian);
    CHECK(prep.status == PrepareStatus::DegeneratePredictor);
}

TEST_CASE("gaussian fit recovers simulated parameters") {
    auto obs = simulate_gaussian(0.5, 1.0, 0.3, 200, 424242);
    auto post = fit_gaussian(obs, quick_config(7));
    REQUIRE(post.converged);
    CHECK(std::abs(posterior_mean(post, "alpha") - 0.5) < 0.1);
    CHECK(std::abs(posterior_mean(post, "beta") - 1.0) < 0.1);
    CHECK(std::abs(posterior_mean(post, "sigma") - 0.3) < 0.1);
    auto h = hdi(post.find("alpha")->pooled(), 0.95);
    CHECK(h.low <= 0.5);
    CHECK(h.high >= 0.5);
}

TEST_CASE("gaussian fit with constant outcome pins alpha at zero and sigma at the floor") {
    std::vector<JoinedRow> rows(30);
    Rng rng(5);
    for (auto& r : rows) {
        r.x = rng.uniform(0.0, 50.0);
        r.y = 2.0;
    }
    auto prep = prepare_observations(rows, "COM-1", "SWQ-1", ModelKind::Gaussian);
    REQUIRE(prep.status == PrepareStatus::Ok);
    auto post = fit_gaussian(*prep.obs, quick_config(9));
    auto h = hdi(post.find("alpha")->pooled(), 0.95);
    CHECK(std::abs(h.low) < 0.01);
    CHECK(std::abs(h.high) < 0.01);
    CHECK(posterior_mean(post, "sigma") < 0.05);
}

TEST_CASE("gaussian posterior mean matches the closed-form regression estimate") {
    // with sd-10 priors the posterior mean of alpha is the least-squares
    // slope of log(y) on z up to negligible shrinkage
    auto obs = simulate_gaussian(0.35, 0.9, 0.25, 250, 909);
    auto post = fit_gaussian(obs, quick_config(14));
    REQUIRE(post.converged);
    double sxy = 0.0, sxx = 0.0, zbar = 0.0, wbar = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        zbar += obs.x[i];
        wbar += std::log(obs.y[i]);
    }
    zbar /= static_cast<double>(obs.size());
    wbar /= static_cast<double>(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        sxy += (obs.x[i] - zbar) * (std::log(obs.y[i]) - wbar);
        sxx += (obs.x[i] - zbar) * (obs.x[i] - zbar);
    }
    const double ols = sxy / sxx;
    const double tolerance = 5.0 * post.diagnostics.at("alpha").mcse;
    CHECK(std::abs(posterior_mean(post, "alpha") - ols) < tolerance);
}

TEST_CASE("poisson fit recovers simulated parameters") {
    auto obs = simulate_poisson(0.3, 2.0, 200, 777);
    auto post = fit_poisson(obs, quick_config(8));
    REQUIRE(post.converged);
    CHECK(std::abs(posterior_mean(post, "alpha") - 0.3) < 0.1);
    CHECK(std::abs(posterior_mean(post, "beta") - 2.0) < 0.15);
}

TEST_CASE("poisson fit with all-zero outcomes pushes the intercept far negative") {
    std::vector<JoinedRow> rows(20);
    Rng rng(13);
    for (auto& r : rows) {
        r.x = rng.uniform(1.0, 9.0);
        r.y = 0.0;
    }
    auto prep = prepare_observations(rows, "COM-1", "SWQ-2.2", ModelKind::Poisson);
    REQUIRE(prep.status == PrepareStatus::Ok);
    auto post = fit_poisson(*prep.obs, quick_config(21));
    CHECK(posterior_mean(post, "beta") < -2.0);
    auto h = hdi(post.find("alpha")->pooled(), 0.95);
    CHECK(h.contains(0.0));
}

TEST_CASE("identical seeds reproduce identical samples") {
    auto obs = simulate_gaussian(0.2, 0.5, 0.4, 60, 1001);
    auto cfg = quick_config(31337);
    cfg.chains = 2;
    cfg.draws = 400;
    cfg.warmup = 200;
    auto a = fit_gaussian(obs, cfg);
    auto b = fit_gaussian(obs, cfg);
    REQUIRE(a.params.size() == b.params.size());
    for (std::size_t p = 0; p < a.params.size(); ++p) CHECK(a.params[p].chains == b.params[p].chains);
}

TEST_CASE("rescaling predictor units leaves the posterior within sampler noise") {
    Rng rng(2024);
    std::vector<JoinedRow> rows(120), scaled(120);
    Rng noise(9);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double x = 5000.0 + 700.0 * rng.normal();
        double y = std::exp(0.8 + 0.4 * ((x - 5000.0) / 700.0) + 0.3 * noise.normal());
        rows[i] = {"p" + std::to_string(i), x, y};
        scaled[i] = {"p" + std::to_string(i), x / 3600.0, y};  // seconds to hours
    }
    auto pa = prepare_observations(rows, "COM-1", "SWQ-1", ModelKind::Gaussian);
    auto pb = prepare_observations(scaled, "COM-1", "SWQ-1", ModelKind::Gaussian);
    REQUIRE(pa.status == PrepareStatus::Ok);
    REQUIRE(pb.status == PrepareStatus::Ok);
    auto cfg = quick_config(55);
    auto fa = fit_gaussian(*pa.obs, cfg);
    auto fb = fit_gaussian(*pb.obs, cfg);
    REQUIRE(fa.converged);
    REQUIRE(fb.converged);
    double mcse = std::max(fa.diagnostics.at("alpha").mcse, fb.diagnostics.at("alpha").mcse);
    CHECK(std::abs(posterior_mean(fa, "alpha") - posterior_mean(fb, "alpha")) < 2.0 * mcse);
}

TEST_CASE("dormancy models expose per-group effects and their contrast") {
    Rng rng(808);
    std::vector<JoinedRow> rows(160);
    Rng noise(17);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        bool dormant = i % 2 == 0;
        rows[i].project_id = "p" + std::to_string(i);
        rows[i].x = dormant ? 1.0 : 0.0;
        rows[i].y = std::exp((dormant ? 1.2 : 0.4) + 0.25 * noise.normal());
    }
    auto prep = prepare_observations(rows, "STA-6", "SWQ-1", ModelKind::Gaussian);
    REQUIRE(prep.status == PrepareStatus::Ok);
    REQUIRE(prep.obs->dormant.has_value());
    auto post = fit_gaussian(*prep.obs, quick_config(99));
    REQUIRE(post.converged);
    auto decisions = decide_impact(post, "STA-6", "SWQ-1");
    REQUIRE(decisions.size() == 3);
    CHECK(decisions[0].sust_row_id == "STA-6-dormant");
    CHECK(decisions[1].sust_row_id == "STA-6-non-dormant");
    CHECK(decisions[2].sust_row_id == "STA-6-contrast");
    // the groups differ by 0.8 on the log scale; the contrast must see it
    CHECK(decisions[2].direction == Direction::Increase);
    CHECK(decisions[2].hdi.low > 0.0);
}

TEST_CASE("decision criterion: zero inside the interval means no evidence") {
    std::vector<double> flat;
    Rng rng(4);
    for (int i = 0; i < 2000; ++i) flat.push_back(-0.16 + (0.29 + 0.16) * rng.uniform01());
    auto post = synthetic_alpha_posterior(flat);
    auto decisions = decide_impact(post, "COM-1", "SWQ-1");
    REQUIRE(decisions.size() == 1);
    CHECK(decisions[0].direction == Direction::NoEvidence);
    CHECK(decisions[0].quality_impact == QualityImpact::None);
}

TEST_CASE("decision criterion: a positive interval on a lower-is-better metric degrades") {
    std::vector<double> pos;
    Rng rng(6);
    for (int i = 0; i < 2000; ++i) pos.push_back(0.13 + 0.10 * rng.uniform01());
    auto post = synthetic_alpha_posterior(pos);
    auto decisions = decide_impact(post, "COM-1", "SWQ-2.3");
    CHECK(decisions[0].direction == Direction::Increase);
    CHECK(decisions[0].quality_impact == QualityImpact::Degrades);
}

TEST_CASE("decision criterion: polarity table flips for coverage") {
    std::vector<double> neg;
    Rng rng(8);
    for (int i = 0; i < 2000; ++i) neg.push_back(-0.5 + 0.4 * rng.uniform01());  // [-0.5, -0.1]
    auto post = synthetic_alpha_posterior(neg);
    auto decisions = decide_impact(post, "POP-1", "SWQ-2.1");
    CHECK(decisions[0].direction == Direction::Decrease);
    CHECK(decisions[0].quality_impact == QualityImpact::Degrades);  // less coverage is worse

    auto on_defects = decide_impact(post, "POP-1", "SWQ-1");
    CHECK(on_defects[0].quality_impact == QualityImpact::Improves);  // fewer defects is better
}

TEST_CASE("decision invariance under shifts and negation") {
    Rng rng(10);
    std::vector<double> samples;
    for (int i = 0; i < 1000; ++i) samples.push_back(rng.normal());
    auto h = hdi(samples, 0.95);

    std::vector<double> shifted;
    for (double v : samples) shifted.push_back(v + h.high + 1.0);
    auto hs = hdi(shifted, 0.95);
    CHECK(classify_direction(hs) == Direction::Increase);

    std::vector<double> pos;
    for (int i = 0; i < 1000; ++i) pos.push_back(1.0 + rng.uniform01());
    auto hp = hdi(pos, 0.95);
    CHECK(classify_direction(hp) == Direction::Increase);
    std::vector<double> negated;
    for (double v : pos) negated.push_back(-v);
    CHECK(classify_direction(hdi(negated, 0.95)) == Direction::Decrease);
}

TEST_CASE("gaussian effect sizes reproduce the reported ranges") {
    auto effect = effect_gaussian(Hdi{-0.16, 0.29, 0.95}, 31095852.87);
    CHECK(effect.pct_low == Catch::Approx(-14.79).margin(0.1));
    CHECK(effect.pct_high == Catch::Approx(33.64).margin(0.1));
    CHECK(effect.predictor_sd == 31095852.87);

    auto null_effect = effect_gaussian(Hdi{0.0, 0.0, 0.95}, 1.0);
    CHECK(null_effect.pct_low == 0.0);
    CHECK(null_effect.pct_high == 0.0);
}

TEST_CASE("poisson effect sizes scale the interval by a tenth") {
    auto effect = effect_poisson(Hdi{0.13, 0.23, 0.95});
    CHECK(effect.unit_low == Catch::Approx(0.013).epsilon(1e-12));
    CHECK(effect.unit_high == Catch::Approx(0.023).epsilon(1e-12));
    auto zero = effect_poisson(Hdi{0.0, 0.0, 0.95});
    CHECK(zero.unit_low == 0.0);
    CHECK(zero.unit_high == 0.0);
}

TEST_CASE("posterior predictive check accepts well-specified data") {
    auto obs = simulate_gaussian(0.4, 1.0, 0.3, 150, 31);
    auto post = fit_gaussian(obs, quick_config(32));
    REQUIRE(post.converged);
    auto ppc = posterior_predictive_check(post, obs, 1);
    CHECK(ppc.ok);
}

TEST_CASE("posterior predictive check accepts well-specified data across seeds") {
    int ok_runs = 0;
    for (int s = 1; s <= 20; ++s) {
        auto obs = simulate_gaussian(0.3, 0.8, 0.35, 120, 9000 + s);
        auto cfg = quick_config(hash_combine(12, static_cast<std::uint64_t>(s)));
        cfg.chains = 2;
        cfg.draws = 600;
        cfg.warmup = 300;
        auto post = fit_gaussian(obs, cfg);
        if (!post.converged) continue;
        if (posterior_predictive_check(post, obs, 9000 + s).ok) ++ok_runs;
    }
    CHECK(ok_runs >= 18);
}

TEST_CASE("posterior predictive check flags zero-variance predictions against varying data") {
    // fit on a constant outcome so sigma collapses to its floor, then check
    // the fit against genuinely varying outcomes
    std::vector<JoinedRow> rows(40);
    Rng rng(23);
    for (auto& r : rows) {
        r.x = rng.uniform(1.0, 9.0);
        r.y = 3.0;
    }
    auto prep = prepare_observations(rows, "COM-1", "SWQ-1", ModelKind::Gaussian);
    REQUIRE(prep.status == PrepareStatus::Ok);
    auto post = fit_gaussian(*prep.obs, quick_config(24));

    auto varying = *prep.obs;
    Rng spread(25);
    for (auto& y : varying.y) y = std::exp(1.0 + spread.normal());
    auto ppc = posterior_predictive_check(post, varying, 26);
    CHECK_FALSE(ppc.ok);
    CHECK(ppc.observed_sd > ppc.sd_high);
}

TEST_CASE("posterior predictive check flags shifted outcomes") {
    auto obs = simulate_gaussian(0.4, 1.0, 0.3, 150, 41);
    auto post = fit_gaussian(obs, quick_config(42));
    REQUIRE(post.converged);
    auto shifted = obs;
    for (auto& y : shifted.y) y *= std::exp(10.0);  // +10 on the log scale
    auto ppc = posterior_predictive_check(post, shifted, 2);
    CHECK_FALSE(ppc.ok);
    CHECK(ppc.observed_mean > ppc.mean_high);
}

TEST_CASE("poisson predictive mean lands near the sample mean") {
    auto obs = simulate_poisson(0.25, 2.0, 150, 51);
    auto post = fit_poisson(obs, quick_config(52));
    REQUIRE(post.converged);
    auto ppc = posterior_predictive_check(post, obs, 3);
    CHECK(ppc.ok);
    double sample_mean = 0.0;
    for (double y : obs.y) sample_mean += y;
    sample_mean /= static_cast<double>(obs.y.size());
    double predictive_mid = 0.5 * (ppc.mean_low + ppc.mean_high);
    CHECK(std::abs(predictive_mid - sample_mean) < 0.1 * sample_mean);
}

TEST_CASE("converged fits honor the diagnostics contract") {
    auto obs = simulate_gaussian(0.5, 1.0, 0.3, 200, 61);
    auto post = fit_gaussian(obs, quick_config(62));
    REQUIRE(post.converged);
    for (const auto& [name, d] : post.diagnostics) {
        CHECK(d.mcse < 0.02);
        CHECK(d.rhat < 1.01);
        CHECK(d.ess >= 400.0);
    }
    CHECK(post.mcse_max < 0.02);
    CHECK(post.rhat_max < 1.01);
}

TEST_CASE("posterior csv export is well-formed") {
    auto obs = simulate_gaussian(0.1, 0.4, 0.5, 40, 71);
    auto cfg = quick_config(72);
    cfg.chains = 2;
    cfg.draws = 200;
    cfg.warmup = 150;
    auto post = fit_gaussian(obs, cfg);
    std::ostringstream out;
    write_posterior_csv(out, post);
    std::istringstream in(out.str());
    std::string header;
    REQUIRE(std::getline(in, header));
    CHECK(header == "chain,draw,parameter,value");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 2 * 200 * 3);  // chains x draws x parameters
}
