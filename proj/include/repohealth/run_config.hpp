#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "repohealth/bayes.hpp"
#include "repohealth/code_quality.hpp"
#include "repohealth/common.hpp"
#include "repohealth/sustainability.hpp"

namespace repohealth {

// Every pipeline tunable, with defaults matching the analysis this tool
// reproduces. The config file is a flat `key = value` document over exactly
// these keys; unknown keys are hard errors.
struct RunConfig {
    std::string corpus_dir;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 1;

    // sustainability metrics
    std::int64_t window_weeks = 12;
    std::int64_t activity_window_days = 90;
    std::int64_t turnover_lookback_months = 6;
    std::int64_t dormancy_months = 12;
    double dormancy_threshold = 1.0;
    int as_of_year = 2023;
    std::string doc_extensions = "txt,md";

    // code quality
    std::int64_t medium_cc_low = 11;
    std::int64_t medium_cc_high = 25;
    std::int64_t very_high_cc = 50;
    std::int64_t very_large_file_sloc = 1000;
    std::int64_t very_large_function_sloc = 100;
    std::int64_t duplication_block_lines = 6;
    std::string test_path_patterns = "test,spec";
    std::string defect_labels = "bug,defect,type: bug,kind/bug";
    bool swq1_per_kloc = false;
    std::string lang_rules_dir;  // extra declarative language definitions

    // analysis
    int chains = 4;
    int draws = 3000;
    int warmup = 1000;
    double hdi_mass = 0.95;
    double coef_prior_sd = 10.0;
    double delta_prior_sd = 1.0;
    double sigma_low = 1e-3;
    double sigma_high = 10.0;
    int retries = 2;
    std::int64_t min_rows = 10;
    bool flip_rendering = false;

    MetricsConfig metrics_config() const {
        MetricsConfig m;
        m.window_weeks = window_weeks;
        m.activity_window_days = activity_window_days;
        m.turnover_lookback_months = turnover_lookback_months;
        m.dormancy_lookback_months = dormancy_months;
        m.dormancy_threshold = dormancy_threshold;
        m.as_of_year = as_of_year;
        m.doc_extensions = {};
        for (const auto& e : split(doc_extensions, ','))
            if (!std::string(trim(e)).empty()) m.doc_extensions.insert(to_lower(trim(e)));
        return m;
    }

    QualityThresholds quality_thresholds() const {
        QualityThresholds t;
        t.medium_cc_low = medium_cc_low;
        t.medium_cc_high = medium_cc_high;
        t.very_high_cc = very_high_cc;
        t.very_large_file_sloc = very_large_file_sloc;
        t.very_large_function_sloc = very_large_function_sloc;
        t.duplication_block_lines = static_cast<std::size_t>(duplication_block_lines);
        t.test_path_patterns.clear();
        for (const auto& p : split(test_path_patterns, ','))
            if (!std::string(trim(p)).empty()) t.test_path_patterns.emplace_back(trim(p));
        t.defect_labels.clear();
        for (const auto& l : split(defect_labels, ','))
            if (!std::string(trim(l)).empty()) t.defect_labels.insert(to_lower(trim(l)));
        t.swq1_per_kloc = swq1_per_kloc;
        return t;
    }

    ModelConfig model_config() const {
        ModelConfig m;
        m.chains = chains;
        m.draws = draws;
        m.warmup = warmup;
        m.seed = seed;
        m.hdi_mass = hdi_mass;
        m.coef_prior_sd = coef_prior_sd;
        m.delta_prior_sd = delta_prior_sd;
        m.sigma_low = sigma_low;
        m.sigma_high = sigma_high;
        m.retries = retries;
        return m;
    }

    void validate() const {
        auto require = [](bool ok, const std::string& what) {
            if (!ok) throw RepoHealthError("config: " + what);
        };
        require(jobs >= 1, "jobs must be >= 1");
        require(window_weeks >= 1, "window_weeks must be >= 1");
        require(activity_window_days >= 1, "activity_window_days must be >= 1");
        require(turnover_lookback_months >= 1, "turnover_lookback_months must be >= 1");
        require(dormancy_months >= 1, "dormancy_months must be >= 1");
        require(dormancy_threshold > 0.0, "dormancy_threshold must be positive");
        require(as_of_year >= 1970, "as_of_year must be a calendar year");
        require(medium_cc_low >= 1 && medium_cc_high >= medium_cc_low, "medium complexity band is inverted");
        require(very_high_cc >= medium_cc_high, "very_high_cc must not undercut the medium band");
        require(very_large_file_sloc >= 1, "very_large_file_sloc must be >= 1");
        require(very_large_function_sloc >= 1, "very_large_function_sloc must be >= 1");
        require(duplication_block_lines >= 1, "duplication_block_lines must be >= 1");
        require(chains >= 2, "chains must be >= 2");
        require(draws >= 100, "draws must be >= 100");
        require(warmup >= 10, "warmup must be >= 10");
        require(hdi_mass > 0.0 && hdi_mass < 1.0, "hdi_mass must lie in (0, 1)");
        require(coef_prior_sd > 0.0 && delta_prior_sd > 0.0, "prior scales must be positive");
        require(sigma_low > 0.0 && sigma_high > sigma_low, "sigma bounds are inverted");
        require(retries >= 0, "retries must be >= 0");
        require(min_rows >= 2, "min_rows must be >= 2");
    }
};

namespace detail {

inline bool parse_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1") out = true;
    else if (v == "false" || v == "0") out = false;
    else return false;
    return true;
}

}  // namespace detail

// Applies one key=value assignment; throws on unknown keys or bad values.
inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_i64 = [&](std::int64_t& out) {
        if (!detail::parse_i64(value, out)) throw RepoHealthError("config: bad integer for " + key);
    };
    auto as_int = [&](int& out) {
        std::int64_t v = 0;
        if (!detail::parse_i64(value, v)) throw RepoHealthError("config: bad integer for " + key);
        out = static_cast<int>(v);
    };
    auto as_double = [&](double& out) {
        try {
            std::size_t used = 0;
            out = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(key);
        } catch (...) {
            throw RepoHealthError("config: bad number for " + key);
        }
    };
    auto as_bool = [&](bool& out) {
        if (!detail::parse_bool(value, out)) throw RepoHealthError("config: bad flag for " + key);
    };

    if (key == "corpus") cfg.corpus_dir = value;
    else if (key == "out") cfg.out_dir = value;
    else if (key == "seed") {
        std::int64_t v = 0;
        as_i64(v);
        cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "jobs") as_int(cfg.jobs);
    else if (key == "window_weeks") as_i64(cfg.window_weeks);
    else if (key == "activity_window_days") as_i64(cfg.activity_window_days);
    else if (key == "turnover_lookback_months") as_i64(cfg.turnover_lookback_months);
    else if (key == "dormancy_months") as_i64(cfg.dormancy_months);
    else if (key == "dormancy_threshold") as_double(cfg.dormancy_threshold);
    else if (key == "as_of_year") as_int(cfg.as_of_year);
    else if (key == "doc_extensions") cfg.doc_extensions = value;
    else if (key == "medium_cc_low") as_i64(cfg.medium_cc_low);
    else if (key == "medium_cc_high") as_i64(cfg.medium_cc_high);
    else if (key == "very_high_cc") as_i64(cfg.very_high_cc);
    else if (key == "very_large_file_sloc") as_i64(cfg.very_large_file_sloc);
    else if (key == "very_large_function_sloc") as_i64(cfg.very_large_function_sloc);
    else if (key == "duplication_block_lines") as_i64(cfg.duplication_block_lines);
    else if (key == "test_path_patterns") cfg.test_path_patterns = value;
    else if (key == "defect_labels") cfg.defect_labels = value;
    else if (key == "swq1_per_kloc") as_bool(cfg.swq1_per_kloc);
    else if (key == "lang_rules_dir") cfg.lang_rules_dir = value;
    else if (key == "chains") as_int(cfg.chains);
    else if (key == "draws") as_int(cfg.draws);
    else if (key == "warmup") as_int(cfg.warmup);
    else if (key == "hdi_mass") as_double(cfg.hdi_mass);
    else if (key == "coef_prior_sd") as_double(cfg.coef_prior_sd);
    else if (key == "delta_prior_sd") as_double(cfg.delta_prior_sd);
    else if (key == "sigma_low") as_double(cfg.sigma_low);
    else if (key == "sigma_high") as_double(cfg.sigma_high);
    else if (key == "retries") as_int(cfg.retries);
    else if (key == "min_rows") as_i64(cfg.min_rows);
    else if (key == "flip_rendering") as_bool(cfg.flip_rendering);
    else throw RepoHealthError("config: unknown key '" + key + "'");
}

// Flat key=value file; '#' starts a comment, blank lines are skipped.
inline void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RepoHealthError("cannot open config file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto t = std::string(trim(line));
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw RepoHealthError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        auto key = std::string(trim(t.substr(0, eq)));
        auto value = std::string(trim(t.substr(eq + 1)));
        apply_config_entry(cfg, key, value);
    }
}

}  // namespace repohealth
