#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "repohealth/pipeline.hpp"

using namespace repohealth;

namespace {

struct CliOptions {
    std::string corpus;
    std::string out;
    std::string config_file;
    std::int64_t seed = -1;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--corpus", opts.corpus, "corpus directory with one subdirectory per project");
    cmd->add_option("--out", opts.out, "output directory for stage artifacts");
    cmd->add_option("--config", opts.config_file, "flat key = value configuration file");
    cmd->add_option("--seed", opts.seed, "random seed for the analysis stage");
    cmd->add_option("--jobs", opts.jobs, "worker count");
}

RunConfig resolve(const CliOptions& opts, bool need_corpus, bool need_out) {
    RunConfig cfg;
    if (!opts.config_file.empty()) load_config_file(cfg, opts.config_file);
    if (!opts.corpus.empty()) cfg.corpus_dir = opts.corpus;
    if (!opts.out.empty()) cfg.out_dir = opts.out;
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.jobs > 0) cfg.jobs = opts.jobs;
    if (need_corpus && cfg.corpus_dir.empty()) throw RepoHealthError("--corpus (or config key) is required");
    if (need_out && cfg.out_dir.empty()) throw RepoHealthError("--out (or config key) is required");
    cfg.validate();
    return cfg;
}

int report_stage(const char* name, const StageResult& result) {
    std::cout << name << ": " << result.projects.size() << " project(s) processed";
    if (!result.ok()) {
        std::cout << ", " << result.failures.size() << " failed";
        for (const auto& f : result.failures) std::cout << "\n  " << f;
    }
    std::cout << "\n";
    return result.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"repository sustainability and software quality analysis"};
    app.require_subcommand(1);

    CliOptions opts;
    auto* ingest = app.add_subcommand("ingest", "normalize raw project exports into datasets");
    auto* metrics = app.add_subcommand("metrics", "compute the sustainability metrics CSV");
    auto* quality = app.add_subcommand("quality", "compute the software quality CSV");
    auto* analyze = app.add_subcommand("analyze", "fit every single-predictor model");
    auto* report = app.add_subcommand("report", "render the impact matrix and plot data");
    for (auto* cmd : {ingest, metrics, quality, analyze, report}) add_common(cmd, opts);

    std::string plot_fit, plot_param;
    report->add_option("--plot", plot_fit, "fit id to export histogram plot data for ('all' exports every fit)");
    report->add_option("--plot-param", plot_param, "posterior parameter for --plot (default: every parameter)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) {
            auto cfg = resolve(opts, true, true);
            return report_stage("ingest", stage_ingest(cfg));
        }
        if (metrics->parsed()) {
            auto cfg = resolve(opts, false, true);
            return report_stage("metrics", stage_metrics(cfg));
        }
        if (quality->parsed()) {
            auto cfg = resolve(opts, true, true);
            return report_stage("quality", stage_quality(cfg));
        }
        if (analyze->parsed()) {
            auto cfg = resolve(opts, false, true);
            auto summary = stage_analyze(cfg);
            std::cout << "analyze: " << summary.gaussian_attempted << " gaussian and "
                      << summary.poisson_attempted << " poisson fits attempted, " << summary.converged
                      << " converged, " << summary.refused << " refused\n";
            for (const auto& f : summary.stage.failures) std::cout << "  " << f << "\n";
            return summary.stage.ok() ? 0 : 1;
        }
        if (report->parsed()) {
            auto cfg = resolve(opts, false, true);
            auto matrix = stage_report(cfg);
            auto export_fit = [&](const std::string& fit_id) {
                if (!plot_param.empty()) {
                    export_posterior_plotdata(cfg, fit_id, plot_param);
                    return;
                }
                for (const auto& param : posterior_parameters(cfg, fit_id))
                    export_posterior_plotdata(cfg, fit_id, param);
            };
            if (plot_fit == "all") {
                namespace fs = std::filesystem;
                const fs::path dir = fs::path(cfg.out_dir) / "posteriors";
                std::vector<std::string> fits;
                if (fs::exists(dir))
                    for (const auto& entry : fs::directory_iterator(dir))
                        if (entry.path().extension() == ".csv") fits.push_back(entry.path().stem().string());
                std::sort(fits.begin(), fits.end());
                for (const auto& f : fits) export_fit(f);
            } else if (!plot_fit.empty()) {
                export_fit(plot_fit);
            }
            std::cout << matrix_to_text(matrix);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
