#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "repohealth/bayes.hpp"
#include "repohealth/code_quality.hpp"
#include "repohealth/csv.hpp"
#include "repohealth/ingest.hpp"
#include "repohealth/run_config.hpp"
#include "repohealth/sustainability.hpp"

namespace repohealth {

inline const std::vector<std::string>& quality_display_ids() {
    static const std::vector<std::string> ids = {"SWQ-1",   "SWQ-2.1", "SWQ-2.2", "SWQ-2.3",
                                                 "SWQ-2.4", "SWQ-2.5", "SWQ-2.6", "SWQ-2.7"};
    return ids;
}

inline const std::vector<std::string>& sustainability_display_ids() {
    static const std::vector<std::string> ids = {"COM-1", "COM-2", "POP-1", "STA-1", "STA-2", "STA-3",
                                                 "STA-4", "STA-5", "STA-6", "STA-7", "STA-8", "STA-9",
                                                 "TEC-1", "TEC-2", "TEC-3", "TEC-4"};
    return ids;
}

// Matrix rows: STA-6 expands to its two group rows.
inline const std::vector<std::string>& matrix_row_ids() {
    static const std::vector<std::string> ids = {
        "COM-1", "COM-2", "POP-1", "STA-1", "STA-2", "STA-3", "STA-4", "STA-5", "STA-6-dormant",
        "STA-6-non-dormant", "STA-7", "STA-8", "STA-9", "TEC-1", "TEC-2", "TEC-3", "TEC-4"};
    return ids;
}

namespace detail {

// Index-parallel helper; each worker writes only its own slots, so the
// output never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int n_threads = std::min<int>(jobs, static_cast<int>(n));
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RepoHealthError("cannot write " + path.string());
    out << content;
}

}  // namespace detail

struct StageResult {
    std::vector<std::string> projects;  // processed successfully
    std::vector<std::string> failures;  // "project: reason"
    bool ok() const { return failures.empty(); }
};

// Sorted project directories under the corpus root (those carrying repo.json).
inline std::vector<std::filesystem::path> discover_projects(const std::filesystem::path& corpus) {
    namespace fs = std::filesystem;
    if (!fs::exists(corpus) || !fs::is_directory(corpus))
        throw RepoHealthError("corpus root is not a directory: " + corpus.string());
    std::vector<fs::path> projects;
    for (const auto& entry : fs::directory_iterator(corpus))
        if (entry.is_directory() && fs::exists(entry.path() / "repo.json")) projects.push_back(entry.path());
    std::sort(projects.begin(), projects.end());
    if (projects.empty()) throw RepoHealthError("corpus contains no project directories: " + corpus.string());
    return projects;
}

// Stage 1: normalize every project into <out>/ingest/<project>/ plus a
// manifest. Failing projects are isolated and reported.
inline StageResult stage_ingest(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    auto projects = discover_projects(cfg.corpus_dir);
    const fs::path out_root = fs::path(cfg.out_dir) / "ingest";

    struct Row {
        std::string project;
        std::string error;
        std::size_t commits = 0, issues = 0, prs = 0, warnings = 0;
        Timestamp start = 0, end = 0;
    };
    std::vector<Row> rows(projects.size());
    detail::parallel_for(projects.size(), cfg.jobs, [&](std::size_t i) {
        Row& row = rows[i];
        row.project = projects[i].filename().string();
        try {
            auto assembled = assemble_dataset(projects[i]);
            write_dataset(assembled.dataset, out_root / row.project);
            row.commits = assembled.dataset.commits.size();
            row.issues = assembled.dataset.issues.size();
            row.prs = assembled.dataset.prs.size();
            row.warnings = assembled.warnings.count;
            row.start = assembled.dataset.start;
            row.end = assembled.dataset.end;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });

    StageResult result;
    std::string manifest = "project_id,commits,issues,prs,warnings,start,end\n";
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            result.failures.push_back(row.project + ": " + row.error);
            continue;
        }
        result.projects.push_back(row.project);
        manifest += csv::join_row({row.project, std::to_string(row.commits), std::to_string(row.issues),
                                   std::to_string(row.prs), std::to_string(row.warnings),
                                   std::to_string(row.start), std::to_string(row.end)});
    }
    detail::write_file(out_root / "manifest.csv", manifest);
    return result;
}

inline std::vector<std::string> ingested_projects(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path root = fs::path(cfg.out_dir) / "ingest";
    if (!fs::exists(root)) throw RepoHealthError("ingest stage output missing: " + root.string());
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

// Stage 2: sustainability metrics CSV over the ingested corpus.
inline StageResult stage_metrics(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    auto names = ingested_projects(cfg);
    std::vector<SustainabilityVector> vectors(names.size());
    std::vector<std::string> errors(names.size());
    const MetricsConfig mcfg = cfg.metrics_config();
    detail::parallel_for(names.size(), cfg.jobs, [&](std::size_t i) {
        try {
            auto ds = assemble_dataset(fs::path(cfg.out_dir) / "ingest" / names[i]).dataset;
            vectors[i] = compute_vector(ds, mcfg);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    StageResult result;
    std::vector<SustainabilityVector> kept;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!errors[i].empty()) result.failures.push_back(names[i] + ": " + errors[i]);
        else {
            result.projects.push_back(names[i]);
            kept.push_back(vectors[i]);
        }
    }
    std::ostringstream out;
    write_metrics_csv(out, kept);
    detail::write_file(fs::path(cfg.out_dir) / "metrics.csv", out.str());
    return result;
}

inline std::vector<LanguageRules> effective_language_rules(const RunConfig& cfg) {
    auto rules = builtin_language_rules();
    if (!cfg.lang_rules_dir.empty()) {
        namespace fs = std::filesystem;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(cfg.lang_rules_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) rules.push_back(load_language_rules(f));
    }
    validate_rules(rules);
    return rules;
}

// Stage 3: the eight quality values per project. Source trees and optional
// coverage reports are read from the corpus (`<project>/source`,
// `<project>/coverage.csv`); issues come from the ingest output.
inline StageResult stage_quality(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    auto names = ingested_projects(cfg);
    auto rules = effective_language_rules(cfg);
    const QualityThresholds thresholds = cfg.quality_thresholds();

    std::vector<QualityProfile> profiles(names.size());
    std::vector<std::string> errors(names.size());
    detail::parallel_for(names.size(), cfg.jobs, [&](std::size_t i) {
        try {
            auto ds = assemble_dataset(fs::path(cfg.out_dir) / "ingest" / names[i]).dataset;
            const fs::path source = fs::path(cfg.corpus_dir) / names[i] / "source";
            std::vector<FileProfile> files;
            if (fs::exists(source)) files = scan_tree(source, rules).files;

            QualityProfile q = quality_profile(files, thresholds);
            q.swq2_6 = duplication_pct(files, thresholds.duplication_block_lines);

            std::optional<CoverageReport> report;
            const fs::path report_path = fs::path(cfg.corpus_dir) / names[i] / "coverage.csv";
            if (fs::exists(report_path)) report = load_coverage_report(report_path);
            auto cov = coverage_metric(files, report, thresholds.test_path_patterns);
            q.swq2_1 = cov.pct;
            q.coverage_source = cov.source;

            std::int64_t total_sloc = 0;
            for (const auto& f : files) total_sloc += f.sloc;
            q.swq1 = defect_density(ds.issues, ds.repo, thresholds.defect_labels, thresholds.swq1_per_kloc,
                                    total_sloc);
            profiles[i] = q;
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    StageResult result;
    std::vector<std::pair<std::string, QualityProfile>> rows;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!errors[i].empty()) result.failures.push_back(names[i] + ": " + errors[i]);
        else {
            result.projects.push_back(names[i]);
            rows.emplace_back(names[i], profiles[i]);
        }
    }
    std::ostringstream out;
    write_quality_csv(out, rows);
    detail::write_file(fs::path(cfg.out_dir) / "quality.csv", out.str());
    return result;
}

// ---- analysis stage ------------------------------------------------------

inline const char* kResultsCsvHeader =
    "quality_id,sust_id,model,n_projects,n_excluded,hdi_low,hdi_high,direction,quality_impact,"
    "mcse_max,rhat_max,converged";

struct AnalyzeSummary {
    int gaussian_attempted = 0;
    int poisson_attempted = 0;
    int converged = 0;
    int refused = 0;
    StageResult stage;
};

namespace detail {

struct MetricTables {
    // project -> sustainability display id -> value
    std::map<std::string, std::map<std::string, double>> sustainability;
    // project -> quality display id -> value
    std::map<std::string, std::map<std::string, double>> quality;
};

inline MetricTables load_metric_tables(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    MetricTables tables;
    auto metrics = csv::read_file((fs::path(cfg.out_dir) / "metrics.csv").string());
    int pid = metrics.column("project_id"), mid = metrics.column("metric_id"), val = metrics.column("value"),
        comp = metrics.column("computed");
    if (pid < 0 || mid < 0 || val < 0 || comp < 0)
        throw RepoHealthError("metrics.csv is missing required columns");
    for (const auto& row : metrics.rows) {
        if (row[comp] != "true") continue;
        tables.sustainability[row[pid]][row[mid]] = std::stod(row[val]);
    }

    auto quality = csv::read_file((fs::path(cfg.out_dir) / "quality.csv").string());
    static const std::vector<std::pair<std::string, std::string>> cols = {
        {"SWQ-1", "swq1"},     {"SWQ-2.1", "swq2_1"}, {"SWQ-2.2", "swq2_2"}, {"SWQ-2.3", "swq2_3"},
        {"SWQ-2.4", "swq2_4"}, {"SWQ-2.5", "swq2_5"}, {"SWQ-2.6", "swq2_6"}, {"SWQ-2.7", "swq2_7"}};
    int qpid = quality.column("project_id");
    if (qpid < 0) throw RepoHealthError("quality.csv is missing project_id");
    for (const auto& [display, column] : cols) {
        int c = quality.column(column);
        if (c < 0) throw RepoHealthError("quality.csv is missing column " + column);
        for (const auto& row : quality.rows)
            if (!row[c].empty()) tables.quality[row[qpid]][display] = std::stod(row[c]);
    }
    return tables;
}

inline std::vector<JoinedRow> join_rows(const MetricTables& tables, const std::string& sust_id,
                                        const std::string& quality_id) {
    std::set<std::string> projects;
    for (const auto& [p, m] : tables.sustainability) projects.insert(p);
    for (const auto& [p, m] : tables.quality) projects.insert(p);
    std::vector<JoinedRow> rows;
    for (const auto& p : projects) {
        JoinedRow row;
        row.project_id = p;
        auto s = tables.sustainability.find(p);
        if (s != tables.sustainability.end()) {
            auto it = s->second.find(sust_id);
            if (it != s->second.end()) row.x = it->second;
        }
        auto q = tables.quality.find(p);
        if (q != tables.quality.end()) {
            auto it = q->second.find(quality_id);
            if (it != q->second.end()) row.y = it->second;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct FitTask {
    std::string quality_id;
    std::string sust_id;
    ModelKind kind;
    bool rejected = false;  // Poisson x log-transform undefined for this predictor
};

struct FitOutcome {
    FitTask task;
    PrepareResult prep;
    std::optional<Posterior> posterior;
    std::vector<ImpactDecision> decisions;
    std::string fit_id;
};

}  // namespace detail

inline std::string fit_identifier(const std::string& quality_id, const std::string& sust_id) {
    std::string id = quality_id + "__" + sust_id;
    for (auto& c : id)
        if (c == '.') c = '_';
    return id;
}

// Stage 4: every single-predictor model. Gaussian models cover the three
// metric-scale outcomes and all 16 predictors; Poisson models cover the five
// count outcomes and the 13 predictors whose log transform is defined.
// Refusals (insufficient or degenerate data) still count as attempts;
// rejected predictor-model pairs do not, and render as NA.
inline AnalyzeSummary stage_analyze(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    auto tables = detail::load_metric_tables(cfg);

    std::vector<detail::FitTask> tasks;
    for (const auto& quality : quality_display_ids()) {
        const ModelKind kind = gaussian_quality(quality) ? ModelKind::Gaussian : ModelKind::Poisson;
        for (const auto& sust : sustainability_display_ids()) {
            detail::FitTask task{quality, sust, kind, false};
            task.rejected = kind == ModelKind::Poisson && poisson_rejected_predictor(sust);
            tasks.push_back(std::move(task));
        }
    }

    AnalyzeSummary summary;
    std::vector<detail::FitOutcome> outcomes(tasks.size());
    std::vector<std::string> errors(tasks.size());
    const ModelConfig base_model = cfg.model_config();

    detail::parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
        auto& outcome = outcomes[i];
        outcome.task = tasks[i];
        outcome.fit_id = fit_identifier(tasks[i].quality_id, tasks[i].sust_id);
        if (tasks[i].rejected) return;
        try {
            auto rows = detail::join_rows(tables, tasks[i].sust_id, tasks[i].quality_id);
            outcome.prep = prepare_observations(rows, tasks[i].sust_id, tasks[i].quality_id, tasks[i].kind,
                                                static_cast<std::size_t>(cfg.min_rows));
            if (outcome.prep.status != PrepareStatus::Ok) return;

            ModelConfig model = base_model;
            model.seed = hash_combine(cfg.seed, outcome.fit_id);
            outcome.posterior = fit_model(*outcome.prep.obs, model);
            if (outcome.posterior->converged)
                outcome.decisions = decide_impact(*outcome.posterior, tasks[i].sust_id, tasks[i].quality_id,
                                                  cfg.hdi_mass);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    // single-writer output, deterministic order
    std::string results = std::string(kResultsCsvHeader) + "\n";
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& outcome = outcomes[i];
        const auto& task = tasks[i];
        const std::string model_name = to_string(task.kind);
        if (!errors[i].empty()) {
            summary.stage.failures.push_back(outcome.fit_id + ": " + errors[i]);
            continue;
        }
        auto row = [&](const std::string& sust_row, const std::string& hdi_low, const std::string& hdi_high,
                       const std::string& direction, const std::string& impact, const std::string& mcse,
                       const std::string& rhat, bool converged, std::size_t n, std::size_t n_excluded) {
            results += csv::join_row({task.quality_id, sust_row, model_name, std::to_string(n),
                                      std::to_string(n_excluded), hdi_low, hdi_high, direction, impact, mcse,
                                      rhat, converged ? "true" : "false"});
        };
        auto row_ids = [&]() -> std::vector<std::string> {
            if (task.sust_id != "STA-6") return {task.sust_id};
            return {"STA-6-dormant", "STA-6-non-dormant", "STA-6-contrast"};
        }();

        if (task.rejected) {
            row(task.sust_id, "", "", "NA", "NA", "", "", false, 0, 0);
            continue;
        }
        if (task.kind == ModelKind::Gaussian) ++summary.gaussian_attempted;
        else ++summary.poisson_attempted;

        if (outcome.prep.status != PrepareStatus::Ok) {
            ++summary.refused;
            for (const auto& rid : row_ids)
                row(rid, "", "", "", "", "", "", false, outcome.prep.included, outcome.prep.excluded);
            continue;
        }
        const auto& post = *outcome.posterior;
        const std::string mcse = format_double(post.mcse_max);
        const std::string rhat = format_double(post.rhat_max);
        if (!post.converged) {
            for (const auto& rid : row_ids)
                row(rid, "", "", "", "", mcse, rhat, false, outcome.prep.included, outcome.prep.excluded);
        } else {
            ++summary.converged;
            for (const auto& decision : outcome.decisions)
                row(decision.sust_row_id, format_double(decision.hdi.low), format_double(decision.hdi.high),
                    to_string(decision.direction), to_string(decision.quality_impact), mcse, rhat, true,
                    outcome.prep.included, outcome.prep.excluded);
        }
    }
    detail::write_file(fs::path(cfg.out_dir) / "results.csv", results);

    // posterior exports for every fit that ran
    for (const auto& outcome : outcomes) {
        if (!outcome.posterior) continue;
        std::ostringstream post_csv;
        write_posterior_csv(post_csv, *outcome.posterior);
        detail::write_file(fs::path(cfg.out_dir) / "posteriors" / (outcome.fit_id + ".csv"), post_csv.str());
    }
    return summary;
}

// ---- report stage --------------------------------------------------------

struct MatrixCell {
    std::string symbol;  // "x", "+", "-", "NA", or "" when missing
    std::string n;
};

struct ImpactMatrix {
    std::vector<std::string> rows;     // matrix_row_ids order
    std::vector<std::string> columns;  // quality ids
    std::map<std::string, std::map<std::string, MatrixCell>> cells;
    int missing = 0;
};

inline ImpactMatrix build_matrix(const csv::Table& results, bool flip_rendering) {
    ImpactMatrix m;
    m.rows = matrix_row_ids();
    m.columns = quality_display_ids();
    int qc = results.column("quality_id"), sc = results.column("sust_id"), dc = results.column("direction"),
        ic = results.column("quality_impact"), nc = results.column("n_projects");
    if (qc < 0 || sc < 0 || dc < 0 || ic < 0 || nc < 0)
        throw RepoHealthError("results.csv is missing required columns");

    std::map<std::string, std::map<std::string, MatrixCell>> cells;
    for (const auto& row : results.rows) {
        const std::string& sust = row[sc];
        MatrixCell cell;
        cell.n = row[nc];
        const std::string& direction = row[dc];
        const std::string& impact = row[ic];
        if (direction == "NA") cell.symbol = "NA";
        else if (direction.empty()) cell.symbol = "";
        else if (direction == "NoEvidence") cell.symbol = "x";
        else {
            bool improves = impact == "Improves";
            if (flip_rendering && flip_set_member(sust)) improves = !improves;
            cell.symbol = improves ? "+" : "-";
        }
        // NA rows carry the base predictor id and apply to the whole row set
        if (sust == "STA-6") continue;  // never rendered directly
        cells[sust][row[qc]] = cell;
    }
    // rejected Poisson combos were written under the plain predictor id; for
    // STA-6 nothing special is needed since it is never rejected
    for (const auto& rid : m.rows)
        for (const auto& col : m.columns) {
            auto it = cells.find(rid);
            if (it != cells.end() && it->second.count(col)) {
                m.cells[rid][col] = it->second[col];
            } else {
                m.cells[rid][col] = MatrixCell{"", ""};
                ++m.missing;
            }
        }
    return m;
}

inline std::string matrix_to_csv(const ImpactMatrix& m) {
    std::string out = "sust_id,quality_id,symbol,n_projects\n";
    for (const auto& rid : m.rows)
        for (const auto& col : m.columns) {
            const auto& cell = m.cells.at(rid).at(col);
            out += csv::join_row({rid, col, cell.symbol, cell.symbol.empty() ? "" : cell.n});
        }
    return out;
}

inline std::string matrix_to_text(const ImpactMatrix& m) {
    // column default n = most frequent count among decided cells (ties take
    // the larger count); cells print their n only when it differs
    std::map<std::string, std::string> default_n;
    for (const auto& col : m.columns) {
        std::map<std::string, int> freq;
        for (const auto& rid : m.rows) {
            const auto& cell = m.cells.at(rid).at(col);
            if (cell.symbol.empty() || cell.symbol == "NA") continue;
            ++freq[cell.n];
        }
        std::string best;
        int best_count = -1;
        for (const auto& [n, count] : freq) {
            if (count > best_count ||
                (count == best_count && !n.empty() && (best.empty() || std::stol(n) > std::stol(best)))) {
                best = n;
                best_count = count;
            }
        }
        default_n[col] = best;
    }

    auto cell_text = [&](const std::string& rid, const std::string& col) {
        const auto& cell = m.cells.at(rid).at(col);
        std::string sym = cell.symbol == "x" ? "✗" : cell.symbol;
        if (sym.empty() || cell.symbol == "NA") return sym;
        if (!cell.n.empty() && cell.n != default_n[col]) sym += " (" + cell.n + ")";
        return sym;
    };

    std::vector<std::string> headers;
    headers.reserve(m.columns.size());
    for (const auto& col : m.columns)
        headers.push_back(default_n[col].empty() ? col : col + " (" + default_n[col] + ")");

    std::size_t row_width = 0;
    for (const auto& rid : m.rows) row_width = std::max(row_width, rid.size());
    std::vector<std::size_t> widths(m.columns.size());
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        widths[c] = headers[c].size();
        for (const auto& rid : m.rows) {
            auto text = cell_text(rid, m.columns[c]);
            // the check mark is three UTF-8 bytes but one display column
            std::size_t display = text.size() - (text.find("✗") != std::string::npos ? 2 : 0);
            widths[c] = std::max(widths[c], display);
        }
    }

    std::ostringstream out;
    out << std::string(row_width, ' ');
    for (std::size_t c = 0; c < m.columns.size(); ++c) out << "  " << std::setw(static_cast<int>(widths[c])) << headers[c];
    out << "\n";
    for (const auto& rid : m.rows) {
        out << rid << std::string(row_width - rid.size(), ' ');
        for (std::size_t c = 0; c < m.columns.size(); ++c) {
            auto text = cell_text(rid, m.columns[c]);
            std::size_t display = text.size() - (text.find("✗") != std::string::npos ? 2 : 0);
            out << "  " << text << std::string(widths[c] - display, ' ');
        }
        out << "\n";
    }
    if (m.missing > 0) out << "missing cells: " << m.missing << "\n";
    return out.str();
}

// Stage 5: the impact matrix in both machine and text form.
inline ImpactMatrix stage_report(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    auto results = csv::read_file((fs::path(cfg.out_dir) / "results.csv").string());
    auto matrix = build_matrix(results, cfg.flip_rendering);
    detail::write_file(fs::path(cfg.out_dir) / "matrix.csv", matrix_to_csv(matrix));
    detail::write_file(fs::path(cfg.out_dir) / "matrix.txt", matrix_to_text(matrix));
    return matrix;
}

// Parameter names present in one posterior export.
inline std::vector<std::string> posterior_parameters(const RunConfig& cfg, const std::string& fit_id) {
    namespace fs = std::filesystem;
    const fs::path post_path = fs::path(cfg.out_dir) / "posteriors" / (fit_id + ".csv");
    if (!fs::exists(post_path)) throw RepoHealthError("missing posterior export: " + post_path.string());
    auto table = csv::read_file(post_path.string());
    int pc = table.column("parameter");
    if (pc < 0) throw RepoHealthError("posterior export is missing columns: " + post_path.string());
    std::vector<std::string> names;
    for (const auto& row : table.rows)
        if (std::find(names.begin(), names.end(), row[pc]) == names.end()) names.push_back(row[pc]);
    return names;
}

// Histogram plot data for one exported fit: 50 bins plus a final row with
// the HDI bounds and its mass. Densities integrate to one.
inline void export_posterior_plotdata(const RunConfig& cfg, const std::string& fit_id,
                                      const std::string& parameter = "alpha") {
    namespace fs = std::filesystem;
    const fs::path post_path = fs::path(cfg.out_dir) / "posteriors" / (fit_id + ".csv");
    if (!fs::exists(post_path)) throw RepoHealthError("missing posterior export: " + post_path.string());
    auto table = csv::read_file(post_path.string());
    int pc = table.column("parameter"), vc = table.column("value");
    if (pc < 0 || vc < 0) throw RepoHealthError("posterior export is missing columns: " + post_path.string());
    std::vector<double> samples;
    for (const auto& row : table.rows)
        if (row[pc] == parameter) samples.push_back(std::stod(row[vc]));
    if (samples.empty())
        throw RepoHealthError("posterior export has no parameter '" + parameter + "': " + post_path.string());

    double lo = samples[0], hi = samples[0];
    for (double v : samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    constexpr int kBins = 50;
    const double width = (hi - lo) / kBins;
    std::vector<std::int64_t> counts(kBins, 0);
    for (double v : samples) {
        int b = std::min(kBins - 1, static_cast<int>((v - lo) / width));
        ++counts[std::max(0, b)];
    }
    auto h = hdi(samples, cfg.hdi_mass);

    std::string out = "bin_low,bin_high,density\n";
    for (int b = 0; b < kBins; ++b) {
        double density = static_cast<double>(counts[b]) / (static_cast<double>(samples.size()) * width);
        out += csv::join_row({format_double(lo + b * width), format_double(lo + (b + 1) * width),
                              format_double(density)});
    }
    out += csv::join_row({format_double(h.low), format_double(h.high), format_double(h.mass)});
    detail::write_file(fs::path(cfg.out_dir) / "plots" / (fit_id + "__" + parameter + ".csv"), out);
}

struct ReportBundle {
    StageResult ingest;
    StageResult metrics;
    StageResult quality;
    AnalyzeSummary analyze;
    ImpactMatrix matrix;
    int exit_code = 0;  // 0 clean, 1 isolated project/fit failures
};

// End-to-end orchestration. Stages run in order over on-disk artifacts, so
// any stage can also be re-run independently later.
inline ReportBundle run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    ReportBundle bundle;
    bundle.ingest = stage_ingest(cfg);
    if (bundle.ingest.projects.empty())
        throw RepoHealthError("ingest failed for every project in the corpus");
    bundle.metrics = stage_metrics(cfg);
    bundle.quality = stage_quality(cfg);
    bundle.analyze = stage_analyze(cfg);
    bundle.matrix = stage_report(cfg);
    if (!bundle.ingest.ok() || !bundle.metrics.ok() || !bundle.quality.ok() || !bundle.analyze.stage.ok())
        bundle.exit_code = 1;
    return bundle;
}

}  // namespace repohealth
