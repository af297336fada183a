#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "repohealth/common.hpp"
#include "repohealth/csv.hpp"
#include "repohealth/dataset.hpp"
#include "repohealth/language_rules.hpp"
#include "repohealth/lexical.hpp"
#include "repohealth/sustainability.hpp"

namespace repohealth {

struct QualityThresholds {
    std::int64_t medium_cc_low = 11;    // inclusive
    std::int64_t medium_cc_high = 25;   // inclusive
    std::int64_t very_high_cc = 50;     // strictly greater counts
    std::int64_t very_large_file_sloc = 1000;      // strictly greater counts
    std::int64_t very_large_function_sloc = 100;   // strictly greater counts
    std::size_t duplication_block_lines = 6;
    std::vector<std::string> test_path_patterns = {"test", "spec"};
    std::set<std::string> defect_labels = {"bug", "defect", "type: bug", "kind/bug"};
    bool swq1_per_kloc = false;  // divide by KLOC instead of repository kilobytes
};

enum class CoverageSource { Report, Proxy, None };

inline const char* to_string(CoverageSource s) {
    switch (s) {
        case CoverageSource::Report: return "report";
        case CoverageSource::Proxy: return "proxy";
        case CoverageSource::None: return "none";
    }
    return "none";
}

struct QualityProfile {
    std::optional<double> swq1;    // defect density
    std::optional<double> swq2_1;  // coverage percent
    std::int64_t swq2_2 = 0;       // functions with medium risk complexity
    std::int64_t swq2_3 = 0;       // functions with very high risk complexity
    std::int64_t swq2_4 = 0;       // very large files
    std::int64_t swq2_5 = 0;       // very large functions
    std::optional<double> swq2_6;  // duplication percent
    std::int64_t swq2_7 = 0;       // SLOC of the most complex function
    CoverageSource coverage_source = CoverageSource::None;
};

struct ScanResult {
    std::vector<FileProfile> files;
    std::size_t skipped_unrecognized = 0;
    WarningTally warnings;
};

// Walks a source tree and profiles every file whose extension belongs to a
// registered language. Paths are recorded relative to the root with '/'
// separators; traversal order is sorted so results never depend on
// directory enumeration order.
inline ScanResult scan_tree(const std::filesystem::path& root, const std::vector<LanguageRules>& rules) {
    namespace fs = std::filesystem;
    validate_rules(rules);
    ScanResult result;
    if (!fs::exists(root) || !fs::is_directory(root))
        throw RepoHealthError("source root is not a readable directory: " + root.string());

    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file()) paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());

    for (const auto& p : paths) {
        std::string rel = fs::relative(p, root).generic_string();
        std::string ext = final_extension(rel);
        const LanguageRules* lang = nullptr;
        for (const auto& r : rules)
            for (const auto& e : r.extensions)
                if (ext == e) lang = &r;
        if (!lang) {
            ++result.skipped_unrecognized;
            continue;
        }
        std::ifstream in(p, std::ios::binary);
        if (!in) {
            result.warnings.add("unreadable file skipped: " + rel);
            continue;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        result.files.push_back(profile_file(rel, buf.str(), *lang));
    }
    return result;
}

// SWQ-2.2 .. SWQ-2.5 and SWQ-2.7 from already-computed profiles. The most
// complex function is chosen by complexity, then SLOC, then path; with no
// functions at all SWQ-2.7 is 0.
inline QualityProfile quality_profile(const std::vector<FileProfile>& files,
                                      const QualityThresholds& t = {}) {
    QualityProfile q;
    const FunctionSpan* top = nullptr;
    for (const auto& f : files) {
        if (f.sloc > t.very_large_file_sloc) ++q.swq2_4;
        for (const auto& fn : f.functions) {
            if (fn.cyclomatic >= t.medium_cc_low && fn.cyclomatic <= t.medium_cc_high) ++q.swq2_2;
            if (fn.cyclomatic > t.very_high_cc) ++q.swq2_3;
            if (fn.sloc > t.very_large_function_sloc) ++q.swq2_5;
            if (!top || fn.cyclomatic > top->cyclomatic ||
                (fn.cyclomatic == top->cyclomatic &&
                 (fn.sloc > top->sloc || (fn.sloc == top->sloc && fn.file < top->file))))
                top = &fn;
        }
    }
    q.swq2_7 = top ? top->sloc : 0;
    return q;
}

namespace dup {

// Marks every normalized line lying inside a block of `block_len`
// consecutive lines that occurs at least twice anywhere in the tree,
// overlapping occurrences included. Returns per-file masks.
inline std::vector<std::vector<bool>> duplicated_line_masks(const std::vector<FileProfile>& files,
                                                            std::size_t block_len) {
    std::vector<std::vector<bool>> masks;
    masks.reserve(files.size());
    for (const auto& f : files) masks.emplace_back(f.normalized_lines.size(), false);
    if (block_len == 0) return masks;

    // key = the block's joined text; value = (file, start) of each occurrence
    std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> blocks;
    for (std::size_t fi = 0; fi < files.size(); ++fi) {
        const auto& lines = files[fi].normalized_lines;
        if (lines.size() < block_len) continue;
        for (std::size_t s = 0; s + block_len <= lines.size(); ++s) {
            std::string key;
            for (std::size_t k = 0; k < block_len; ++k) {
                key += lines[s + k];
                key += '\n';
            }
            blocks[key].emplace_back(fi, s);
        }
    }
    for (const auto& [key, occurrences] : blocks) {
        if (occurrences.size() < 2) continue;
        for (auto [fi, s] : occurrences)
            for (std::size_t k = 0; k < block_len; ++k) masks[fi][s + k] = true;
    }
    return masks;
}

}  // namespace dup

// SWQ-2.6: percentage of normalized lines inside repeated blocks. Not
// computed when the tree has no normalized lines.
inline std::optional<double> duplication_pct(const std::vector<FileProfile>& files,
                                             std::size_t block_len = 6) {
    std::size_t total = 0;
    for (const auto& f : files) total += f.normalized_lines.size();
    if (total == 0) return std::nullopt;
    auto masks = dup::duplicated_line_masks(files, block_len);
    std::size_t duplicated = 0;
    for (const auto& m : masks)
        for (bool b : m)
            if (b) ++duplicated;
    return 100.0 * static_cast<double>(duplicated) / static_cast<double>(total);
}

struct CoverageReport {
    std::int64_t instrumented = 0;
    std::int64_t covered = 0;
};

// External line-coverage report: lines of `path,instrumented_lines,covered_lines`.
inline std::optional<CoverageReport> load_coverage_report(const std::filesystem::path& path,
                                                          WarningTally* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    CoverageReport report;
    std::string line;
    bool any = false;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty()) continue;
        auto fields = csv::parse_row(t);
        std::int64_t instrumented = 0, covered = 0;
        if (fields.size() != 3 || !detail::parse_i64(fields[1], instrumented) ||
            !detail::parse_i64(fields[2], covered) || instrumented < 0 || covered < 0 || covered > instrumented) {
            if (warnings) warnings->add(path.string() + ": bad coverage record skipped");
            continue;
        }
        report.instrumented += instrumented;
        report.covered += covered;
        any = true;
    }
    if (!any || report.instrumented == 0) return std::nullopt;
    return report;
}

inline bool is_test_path(std::string_view path, const std::vector<std::string>& patterns) {
    for (const auto& segment : split(path, '/')) {
        std::string low = to_lower(segment);
        for (const auto& p : patterns)
            if (low.find(to_lower(p)) != std::string::npos) return true;
    }
    return false;
}

struct CoverageMetric {
    std::optional<double> pct;
    CoverageSource source = CoverageSource::None;
};

// SWQ-2.1. An external report wins when present and non-empty; otherwise the
// static proxy (test-file SLOC over total SLOC) is used. With neither source
// available the metric is not computed.
inline CoverageMetric coverage_metric(const std::vector<FileProfile>& files,
                                      const std::optional<CoverageReport>& report,
                                      const std::vector<std::string>& test_patterns = {"test", "spec"}) {
    if (report && report->instrumented > 0) {
        return {100.0 * static_cast<double>(report->covered) / static_cast<double>(report->instrumented),
                CoverageSource::Report};
    }
    std::int64_t total = 0, test = 0;
    for (const auto& f : files) {
        total += f.sloc;
        if (is_test_path(f.path, test_patterns)) test += f.sloc;
    }
    if (total == 0) return {std::nullopt, CoverageSource::None};
    return {100.0 * static_cast<double>(test) / static_cast<double>(total), CoverageSource::Proxy};
}

// SWQ-1: defect-labeled issues per kilobyte (or per KLOC when configured).
inline double defect_density(const std::vector<Issue>& issues, const RepoInfo& repo,
                             const std::set<std::string>& defect_labels, bool per_kloc = false,
                             std::int64_t total_sloc = 0) {
    std::set<std::string> wanted;
    for (const auto& l : defect_labels) wanted.insert(to_lower(l));
    std::int64_t defects = 0;
    for (const auto& issue : issues) {
        bool hit = false;
        for (const auto& l : issue.labels)
            if (wanted.count(to_lower(l))) {
                hit = true;
                break;
            }
        if (hit) ++defects;
    }
    double denom;
    if (per_kloc) {
        denom = static_cast<double>(total_sloc) / 1000.0;
        if (!(denom > 0.0)) throw RepoHealthError("KLOC denominator requires a scanned source tree");
    } else {
        denom = repo.size_kb;
        if (!(denom > 0.0)) throw RepoHealthError("repository size must be positive");
    }
    return static_cast<double>(defects) / denom;
}

inline const char* kQualityCsvHeader =
    "project_id,swq1,swq2_1,swq2_2,swq2_3,swq2_4,swq2_5,swq2_6,swq2_7,coverage_source";

inline void write_quality_csv(std::ostream& out,
                              const std::vector<std::pair<std::string, QualityProfile>>& rows) {
    out << kQualityCsvHeader << "\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
    for (const auto& [project_id, q] : rows) {
        out << csv::join_row({project_id, opt(q.swq1), opt(q.swq2_1), format_double(double(q.swq2_2)),
                              format_double(double(q.swq2_3)), format_double(double(q.swq2_4)),
                              format_double(double(q.swq2_5)), opt(q.swq2_6), format_double(double(q.swq2_7)),
                              to_string(q.coverage_source)});
    }
}

}  // namespace repohealth
