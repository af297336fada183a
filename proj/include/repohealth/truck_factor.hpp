#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repohealth/dataset.hpp"

namespace repohealth {

// Degree-of-authorship weights and the normalized-score cutoff that decides
// file authorship. The absolute cutoff equals the base weight: a contributor
// whose score falls below what a bare first-authorship would grant is never
// an author.
struct DoaParams {
    double base = 3.293;
    double first_author = 1.098;
    double own_change = 0.164;
    double other_change = 0.321;
    double norm_threshold = 0.75;
};

// DOA = base + first_author·FA + own_change·DL − other_change·ln(1 + AC),
// FA ∈ {0,1}, DL = this contributor's changes to the file, AC = changes by
// everyone else. Every commit touching the file counts as one change,
// including the one that created it.
inline double degree_of_authorship(bool first_author, std::int64_t own_changes,
                                    std::int64_t other_changes, const DoaParams& p = {}) {
    return p.base + (first_author ? p.first_author : 0.0) + p.own_change * static_cast<double>(own_changes) -
           p.other_change * std::log1p(static_cast<double>(other_changes));
}

// Map from file path to the contributors whose normalized DOA clears the
// threshold. Commits must be time-sorted; the first author of a file is the
// author of the earliest commit touching it.
inline std::map<std::string, std::set<std::string>> file_authors(const std::vector<Commit>& commits,
                                                                 const DoaParams& params = {}) {
    struct FileStats {
        std::string first_author;
        std::map<std::string, std::int64_t> changes;
        std::int64_t total_changes = 0;
    };
    std::map<std::string, FileStats> stats;
    for (const auto& c : commits) {
        // a commit touching the same path twice still counts once
        std::set<std::string> seen;
        for (const auto& f : c.files) {
            if (!seen.insert(f.path).second) continue;
            auto& fs = stats[f.path];
            if (fs.total_changes == 0) fs.first_author = c.author;
            ++fs.changes[c.author];
            ++fs.total_changes;
        }
    }

    std::map<std::string, std::set<std::string>> authors;
    for (const auto& [path, fs] : stats) {
        double max_doa = 0.0;
        std::map<std::string, double> doa;
        for (const auto& [contrib, own] : fs.changes) {
            double d = degree_of_authorship(contrib == fs.first_author, own, fs.total_changes - own, params);
            doa[contrib] = d;
            max_doa = std::max(max_doa, d);
        }
        auto& set = authors[path];  // files may end up authorless
        if (max_doa <= 0.0) continue;
        for (const auto& [contrib, d] : doa)
            if (d >= params.norm_threshold * max_doa && d >= params.base) set.insert(contrib);
    }
    return authors;
}

struct TruckFactorResult {
    std::int64_t factor = 0;
    std::vector<std::string> removed;  // in removal order
};

// Ranks contributors by authored-file count (descending, ties broken by
// contributor id) and removes them one by one until fewer than half of all
// files retain at least one author. Returns nullopt when no commit touches
// a file.
inline std::optional<TruckFactorResult> truck_factor(const std::vector<Commit>& commits,
                                                     const DoaParams& params = {}) {
    auto authors = file_authors(commits, params);
    if (authors.empty()) return std::nullopt;

    const double total_files = static_cast<double>(authors.size());
    std::map<std::string, std::int64_t> authored_count;
    for (const auto& [path, set] : authors)
        for (const auto& a : set) ++authored_count[a];

    std::vector<std::pair<std::string, std::int64_t>> ranking(authored_count.begin(), authored_count.end());
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::set<std::string> removed_set;
    auto coverage = [&] {
        std::int64_t covered = 0;
        for (const auto& [path, set] : authors) {
            bool alive = std::any_of(set.begin(), set.end(),
                                     [&](const std::string& a) { return !removed_set.count(a); });
            if (alive) ++covered;
        }
        return static_cast<double>(covered) / total_files;
    };

    TruckFactorResult result;
    for (const auto& [contrib, n] : ranking) {
        if (coverage() < 0.5) break;
        removed_set.insert(contrib);
        result.removed.push_back(contrib);
        ++result.factor;
    }
    return result;
}

}  // namespace repohealth
