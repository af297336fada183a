#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "repohealth/common.hpp"
#include "repohealth/csv.hpp"
#include "repohealth/dataset.hpp"
#include "repohealth/truck_factor.hpp"

namespace repohealth {

enum class MetricId {
    COM1, COM2, POP1,
    STA1, STA2, STA3, STA4, STA5, STA6, STA7, STA8, STA9,
    TEC1, TEC2, TEC3, TEC4,
};

inline constexpr std::array<MetricId, 16> kAllMetricIds = {
    MetricId::COM1, MetricId::COM2, MetricId::POP1, MetricId::STA1, MetricId::STA2, MetricId::STA3,
    MetricId::STA4, MetricId::STA5, MetricId::STA6, MetricId::STA7, MetricId::STA8, MetricId::STA9,
    MetricId::TEC1, MetricId::TEC2, MetricId::TEC3, MetricId::TEC4,
};

inline const char* to_string(MetricId id) {
    switch (id) {
        case MetricId::COM1: return "COM-1";
        case MetricId::COM2: return "COM-2";
        case MetricId::POP1: return "POP-1";
        case MetricId::STA1: return "STA-1";
        case MetricId::STA2: return "STA-2";
        case MetricId::STA3: return "STA-3";
        case MetricId::STA4: return "STA-4";
        case MetricId::STA5: return "STA-5";
        case MetricId::STA6: return "STA-6";
        case MetricId::STA7: return "STA-7";
        case MetricId::STA8: return "STA-8";
        case MetricId::STA9: return "STA-9";
        case MetricId::TEC1: return "TEC-1";
        case MetricId::TEC2: return "TEC-2";
        case MetricId::TEC3: return "TEC-3";
        case MetricId::TEC4: return "TEC-4";
    }
    return "?";
}

inline std::optional<MetricId> metric_id_from(std::string_view s) {
    for (auto id : kAllMetricIds)
        if (s == to_string(id)) return id;
    return std::nullopt;
}

enum class MetricUnit { Seconds, Count, Years, Flag, Ratio };

inline const char* to_string(MetricUnit u) {
    switch (u) {
        case MetricUnit::Seconds: return "seconds";
        case MetricUnit::Count: return "count";
        case MetricUnit::Years: return "years";
        case MetricUnit::Flag: return "flag";
        case MetricUnit::Ratio: return "ratio";
    }
    return "?";
}

inline MetricUnit metric_unit(MetricId id) {
    switch (id) {
        case MetricId::COM1:
        case MetricId::TEC2: return MetricUnit::Seconds;
        case MetricId::STA1: return MetricUnit::Years;
        case MetricId::STA6: return MetricUnit::Flag;
        default: return MetricUnit::Count;
    }
}

struct MetricValue {
    MetricId id{};
    double value = 0.0;
    MetricUnit unit = MetricUnit::Count;
};

struct SustainabilityVector {
    std::string project_id;
    std::map<MetricId, MetricValue> values;  // defined exactly on the computed set

    bool computed(MetricId id) const { return values.count(id) != 0; }
    std::set<MetricId> completeness() const {
        std::set<MetricId> s;
        for (const auto& [id, v] : values) s.insert(id);
        return s;
    }
};

// A left-to-right tiling of [init, end] in steps of freq_weeks. All windows
// are half-open [lo, hi) except the last, which closes at `end` so the most
// recent activity instant is never dropped.
struct TimeWindow {
    Timestamp init = 0;
    Timestamp end = 0;
    std::int64_t freq_weeks = 1;

    struct Span {
        Timestamp lo = 0;
        Timestamp hi = 0;
        bool closes_end = false;

        bool contains(Timestamp t) const { return t >= lo && (t < hi || (closes_end && t == hi)); }
    };

    std::vector<Span> spans() const {
        std::vector<Span> out;
        if (init >= end || freq_weeks < 1) return out;
        const Timestamp step = freq_weeks * kSecondsPerWeek;
        for (Timestamp lo = init; lo < end; lo += step) {
            Timestamp hi = lo + step;
            bool last = hi >= end;
            out.push_back({lo, last ? end : hi, last});
        }
        return out;
    }
};

namespace detail {

inline std::vector<TimeWindow::Span> tile(Timestamp init, Timestamp end, Timestamp step_seconds) {
    std::vector<TimeWindow::Span> out;
    if (init >= end || step_seconds <= 0) return out;
    for (Timestamp lo = init; lo < end; lo += step_seconds) {
        Timestamp hi = lo + step_seconds;
        bool last = hi >= end;
        out.push_back({lo, last ? end : hi, last});
    }
    return out;
}

template <typename T, typename GetTs>
std::vector<std::int64_t> counts_per_span(const std::vector<T>& items, const std::vector<TimeWindow::Span>& spans,
                                          GetTs get_ts) {
    std::vector<std::int64_t> counts(spans.size(), 0);
    for (const auto& item : items)
        for (std::size_t k = 0; k < spans.size(); ++k)
            if (spans[k].contains(get_ts(item))) {
                ++counts[k];
                break;
            }
    return counts;
}

inline std::int64_t positive_part_drops(const std::vector<std::int64_t>& counts) {
    std::int64_t sum = 0;
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) sum += std::max<std::int64_t>(0, counts[k] - counts[k + 1]);
    return sum;
}

inline std::int64_t positive_part_rises(const std::vector<std::int64_t>& counts) {
    std::int64_t sum = 0;
    for (std::size_t k = 0; k + 1 < counts.size(); ++k) sum += std::max<std::int64_t>(0, counts[k + 1] - counts[k]);
    return sum;
}

}  // namespace detail

// COM-1: mean seconds from issue creation to its first comment. Issues with
// no comments, or only comments stamped before creation, do not enter the
// mean at all. Not computed when no issue qualifies.
inline std::optional<double> response_time(const std::vector<Issue>& issues) {
    double sum = 0.0;
    std::int64_t n = 0;
    for (const auto& issue : issues) {
        for (const auto& c : issue.comments) {
            if (c.timestamp < issue.created_at) continue;
            sum += static_cast<double>(c.timestamp - issue.created_at);
            ++n;
            break;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

// COM-2: number of comments across all issues plus the number of issues.
inline std::int64_t comm_frequency(const std::vector<Issue>& issues) {
    std::int64_t total = static_cast<std::int64_t>(issues.size());
    for (const auto& issue : issues) total += static_cast<std::int64_t>(issue.comments.size());
    return total;
}

struct Popularity {
    std::int64_t pop1 = 0;  // forks + stars + watchers
    std::int64_t sta3 = 0;  // forks
};

inline Popularity popularity(const RepoInfo& repo) {
    return {repo.forks + repo.stars + repo.watchers, repo.forks};
}

// STA-1: whole years since inception, evaluated at a configured year.
inline std::int64_t age(const RepoInfo& repo, int as_of_year) {
    if (as_of_year < repo.inception_year)
        throw RepoHealthError("as_of_year precedes inception year of " + repo.project_id);
    return as_of_year - repo.inception_year;
}

// STA-2: cumulative decrease in per-window commit counts. Only strict drops
// between consecutive windows contribute; a net-change sum would telescope.
inline std::int64_t attrition(const std::vector<Commit>& commits, const TimeWindow& window) {
    auto spans = window.spans();
    if (spans.size() < 2) return 0;
    auto counts = detail::counts_per_span(commits, spans, [](const Commit& c) { return c.timestamp; });
    return detail::positive_part_drops(counts);
}

// STA-4: cumulative increase in per-window pull-request submissions.
inline std::int64_t growth(const std::vector<PullRequest>& prs, const TimeWindow& window) {
    auto spans = window.spans();
    if (spans.size() < 2) return 0;
    auto counts = detail::counts_per_span(prs, spans, [](const PullRequest& p) { return p.created_at; });
    return detail::positive_part_rises(counts);
}

// STA-6: a project is dormant when it averages fewer than `threshold`
// commits per four-week window across the trailing lookback period.
inline bool dormancy(const std::vector<Commit>& commits, Timestamp end, std::int64_t lookback_months = 12,
                     double threshold = 1.0) {
    const Timestamp lo = end - lookback_months * kSecondsPerMonth;
    auto spans = detail::tile(lo, end, 4 * kSecondsPerWeek);
    if (spans.empty()) return true;
    std::int64_t total = 0;
    for (const auto& c : commits)
        for (const auto& s : spans)
            if (s.contains(c.timestamp)) {
                ++total;
                break;
            }
    double avg = static_cast<double>(total) / static_cast<double>(spans.size());
    return avg < threshold;
}

// STA-7: cumulative year-over-year increase in active contributors. A
// contributor is active in a 90-day snapshot iff they authored a commit in
// it, and counts toward every project year that snapshot overlaps, so
// activity late in one year carries into the next. Spans shorter than two
// years yield 0.
inline std::int64_t retention(const std::vector<Commit>& commits, Timestamp start, Timestamp end,
                              std::int64_t activity_window_days = 90) {
    if (commits.empty()) return 0;
    if (end - start < 2 * kSecondsPerYear) return 0;
    auto snapshots = detail::tile(start, end, activity_window_days * kSecondsPerDay);
    auto years = detail::tile(start, end, kSecondsPerYear);
    if (years.size() < 2) return 0;

    // contributor -> snapshot indices with activity
    std::map<std::string, std::set<std::size_t>> active_in;
    for (const auto& c : commits)
        for (std::size_t k = 0; k < snapshots.size(); ++k)
            if (snapshots[k].contains(c.timestamp)) {
                active_in[c.author].insert(k);
                break;
            }

    auto inclusive_hi = [](const TimeWindow::Span& s) { return s.closes_end ? s.hi : s.hi - 1; };
    std::vector<std::int64_t> yearly(years.size(), 0);
    for (std::size_t y = 0; y < years.size(); ++y) {
        std::int64_t n = 0;
        for (const auto& [contrib, snaps] : active_in) {
            bool counted = false;
            for (std::size_t k : snaps) {
                if (snapshots[k].lo <= inclusive_hi(years[y]) && years[y].lo <= inclusive_hi(snapshots[k])) {
                    counted = true;
                    break;
                }
            }
            if (counted) ++n;
        }
        yearly[y] = n;
    }
    return detail::positive_part_rises(yearly);
}

// STA-8: distinct contributor keys over commits, PRs, issues, and comments.
// Keys are raw per-record identifiers; the same person under two identifiers
// counts twice.
inline std::int64_t community_size(const ProjectDataset& ds) {
    std::set<std::string> contributors;
    for (const auto& c : ds.commits) contributors.insert(c.author);
    for (const auto& p : ds.prs) contributors.insert(p.author);
    for (const auto& i : ds.issues) {
        contributors.insert(i.author);
        for (const auto& c : i.comments) contributors.insert(c.author);
    }
    contributors.erase("");
    return static_cast<std::int64_t>(contributors.size());
}

// STA-9: commit authors whose latest commit is strictly older than
// end − lookback.
inline std::int64_t turnover(const std::vector<Commit>& commits, Timestamp end,
                             std::int64_t lookback_months = 6) {
    std::map<std::string, Timestamp> latest;
    for (const auto& c : commits) {
        auto [it, inserted] = latest.try_emplace(c.author, c.timestamp);
        if (!inserted) it->second = std::max(it->second, c.timestamp);
    }
    const Timestamp cutoff = end - lookback_months * kSecondsPerMonth;
    std::int64_t n = 0;
    for (const auto& [contrib, ts] : latest)
        if (ts < cutoff) ++n;
    return n;
}

inline std::set<std::string> pr_mergers(const std::vector<PullRequest>& prs) {
    std::set<std::string> mergers;
    for (const auto& p : prs)
        if (p.merged && p.merger) mergers.insert(*p.merger);
    return mergers;
}

// TEC-1: commit authors who never merged a pull request.
inline std::int64_t non_maintainer_activity(const std::vector<Commit>& commits,
                                            const std::vector<PullRequest>& prs) {
    auto mergers = pr_mergers(prs);
    std::set<std::string> authors;
    for (const auto& c : commits) authors.insert(c.author);
    std::int64_t n = 0;
    for (const auto& a : authors)
        if (!mergers.count(a)) ++n;
    return n;
}

// TEC-2: mean seconds from PR creation to merge-or-close. Open PRs are
// excluded from numerator and denominator; not computed when none resolved.
inline std::optional<double> pr_efficiency(const std::vector<PullRequest>& prs) {
    double sum = 0.0;
    std::int64_t n = 0;
    for (const auto& p : prs) {
        if (!p.resolved_at) continue;
        sum += static_cast<double>(*p.resolved_at - p.created_at);
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

inline std::string final_extension(std::string_view path) {
    auto slash = path.find_last_of("/\\");
    std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot == std::string_view::npos || dot == 0) return "";
    return to_lower(base.substr(dot + 1));
}

struct CommitSplit {
    std::int64_t tec3 = 0;  // commits touching at least one documentation file
    std::int64_t tec4 = 0;  // commits touching only non-documentation files
};

// TEC-3 / TEC-4. Documentation membership is decided by the final path
// extension, case-insensitively. Commits with empty file lists count in
// neither bucket.
inline CommitSplit commit_split(const std::vector<Commit>& commits, const std::set<std::string>& doc_extensions) {
    CommitSplit split;
    for (const auto& c : commits) {
        if (c.files.empty()) continue;
        bool any_doc = false;
        for (const auto& f : c.files)
            if (doc_extensions.count(final_extension(f.path))) {
                any_doc = true;
                break;
            }
        if (any_doc) ++split.tec3;
        else ++split.tec4;
    }
    return split;
}

struct MetricsConfig {
    std::int64_t window_weeks = 12;
    std::int64_t activity_window_days = 90;
    std::int64_t turnover_lookback_months = 6;
    std::int64_t dormancy_lookback_months = 12;
    double dormancy_threshold = 1.0;
    int as_of_year = 2023;
    std::set<std::string> doc_extensions = {"txt", "md"};
    DoaParams doa;
};

// Evaluates all sixteen metrics over one dataset. A metric whose
// precondition fails is simply absent from the result; nothing aborts the
// vector. Communication and efficiency metrics are treated as not computed
// when the corresponding tracker list is empty (an empty tracker means the
// data was never mined, not that communication was zero).
inline SustainabilityVector compute_vector(const ProjectDataset& ds, const MetricsConfig& cfg = {}) {
    SustainabilityVector vec;
    vec.project_id = ds.project_id;
    auto put = [&](MetricId id, double value) {
        vec.values[id] = MetricValue{id, value, metric_unit(id)};
    };

    if (!ds.issues.empty()) {
        if (auto rt = response_time(ds.issues)) put(MetricId::COM1, *rt);
        put(MetricId::COM2, static_cast<double>(comm_frequency(ds.issues)));
    }

    auto pop = popularity(ds.repo);
    put(MetricId::POP1, static_cast<double>(pop.pop1));
    put(MetricId::STA3, static_cast<double>(pop.sta3));

    try {
        put(MetricId::STA1, static_cast<double>(age(ds.repo, cfg.as_of_year)));
    } catch (const RepoHealthError&) {
        // precondition failure becomes an absence
    }

    TimeWindow window{ds.start, ds.end, cfg.window_weeks};
    put(MetricId::STA2, static_cast<double>(attrition(ds.commits, window)));
    put(MetricId::STA4, static_cast<double>(growth(ds.prs, window)));

    if (auto tf = truck_factor(ds.commits, cfg.doa)) put(MetricId::STA5, static_cast<double>(tf->factor));

    put(MetricId::STA6, dormancy(ds.commits, ds.end, cfg.dormancy_lookback_months, cfg.dormancy_threshold) ? 1.0 : 0.0);

    if (!ds.commits.empty())
        put(MetricId::STA7, static_cast<double>(retention(ds.commits, ds.start, ds.end, cfg.activity_window_days)));

    put(MetricId::STA8, static_cast<double>(community_size(ds)));
    put(MetricId::STA9, static_cast<double>(turnover(ds.commits, ds.end, cfg.turnover_lookback_months)));
    put(MetricId::TEC1, static_cast<double>(non_maintainer_activity(ds.commits, ds.prs)));

    if (!ds.prs.empty())
        if (auto eff = pr_efficiency(ds.prs)) put(MetricId::TEC2, *eff);

    auto split = commit_split(ds.commits, cfg.doc_extensions);
    put(MetricId::TEC3, static_cast<double>(split.tec3));
    put(MetricId::TEC4, static_cast<double>(split.tec4));
    return vec;
}

inline const char* kMetricsCsvHeader = "project_id,metric_id,value,unit,computed";

inline void write_metrics_csv(std::ostream& out, const std::vector<SustainabilityVector>& vectors) {
    out << kMetricsCsvHeader << "\n";
    for (const auto& vec : vectors) {
        for (auto id : kAllMetricIds) {
            auto it = vec.values.find(id);
            bool computed = it != vec.values.end();
            out << csv::join_row({vec.project_id, to_string(id),
                                  computed ? format_double(it->second.value) : std::string{},
                                  to_string(metric_unit(id)), computed ? "true" : "false"});
        }
    }
}

}  // namespace repohealth
