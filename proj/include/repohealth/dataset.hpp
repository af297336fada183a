#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repohealth/common.hpp"

namespace repohealth {

using Timestamp = std::int64_t;  // UTC seconds

enum class ChangeKind { Added, Modified, Deleted };

inline const char* to_string(ChangeKind k) {
    switch (k) {
        case ChangeKind::Added: return "added";
        case ChangeKind::Modified: return "modified";
        case ChangeKind::Deleted: return "deleted";
    }
    return "modified";
}

inline std::optional<ChangeKind> change_kind_from(std::string_view s) {
    if (s == "added") return ChangeKind::Added;
    if (s == "modified") return ChangeKind::Modified;
    if (s == "deleted") return ChangeKind::Deleted;
    return std::nullopt;
}

struct FileChange {
    std::string path;
    ChangeKind kind = ChangeKind::Modified;

    bool operator==(const FileChange&) const = default;
};

struct Commit {
    std::string sha;
    std::string author;  // "name <email>" verbatim
    Timestamp timestamp = 0;
    std::vector<FileChange> files;  // may be empty for merge commits

    bool operator==(const Commit&) const = default;
};

struct Comment {
    std::string author;
    Timestamp timestamp = 0;
    // Comments stamped earlier than their issue's creation are retained but
    // flagged; response-time computations skip them.
    bool before_issue_creation = false;

    bool operator==(const Comment&) const = default;
};

enum class TrackerSource { GitHub, Jira };

inline const char* to_string(TrackerSource s) {
    return s == TrackerSource::GitHub ? "github" : "jira";
}

inline std::optional<TrackerSource> tracker_source_from(std::string_view s) {
    if (s == "github") return TrackerSource::GitHub;
    if (s == "jira") return TrackerSource::Jira;
    return std::nullopt;
}

struct Issue {
    std::string id;
    Timestamp created_at = 0;
    std::vector<std::string> labels;  // lower-cased at load
    std::vector<Comment> comments;    // ascending by timestamp
    TrackerSource source = TrackerSource::GitHub;
    std::string author;

    bool operator==(const Issue&) const = default;
};

struct PullRequest {
    std::string id;
    std::string author;
    Timestamp created_at = 0;
    std::optional<Timestamp> resolved_at;  // merged-or-closed time
    bool merged = false;
    std::optional<std::string> merger;  // present only if merged and known

    bool operator==(const PullRequest&) const = default;
};

struct RepoInfo {
    std::string project_id;
    std::int64_t stars = 0;
    std::int64_t watchers = 0;
    std::int64_t forks = 0;
    double size_kb = 0.0;
    int inception_year = 0;

    bool operator==(const RepoInfo&) const = default;
};

// All mined facts for one project. Immutable after assembly; safe to share
// read-only across threads.
struct ProjectDataset {
    std::string project_id;
    std::vector<Commit> commits;    // ascending by (timestamp, sha)
    std::vector<Issue> issues;      // ascending by (created_at, id)
    std::vector<PullRequest> prs;   // ascending by (created_at, id)
    RepoInfo repo;
    Timestamp start = 0;  // min activity timestamp
    Timestamp end = 0;    // max activity timestamp

    bool operator==(const ProjectDataset&) const = default;
};

inline void sort_commits(std::vector<Commit>& commits) {
    std::stable_sort(commits.begin(), commits.end(), [](const Commit& a, const Commit& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.sha < b.sha;
    });
}

inline void sort_issues(std::vector<Issue>& issues) {
    for (auto& issue : issues) {
        std::stable_sort(issue.comments.begin(), issue.comments.end(),
                         [](const Comment& a, const Comment& b) { return a.timestamp < b.timestamp; });
        for (auto& c : issue.comments) c.before_issue_creation = c.timestamp < issue.created_at;
    }
    std::stable_sort(issues.begin(), issues.end(), [](const Issue& a, const Issue& b) {
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        return a.id < b.id;
    });
}

inline void sort_prs(std::vector<PullRequest>& prs) {
    std::stable_sort(prs.begin(), prs.end(), [](const PullRequest& a, const PullRequest& b) {
        if (a.created_at != b.created_at) return a.created_at < b.created_at;
        return a.id < b.id;
    });
}

}  // namespace repohealth
