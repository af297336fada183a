#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "repohealth/common.hpp"
#include "repohealth/dataset.hpp"

namespace repohealth {

template <typename T>
struct LoadResult {
    std::vector<T> records;
    WarningTally warnings;
};

namespace detail {

inline std::optional<Timestamp> json_timestamp(const nlohmann::json& j) {
    if (j.is_number_integer() || j.is_number_unsigned()) return j.get<std::int64_t>();
    return std::nullopt;
}

// Parses one issues.jsonl record. Returns nullopt with `why` set when the
// record must be skipped; throws on an unknown source tag.
inline std::optional<Issue> parse_issue_record(const nlohmann::json& j, TrackerSource source,
                                               std::string& why) {
    if (!j.is_object()) {
        why = "unparsable record";
        return std::nullopt;
    }
    if (j.contains("source")) {
        auto tag = tracker_source_from(j["source"].is_string() ? j["source"].get<std::string>() : "");
        if (!tag) throw RepoHealthError("unknown tracker source tag");
        source = *tag;
    }
    Issue issue;
    issue.id = j.value("id", "");
    issue.author = j.value("author", "");
    issue.source = source;
    auto created = j.contains("created_at") ? json_timestamp(j["created_at"]) : std::nullopt;
    if (issue.id.empty() || !created || *created <= 0) {
        why = "missing id or created_at";
        return std::nullopt;
    }
    issue.created_at = *created;
    if (j.contains("labels") && j["labels"].is_array())
        for (const auto& l : j["labels"])
            if (l.is_string()) issue.labels.push_back(to_lower(l.get<std::string>()));
    if (j.contains("comments") && j["comments"].is_array()) {
        for (const auto& cj : j["comments"]) {
            Comment c;
            c.author = cj.value("author", "");
            auto ts = cj.contains("created_at") ? json_timestamp(cj["created_at"]) : std::nullopt;
            if (!ts || *ts <= 0) {
                why = "comment with missing or invalid created_at";
                return std::nullopt;
            }
            c.timestamp = *ts;
            issue.comments.push_back(std::move(c));
        }
    }
    return issue;
}

}  // namespace detail

// Parses a plain-text commit history dump. The expected format is what
//   git log --reverse --pretty=format:'commit %H%nauthor %an <%ae>%ntimestamp %at' --name-status
// produces: per entry a "commit <sha>" line, an "author <name <email>>" line,
// a "timestamp <unix seconds>" line, then name-status lines ("A\tpath",
// "M\tpath", "D\tpath"; rename/copy lines "Rnnn\told\tnew" count as a delete
// of the old path plus an add of the new one). Entries with a missing or
// invalid sha, author, or timestamp are skipped and tallied, never silently
// dropped.
inline LoadResult<Commit> parse_git_log(std::istream& in) {
    LoadResult<Commit> result;
    std::unordered_set<std::string> seen_shas;

    Commit cur;
    bool in_entry = false;
    bool bad_entry = false;

    auto flush = [&] {
        if (!in_entry) return;
        if (bad_entry || cur.sha.empty() || cur.author.empty() || cur.timestamp <= 0) {
            result.warnings.add("malformed commit entry" + (cur.sha.empty() ? "" : " " + cur.sha));
        } else if (!seen_shas.insert(cur.sha).second) {
            result.warnings.add("duplicate commit sha " + cur.sha);
        } else {
            result.records.push_back(cur);
        }
        cur = Commit{};
        in_entry = false;
        bad_entry = false;
    };

    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("commit ", 0) == 0) {
            flush();
            in_entry = true;
            cur.sha = std::string(trim(line.substr(7)));
        } else if (!in_entry) {
            if (!std::string(trim(line)).empty())
                result.warnings.add("stray line outside commit entry");
        } else if (line.rfind("author ", 0) == 0) {
            cur.author = std::string(trim(line.substr(7)));
        } else if (line.rfind("timestamp ", 0) == 0) {
            std::int64_t ts = 0;
            if (detail::parse_i64(line.substr(10), ts)) cur.timestamp = ts;
            else bad_entry = true;
        } else if (!line.empty() && line.find('\t') != std::string::npos) {
            auto tab = line.find('\t');
            std::string status = line.substr(0, tab);
            std::string rest = line.substr(tab + 1);
            if (status == "A") {
                cur.files.push_back({rest, ChangeKind::Added});
            } else if (status == "M") {
                cur.files.push_back({rest, ChangeKind::Modified});
            } else if (status == "D") {
                cur.files.push_back({rest, ChangeKind::Deleted});
            } else if (!status.empty() && (status[0] == 'R' || status[0] == 'C')) {
                auto tab2 = rest.find('\t');
                if (tab2 == std::string::npos) {
                    bad_entry = true;
                } else {
                    std::string old_path = rest.substr(0, tab2);
                    std::string new_path = rest.substr(tab2 + 1);
                    if (status[0] == 'R') cur.files.push_back({old_path, ChangeKind::Deleted});
                    cur.files.push_back({new_path, ChangeKind::Added});
                }
            } else {
                bad_entry = true;
            }
        }
        // blank separators and unknown header lines inside an entry are ignored
    }
    flush();
    sort_commits(result.records);
    return result;
}

inline LoadResult<Commit> parse_git_log_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RepoHealthError("cannot open git log dump: " + path.string());
    return parse_git_log(in);
}

// commits.jsonl: {"sha","author","timestamp","files":[{"path","kind"}]}
inline LoadResult<Commit> load_commits(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RepoHealthError("missing required file: " + path.string());
    LoadResult<Commit> result;
    std::unordered_set<std::string> seen_shas;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (std::string(trim(line)).empty()) continue;
        auto warn = [&](const std::string& why) {
            result.warnings.add(path.filename().string() + ":" + std::to_string(lineno) + ": " + why);
        };
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            warn("unparsable record");
            continue;
        }
        Commit c;
        c.sha = j.value("sha", "");
        c.author = j.value("author", "");
        auto ts = j.contains("timestamp") ? detail::json_timestamp(j["timestamp"]) : std::nullopt;
        if (c.sha.empty() || c.author.empty() || !ts || *ts <= 0) {
            warn("missing sha, author, or valid timestamp");
            continue;
        }
        c.timestamp = *ts;
        bool bad_file = false;
        if (j.contains("files")) {
            if (!j["files"].is_array()) {
                warn("files is not an array");
                continue;
            }
            for (const auto& f : j["files"]) {
                auto kind = change_kind_from(f.value("kind", ""));
                std::string p = f.value("path", "");
                if (!kind || p.empty()) {
                    bad_file = true;
                    break;
                }
                c.files.push_back({std::move(p), *kind});
            }
        }
        if (bad_file) {
            warn("bad file change entry");
            continue;
        }
        if (!seen_shas.insert(c.sha).second) {
            warn("duplicate sha " + c.sha);
            continue;
        }
        result.records.push_back(std::move(c));
    }
    sort_commits(result.records);
    return result;
}

// issues.jsonl for a single tracker export. A record whose embedded source
// tag is unknown is a hard error; records missing created_at are skipped and
// tallied. Labels are lower-cased and comments time-sorted on load.
inline LoadResult<Issue> load_tracker_data(const std::filesystem::path& path, TrackerSource source) {
    std::ifstream in(path);
    if (!in) throw RepoHealthError("missing required file: " + path.string());
    LoadResult<Issue> result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (std::string(trim(line)).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        std::string why;
        std::optional<Issue> issue;
        try {
            issue = detail::parse_issue_record(j.is_discarded() ? nlohmann::json() : j, source, why);
        } catch (const RepoHealthError& e) {
            throw RepoHealthError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!issue) {
            result.warnings.add(path.filename().string() + ":" + std::to_string(lineno) + ": " + why);
            continue;
        }
        result.records.push_back(std::move(*issue));
    }
    sort_issues(result.records);
    return result;
}

// prs.jsonl: {"id","author","created_at","resolved_at"(nullable),
//             "merged","merger"(nullable)}
// A resolved_at earlier than created_at is nulled with a warning; a merger on
// an unmerged record is dropped with a warning.
inline LoadResult<PullRequest> load_prs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RepoHealthError("missing required file: " + path.string());
    LoadResult<PullRequest> result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (std::string(trim(line)).empty()) continue;
        auto warn = [&](const std::string& why) {
            result.warnings.add(path.filename().string() + ":" + std::to_string(lineno) + ": " + why);
        };
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            warn("unparsable record");
            continue;
        }
        PullRequest pr;
        pr.id = j.value("id", "");
        pr.author = j.value("author", "");
        auto created = j.contains("created_at") ? detail::json_timestamp(j["created_at"]) : std::nullopt;
        if (pr.id.empty() || !created || *created <= 0) {
            warn("missing id or created_at");
            continue;
        }
        pr.created_at = *created;
        if (j.contains("resolved_at") && !j["resolved_at"].is_null()) {
            auto resolved = detail::json_timestamp(j["resolved_at"]);
            if (!resolved) {
                warn("invalid resolved_at");
                continue;
            }
            if (*resolved < pr.created_at) {
                warn("pr " + pr.id + ": resolved_at precedes created_at; nulled");
            } else {
                pr.resolved_at = *resolved;
            }
        }
        pr.merged = j.value("merged", false);
        if (j.contains("merger") && !j["merger"].is_null() && j["merger"].is_string()) {
            if (pr.merged) {
                pr.merger = j["merger"].get<std::string>();
            } else {
                warn("pr " + pr.id + ": merger on unmerged record dropped");
            }
        }
        result.records.push_back(std::move(pr));
    }
    sort_prs(result.records);
    return result;
}

// repo.json: {"project_id","stars","watchers","forks","size_kb","inception_year"}
inline RepoInfo load_repo_info(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RepoHealthError("missing required file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw RepoHealthError("unparsable repository info: " + path.string());
    RepoInfo r;
    r.project_id = j.value("project_id", "");
    r.stars = j.value("stars", std::int64_t{0});
    r.watchers = j.value("watchers", std::int64_t{0});
    r.forks = j.value("forks", std::int64_t{0});
    r.size_kb = j.value("size_kb", 0.0);
    r.inception_year = j.value("inception_year", 0);
    if (r.project_id.empty()) throw RepoHealthError(path.string() + ": missing project_id");
    if (r.stars < 0 || r.watchers < 0 || r.forks < 0)
        throw RepoHealthError(path.string() + ": negative popularity count");
    if (!(r.size_kb > 0.0)) throw RepoHealthError(path.string() + ": size_kb must be positive");
    if (r.inception_year <= 0) throw RepoHealthError(path.string() + ": missing inception_year");
    return r;
}

struct AssembledProject {
    ProjectDataset dataset;
    WarningTally warnings;
};

// Builds the immutable per-project dataset from the four-file layout:
//   <dir>/commits.jsonl  <dir>/issues.jsonl  <dir>/prs.jsonl  <dir>/repo.json
// If commits.jsonl is absent but a git.log dump is present, the dump is
// parsed instead. issues.jsonl may mix github and jira records; per-record
// source tags win. start/end are the min/max activity timestamps over
// commits, issues, comments, and pull requests (creation and resolution).
inline AssembledProject assemble_dataset(const std::filesystem::path& project_dir) {
    namespace fs = std::filesystem;
    AssembledProject out;

    const fs::path commits_path = project_dir / "commits.jsonl";
    const fs::path gitlog_path = project_dir / "git.log";
    const fs::path issues_path = project_dir / "issues.jsonl";
    const fs::path prs_path = project_dir / "prs.jsonl";
    const fs::path repo_path = project_dir / "repo.json";

    for (const auto& p : {issues_path, prs_path, repo_path})
        if (!fs::exists(p)) throw RepoHealthError("missing required file: " + p.string());
    if (!fs::exists(commits_path) && !fs::exists(gitlog_path))
        throw RepoHealthError("missing required file: " + commits_path.string());

    LoadResult<Commit> commits = fs::exists(commits_path) ? load_commits(commits_path)
                                                          : parse_git_log_file(gitlog_path);
    out.warnings.merge(commits.warnings);

    LoadResult<Issue> issues = load_tracker_data(issues_path, TrackerSource::GitHub);
    out.warnings.merge(issues.warnings);

    LoadResult<PullRequest> prs = load_prs(prs_path);
    out.warnings.merge(prs.warnings);

    ProjectDataset& ds = out.dataset;
    ds.repo = load_repo_info(repo_path);
    ds.project_id = ds.repo.project_id;
    ds.commits = std::move(commits.records);
    ds.issues = std::move(issues.records);
    ds.prs = std::move(prs.records);

    bool any = false;
    Timestamp lo = 0, hi = 0;
    auto feed = [&](Timestamp t) {
        if (!any) {
            lo = hi = t;
            any = true;
        } else {
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    };
    for (const auto& c : ds.commits) feed(c.timestamp);
    for (const auto& i : ds.issues) {
        feed(i.created_at);
        for (const auto& c : i.comments) feed(c.timestamp);
    }
    for (const auto& p : ds.prs) {
        feed(p.created_at);
        if (p.resolved_at) feed(*p.resolved_at);
    }
    if (!any) throw RepoHealthError(project_dir.string() + ": project has no activity records");
    ds.start = lo;
    ds.end = hi;
    return out;
}

// ---- canonical serialization ------------------------------------------
// Field order is fixed so that serializing an identical dataset twice is
// byte-identical.

inline std::string serialize_commits(const std::vector<Commit>& commits) {
    std::string out;
    for (const auto& c : commits) {
        nlohmann::ordered_json j;
        j["sha"] = c.sha;
        j["author"] = c.author;
        j["timestamp"] = c.timestamp;
        auto files = nlohmann::ordered_json::array();
        for (const auto& f : c.files) {
            nlohmann::ordered_json fj;
            fj["path"] = f.path;
            fj["kind"] = to_string(f.kind);
            files.push_back(std::move(fj));
        }
        j["files"] = std::move(files);
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline std::string serialize_issues(const std::vector<Issue>& issues) {
    std::string out;
    for (const auto& i : issues) {
        nlohmann::ordered_json j;
        j["id"] = i.id;
        j["created_at"] = i.created_at;
        j["labels"] = i.labels;
        j["author"] = i.author;
        j["source"] = to_string(i.source);
        auto comments = nlohmann::ordered_json::array();
        for (const auto& c : i.comments) {
            nlohmann::ordered_json cj;
            cj["author"] = c.author;
            cj["created_at"] = c.timestamp;
            comments.push_back(std::move(cj));
        }
        j["comments"] = std::move(comments);
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline std::string serialize_prs(const std::vector<PullRequest>& prs) {
    std::string out;
    for (const auto& p : prs) {
        nlohmann::ordered_json j;
        j["id"] = p.id;
        j["author"] = p.author;
        j["created_at"] = p.created_at;
        if (p.resolved_at) j["resolved_at"] = *p.resolved_at;
        else j["resolved_at"] = nullptr;
        j["merged"] = p.merged;
        if (p.merger) j["merger"] = *p.merger;
        else j["merger"] = nullptr;
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline std::string serialize_repo(const RepoInfo& r) {
    nlohmann::ordered_json j;
    j["project_id"] = r.project_id;
    j["stars"] = r.stars;
    j["watchers"] = r.watchers;
    j["forks"] = r.forks;
    j["size_kb"] = r.size_kb;
    j["inception_year"] = r.inception_year;
    return j.dump() + "\n";
}

inline void write_dataset(const ProjectDataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::filesystem::path& p, const std::string& content) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw RepoHealthError("cannot write " + p.string());
        out << content;
    };
    write(dir / "commits.jsonl", serialize_commits(ds.commits));
    write(dir / "issues.jsonl", serialize_issues(ds.issues));
    write(dir / "prs.jsonl", serialize_prs(ds.prs));
    write(dir / "repo.json", serialize_repo(ds.repo));
}

}  // namespace repohealth
