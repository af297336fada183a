#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "repohealth/common.hpp"

namespace repohealth {

// How function definitions are located in a source file.
//  - Signature: brace-delimited bodies introduced by `name(args...)` at any
//    nesting (C, C++, Java, C#).
//  - IndentKeyword: a keyword line opens a function whose body is every
//    following line with deeper indentation (Python).
enum class FunctionRecognizer { Signature, IndentKeyword };

struct LanguageRules {
    std::string name;
    std::vector<std::string> extensions;  // lower-case, without dot
    std::vector<std::string> line_comments;
    std::vector<std::pair<std::string, std::string>> block_comments;
    std::string string_delims = "\"'";
    bool backslash_escapes = true;
    bool triple_quoted_strings = false;  // multi-line ''' / """ literals
    bool preprocessor_lines = false;     // lines starting with '#' carry no tokens
    FunctionRecognizer recognizer = FunctionRecognizer::Signature;
    std::vector<std::string> function_keywords;  // IndentKeyword mode
    // Words that can never be the name of a Signature-mode function.
    std::vector<std::string> non_function_words;
    std::vector<std::string> decision_words;  // counted toward cyclomatic complexity
    std::vector<std::string> decision_ops;    // operator tokens, e.g. && || ?

    bool is_decision_token(std::string_view tok) const {
        for (const auto& w : decision_words)
            if (tok == w) return true;
        for (const auto& o : decision_ops)
            if (tok == o) return true;
        return false;
    }
};

inline LanguageRules c_family_rules() {
    LanguageRules r;
    r.name = "c-family";
    r.extensions = {"c", "h", "cc", "hh", "cpp", "hpp", "cxx", "hxx", "inl"};
    r.line_comments = {"//"};
    r.block_comments = {{"/*", "*/"}};
    r.string_delims = "\"'";
    r.preprocessor_lines = true;
    r.recognizer = FunctionRecognizer::Signature;
    r.non_function_words = {"if", "else", "for", "while", "do", "switch", "case", "catch",
                            "return", "sizeof", "new", "delete", "throw", "using", "namespace",
                            "class", "struct", "union", "enum", "typedef", "static_assert"};
    r.decision_words = {"if", "for", "while", "case", "catch"};
    r.decision_ops = {"&&", "||", "?"};
    return r;
}

inline LanguageRules java_family_rules() {
    LanguageRules r;
    r.name = "java-family";
    r.extensions = {"java", "cs", "kt", "scala"};
    r.line_comments = {"//"};
    r.block_comments = {{"/*", "*/"}};
    r.string_delims = "\"'";
    r.recognizer = FunctionRecognizer::Signature;
    r.non_function_words = {"if", "else", "for", "while", "do", "switch", "case", "catch",
                            "return", "new", "throw", "try", "finally", "synchronized",
                            "class", "interface", "enum", "record"};
    r.decision_words = {"if", "for", "while", "case", "catch"};
    r.decision_ops = {"&&", "||", "?"};
    return r;
}

inline LanguageRules indent_family_rules() {
    LanguageRules r;
    r.name = "indent-family";
    r.extensions = {"py"};
    r.line_comments = {"#"};
    r.block_comments = {};
    r.string_delims = "\"'";
    r.triple_quoted_strings = true;
    r.recognizer = FunctionRecognizer::IndentKeyword;
    r.function_keywords = {"def"};
    r.decision_words = {"if", "elif", "for", "while", "except", "and", "or"};
    r.decision_ops = {};
    return r;
}

inline std::vector<LanguageRules> builtin_language_rules() {
    return {c_family_rules(), java_family_rules(), indent_family_rules()};
}

// Validates the registry invariants: disjoint extensions, non-empty decision
// token sets.
inline void validate_rules(const std::vector<LanguageRules>& rules) {
    std::set<std::string> seen;
    for (const auto& r : rules) {
        if (r.decision_words.empty() && r.decision_ops.empty())
            throw RepoHealthError("language " + r.name + " has no decision tokens");
        if (r.extensions.empty()) throw RepoHealthError("language " + r.name + " has no extensions");
        for (const auto& e : r.extensions)
            if (!seen.insert(to_lower(e)).second)
                throw RepoHealthError("extension '" + e + "' registered for more than one language");
    }
}

// Loads one language definition from a declarative JSON file. Keys:
//   name, extensions[], line_comments[], block_comments[[open,close]],
//   string_delims, backslash_escapes, triple_quoted_strings,
//   preprocessor_lines, recognizer ("signature"|"indent"),
//   function_keywords[], non_function_words[], decision_words[],
//   decision_ops[]
inline LanguageRules load_language_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RepoHealthError("cannot open language rules file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw RepoHealthError("unparsable language rules file: " + path.string());
    LanguageRules r;
    r.name = j.value("name", "");
    if (r.name.empty()) throw RepoHealthError(path.string() + ": missing language name");
    for (const auto& e : j.value("extensions", nlohmann::json::array()))
        if (e.is_string()) r.extensions.push_back(to_lower(e.get<std::string>()));
    for (const auto& c : j.value("line_comments", nlohmann::json::array()))
        if (c.is_string()) r.line_comments.push_back(c.get<std::string>());
    for (const auto& b : j.value("block_comments", nlohmann::json::array()))
        if (b.is_array() && b.size() == 2)
            r.block_comments.emplace_back(b[0].get<std::string>(), b[1].get<std::string>());
    r.string_delims = j.value("string_delims", std::string("\"'"));
    r.backslash_escapes = j.value("backslash_escapes", true);
    r.triple_quoted_strings = j.value("triple_quoted_strings", false);
    r.preprocessor_lines = j.value("preprocessor_lines", false);
    std::string rec = j.value("recognizer", "signature");
    if (rec == "signature") r.recognizer = FunctionRecognizer::Signature;
    else if (rec == "indent") r.recognizer = FunctionRecognizer::IndentKeyword;
    else throw RepoHealthError(path.string() + ": unknown recognizer '" + rec + "'");
    for (const auto& w : j.value("function_keywords", nlohmann::json::array()))
        if (w.is_string()) r.function_keywords.push_back(w.get<std::string>());
    for (const auto& w : j.value("non_function_words", nlohmann::json::array()))
        if (w.is_string()) r.non_function_words.push_back(w.get<std::string>());
    for (const auto& w : j.value("decision_words", nlohmann::json::array()))
        if (w.is_string()) r.decision_words.push_back(w.get<std::string>());
    for (const auto& w : j.value("decision_ops", nlohmann::json::array()))
        if (w.is_string()) r.decision_ops.push_back(w.get<std::string>());
    if (r.decision_words.empty() && r.decision_ops.empty())
        throw RepoHealthError(path.string() + ": decision token set must be non-empty");
    return r;
}

}  // namespace repohealth
