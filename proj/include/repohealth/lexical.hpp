#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repohealth/common.hpp"
#include "repohealth/language_rules.hpp"

namespace repohealth {

struct Token {
    std::string text;
    int line = 0;  // 1-based
};

// One function definition found lexically.
struct FunctionSpan {
    std::string file;
    int start_line = 0;
    int end_line = 0;
    std::int64_t sloc = 0;
    std::int64_t cyclomatic = 1;
};

struct FileProfile {
    std::string path;  // relative, '/'-separated
    std::string language;
    std::int64_t sloc = 0;  // non-blank, non-comment lines
    std::vector<FunctionSpan> functions;
    std::vector<std::string> normalized_lines;  // comment-stripped, trimmed
};

namespace lex {

struct LexedLine {
    std::string code;    // comment-stripped, strings kept
    std::string tokens;  // comment-stripped, string contents blanked
};

struct LexedFile {
    std::vector<std::string> normalized_lines;
    std::vector<int> normalized_numbers;   // original 1-based line numbers
    std::vector<int> normalized_indents;   // leading whitespace width (tab = 8)
    std::vector<Token> tokens;
};

inline bool starts_with_at(std::string_view s, std::size_t i, std::string_view prefix) {
    return !prefix.empty() && s.compare(i, prefix.size(), prefix) == 0;
}

inline int indent_width(std::string_view line) {
    int w = 0;
    for (char c : line) {
        if (c == ' ') ++w;
        else if (c == '\t') w += 8;
        else break;
    }
    return w;
}

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Comment/string state machine over one file. String contents stay in the
// normalized line (they are code) but are blanked in the token stream so
// nothing inside a literal is ever counted as a decision point.
inline LexedFile lex_file(std::string_view content, const LanguageRules& rules) {
    LexedFile out;

    enum class State { Normal, Block, Str, TripleStr };
    State state = State::Normal;
    std::size_t block_kind = 0;
    char str_delim = 0;

    std::vector<std::string_view> lines;
    {
        std::size_t pos = 0;
        while (pos <= content.size()) {
            auto nl = content.find('\n', pos);
            if (nl == std::string_view::npos) {
                lines.push_back(content.substr(pos));
                break;
            }
            lines.push_back(content.substr(pos, nl - pos));
            pos = nl + 1;
        }
    }

    int lineno = 0;
    for (auto raw : lines) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        std::string code, toks;
        bool preprocessor = false;
        if (rules.preprocessor_lines && state == State::Normal) {
            auto t = trim(raw);
            preprocessor = !t.empty() && t.front() == '#';
        }

        std::size_t i = 0;
        while (i < raw.size()) {
            switch (state) {
                case State::Block: {
                    const auto& close = rules.block_comments[block_kind].second;
                    auto pos = raw.find(close, i);
                    if (pos == std::string_view::npos) {
                        i = raw.size();
                    } else {
                        i = pos + close.size();
                        state = State::Normal;
                    }
                    break;
                }
                case State::Str: {
                    char c = raw[i];
                    code += c;
                    if (rules.backslash_escapes && c == '\\' && i + 1 < raw.size()) {
                        code += raw[i + 1];
                        i += 2;
                    } else {
                        ++i;
                        if (c == str_delim) state = State::Normal;
                    }
                    break;
                }
                case State::TripleStr: {
                    char c = raw[i];
                    if (c == str_delim && starts_with_at(raw, i, std::string(3, str_delim))) {
                        code += std::string(3, str_delim);
                        i += 3;
                        state = State::Normal;
                    } else {
                        code += c;
                        ++i;
                    }
                    break;
                }
                case State::Normal: {
                    bool matched = false;
                    for (const auto& lc : rules.line_comments)
                        if (starts_with_at(raw, i, lc)) {
                            i = raw.size();
                            matched = true;
                            break;
                        }
                    if (matched) break;
                    for (std::size_t k = 0; k < rules.block_comments.size(); ++k)
                        if (starts_with_at(raw, i, rules.block_comments[k].first)) {
                            state = State::Block;
                            block_kind = k;
                            i += rules.block_comments[k].first.size();
                            matched = true;
                            break;
                        }
                    if (matched) break;
                    char c = raw[i];
                    if (rules.string_delims.find(c) != std::string::npos) {
                        if (rules.triple_quoted_strings && starts_with_at(raw, i, std::string(3, c))) {
                            code += std::string(3, c);
                            toks += '\x02';
                            i += 3;
                            str_delim = c;
                            state = State::TripleStr;
                        } else {
                            code += c;
                            toks += '\x02';
                            ++i;
                            str_delim = c;
                            state = State::Str;
                        }
                    } else {
                        code += c;
                        if (!preprocessor) toks += c;
                        ++i;
                    }
                    break;
                }
            }
        }
        // a plain string literal never spans lines; an unterminated one ends here
        if (state == State::Str) state = State::Normal;

        auto trimmed = trim(code);
        if (!trimmed.empty()) {
            out.normalized_lines.emplace_back(trimmed);
            out.normalized_numbers.push_back(lineno);
            out.normalized_indents.push_back(indent_width(raw));
        }

        // tokenize this line's code (strings blanked to \x02 separators)
        std::size_t t = 0;
        static const char* kOps[] = {"&&", "||", "==", "!=", "<=", ">=", "->", "=>", "::",
                                     "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>"};
        while (t < toks.size()) {
            char c = toks[t];
            if (is_word_char(c) && !std::isdigit(static_cast<unsigned char>(c))) {
                std::size_t b = t;
                while (t < toks.size() && is_word_char(toks[t])) ++t;
                out.tokens.push_back({toks.substr(b, t - b), lineno});
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                while (t < toks.size() && (is_word_char(toks[t]) || toks[t] == '.')) ++t;
            } else {
                bool multi = false;
                for (const char* op : kOps)
                    if (starts_with_at(toks, t, op)) {
                        out.tokens.push_back({op, lineno});
                        t += 2;
                        multi = true;
                        break;
                    }
                if (multi) continue;
                if (std::string_view("?{}();:,=[]").find(c) != std::string_view::npos)
                    out.tokens.push_back({std::string(1, c), lineno});
                ++t;
            }
        }
    }
    return out;
}

inline bool is_word_token(const Token& t) {
    return !t.text.empty() && is_word_char(t.text[0]) && !std::isdigit(static_cast<unsigned char>(t.text[0]));
}

// Signature-mode function finder. A '{' opens a function when the tokens
// gathered since the last statement boundary look like `name(args...)`
// with a matched parenthesis list, the name is not a control word, and no
// bare '=' occurred (rules out initializer lists and lambda assignments).
// An unmatched '(' before the brace means the brace belongs to a lambda or
// call argument, not a definition.
inline std::vector<std::pair<std::size_t, std::size_t>> find_signature_functions(
    const std::vector<Token>& tokens, const LanguageRules& rules) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // [sig_begin, body_close] token indices

    struct Open {
        std::size_t sig_begin;
        int depth;
        std::size_t span_index;
    };
    std::vector<Open> open;
    int depth = 0;
    std::size_t buf_begin = 0;

    auto is_control = [&](const std::string& w) {
        for (const auto& c : rules.non_function_words)
            if (w == c) return true;
        return false;
    };

    auto looks_like_signature = [&](std::size_t begin, std::size_t end) -> bool {
        int paren = 0;
        std::optional<std::size_t> first_open;
        bool first_matched = false;
        for (std::size_t k = begin; k < end; ++k) {
            const auto& tx = tokens[k].text;
            if (tx == "=") return false;
            if (tx == "(") {
                if (!first_open) first_open = k;
                ++paren;
            } else if (tx == ")") {
                --paren;
                if (first_open && paren == 0) first_matched = true;
            }
        }
        if (!first_open || !first_matched || paren != 0) return false;
        std::size_t fo = *first_open;
        if (fo == begin) return false;
        const auto& prev = tokens[fo - 1];
        if (is_word_token(prev)) return !is_control(prev.text);
        // operator overloads: `operator==(...)`
        return fo >= 2 && tokens[fo - 2].text == "operator";
    };

    for (std::size_t k = 0; k < tokens.size(); ++k) {
        const auto& tx = tokens[k].text;
        if (tx == "{") {
            if (buf_begin < k && looks_like_signature(buf_begin, k)) {
                spans.emplace_back(buf_begin, k);
                open.push_back({buf_begin, depth, spans.size() - 1});
            }
            ++depth;
            buf_begin = k + 1;
        } else if (tx == "}") {
            --depth;
            while (!open.empty() && open.back().depth == depth) {
                spans[open.back().span_index].second = k;
                open.pop_back();
            }
            buf_begin = k + 1;
        } else if (tx == ";") {
            buf_begin = k + 1;
        }
    }
    // unterminated functions close at the last token
    while (!open.empty()) {
        spans[open.back().span_index].second = tokens.empty() ? 0 : tokens.size() - 1;
        open.pop_back();
    }
    return spans;
}

}  // namespace lex

// Cyclomatic complexity of a token sequence: 1 + number of decision tokens.
inline std::int64_t cyclomatic_complexity(const std::vector<Token>& tokens, std::size_t begin, std::size_t end,
                                          const LanguageRules& rules) {
    std::int64_t cc = 1;
    for (std::size_t k = begin; k < end && k < tokens.size(); ++k)
        if (rules.is_decision_token(tokens[k].text)) ++cc;
    return cc;
}

inline std::int64_t cyclomatic_complexity(const std::vector<Token>& tokens, const LanguageRules& rules) {
    return cyclomatic_complexity(tokens, 0, tokens.size(), rules);
}

// Full lexical profile of one file: SLOC, normalized lines, function spans
// with per-function SLOC and complexity.
inline FileProfile profile_file(const std::string& path, std::string_view content, const LanguageRules& rules) {
    FileProfile profile;
    profile.path = path;
    profile.language = rules.name;

    auto lexed = lex::lex_file(content, rules);
    profile.normalized_lines = lexed.normalized_lines;
    profile.sloc = static_cast<std::int64_t>(lexed.normalized_lines.size());

    auto code_lines_in = [&](int lo, int hi) {
        std::int64_t n = 0;
        for (int ln : lexed.normalized_numbers)
            if (ln >= lo && ln <= hi) ++n;
        return n;
    };

    if (rules.recognizer == FunctionRecognizer::Signature) {
        auto spans = lex::find_signature_functions(lexed.tokens, rules);
        for (auto [sig, close] : spans) {
            FunctionSpan fn;
            fn.file = path;
            fn.start_line = lexed.tokens[sig].line;
            fn.end_line = lexed.tokens[close].line;
            // body tokens: everything between the opening '{' and its '}'
            std::size_t body_begin = sig;
            while (body_begin < close && lexed.tokens[body_begin].text != "{") ++body_begin;
            fn.cyclomatic = cyclomatic_complexity(lexed.tokens, body_begin, close + 1, rules);
            fn.sloc = code_lines_in(fn.start_line, fn.end_line);
            if (fn.sloc < 1) fn.sloc = 1;
            profile.functions.push_back(std::move(fn));
        }
    } else {
        // IndentKeyword: a keyword line opens a function; it runs until the
        // next code line at the same or shallower indent.
        struct OpenFn {
            int start_line;
            int indent;
            int last_code_line;
        };
        std::vector<OpenFn> open;
        auto first_words = [&](int line) {
            std::vector<std::string> ws;
            for (const auto& t : lexed.tokens) {
                if (t.line != line) continue;
                if (lex::is_word_token(t)) ws.push_back(t.text);
                if (ws.size() >= 2) break;
            }
            return ws;
        };
        auto is_function_line = [&](int line) {
            auto ws = first_words(line);
            for (const auto& kw : rules.function_keywords)
                for (const auto& w : ws)
                    if (w == kw) return true;
            return false;
        };
        auto close_fn = [&](const OpenFn& fn) {
            FunctionSpan span;
            span.file = path;
            span.start_line = fn.start_line;
            span.end_line = fn.last_code_line;
            span.sloc = code_lines_in(span.start_line, span.end_line);
            if (span.sloc < 1) span.sloc = 1;
            std::size_t b = lexed.tokens.size(), e = 0;
            bool past_colon = false;
            for (std::size_t k = 0; k < lexed.tokens.size(); ++k) {
                const auto& t = lexed.tokens[k];
                if (t.line < span.start_line || t.line > span.end_line) continue;
                if (t.line == span.start_line && !past_colon) {
                    if (t.text == ":") past_colon = true;
                    continue;  // the def line's signature is not body
                }
                b = std::min(b, k);
                e = std::max(e, k + 1);
            }
            span.cyclomatic = b < e ? cyclomatic_complexity(lexed.tokens, b, e, rules) : 1;
            profile.functions.push_back(std::move(span));
        };

        for (std::size_t idx = 0; idx < lexed.normalized_numbers.size(); ++idx) {
            int line = lexed.normalized_numbers[idx];
            int indent = lexed.normalized_indents[idx];
            while (!open.empty() && indent <= open.back().indent) {
                close_fn(open.back());
                open.pop_back();
            }
            if (is_function_line(line)) open.push_back({line, indent, line});
            for (auto& fn : open) fn.last_code_line = line;
        }
        while (!open.empty()) {
            close_fn(open.back());
            open.pop_back();
        }
        // restore document order (closing pops inner-first)
        std::sort(profile.functions.begin(), profile.functions.end(),
                  [](const FunctionSpan& a, const FunctionSpan& b) { return a.start_line < b.start_line; });
    }
    return profile;
}

}  // namespace repohealth
