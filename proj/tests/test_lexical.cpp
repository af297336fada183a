#include <catch2/catch_amalgamated.hpp>

#include "repohealth/language_rules.hpp"
#include "repohealth/lexical.hpp"

using namespace repohealth;

namespace {

std::vector<Token> tokens_of(std::string_view src, const LanguageRules& rules) {
    return lex::lex_file(src, rules).tokens;
}

}  // namespace

TEST_CASE("line classification: code, comments, blanks") {
    auto rules = c_family_rules();
    auto lexed = lex::lex_file("int a;\n// note\n\nint b; // trailing\n/* all\ncomment */\nint c;\n", rules);
    REQUIRE(lexed.normalized_lines.size() == 3);
    CHECK(lexed.normalized_lines[0] == "int a;");
    CHECK(lexed.normalized_lines[1] == "int b;");
    CHECK(lexed.normalized_lines[2] == "int c;");
    CHECK(lexed.normalized_numbers[0] == 1);
    CHECK(lexed.normalized_numbers[1] == 4);
    CHECK(lexed.normalized_numbers[2] == 7);
}

TEST_CASE("strings shield comment markers and decision words") {
    auto rules = c_family_rules();
    auto lexed = lex::lex_file("const char *s = \"if // not a comment\";\nint x;\n", rules);
    REQUIRE(lexed.normalized_lines.size() == 2);
    CHECK(lexed.normalized_lines[0] == "const char *s = \"if // not a comment\";");
    for (const auto& t : lexed.tokens) CHECK(t.text != "if");
}

TEST_CASE("cyclomatic complexity is one plus the decision tokens") {
    auto rules = c_family_rules();
    auto straight = tokens_of("int f(void) { int a = 1; int b = 2; return a + b; }", rules);
    CHECK(cyclomatic_complexity(straight, rules) == 1);

    auto mixed = tokens_of("void g() { if (a) { } for (;;) { } h(a && b); }", rules);
    CHECK(cyclomatic_complexity(mixed, rules) == 4);  // if + for + &&
}

TEST_CASE("concatenating two bodies adds complexities minus one") {
    auto rules = c_family_rules();
    std::string body1 = "if (a) { x(); } while (b) { y(); }";
    std::string body2 = "switch (c) { case 1: break; case 2: break; }";
    auto t1 = tokens_of(body1, rules);
    auto t2 = tokens_of(body2, rules);
    auto joined = tokens_of(body1 + " " + body2, rules);
    CHECK(cyclomatic_complexity(joined, rules) ==
          cyclomatic_complexity(t1, rules) + cyclomatic_complexity(t2, rules) - 1);
}

TEST_CASE("signature recognizer finds functions, not control flow or calls") {
    auto rules = c_family_rules();
    auto profile = profile_file("x.c",
                                "int f(int a) {\n"
                                "    if (a) {\n"
                                "        return 1;\n"
                                "    }\n"
                                "    return 0;\n"
                                "}\n"
                                "int arr[] = {1, 2};\n"
                                "void g(void) {\n"
                                "    while (x) { step(); }\n"
                                "}\n",
                                rules);
    REQUIRE(profile.functions.size() == 2);
    CHECK(profile.functions[0].start_line == 1);
    CHECK(profile.functions[0].end_line == 6);
    CHECK(profile.functions[0].cyclomatic == 2);
    CHECK(profile.functions[0].sloc == 6);
    CHECK(profile.functions[1].cyclomatic == 2);
}

TEST_CASE("lambdas passed as arguments do not open functions") {
    auto rules = c_family_rules();
    auto profile = profile_file("l.cpp",
                                "void outer() {\n"
                                "    run([](int v) {\n"
                                "        use(v);\n"
                                "    });\n"
                                "}\n",
                                rules);
    REQUIRE(profile.functions.size() == 1);
    CHECK(profile.functions[0].start_line == 1);
    CHECK(profile.functions[0].end_line == 5);
}

TEST_CASE("preprocessor lines count as code but never as signatures") {
    auto rules = c_family_rules();
    auto profile = profile_file("p.c",
                                "#define MAX(a, b) ((a) > (b) ? (a) : (b))\n"
                                "int pick(int a, int b) {\n"
                                "    return MAX(a, b);\n"
                                "}\n",
                                rules);
    CHECK(profile.sloc == 4);
    REQUIRE(profile.functions.size() == 1);
    CHECK(profile.functions[0].start_line == 2);
    CHECK(profile.functions[0].cyclomatic == 1);  // the macro's ?: is not in the body
}

TEST_CASE("indent recognizer tracks nested and one-line defs") {
    auto rules = indent_family_rules();
    auto profile = profile_file("n.py",
                                "def outer(a):\n"
                                "    def inner(b):\n"
                                "        if b and a:\n"
                                "            return 1\n"
                                "        return 0\n"
                                "    return inner(a)\n"
                                "\n"
                                "def one(x): return x if x else 0\n",
                                rules);
    REQUIRE(profile.functions.size() == 3);
    CHECK(profile.functions[0].start_line == 1);   // outer
    CHECK(profile.functions[0].end_line == 6);
    CHECK(profile.functions[1].start_line == 2);   // inner
    CHECK(profile.functions[1].end_line == 5);
    CHECK(profile.functions[1].cyclomatic == 3);   // if + and
    CHECK(profile.functions[2].start_line == 8);
    CHECK(profile.functions[2].sloc == 1);
    CHECK(profile.functions[2].cyclomatic == 2);   // the conditional expression's if
}

TEST_CASE("triple-quoted strings span lines without ending code") {
    auto rules = indent_family_rules();
    auto lexed = lex::lex_file("x = \"\"\"first\nif second\n\"\"\"\ny = 2\n", rules);
    REQUIRE(lexed.normalized_lines.size() == 4);
    for (const auto& t : lexed.tokens) CHECK(t.text != "if");
}

TEST_CASE("operator overloads are recognized by the operator keyword") {
    auto rules = c_family_rules();
    auto profile = profile_file("op.cpp",
                                "bool operator==(const X& a, const X& b) {\n"
                                "    return a.v == b.v;\n"
                                "}\n",
                                rules);
    REQUIRE(profile.functions.size() == 1);
    CHECK(profile.functions[0].sloc == 3);
}

TEST_CASE("language rules registry rejects overlapping extensions") {
    auto rules = builtin_language_rules();
    CHECK_NOTHROW(validate_rules(rules));
    rules.push_back(c_family_rules());  // duplicates every c extension
    CHECK_THROWS_AS(validate_rules(rules), RepoHealthError);
}

TEST_CASE("declarative rules files load and validate") {
    auto tmp = std::filesystem::temp_directory_path() / "rh_lang.json";
    std::ofstream(tmp) << R"({
        "name": "toy",
        "extensions": ["toy"],
        "line_comments": ["--"],
        "block_comments": [["{-", "-}"]],
        "recognizer": "indent",
        "function_keywords": ["fn"],
        "decision_words": ["when", "loop"]
    })";
    auto r = load_language_rules(tmp);
    CHECK(r.name == "toy");
    CHECK(r.recognizer == FunctionRecognizer::IndentKeyword);
    CHECK(r.is_decision_token("when"));
    CHECK_FALSE(r.is_decision_token("if"));
    std::filesystem::remove(tmp);

    std::ofstream(tmp) << R"({"name": "bad", "extensions": ["b"], "decision_words": []})";
    CHECK_THROWS_AS(load_language_rules(tmp), RepoHealthError);
    std::filesystem::remove(tmp);
}
