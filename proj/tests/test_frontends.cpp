#include <doctest.h>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "deeplight/dataset.hpp"
#include "deeplight/hc.hpp"
#include "deeplight/token.hpp"

using namespace deeplight;

namespace {

std::string type_name(LanguageId lang, int type_id) {
    return frontend(lang).token_types().at(static_cast<size_t>(type_id)).name;
}

std::vector<std::string> type_names(LanguageId lang, const std::string& src) {
    std::vector<std::string> names;
    for (const auto& t : frontend(lang).lex(src)) names.push_back(type_name(lang, t.type_id));
    return names;
}

std::string concat_text(const std::vector<Token>& toks) {
    std::string s;
    for (const auto& t : toks) s += t.text;
    return s;
}

// walks the AST checking range nesting and collecting leaf-covered tokens
void check_node(const AstNode& n, std::vector<int>& leaf_cover) {
    if (n.is_leaf()) {
        REQUIRE(n.tok_end == n.tok_begin + 1);
        leaf_cover.push_back(n.tok_begin);
        return;
    }
    int prev_end = n.tok_begin;
    for (const auto& c : n.children) {
        REQUIRE(c.tok_begin >= prev_end);
        REQUIRE(c.tok_end <= n.tok_end);
        prev_end = c.tok_end;
        check_node(c, leaf_cover);
    }
}

void check_ast_invariants(LanguageId lang, const std::vector<Token>& toks,
                          const AstNode& root) {
    std::vector<int> cover;
    check_node(root, cover);
    const auto& types = frontend(lang).token_types();
    std::set<int> covered(cover.begin(), cover.end());
    REQUIRE(covered.size() == cover.size());  // each leaf token exactly once
    for (size_t i = 0; i < toks.size(); ++i) {
        const auto& info = types.at(static_cast<size_t>(toks[i].type_id));
        const bool ignorable = info.is_whitespace || info.name == "comment" ||
                               info.name == "line_comment" || info.name == "block_comment";
        if (ignorable)
            REQUIRE(!covered.count(static_cast<int>(i)));
        else
            REQUIRE(covered.count(static_cast<int>(i)));
    }
}

// (text, class) expectations for all non-whitespace, non-synthetic tokens
void expect_labels(LanguageId lang, const std::string& src,
                   const std::vector<std::pair<std::string, int>>& expected) {
    const auto& fe = frontend(lang);
    auto toks = fe.lex(src);
    auto pr = fe.parse(toks);
    REQUIRE(pr.ok());
    auto labels = fe.resolve(toks, *pr.root);
    REQUIRE(labels.size() == toks.size());
    std::vector<std::pair<std::string, int>> got;
    for (size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].is_whitespace || toks[i].text.empty()) {
            CHECK(labels[i] == hc::kUnhighlighted);
            continue;
        }
        got.emplace_back(toks[i].text, labels[i]);
    }
    REQUIRE(got.size() == expected.size());
    for (size_t i = 0; i < got.size(); ++i) {
        CAPTURE(i);
        CAPTURE(got[i].first);
        CHECK(got[i].first == expected[i].first);
        CHECK(static_cast<int>(got[i].second) == expected[i].second);
    }
}

constexpr int U = hc::kUnhighlighted;
constexpr int KW = hc::kKeyword;
constexpr int LIT = hc::kLiteral;
constexpr int STR = hc::kCharStringLiteral;
constexpr int TY = hc::kTypeIdentifier;
constexpr int FN = hc::kFunctionIdentifier;
constexpr int FLD = hc::kFieldIdentifier;
constexpr int CD = hc::kClassDeclarator;
constexpr int FD = hc::kFunctionDeclarator;
constexpr int VD = hc::kVariableDeclarator;
constexpr int AD = hc::kAnnotationDeclarator;

}  // namespace

TEST_CASE("minijay lexes the class example") {
    auto names = type_names(LanguageId::minijay, "class Payment {}");
    std::vector<std::string> want = {"kw_class", "ws", "ident", "ws", "lbrace", "rbrace"};
    CHECK(names == want);
}

TEST_CASE("empty input lexes to nothing") {
    for (auto lang : kAllLanguages) CHECK(frontend(lang).lex("").empty());
}

TEST_CASE("minisnake emits exactly one indent and one dedent for def/pass") {
    auto toks = frontend(LanguageId::minisnake).lex("def f():\n  pass\n");
    int indents = 0, dedents = 0, newlines = 0;
    for (const auto& t : toks) {
        const auto& name = type_name(LanguageId::minisnake, t.type_id);
        if (name == "indent") ++indents;
        if (name == "dedent") ++dedents;
        if (name == "newline") ++newlines;
        if (name == "indent" || name == "dedent" || name == "newline") {
            CHECK(t.span.len == 0);
            CHECK(t.text.empty());
            CHECK(!t.is_whitespace);
        }
    }
    CHECK(indents == 1);
    CHECK(dedents == 1);
    CHECK(newlines == 2);
}

// brute-force reference for the indentation algorithm: compare the lexer's
// indent/dedent event stream against one computed from raw lines
TEST_CASE("minisnake indentation matches a line-based reference") {
    auto reference_events = [](const std::string& src) {
        std::vector<int> events;  // +1 indent, -1 dedent
        std::vector<int> stack = {0};
        size_t pos = 0;
        while (pos <= src.size()) {
            size_t end = src.find('\n', pos);
            if (end == std::string::npos) end = src.size();
            std::string line = src.substr(pos, end - pos);
            // first content column: skip spaces; ignore blank/comment lines
            size_t i = 0;
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
            if (i < line.size() && line[i] != '#') {
                const int n = static_cast<int>(i);
                if (n > stack.back()) {
                    stack.push_back(n);
                    events.push_back(+1);
                } else {
                    while (stack.size() > 1 && n < stack.back()) {
                        stack.pop_back();
                        events.push_back(-1);
                    }
                    if (n > stack.back()) {
                        stack.push_back(n);
                        events.push_back(+1);
                    }
                }
            }
            if (end == src.size()) break;
            pos = end + 1;
        }
        while (stack.size() > 1) {
            stack.pop_back();
            events.push_back(-1);
        }
        return events;
    };

    const std::string programs[] = {
        "def f():\n  pass\n",
        "def f():\n    x = 1\n    while x < 3:\n        x += 1\npass\n",
        "class C:\n    def m(self):\n        return 1\n\n    def n(self):\n        pass\n",
        "x = 1\n# comment only\n\ny = 2\n",
        "if x > 0:\n   a = 1\n   if y > 0:\n      b = 2\nc = 3\n",
    };
    for (const auto& src : programs) {
        CAPTURE(src);
        std::vector<int> got;
        for (const auto& t : frontend(LanguageId::minisnake).lex(src)) {
            const auto& name = type_name(LanguageId::minisnake, t.type_id);
            if (name == "indent") got.push_back(+1);
            if (name == "dedent") got.push_back(-1);
        }
        CHECK(got == reference_events(src));
    }
}

TEST_CASE("lexers are total and reproduce the source") {
    Rng rng(99);
    const std::string alphabet =
        "abcXYZ_019 \t\n\"\\/*#@.;:(){}[]<>=!+-%&|^?~`'\xc3\xa9\x01\xff";
    for (int iter = 0; iter < 300; ++iter) {
        std::string s;
        const int len = static_cast<int>(rng.below(200));
        for (int i = 0; i < len; ++i) s += alphabet[rng.below(alphabet.size())];
        for (auto lang : kAllLanguages) {
            auto toks = frontend(lang).lex(s);
            CHECK(concat_text(toks) == s);  // synthetic tokens are empty text
            for (const auto& t : toks) {
                CHECK(t.type_id >= 0);
                CHECK(t.type_id < frontend(lang).token_type_count());
            }
        }
    }
}

TEST_CASE("unterminated strings and comments run to end of input") {
    auto toks = frontend(LanguageId::minijay).lex("int x = \"abc");
    CHECK(type_name(LanguageId::minijay, toks.back().type_id) == "string_lit");
    CHECK(toks.back().text == "\"abc");
    toks = frontend(LanguageId::minijay).lex("/* never closed\nint x;");
    REQUIRE(toks.size() == 1);
    CHECK(type_name(LanguageId::minijay, toks[0].type_id) == "block_comment");
}

TEST_CASE("minijay parses a class with one field") {
    auto toks = frontend(LanguageId::minijay).lex("class A { int x; }");
    auto pr = frontend(LanguageId::minijay).parse(toks);
    REQUIRE(pr.ok());
    REQUIRE(pr.root->kind == NodeKind::Program);
    REQUIRE(pr.root->children.size() == 1);
    const AstNode& cls = pr.root->children[0];
    CHECK(cls.kind == NodeKind::ClassDecl);
    int fields = 0;
    for (const auto& c : cls.children)
        if (c.kind == NodeKind::FieldDecl) ++fields;
    CHECK(fields == 1);
    check_ast_invariants(LanguageId::minijay, toks, *pr.root);
}

TEST_CASE("minijay reports a parse error for a missing class name") {
    auto toks = frontend(LanguageId::minijay).lex("class {");
    auto pr = frontend(LanguageId::minijay).parse(toks);
    REQUIRE(!pr.ok());
    CHECK(pr.error->position == 1);  // significant tokens: 'class' then '{'
    CHECK(pr.error->expected == "identifier");
}

TEST_CASE("minicee parses a main function") {
    auto toks = frontend(LanguageId::minicee).lex("int main() { return 0; }");
    auto pr = frontend(LanguageId::minicee).parse(toks);
    REQUIRE(pr.ok());
    REQUIRE(pr.root->children.size() == 1);
    CHECK(pr.root->children[0].kind == NodeKind::FuncDecl);
    check_ast_invariants(LanguageId::minicee, toks, *pr.root);
}

TEST_CASE("resolve: minijay hand-labeled fixture") {
    const std::string src =
        "@Override\n"
        "class Payment {\n"
        "  int count = 0;\n"
        "  void run(Buffer b) {\n"
        "    count = b.size();\n"
        "    if (count > 0) { emit(count); }\n"
        "  }\n"
        "}\n";
    expect_labels(LanguageId::minijay, src,
                  {{"@", U},     {"Override", AD}, {"class", KW}, {"Payment", CD},
                   {"{", U},     {"int", KW},      {"count", VD}, {"=", U},
                   {"0", LIT},   {";", U},         {"void", KW},  {"run", FD},
                   {"(", U},     {"Buffer", TY},   {"b", VD},     {")", U},
                   {"{", U},     {"count", U},     {"=", U},      {"b", U},
                   {".", U},     {"size", FN},     {"(", U},      {")", U},
                   {";", U},     {"if", KW},       {"(", U},      {"count", U},
                   {">", U},     {"0", LIT},       {")", U},      {"{", U},
                   {"emit", FN}, {"(", U},         {"count", U},  {")", U},
                   {";", U},     {"}", U},         {"}", U},      {"}", U}});
}

TEST_CASE("resolve: minisnake hand-labeled fixture") {
    const std::string src =
        "@cached\n"
        "def run(x: Buffer) -> Widget:\n"
        "    total = x.size()\n"
        "    return total\n";
    expect_labels(LanguageId::minisnake, src,
                  {{"@", U},      {"cached", AD}, {"def", KW},   {"run", FD},
                   {"(", U},      {"x", VD},      {":", U},      {"Buffer", TY},
                   {")", U},      {"->", U},      {"Widget", TY}, {":", U},
                   {"total", VD}, {"=", U},       {"x", U},      {".", U},
                   {"size", FN},  {"(", U},       {")", U},      {"return", KW},
                   {"total", U}});
}

TEST_CASE("resolve: minicee hand-labeled fixture") {
    const std::string src =
        "struct Point {\n"
        "  int x;\n"
        "};\n"
        "int main(struct Point p) {\n"
        "  p.x = p.x + 1;\n"
        "  return p.x;\n"
        "}\n";
    expect_labels(LanguageId::minicee, src,
                  {{"struct", KW}, {"Point", CD},  {"{", U},      {"int", KW},
                   {"x", VD},      {";", U},       {"}", U},      {";", U},
                   {"int", KW},    {"main", FD},   {"(", U},      {"struct", KW},
                   {"Point", TY},  {"p", VD},      {")", U},      {"{", U},
                   {"p", U},       {".", U},       {"x", FLD},    {"=", U},
                   {"p", U},       {".", U},       {"x", FLD},    {"+", U},
                   {"1", LIT},     {";", U},       {"return", KW}, {"p", U},
                   {".", U},       {"x", FLD},     {";", U},      {"}", U}});
}

TEST_CASE("resolve: minijay generic type references") {
    expect_labels(LanguageId::minijay, "class A { Buffer<int> xs = q; Ledger<Widget> m; }",
                  {{"class", KW},  {"A", CD},      {"{", U},      {"Buffer", TY},
                   {"<", U},       {"int", KW},    {">", U},      {"xs", VD},
                   {"=", U},       {"q", U},       {";", U},      {"Ledger", TY},
                   {"<", U},       {"Widget", TY}, {">", U},      {"m", VD},
                   {";", U},       {"}", U}});
    // a comparison chain in expression position stays an expression
    auto toks = frontend(LanguageId::minijay).lex("class A { void m() { x = a < b; } }");
    auto pr = frontend(LanguageId::minijay).parse(toks);
    REQUIRE(pr.ok());
}

TEST_CASE("resolve: minicee array declarators") {
    expect_labels(LanguageId::minicee,
                  "struct Grid {\n  int cells[9];\n};\nvoid run() {\n  int xs[4];\n  xs[0] = 1;\n}\n",
                  {{"struct", KW}, {"Grid", CD}, {"{", U},   {"int", KW}, {"cells", VD},
                   {"[", U},       {"9", LIT},   {"]", U},   {";", U},    {"}", U},
                   {";", U},       {"void", KW}, {"run", FD}, {"(", U},   {")", U},
                   {"{", U},       {"int", KW},  {"xs", VD}, {"[", U},    {"4", LIT},
                   {"]", U},       {";", U},     {"xs", U},  {"[", U},    {"0", LIT},
                   {"]", U},       {"=", U},     {"1", LIT}, {";", U},    {"}", U}});
}

TEST_CASE("resolve: minisnake tuple assignment binds every bare name") {
    expect_labels(LanguageId::minisnake, "x, y = run(), 1\nx.left, z = 2, 3\n",
                  {{"x", VD},   {",", U},   {"y", VD},  {"=", U},   {"run", FN},
                   {"(", U},    {")", U},   {",", U},   {"1", LIT}, {"x", U},
                   {".", U},    {"left", FLD}, {",", U}, {"z", VD}, {"=", U},
                   {"2", LIT},  {",", U},   {"3", LIT}});
}

TEST_CASE("resolve: declarator beats callee, callee beats member") {
    // x declared then read; f is both member access and callee
    expect_labels(LanguageId::minijay,
                  "class A { void m() { int x = f(); a.f(); a.b; } }",
                  {{"class", KW}, {"A", CD},   {"{", U},  {"void", KW}, {"m", FD},
                   {"(", U},      {")", U},    {"{", U},  {"int", KW},  {"x", VD},
                   {"=", U},      {"f", FN},   {"(", U},  {")", U},     {";", U},
                   {"a", U},      {".", U},    {"f", FN}, {"(", U},     {")", U},
                   {";", U},      {"a", U},    {".", U},  {"b", FLD},   {";", U},
                   {"}", U},      {"}", U}});
}

TEST_CASE("resolve: string literals and comments") {
    expect_labels(LanguageId::minijay,
                  "// note\nclass A { str s = \"ok\"; /* block */ }",
                  {{"// note", hc::kComment},
                   {"class", KW},
                   {"A", CD},
                   {"{", U},
                   {"str", KW},
                   {"s", VD},
                   {"=", U},
                   {"\"ok\"", STR},
                   {";", U},
                   {"/* block */", hc::kComment},
                   {"}", U}});
}

TEST_CASE("generated programs parse, label legally, and are deterministic") {
    GeneratorConfig cfg;
    for (auto lang : kAllLanguages) {
        const auto& fe = frontend(lang);
        for (uint64_t seed = 0; seed < 200; ++seed) {
            CAPTURE(to_string(lang));
            CAPTURE(seed);
            const std::string text = fe.generate(seed, 3, cfg);
            REQUIRE(text == fe.generate(seed, 3, cfg));
            auto toks = fe.lex(text);
            auto pr = fe.parse(toks);
            if (!pr.ok()) {
                CAPTURE(text);
                CAPTURE(pr.error->position);
                CAPTURE(pr.error->expected);
                REQUIRE(pr.ok());
            }
            check_ast_invariants(lang, toks, *pr.root);
            auto labels = fe.resolve(toks, *pr.root);
            REQUIRE(labels == fe.resolve(toks, *pr.root));
            REQUIRE(labels.size() == toks.size());
            for (size_t i = 0; i < toks.size(); ++i) {
                REQUIRE(labels[i] < hc::kClassCount);
                if (toks[i].is_whitespace || toks[i].text.empty())
                    REQUIRE(labels[i] == hc::kUnhighlighted);
            }
        }
    }
}

TEST_CASE("generator entropy: 500 minijay seeds give 480+ distinct programs") {
    GeneratorConfig cfg;
    std::set<std::string> distinct;
    for (uint64_t seed = 1; seed <= 500; ++seed) {
        auto toks = frontend(LanguageId::minijay).lex(
            frontend(LanguageId::minijay).generate(seed, 3, cfg));
        std::string key;
        for (const auto& t : toks) {
            key += std::to_string(t.type_id);
            key += '\x1f';
            key += t.text;
            key += '\x1e';
        }
        distinct.insert(key);
    }
    CHECK(distinct.size() >= 480);
}

TEST_CASE("minicee never generates an at sign") {
    GeneratorConfig cfg;
    for (uint64_t seed = 0; seed < 300; ++seed) {
        const std::string text = frontend(LanguageId::minicee).generate(seed, 4, cfg);
        CHECK(text.find('@') == std::string::npos);
    }
}

TEST_CASE("round-trip: token text concatenation reproduces generated sources") {
    GeneratorConfig cfg;
    for (auto lang : kAllLanguages)
        for (uint64_t seed = 0; seed < 50; ++seed) {
            const std::string text = frontend(lang).generate(seed, 3, cfg);
            CHECK(concat_text(frontend(lang).lex(text)) == text);
        }
}

TEST_CASE("per-language class coverage in generated corpora") {
    GeneratorConfig cfg;
    const int n = 400;
    for (auto lang : kAllLanguages) {
        std::map<int, int> samples_with_class;
        for (uint64_t seed = 0; seed < n; ++seed) {
            const auto& fe = frontend(lang);
            auto toks = fe.lex(fe.generate(seed, 3, cfg));
            auto pr = fe.parse(toks);
            REQUIRE(pr.ok());
            std::set<int> present;
            for (uint8_t l : fe.resolve(toks, *pr.root)) present.insert(l);
            for (int c : present) samples_with_class[c]++;
        }
        for (int cls = 1; cls < hc::kClassCount; ++cls) {
            CAPTURE(to_string(lang));
            CAPTURE(hc::class_name(cls));
            if (lang == LanguageId::minicee && cls == hc::kAnnotationDeclarator) {
                CHECK(samples_with_class[cls] == 0);
            } else {
                CHECK(samples_with_class[cls] >= n / 20);  // 5% of samples
            }
        }
    }
}
