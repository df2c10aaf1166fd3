#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deeplight/common.hpp"

namespace deeplight {

// Registration order is fixed: these values appear in datasets and in the
// vocabulary layout.
enum class LanguageId : uint8_t { minijay = 0, minisnake = 1, minicee = 2 };
constexpr int kLanguageCount = 3;

constexpr LanguageId kAllLanguages[] = {LanguageId::minijay, LanguageId::minisnake,
                                        LanguageId::minicee};

std::string_view to_string(LanguageId id);
std::optional<LanguageId> language_from_string(std::string_view name);

// 1-based source position. Synthetic tokens (MiniSnake NEWLINE/INDENT/DEDENT)
// carry len = 0 and empty text; everything else has len >= 1.
struct Span {
    int line = 1;
    int col = 1;
    int len = 0;
};

struct Token {
    int type_id = 0;
    std::string text;
    Span span;
    bool is_whitespace = false;
};

struct TokenTypeInfo {
    int id = 0;
    std::string name;
    bool is_whitespace = false;
    bool synthetic = false;
};

// ---------------------------------------------------------------------------
// AST. Every node covers the contiguous token range [tok_begin, tok_end);
// children are ordered and disjoint inside the parent's range. Every
// non-whitespace, non-comment token consumed by the parser shows up as
// exactly one leaf node.
// ---------------------------------------------------------------------------

enum class NodeKind : uint8_t {
    Program,
    ClassDecl,
    StructDecl,
    FuncDecl,
    FieldDecl,
    VarDecl,
    Param,
    Block,
    Suite,
    If,
    While,
    For,
    Return,
    Assign,
    ExprStmt,
    Pass,
    Annotation,   // '@' Name in minijay, decorator in minisnake
    Call,
    Member,
    Index,
    New,
    Binary,
    Unary,
    Paren,
    ListLit,
    TypeRef,      // a type position; an IDENT leaf inside gets type_identifier
    ClassName,    // declared class/struct name
    FuncName,     // declared function/method name
    VarName,      // declared variable/field/param name
    AnnotationName,
    Ident,        // plain identifier read
    Literal,
    Tok,          // any other consumed terminal (operators, punctuation, synthetics)
};

std::string_view node_kind_name(NodeKind k);

struct AstNode {
    NodeKind kind = NodeKind::Tok;
    int tok_begin = 0;
    int tok_end = 0;  // exclusive
    std::vector<AstNode> children;

    bool is_leaf() const { return children.empty(); }
};

struct ParseError {
    int position = 0;      // token index the parser was looking at
    std::string expected;  // what would have made progress
};

// Invalid derivations are expected input for snippets, so a failed parse is
// a value, not an exception.
struct ParseResult {
    std::optional<AstNode> root;
    std::optional<ParseError> error;

    bool ok() const { return root.has_value(); }
};

// ---------------------------------------------------------------------------
// Grammar-walk generator knobs. Weights live here (and in JSON) rather than
// in the generator code so corpora remain tunable without rebuilds.
// ---------------------------------------------------------------------------

struct GeneratorConfig {
    // statement mix inside bodies: var decl, assign, if, while, return, call
    std::vector<double> stmt_weights = {3.0, 2.5, 1.4, 1.1, 1.5, 2.2};
    // expression atoms: int, float, string, bool/null, ident, member, call, new/list
    std::vector<double> atom_weights = {2.4, 0.8, 1.1, 0.9, 3.2, 1.6, 1.8, 0.9};
    double p_annotation = 0.35;     // chance a class/function gets an annotation
    double p_comment = 0.3;         // chance a comment line is emitted per site
    double p_binary = 0.5;          // chance an expression becomes a binary op
    double p_else = 0.4;
    double p_param_type = 0.75;     // minisnake parameter annotations
    int min_members = 1;
    int max_members = 3;
    int min_stmts = 1;
    int max_stmts = 2;
    // per-sample style flags: annotation-heavy, member chains, float
    // literals, compound assignment, multi declarators, parenthesised
    // subexpressions, two-argument calls, indexing, chained conditions,
    // the per-language alternate form (new-exprs / for loops / '->'),
    // and rich type syntax (generics / typed params / array declarators)
    std::vector<double> dialect_probs = {0.5, 0.5, 0.5, 0.5, 0.45,
                                         0.4, 0.5, 0.5, 0.4,  0.5, 0.5};

    std::string to_json() const;
    static GeneratorConfig from_json(const std::string& text);
};

class LanguageFrontend {
  public:
    virtual ~LanguageFrontend() = default;

    virtual LanguageId id() const = 0;
    std::string_view name() const { return to_string(id()); }

    virtual const std::vector<TokenTypeInfo>& token_types() const = 0;
    int token_type_count() const { return static_cast<int>(token_types().size()); }

    // Total over arbitrary bytes; garbage becomes ERROR tokens and
    // unterminated strings/comments run to end of input.
    virtual std::vector<Token> lex(std::string_view source) const = 0;

    virtual ParseResult parse(const std::vector<Token>& tokens) const = 0;

    // Per-token T4 labels for a successful parse of `tokens`.
    virtual std::vector<uint8_t> resolve(const std::vector<Token>& tokens,
                                         const AstNode& root) const = 0;

    // Deterministic per (seed, depth_budget, config); output always parses.
    virtual std::string generate(uint64_t seed, int depth_budget,
                                 const GeneratorConfig& config) const = 0;
};

const LanguageFrontend& frontend(LanguageId id);

// language -> [{type_id, name, is_whitespace}] for every registered frontend
std::string token_manifest_json();

}  // namespace deeplight
