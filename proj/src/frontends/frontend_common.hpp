#pragma once

// Internal scaffolding shared by the three language frontends: a
// position-tracking scanner, a recursive-descent cursor over significant
// tokens, and the AST walk that turns structural roles into highlight
// classes. Not installed; frontends only.

#include <functional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deeplight/hc.hpp"
#include "deeplight/token.hpp"

namespace deeplight::fe {

// ---------------------------------------------------------------------------
// Scanner
// ---------------------------------------------------------------------------

class Scanner {
  public:
    explicit Scanner(std::string_view src) : src_(src) {}

    bool eof() const { return i_ >= src_.size(); }
    char peek(size_t off = 0) const {
        return i_ + off < src_.size() ? src_[i_ + off] : '\0';
    }
    bool starts_with(std::string_view s) const {
        return src_.compare(i_, s.size(), s) == 0;
    }
    std::string_view view(size_t n) const { return src_.substr(i_, n); }

    // Start a token at the current position, consume n chars, emit it.
    void emit(std::vector<Token>& out, int type, size_t n, bool ws) {
        Token t;
        t.type_id = type;
        t.span.line = line_;
        t.span.col = col_;
        t.span.len = static_cast<int>(n);
        t.is_whitespace = ws;
        t.text = std::string(src_.substr(i_, n));
        advance(n);
        out.push_back(std::move(t));
    }

    size_t pos() const { return i_; }
    int line() const { return line_; }
    int col() const { return col_; }

    // length of a run satisfying pred, starting at current position
    template <class Pred>
    size_t run(Pred pred, size_t start_off = 0) const {
        size_t n = start_off;
        while (i_ + n < src_.size() && pred(src_[i_ + n])) ++n;
        return n;
    }

    // chars until (and excluding) '\n', from current position
    size_t until_eol(size_t start_off) const {
        size_t n = start_off;
        while (i_ + n < src_.size() && src_[i_ + n] != '\n') ++n;
        return n;
    }

    // distance to just past the terminator string, or to end of input
    size_t until_past(std::string_view term, size_t start_off) const {
        size_t p = src_.find(term, i_ + start_off);
        if (p == std::string_view::npos) return src_.size() - i_;
        return p + term.size() - i_;
    }

  private:
    void advance(size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src_[i_ + k] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
        }
        i_ += n;
    }

    std::string_view src_;
    size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

struct OpEntry {
    std::string_view text;
    int type;
};

// longest-match over an operator table (entries need not be sorted)
inline const OpEntry* match_op(const Scanner& s, const std::vector<OpEntry>& ops) {
    const OpEntry* best = nullptr;
    for (const auto& e : ops)
        if ((!best || e.text.size() > best->text.size()) && s.starts_with(e.text)) best = &e;
    return best;
}

// ---------------------------------------------------------------------------
// Parser cursor. Walks significant tokens (everything except whitespace and
// comments); raw indices are kept so AST ranges refer to the full stream.
// ParseFail.pos counts significant tokens, matching ParseError.position.
// ---------------------------------------------------------------------------

struct ParseFail {
    int pos;
    std::string expected;
};

class Cursor {
  public:
    Cursor(const std::vector<Token>& toks, std::function<bool(const Token&)> significant)
        : toks_(toks) {
        for (size_t i = 0; i < toks.size(); ++i)
            if (significant(toks[i])) sig_.push_back(static_cast<int>(i));
    }

    bool eof() const { return pos_ >= sig_.size(); }
    int type() const { return eof() ? -1 : toks_[raw()].type_id; }
    int type_ahead(size_t n) const {
        return pos_ + n >= sig_.size() ? -1 : toks_[sig_[pos_ + n]].type_id;
    }
    int raw() const { return eof() ? static_cast<int>(toks_.size()) : sig_[pos_]; }

    bool at(int t) const { return type() == t; }

    AstNode eat(int t, std::string_view expected, NodeKind kind = NodeKind::Tok) {
        if (!at(t)) fail(expected);
        AstNode leaf;
        leaf.kind = kind;
        leaf.tok_begin = raw();
        leaf.tok_end = raw() + 1;
        ++pos_;
        return leaf;
    }

    [[noreturn]] void fail(std::string_view expected) const {
        throw ParseFail{static_cast<int>(pos_), std::string(expected)};
    }

    size_t size() const { return sig_.size(); }

  private:
    const std::vector<Token>& toks_;
    std::vector<int> sig_;
    size_t pos_ = 0;
};

// wrap children into a node spanning them
inline AstNode make_node(NodeKind kind, std::vector<AstNode> children) {
    AstNode n;
    n.kind = kind;
    n.children = std::move(children);
    if (!n.children.empty()) {
        n.tok_begin = n.children.front().tok_begin;
        n.tok_end = n.children.back().tok_end;
    }
    return n;
}

// ---------------------------------------------------------------------------
// Shared resolver. Structural proposals ranked so that overlapping rules
// resolve as: declarator > annotation > callee > member > type > plain.
// Lexical classes come straight from the token-type table.
// ---------------------------------------------------------------------------

enum Rank {
    kRankPlain = 0,
    kRankType = 1,
    kRankMember = 2,
    kRankCallee = 3,
    kRankAnnotation = 4,
    kRankDeclarator = 5,
};

std::vector<uint8_t> resolve_ast(const std::vector<Token>& tokens, const AstNode& root,
                                 const std::vector<uint8_t>& base_class_by_type,
                                 int ident_type);

}  // namespace deeplight::fe
