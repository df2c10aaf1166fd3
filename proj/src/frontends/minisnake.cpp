// MiniSnake: a Python-flavoured mini language with significant indentation.
//
// The lexer is total: a raw scan produces WS/comment/content tokens, then a
// second pass inserts synthetic NEWLINE/INDENT/DEDENT tokens (len 0, empty
// text) from the column of the first content token of each line. Synthetic
// tokens are not whitespace for metric purposes but always resolve to
// unhighlighted.
//
//   program  := stmt*
//   stmt     := decorator* (funcDef | classDef) | ifStmt | whileStmt | simple
//   simple   := ('return' expr? | 'pass' | exprOrAssign) NEWLINE
//   decorator:= '@' NAME NEWLINE
//   funcDef  := 'def' NAME '(' params? ')' ('->' type)? ':' suite
//   classDef := 'class' NAME ':' suite
//   forStmt  := 'for' NAME 'in' expr ':' suite
//   suite    := NEWLINE INDENT stmt+ DEDENT
//   param    := NAME (':' type)?
//   exprOrAssign := postfix (',' postfix)* (('='|'+='|'-='|'*='|'/=') expr (',' expr)*)?
//      -- bare-name assignment targets (including tuple targets) are
//         bindings and resolve as variable declarators; attribute/index
//         targets do not
//   expr     := 'or'/'and'/'not' over comparisons over +,-,*,/,%
//   postfix  := primary ('.' NAME | '(' args? ')' | '[' expr ']')*
//   primary  := literal | NAME | '(' expr ')' | '[' args? ']'

#include "deeplight/hc.hpp"
#include "deeplight/token.hpp"
#include "frontend_common.hpp"

namespace deeplight {

std::string generate_minisnake(uint64_t seed, int depth_budget, const GeneratorConfig& cfg);

namespace {

using fe::Cursor;
using fe::make_node;

enum Type : int {
    t_ws = 0,
    t_comment,
    t_ident,
    t_int_lit,
    t_float_lit,
    t_string_lit,
    t_kw_def,
    t_kw_class,
    t_kw_if,
    t_kw_else,
    t_kw_while,
    t_kw_for,
    t_kw_in,
    t_kw_return,
    t_kw_pass,
    t_kw_and,
    t_kw_or,
    t_kw_not,
    t_kw_true,
    t_kw_false,
    t_kw_none,
    t_at,
    t_dot,
    t_comma,
    t_colon,
    t_arrow,
    t_lparen,
    t_rparen,
    t_lbracket,
    t_rbracket,
    t_plus,
    t_minus,
    t_star,
    t_slash,
    t_percent,
    t_plus_assign,
    t_minus_assign,
    t_star_assign,
    t_slash_assign,
    t_assign,
    t_eq,
    t_neq,
    t_lt,
    t_gt,
    t_le,
    t_ge,
    t_newline,
    t_indent,
    t_dedent,
    t_error,
    kTypeCount
};

const std::unordered_map<std::string_view, int> kKeywords = {
    {"def", t_kw_def},     {"class", t_kw_class}, {"if", t_kw_if},
    {"else", t_kw_else},   {"while", t_kw_while}, {"for", t_kw_for},
    {"in", t_kw_in},        {"return", t_kw_return},
    {"pass", t_kw_pass},   {"and", t_kw_and},     {"or", t_kw_or},
    {"not", t_kw_not},     {"True", t_kw_true},   {"False", t_kw_false},
    {"None", t_kw_none},
};

const std::vector<fe::OpEntry> kOps = {
    {"==", t_eq},          {"!=", t_neq},          {"<=", t_le},          {">=", t_ge},
    {"+=", t_plus_assign}, {"-=", t_minus_assign}, {"*=", t_star_assign}, {"/=", t_slash_assign},
    {"->", t_arrow},       {"@", t_at},            {".", t_dot},          {",", t_comma},
    {":", t_colon},        {"(", t_lparen},        {")", t_rparen},       {"[", t_lbracket},
    {"]", t_rbracket},     {"+", t_plus},          {"-", t_minus},        {"*", t_star},
    {"/", t_slash},        {"%", t_percent},       {"=", t_assign},       {"<", t_lt},
    {">", t_gt},
};

std::vector<TokenTypeInfo> build_type_table() {
    const char* names[kTypeCount] = {
        "ws", "comment", "ident", "int_lit", "float_lit", "string_lit", "kw_def",
        "kw_class", "kw_if", "kw_else", "kw_while", "kw_for", "kw_in", "kw_return",
        "kw_pass", "kw_and",
        "kw_or", "kw_not", "kw_true", "kw_false", "kw_none", "at", "dot", "comma",
        "colon", "arrow", "lparen", "rparen", "lbracket", "rbracket", "plus", "minus",
        "star", "slash", "percent", "plus_assign", "minus_assign", "star_assign",
        "slash_assign", "assign", "eq", "neq", "lt", "gt", "le", "ge", "newline",
        "indent", "dedent", "error"};
    std::vector<TokenTypeInfo> v(kTypeCount);
    for (int i = 0; i < kTypeCount; ++i) {
        v[i] = {i, names[i], i == t_ws, i == t_newline || i == t_indent || i == t_dedent};
    }
    return v;
}

std::vector<uint8_t> build_base_classes() {
    std::vector<uint8_t> b(kTypeCount, hc::kUnhighlighted);
    for (int t = t_kw_def; t <= t_kw_not; ++t) b[t] = hc::kKeyword;
    b[t_kw_true] = b[t_kw_false] = b[t_kw_none] = hc::kLiteral;
    b[t_int_lit] = b[t_float_lit] = hc::kLiteral;
    b[t_string_lit] = hc::kCharStringLiteral;
    b[t_comment] = hc::kComment;
    return b;
}

bool is_ws_char(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
bool is_content(const Token& t) { return t.type_id != t_ws && t.type_id != t_comment; }

Token synthetic(int type, int line, int col) {
    Token t;
    t.type_id = type;
    t.span = {line, col, 0};
    t.is_whitespace = false;
    return t;
}

std::vector<Token> raw_scan(std::string_view source) {
    std::vector<Token> out;
    fe::Scanner s(source);
    while (!s.eof()) {
        const char c = s.peek();
        if (is_ws_char(c)) {
            s.emit(out, t_ws, s.run(is_ws_char), true);
        } else if (c == '#') {
            s.emit(out, t_comment, s.until_eol(1), false);
        } else if (fe::is_digit(c)) {
            size_t n = s.run(fe::is_digit);
            if (s.peek(n) == '.' && fe::is_digit(s.peek(n + 1))) {
                n = s.run(fe::is_digit, n + 1);
                s.emit(out, t_float_lit, n, false);
            } else {
                s.emit(out, t_int_lit, n, false);
            }
        } else if (c == '"') {
            size_t n = 1;
            while (s.peek(n) != '\0') {
                if (s.peek(n) == '\\' && s.peek(n + 1) != '\0') {
                    n += 2;
                } else if (s.peek(n) == '"') {
                    ++n;
                    break;
                } else {
                    ++n;
                }
            }
            s.emit(out, t_string_lit, n, false);
        } else if (fe::is_ident_start(c)) {
            const size_t n = s.run(fe::is_ident_char);
            auto it = kKeywords.find(s.view(n));
            s.emit(out, it == kKeywords.end() ? t_ident : it->second, n, false);
        } else if (const fe::OpEntry* op = fe::match_op(s, kOps)) {
            s.emit(out, op->type, op->text.size(), false);
        } else {
            s.emit(out, t_error, 1, false);
        }
    }
    return out;
}

std::vector<Token> insert_synthetics(std::vector<Token> raw) {
    std::vector<Token> out;
    out.reserve(raw.size() + 16);
    std::vector<int> stack = {0};
    int logical_line = -1;
    int last_content = -1;  // index into out

    auto emit_newline_after_last = [&]() {
        const Token& prev = out[static_cast<size_t>(last_content)];
        out.insert(out.begin() + last_content + 1,
                   synthetic(t_newline, prev.span.line, prev.span.col + prev.span.len));
    };

    for (auto& tok : raw) {
        if (!is_content(tok)) {
            out.push_back(std::move(tok));
            continue;
        }
        if (tok.span.line != logical_line) {
            if (logical_line != -1) emit_newline_after_last();
            const int n = tok.span.col - 1;
            if (n > stack.back()) {
                stack.push_back(n);
                out.push_back(synthetic(t_indent, tok.span.line, 1));
            } else {
                while (stack.size() > 1 && n < stack.back()) {
                    stack.pop_back();
                    out.push_back(synthetic(t_dedent, tok.span.line, 1));
                }
                // inconsistent dedent target: reopen a level so lexing stays total
                if (n > stack.back()) {
                    stack.push_back(n);
                    out.push_back(synthetic(t_indent, tok.span.line, 1));
                }
            }
            logical_line = tok.span.line;
        }
        out.push_back(std::move(tok));
        last_content = static_cast<int>(out.size()) - 1;
    }
    if (logical_line != -1) emit_newline_after_last();
    int end_line = out.empty() ? 1 : out.back().span.line;
    while (stack.size() > 1) {
        stack.pop_back();
        out.push_back(synthetic(t_dedent, end_line, 1));
    }
    return out;
}

class Parser {
  public:
    explicit Parser(const std::vector<Token>& toks) : cur_(toks, is_content) {}

    AstNode program() {
        std::vector<AstNode> kids;
        while (!cur_.eof()) kids.push_back(stmt());
        return make_node(NodeKind::Program, std::move(kids));
    }

  private:
    AstNode type_ref() { return cur_.eat(t_ident, "type", NodeKind::TypeRef); }

    AstNode stmt() {
        switch (cur_.type()) {
            case t_at: {
                std::vector<AstNode> decos;
                while (cur_.at(t_at)) {
                    std::vector<AstNode> kids;
                    kids.push_back(cur_.eat(t_at, "'@'"));
                    kids.push_back(cur_.eat(t_ident, "decorator name", NodeKind::AnnotationName));
                    kids.push_back(cur_.eat(t_newline, "newline"));
                    decos.push_back(make_node(NodeKind::Annotation, std::move(kids)));
                }
                if (cur_.at(t_kw_def)) return func_def(std::move(decos));
                if (cur_.at(t_kw_class)) return class_def(std::move(decos));
                cur_.fail("'def' or 'class'");
            }
            case t_kw_def:
                return func_def({});
            case t_kw_class:
                return class_def({});
            case t_kw_if: {
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_kw_if, "'if'"));
                kids.push_back(expr());
                kids.push_back(cur_.eat(t_colon, "':'"));
                kids.push_back(suite());
                if (cur_.at(t_kw_else)) {
                    kids.push_back(cur_.eat(t_kw_else, "'else'"));
                    kids.push_back(cur_.eat(t_colon, "':'"));
                    kids.push_back(suite());
                }
                return make_node(NodeKind::If, std::move(kids));
            }
            case t_kw_while: {
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_kw_while, "'while'"));
                kids.push_back(expr());
                kids.push_back(cur_.eat(t_colon, "':'"));
                kids.push_back(suite());
                return make_node(NodeKind::While, std::move(kids));
            }
            case t_kw_for: {
                // 'for' NAME 'in' expr ':' suite; the loop name is a binding
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_kw_for, "'for'"));
                kids.push_back(cur_.eat(t_ident, "loop variable", NodeKind::VarName));
                kids.push_back(cur_.eat(t_kw_in, "'in'"));
                kids.push_back(expr());
                kids.push_back(cur_.eat(t_colon, "':'"));
                kids.push_back(suite());
                return make_node(NodeKind::For, std::move(kids));
            }
            case t_kw_return: {
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_kw_return, "'return'"));
                if (!cur_.at(t_newline)) kids.push_back(expr());
                kids.push_back(cur_.eat(t_newline, "newline"));
                return make_node(NodeKind::Return, std::move(kids));
            }
            case t_kw_pass: {
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_kw_pass, "'pass'"));
                kids.push_back(cur_.eat(t_newline, "newline"));
                return make_node(NodeKind::Pass, std::move(kids));
            }
            default:
                return expr_or_assign();
        }
    }

    AstNode func_def(std::vector<AstNode> decos) {
        std::vector<AstNode> kids = std::move(decos);
        kids.push_back(cur_.eat(t_kw_def, "'def'"));
        kids.push_back(cur_.eat(t_ident, "function name", NodeKind::FuncName));
        kids.push_back(cur_.eat(t_lparen, "'('"));
        if (!cur_.at(t_rparen)) {
            kids.push_back(param());
            while (cur_.at(t_comma)) {
                kids.push_back(cur_.eat(t_comma, "','"));
                kids.push_back(param());
            }
        }
        kids.push_back(cur_.eat(t_rparen, "')'"));
        if (cur_.at(t_arrow)) {
            kids.push_back(cur_.eat(t_arrow, "'->'"));
            kids.push_back(type_ref());
        }
        kids.push_back(cur_.eat(t_colon, "':'"));
        kids.push_back(suite());
        return make_node(NodeKind::FuncDecl, std::move(kids));
    }

    AstNode class_def(std::vector<AstNode> decos) {
        std::vector<AstNode> kids = std::move(decos);
        kids.push_back(cur_.eat(t_kw_class, "'class'"));
        kids.push_back(cur_.eat(t_ident, "class name", NodeKind::ClassName));
        kids.push_back(cur_.eat(t_colon, "':'"));
        kids.push_back(suite());
        return make_node(NodeKind::ClassDecl, std::move(kids));
    }

    AstNode param() {
        std::vector<AstNode> kids;
        kids.push_back(cur_.eat(t_ident, "parameter name", NodeKind::VarName));
        if (cur_.at(t_colon)) {
            kids.push_back(cur_.eat(t_colon, "':'"));
            kids.push_back(type_ref());
        }
        return make_node(NodeKind::Param, std::move(kids));
    }

    AstNode suite() {
        std::vector<AstNode> kids;
        kids.push_back(cur_.eat(t_newline, "newline"));
        kids.push_back(cur_.eat(t_indent, "indent"));
        kids.push_back(stmt());
        while (!cur_.at(t_dedent) && !cur_.eof()) kids.push_back(stmt());
        kids.push_back(cur_.eat(t_dedent, "dedent"));
        return make_node(NodeKind::Suite, std::move(kids));
    }

    bool at_assign_op() const {
        int t = cur_.type();
        return t == t_assign || t == t_plus_assign || t == t_minus_assign ||
               t == t_star_assign || t == t_slash_assign;
    }

    AstNode expr_or_assign() {
        AstNode target = postfix();
        if (at_assign_op() || cur_.at(t_comma)) {
            // 'a, b = x, y' binds every bare-name target
            if (target.kind == NodeKind::Ident) target.kind = NodeKind::VarName;
            std::vector<AstNode> kids;
            kids.push_back(std::move(target));
            while (cur_.at(t_comma)) {
                kids.push_back(cur_.eat(t_comma, "','"));
                AstNode extra = postfix();
                if (extra.kind == NodeKind::Ident) extra.kind = NodeKind::VarName;
                kids.push_back(std::move(extra));
            }
            if (!at_assign_op()) cur_.fail("assignment operator");
            kids.push_back(cur_.eat(cur_.type(), "assignment operator"));
            kids.push_back(expr());
            while (cur_.at(t_comma)) {
                kids.push_back(cur_.eat(t_comma, "','"));
                kids.push_back(expr());
            }
            kids.push_back(cur_.eat(t_newline, "newline"));
            return make_node(NodeKind::Assign, std::move(kids));
        }
        std::vector<AstNode> kids;
        kids.push_back(std::move(target));
        kids.push_back(cur_.eat(t_newline, "newline"));
        return make_node(NodeKind::ExprStmt, std::move(kids));
    }

    AstNode binary_chain(AstNode (Parser::*next)(), std::initializer_list<int> ops) {
        AstNode lhs = (this->*next)();
        for (;;) {
            bool matched = false;
            for (int op : ops)
                if (cur_.at(op)) {
                    std::vector<AstNode> kids;
                    kids.push_back(std::move(lhs));
                    kids.push_back(cur_.eat(op, "operator"));
                    kids.push_back((this->*next)());
                    lhs = make_node(NodeKind::Binary, std::move(kids));
                    matched = true;
                    break;
                }
            if (!matched) return lhs;
        }
    }

    AstNode expr() { return binary_chain(&Parser::and_expr, {t_kw_or}); }
    AstNode and_expr() { return binary_chain(&Parser::not_expr, {t_kw_and}); }

    AstNode not_expr() {
        if (cur_.at(t_kw_not)) {
            std::vector<AstNode> kids;
            kids.push_back(cur_.eat(t_kw_not, "'not'"));
            kids.push_back(not_expr());
            return make_node(NodeKind::Unary, std::move(kids));
        }
        return cmp_expr();
    }

    AstNode cmp_expr() {
        return binary_chain(&Parser::add_expr, {t_eq, t_neq, t_lt, t_gt, t_le, t_ge});
    }
    AstNode add_expr() { return binary_chain(&Parser::mul_expr, {t_plus, t_minus}); }
    AstNode mul_expr() { return binary_chain(&Parser::unary, {t_star, t_slash, t_percent}); }

    AstNode unary() {
        if (cur_.at(t_minus)) {
            std::vector<AstNode> kids;
            kids.push_back(cur_.eat(t_minus, "operator"));
            kids.push_back(unary());
            return make_node(NodeKind::Unary, std::move(kids));
        }
        return postfix();
    }

    AstNode postfix() {
        AstNode e = primary();
        for (;;) {
            if (cur_.at(t_dot)) {
                std::vector<AstNode> kids;
                kids.push_back(std::move(e));
                kids.push_back(cur_.eat(t_dot, "'.'"));
                kids.push_back(cur_.eat(t_ident, "identifier", NodeKind::Ident));
                e = make_node(NodeKind::Member, std::move(kids));
            } else if (cur_.at(t_lparen)) {
                std::vector<AstNode> kids;
                kids.push_back(std::move(e));
                kids.push_back(cur_.eat(t_lparen, "'('"));
                if (!cur_.at(t_rparen)) {
                    kids.push_back(expr());
                    while (cur_.at(t_comma)) {
                        kids.push_back(cur_.eat(t_comma, "','"));
                        kids.push_back(expr());
                    }
                }
                kids.push_back(cur_.eat(t_rparen, "')'"));
                e = make_node(NodeKind::Call, std::move(kids));
            } else if (cur_.at(t_lbracket)) {
                std::vector<AstNode> kids;
                kids.push_back(std::move(e));
                kids.push_back(cur_.eat(t_lbracket, "'['"));
                kids.push_back(expr());
                kids.push_back(cur_.eat(t_rbracket, "']'"));
                e = make_node(NodeKind::Index, std::move(kids));
            } else {
                return e;
            }
        }
    }

    AstNode primary() {
        switch (cur_.type()) {
            case t_int_lit:
            case t_float_lit:
            case t_string_lit:
            case t_kw_true:
            case t_kw_false:
            case t_kw_none:
                return cur_.eat(cur_.type(), "literal", NodeKind::Literal);
            case t_ident:
                return cur_.eat(t_ident, "identifier", NodeKind::Ident);
            case t_lparen: {
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_lparen, "'('"));
                kids.push_back(expr());
                kids.push_back(cur_.eat(t_rparen, "')'"));
                return make_node(NodeKind::Paren, std::move(kids));
            }
            case t_lbracket: {
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_lbracket, "'['"));
                if (!cur_.at(t_rbracket)) {
                    kids.push_back(expr());
                    while (cur_.at(t_comma)) {
                        kids.push_back(cur_.eat(t_comma, "','"));
                        kids.push_back(expr());
                    }
                }
                kids.push_back(cur_.eat(t_rbracket, "']'"));
                return make_node(NodeKind::ListLit, std::move(kids));
            }
            default:
                cur_.fail("expression");
        }
    }

    Cursor cur_;
};

class MiniSnake final : public LanguageFrontend {
  public:
    LanguageId id() const override { return LanguageId::minisnake; }

    const std::vector<TokenTypeInfo>& token_types() const override {
        static const std::vector<TokenTypeInfo> table = build_type_table();
        return table;
    }

    std::vector<Token> lex(std::string_view source) const override {
        return insert_synthetics(raw_scan(source));
    }

    ParseResult parse(const std::vector<Token>& tokens) const override {
        try {
            Parser p(tokens);
            ParseResult r;
            r.root = p.program();
            return r;
        } catch (const fe::ParseFail& f) {
            ParseResult r;
            r.error = ParseError{f.pos, f.expected};
            return r;
        }
    }

    std::vector<uint8_t> resolve(const std::vector<Token>& tokens,
                                 const AstNode& root) const override {
        static const std::vector<uint8_t> base = build_base_classes();
        return fe::resolve_ast(tokens, root, base, t_ident);
    }

    std::string generate(uint64_t seed, int depth_budget,
                         const GeneratorConfig& config) const override {
        return generate_minisnake(seed, depth_budget, config);
    }
};

}  // namespace

const LanguageFrontend& minisnake_frontend() {
    static const MiniSnake fe;
    return fe;
}

}  // namespace deeplight
