// MiniJay: a Java-flavoured mini language.
//
//   program    := classDecl*
//   classDecl  := annotation* 'class' NAME '{' member* '}'
//   annotation := '@' NAME
//   member     := annotation* type NAME ( ('=' expr)? ';'            -- field
//                                       | '(' params? ')' block )    -- method
//   type       := 'int' | 'bool' | 'str' | 'void' | NAME ('<' type '>')?
//   stmt       := block | if | while | return | varDecl | assignOrCall
//   varDecl    := type NAME ('=' expr)? (',' NAME ('=' expr)?)* ';'
//   assignOrCall := postfix (('='|'+='|'-='|'*='|'/=') expr)? ';'
//   expr       := the usual precedence chain (|| && == != < > <= >= + - * / % ! unary-)
//   postfix    := primary ('.' NAME | '(' args? ')' | '[' expr ']')*
//   primary    := literal | NAME | 'new' NAME '(' args? ')' | '(' expr ')'

#include "deeplight/hc.hpp"
#include "deeplight/token.hpp"
#include "frontend_common.hpp"

namespace deeplight {

std::string generate_minijay(uint64_t seed, int depth_budget, const GeneratorConfig& cfg);

namespace {

using fe::Cursor;
using fe::make_node;

enum Type : int {
    t_ws = 0,
    t_line_comment,
    t_block_comment,
    t_ident,
    t_int_lit,
    t_float_lit,
    t_string_lit,
    t_kw_class,
    t_kw_if,
    t_kw_else,
    t_kw_while,
    t_kw_return,
    t_kw_new,
    t_kw_int,
    t_kw_bool,
    t_kw_str,
    t_kw_void,
    t_kw_true,
    t_kw_false,
    t_kw_null,
    t_at,
    t_dot,
    t_comma,
    t_semicolon,
    t_lparen,
    t_rparen,
    t_lbrace,
    t_rbrace,
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
    t_and_and,
    t_or_or,
    t_bang,
    t_error,
    kTypeCount
};

const std::unordered_map<std::string_view, int> kKeywords = {
    {"class", t_kw_class}, {"if", t_kw_if},       {"else", t_kw_else},
    {"while", t_kw_while}, {"return", t_kw_return}, {"new", t_kw_new},
    {"int", t_kw_int},     {"bool", t_kw_bool},   {"str", t_kw_str},
    {"void", t_kw_void},   {"true", t_kw_true},   {"false", t_kw_false},
    {"null", t_kw_null},
};

const std::vector<fe::OpEntry> kOps = {
    {"==", t_eq},         {"!=", t_neq},         {"<=", t_le},          {">=", t_ge},
    {"&&", t_and_and},    {"||", t_or_or},       {"+=", t_plus_assign}, {"-=", t_minus_assign},
    {"*=", t_star_assign}, {"/=", t_slash_assign}, {"@", t_at},         {".", t_dot},
    {",", t_comma},       {";", t_semicolon},    {"(", t_lparen},       {")", t_rparen},
    {"{", t_lbrace},      {"}", t_rbrace},       {"[", t_lbracket},     {"]", t_rbracket},
    {"+", t_plus},        {"-", t_minus},        {"*", t_star},         {"/", t_slash},
    {"%", t_percent},     {"=", t_assign},       {"<", t_lt},           {">", t_gt},
    {"!", t_bang},
};

std::vector<TokenTypeInfo> build_type_table() {
    const char* names[kTypeCount] = {
        "ws", "line_comment", "block_comment", "ident", "int_lit", "float_lit",
        "string_lit", "kw_class", "kw_if", "kw_else", "kw_while", "kw_return",
        "kw_new", "kw_int", "kw_bool", "kw_str", "kw_void", "kw_true", "kw_false",
        "kw_null", "at", "dot", "comma", "semicolon", "lparen", "rparen", "lbrace",
        "rbrace", "lbracket", "rbracket", "plus", "minus", "star", "slash", "percent",
        "plus_assign", "minus_assign", "star_assign", "slash_assign", "assign", "eq",
        "neq", "lt", "gt", "le", "ge", "and_and", "or_or", "bang", "error"};
    std::vector<TokenTypeInfo> v(kTypeCount);
    for (int i = 0; i < kTypeCount; ++i) v[i] = {i, names[i], i == t_ws, false};
    return v;
}

std::vector<uint8_t> build_base_classes() {
    std::vector<uint8_t> b(kTypeCount, hc::kUnhighlighted);
    for (int t = t_kw_class; t <= t_kw_void; ++t) b[t] = hc::kKeyword;
    b[t_kw_true] = b[t_kw_false] = b[t_kw_null] = hc::kLiteral;
    b[t_int_lit] = b[t_float_lit] = hc::kLiteral;
    b[t_string_lit] = hc::kCharStringLiteral;
    b[t_line_comment] = b[t_block_comment] = hc::kComment;
    return b;
}

bool is_ws_char(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

class Parser {
  public:
    explicit Parser(const std::vector<Token>& toks)
        : cur_(toks, [](const Token& t) {
              return t.type_id != t_ws && t.type_id != t_line_comment &&
                     t.type_id != t_block_comment;
          }) {}

    AstNode program() {
        std::vector<AstNode> kids;
        while (!cur_.eof()) kids.push_back(class_decl());
        return make_node(NodeKind::Program, std::move(kids));
    }

  private:
    AstNode annotation() {
        std::vector<AstNode> kids;
        kids.push_back(cur_.eat(t_at, "'@'"));
        kids.push_back(cur_.eat(t_ident, "annotation name", NodeKind::AnnotationName));
        return make_node(NodeKind::Annotation, std::move(kids));
    }

    bool at_primitive_type() const {
        int t = cur_.type();
        return t == t_kw_int || t == t_kw_bool || t == t_kw_str || t == t_kw_void;
    }

    bool at_generic_type() const {
        // IDENT '<' (primitive | IDENT) '>' -- only ever valid in type position
        if (!cur_.at(t_ident) || cur_.type_ahead(1) != t_lt) return false;
        const int inner = cur_.type_ahead(2);
        const bool inner_type = inner == t_ident || inner == t_kw_int ||
                                inner == t_kw_bool || inner == t_kw_str;
        return inner_type && cur_.type_ahead(3) == t_gt;
    }

    AstNode type_ref() {
        if (at_primitive_type()) return cur_.eat(cur_.type(), "type", NodeKind::TypeRef);
        if (at_generic_type()) {
            std::vector<AstNode> kids;
            kids.push_back(cur_.eat(t_ident, "type", NodeKind::Ident));
            kids.push_back(cur_.eat(t_lt, "'<'"));
            if (cur_.at(t_ident))
                kids.push_back(cur_.eat(t_ident, "type", NodeKind::Ident));
            else
                kids.push_back(cur_.eat(cur_.type(), "type"));
            kids.push_back(cur_.eat(t_gt, "'>'"));
            return fe::make_node(NodeKind::TypeRef, std::move(kids));
        }
        if (cur_.at(t_ident)) return cur_.eat(t_ident, "type", NodeKind::TypeRef);
        cur_.fail("type");
    }

    AstNode class_decl() {
        std::vector<AstNode> kids;
        while (cur_.at(t_at)) kids.push_back(annotation());
        kids.push_back(cur_.eat(t_kw_class, "'class'"));
        kids.push_back(cur_.eat(t_ident, "identifier", NodeKind::ClassName));
        kids.push_back(cur_.eat(t_lbrace, "'{'"));
        while (!cur_.at(t_rbrace) && !cur_.eof()) kids.push_back(member());
        kids.push_back(cur_.eat(t_rbrace, "'}'"));
        return make_node(NodeKind::ClassDecl, std::move(kids));
    }

    AstNode member() {
        std::vector<AstNode> kids;
        while (cur_.at(t_at)) kids.push_back(annotation());
        kids.push_back(type_ref());
        const bool is_method = cur_.at(t_ident) && cur_.type_ahead(1) == t_lparen;
        if (is_method) {
            kids.push_back(cur_.eat(t_ident, "identifier", NodeKind::FuncName));
            kids.push_back(cur_.eat(t_lparen, "'('"));
            if (!cur_.at(t_rparen)) {
                kids.push_back(param());
                while (cur_.at(t_comma)) {
                    kids.push_back(cur_.eat(t_comma, "','"));
                    kids.push_back(param());
                }
            }
            kids.push_back(cur_.eat(t_rparen, "')'"));
            kids.push_back(block());
            return make_node(NodeKind::FuncDecl, std::move(kids));
        }
        kids.push_back(cur_.eat(t_ident, "identifier", NodeKind::VarName));
        if (cur_.at(t_assign)) {
            kids.push_back(cur_.eat(t_assign, "'='"));
            kids.push_back(expr());
        }
        kids.push_back(cur_.eat(t_semicolon, "';'"));
        return make_node(NodeKind::FieldDecl, std::move(kids));
    }

    AstNode param() {
        std::vector<AstNode> kids;
        kids.push_back(type_ref());
        kids.push_back(cur_.eat(t_ident, "identifier", NodeKind::VarName));
        return make_node(NodeKind::Param, std::move(kids));
    }

    AstNode block() {
        std::vector<AstNode> kids;
        kids.push_back(cur_.eat(t_lbrace, "'{'"));
        while (!cur_.at(t_rbrace) && !cur_.eof()) kids.push_back(stmt());
        kids.push_back(cur_.eat(t_rbrace, "'}'"));
        return make_node(NodeKind::Block, std::move(kids));
    }

    AstNode stmt() {
        if (cur_.at(t_lbrace)) return block();
        if (cur_.at(t_kw_if)) {
            std::vector<AstNode> kids;
            kids.push_back(cur_.eat(t_kw_if, "'if'"));
            kids.push_back(cur_.eat(t_lparen, "'('"));
            kids.push_back(expr());
            kids.push_back(cur_.eat(t_rparen, "')'"));
            kids.push_back(stmt());
            if (cur_.at(t_kw_else)) {
                kids.push_back(cur_.eat(t_kw_else, "'else'"));
                kids.push_back(stmt());
            }
            return make_node(NodeKind::If, std::move(kids));
        }
        if (cur_.at(t_kw_while)) {
            std::vector<AstNode> kids;
            kids.push_back(cur_.eat(t_kw_while, "'while'"));
            kids.push_back(cur_.eat(t_lparen, "'('"));
            kids.push_back(expr());
            kids.push_back(cur_.eat(t_rparen, "')'"));
            kids.push_back(stmt());
            return make_node(NodeKind::While, std::move(kids));
        }
        if (cur_.at(t_kw_return)) {
            std::vector<AstNode> kids;
            kids.push_back(cur_.eat(t_kw_return, "'return'"));
            if (!cur_.at(t_semicolon)) kids.push_back(expr());
            kids.push_back(cur_.eat(t_semicolon, "';'"));
            return make_node(NodeKind::Return, std::move(kids));
        }
        if (at_primitive_type() || (cur_.at(t_ident) && cur_.type_ahead(1) == t_ident) ||
            (at_generic_type() && cur_.type_ahead(4) == t_ident))
            return var_decl();
        return assign_or_expr();
    }

    AstNode var_decl() {
        std::vector<AstNode> kids;
        kids.push_back(type_ref());
        kids.push_back(cur_.eat(t_ident, "identifier", NodeKind::VarName));
        if (cur_.at(t_assign)) {
            kids.push_back(cur_.eat(t_assign, "'='"));
            kids.push_back(expr());
        }
        while (cur_.at(t_comma)) {  // int x = 1, y, z = 2;
            kids.push_back(cur_.eat(t_comma, "','"));
            kids.push_back(cur_.eat(t_ident, "identifier", NodeKind::VarName));
            if (cur_.at(t_assign)) {
                kids.push_back(cur_.eat(t_assign, "'='"));
                kids.push_back(expr());
            }
        }
        kids.push_back(cur_.eat(t_semicolon, "';'"));
        return make_node(NodeKind::VarDecl, std::move(kids));
    }

    bool at_assign_op() const {
        int t = cur_.type();
        return t == t_assign || t == t_plus_assign || t == t_minus_assign ||
               t == t_star_assign || t == t_slash_assign;
    }

    AstNode assign_or_expr() {
        AstNode target = postfix();
        if (at_assign_op()) {
            std::vector<AstNode> kids;
            kids.push_back(std::move(target));
            kids.push_back(cur_.eat(cur_.type(), "assignment operator"));
            kids.push_back(expr());
            kids.push_back(cur_.eat(t_semicolon, "';'"));
            return make_node(NodeKind::Assign, std::move(kids));
        }
        std::vector<AstNode> kids;
        kids.push_back(std::move(target));
        kids.push_back(cur_.eat(t_semicolon, "';'"));
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

    AstNode expr() { return binary_chain(&Parser::and_expr, {t_or_or}); }
    AstNode and_expr() { return binary_chain(&Parser::eq_expr, {t_and_and}); }
    AstNode eq_expr() { return binary_chain(&Parser::rel_expr, {t_eq, t_neq}); }
    AstNode rel_expr() { return binary_chain(&Parser::add_expr, {t_lt, t_gt, t_le, t_ge}); }
    AstNode add_expr() { return binary_chain(&Parser::mul_expr, {t_plus, t_minus}); }
    AstNode mul_expr() { return binary_chain(&Parser::unary, {t_star, t_slash, t_percent}); }

    AstNode unary() {
        if (cur_.at(t_bang) || cur_.at(t_minus)) {
            std::vector<AstNode> kids;
            kids.push_back(cur_.eat(cur_.type(), "operator"));
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
            case t_kw_null:
                return cur_.eat(cur_.type(), "literal", NodeKind::Literal);
            case t_ident:
                return cur_.eat(t_ident, "identifier", NodeKind::Ident);
            case t_kw_new: {
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_kw_new, "'new'"));
                kids.push_back(cur_.eat(t_ident, "type", NodeKind::TypeRef));
                kids.push_back(cur_.eat(t_lparen, "'('"));
                if (!cur_.at(t_rparen)) {
                    kids.push_back(expr());
                    while (cur_.at(t_comma)) {
                        kids.push_back(cur_.eat(t_comma, "','"));
                        kids.push_back(expr());
                    }
                }
                kids.push_back(cur_.eat(t_rparen, "')'"));
                return make_node(NodeKind::New, std::move(kids));
            }
            case t_lparen: {
                std::vector<AstNode> kids;
                kids.push_back(cur_.eat(t_lparen, "'('"));
                kids.push_back(expr());
                kids.push_back(cur_.eat(t_rparen, "')'"));
                return make_node(NodeKind::Paren, std::move(kids));
            }
            default:
                cur_.fail("expression");
        }
    }

    Cursor cur_;
};

class MiniJay final : public LanguageFrontend {
  public:
    LanguageId id() const override { return LanguageId::minijay; }

    const std::vector<TokenTypeInfo>& token_types() const override {
        static const std::vector<TokenTypeInfo> table = build_type_table();
        return table;
    }

    std::vector<Token> lex(std::string_view source) const override {
        std::vector<Token> out;
        fe::Scanner s(source);
        while (!s.eof()) {
            const char c = s.peek();
            if (is_ws_char(c)) {
                s.emit(out, t_ws, s.run(is_ws_char), true);
            } else if (s.starts_with("//")) {
                s.emit(out, t_line_comment, s.until_eol(2), false);
            } else if (s.starts_with("/*")) {
                s.emit(out, t_block_comment, s.until_past("*/", 2), false);
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
        return generate_minijay(seed, depth_budget, config);
    }
};

}  // namespace

const LanguageFrontend& minijay_frontend() {
    static const MiniJay fe;
    return fe;
}

}  // namespace deeplight
