#include <json.hpp>

#include "deeplight/token.hpp"
#include "frontend_common.hpp"

namespace deeplight {

const LanguageFrontend& minijay_frontend();
const LanguageFrontend& minisnake_frontend();
const LanguageFrontend& minicee_frontend();

std::string_view to_string(LanguageId id) {
    switch (id) {
        case LanguageId::minijay: return "minijay";
        case LanguageId::minisnake: return "minisnake";
        case LanguageId::minicee: return "minicee";
    }
    return "?";
}

std::optional<LanguageId> language_from_string(std::string_view name) {
    for (auto id : kAllLanguages)
        if (name == to_string(id)) return id;
    return std::nullopt;
}

const LanguageFrontend& frontend(LanguageId id) {
    switch (id) {
        case LanguageId::minijay: return minijay_frontend();
        case LanguageId::minisnake: return minisnake_frontend();
        case LanguageId::minicee: return minicee_frontend();
    }
    throw Error("unknown language id");
}

std::string_view node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Program: return "program";
        case NodeKind::ClassDecl: return "class_decl";
        case NodeKind::StructDecl: return "struct_decl";
        case NodeKind::FuncDecl: return "func_decl";
        case NodeKind::FieldDecl: return "field_decl";
        case NodeKind::VarDecl: return "var_decl";
        case NodeKind::Param: return "param";
        case NodeKind::Block: return "block";
        case NodeKind::Suite: return "suite";
        case NodeKind::If: return "if";
        case NodeKind::While: return "while";
        case NodeKind::For: return "for";
        case NodeKind::Return: return "return";
        case NodeKind::Assign: return "assign";
        case NodeKind::ExprStmt: return "expr_stmt";
        case NodeKind::Pass: return "pass";
        case NodeKind::Annotation: return "annotation";
        case NodeKind::Call: return "call";
        case NodeKind::Member: return "member";
        case NodeKind::Index: return "index";
        case NodeKind::New: return "new";
        case NodeKind::Binary: return "binary";
        case NodeKind::Unary: return "unary";
        case NodeKind::Paren: return "paren";
        case NodeKind::ListLit: return "list";
        case NodeKind::TypeRef: return "type_ref";
        case NodeKind::ClassName: return "class_name";
        case NodeKind::FuncName: return "func_name";
        case NodeKind::VarName: return "var_name";
        case NodeKind::AnnotationName: return "annotation_name";
        case NodeKind::Ident: return "ident";
        case NodeKind::Literal: return "literal";
        case NodeKind::Tok: return "tok";
    }
    return "?";
}

std::string token_manifest_json() {
    nlohmann::json root;
    for (auto id : kAllLanguages) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& t : frontend(id).token_types()) {
            nlohmann::json e = {{"type_id", t.id},
                                {"name", t.name},
                                {"is_whitespace", t.is_whitespace}};
            if (t.synthetic) e["synthetic"] = true;
            arr.push_back(e);
        }
        root[std::string(to_string(id))] = arr;
    }
    return root.dump(2) + "\n";
}

std::string GeneratorConfig::to_json() const {
    nlohmann::json j = {{"stmt_weights", stmt_weights},
                        {"atom_weights", atom_weights},
                        {"p_annotation", p_annotation},
                        {"p_comment", p_comment},
                        {"p_binary", p_binary},
                        {"p_else", p_else},
                        {"p_param_type", p_param_type},
                        {"min_members", min_members},
                        {"max_members", max_members},
                        {"min_stmts", min_stmts},
                        {"max_stmts", max_stmts},
                        {"dialect_probs", dialect_probs}};
    return j.dump(2) + "\n";
}

GeneratorConfig GeneratorConfig::from_json(const std::string& text) {
    GeneratorConfig c;
    nlohmann::json j = nlohmann::json::parse(text);
    j.at("stmt_weights").get_to(c.stmt_weights);
    j.at("atom_weights").get_to(c.atom_weights);
    j.at("p_annotation").get_to(c.p_annotation);
    j.at("p_comment").get_to(c.p_comment);
    j.at("p_binary").get_to(c.p_binary);
    j.at("p_else").get_to(c.p_else);
    j.at("p_param_type").get_to(c.p_param_type);
    j.at("min_members").get_to(c.min_members);
    j.at("max_members").get_to(c.max_members);
    j.at("min_stmts").get_to(c.min_stmts);
    j.at("max_stmts").get_to(c.max_stmts);
    if (j.contains("dialect_probs")) j.at("dialect_probs").get_to(c.dialect_probs);
    return c;
}

namespace fe {

namespace {

struct Proposal {
    uint8_t cls = hc::kUnhighlighted;
    int rank = -1;
};

void propose(std::vector<Proposal>& props, int tok, uint8_t cls, int rank) {
    if (tok < 0 || tok >= static_cast<int>(props.size())) return;
    if (rank > props[tok].rank) props[tok] = {cls, rank};
}

void walk(const AstNode& n, std::vector<Proposal>& props,
          const std::vector<Token>& toks, int ident_type) {
    switch (n.kind) {
        case NodeKind::ClassName:
            propose(props, n.tok_begin, hc::kClassDeclarator, kRankDeclarator);
            break;
        case NodeKind::FuncName:
            propose(props, n.tok_begin, hc::kFunctionDeclarator, kRankDeclarator);
            break;
        case NodeKind::VarName:
            propose(props, n.tok_begin, hc::kVariableDeclarator, kRankDeclarator);
            break;
        case NodeKind::AnnotationName:
            propose(props, n.tok_begin, hc::kAnnotationDeclarator, kRankAnnotation);
            break;
        case NodeKind::TypeRef:
            for (int i = n.tok_begin; i < n.tok_end; ++i)
                if (toks[i].type_id == ident_type)
                    propose(props, i, hc::kTypeIdentifier, kRankType);
            break;
        case NodeKind::Member:
            // children: [object, '.'/'->' tok, attr ident]
            if (!n.children.empty() && n.children.back().kind == NodeKind::Ident)
                propose(props, n.children.back().tok_begin, hc::kFieldIdentifier, kRankMember);
            break;
        case NodeKind::Call: {
            // children: [callee, '(' , args..., ')']
            if (!n.children.empty()) {
                const AstNode& callee = n.children.front();
                int target = -1;
                if (callee.kind == NodeKind::Ident) {
                    target = callee.tok_begin;
                } else if (callee.kind == NodeKind::Member && !callee.children.empty() &&
                           callee.children.back().kind == NodeKind::Ident) {
                    target = callee.children.back().tok_begin;
                }
                if (target >= 0)
                    propose(props, target, hc::kFunctionIdentifier, kRankCallee);
            }
            break;
        }
        default:
            break;
    }
    for (const auto& c : n.children) walk(c, props, toks, ident_type);
}

}  // namespace

std::vector<uint8_t> resolve_ast(const std::vector<Token>& tokens, const AstNode& root,
                                 const std::vector<uint8_t>& base_class_by_type,
                                 int ident_type) {
    std::vector<Proposal> props(tokens.size());
    walk(root, props, tokens, ident_type);

    std::vector<uint8_t> labels(tokens.size(), hc::kUnhighlighted);
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (props[i].rank >= 0)
            labels[i] = props[i].cls;
        else
            labels[i] = base_class_by_type[tokens[i].type_id];
    }
    return labels;
}

}  // namespace fe
}  // namespace deeplight
