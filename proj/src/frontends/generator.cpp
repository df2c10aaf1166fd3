// Grammar-directed random program generators. Each generator walks its
// language's grammar with weighted choices from GeneratorConfig, so every
// emitted program parses by construction. All randomness flows through the
// seeded Rng; identifiers come from fixed pools.
//
// Each program first draws a Dialect: a handful of per-sample style flags
// (annotation-heavy or bare, member chains, float literals, compound
// assignment, and so on). The flags spread the corpus over many style
// corners, so small training subsets see only a slice of the distribution
// while the full corpus covers all of it.

#include <algorithm>
#include <string>
#include <vector>

#include "deeplight/common.hpp"
#include "deeplight/token.hpp"

namespace deeplight {

namespace {

const std::vector<std::string> kClassPool = {"Payment", "Account", "Widget", "Engine",
                                             "Buffer",  "Cursor",  "Lexer",  "Window",
                                             "Packet",  "Router",  "Ticket", "Ledger",
                                             "Socket",  "Planner"};
const std::vector<std::string> kFuncPool = {"run",   "next",  "close", "update", "reset",
                                            "emit",  "size",  "read",  "write",  "flush",
                                            "init",  "peek",  "scan",  "apply",  "merge",
                                            "clear"};
const std::vector<std::string> kVarPool = {"x",     "y",     "z",     "count", "total",
                                           "index", "value", "item",  "node",  "level",
                                           "temp",  "flag",  "left",  "right", "width",
                                           "depth", "seen",  "limit"};
const std::vector<std::string> kAnnoPool = {"Override", "Inline", "Cached", "Test", "Slow"};
const std::vector<std::string> kDecoPool = {"cached", "timed", "trace", "inline", "slow"};
const std::vector<std::string> kWordPool = {"ok",  "error", "name", "data",
                                            "end", "tmp",   "a-b",  "ready"};
const std::vector<std::string> kCommentPool = {
    "advance the cursor",  "refresh cached totals", "boundary case",
    "slow path fallback",  "keep in sync",          "clamp to window",
    "already normalized",  "drain remaining items"};
const std::vector<std::string> kFloatPool = {"0.5", "1.25", "2.0", "12.75", "0.125", "3.5"};

const char* kCmpOps[] = {"<", ">", "<=", ">=", "==", "!="};
const char* kArithOps[] = {"+", "-", "*", "/", "%"};
const char* kAugOps[] = {"+=", "-=", "*=", "/="};

// per-sample style switches
struct Dialect {
    bool heavy_anno;
    bool chains;
    bool floats;
    bool compound;
    bool multi_decl;
    bool parens;
    bool two_args;
    bool indexing;
    bool bool_chain;
    bool alt_form;   // minijay: prefer new-exprs; minisnake: for loops; minicee: '->'
    bool rich_types; // minijay: generics; minisnake: typed params/tuples; minicee: arrays

    static Dialect draw(Rng& rng, const GeneratorConfig& cfg) {
        const auto& p = cfg.dialect_probs;
        auto at = [&](size_t i, double fallback) {
            return i < p.size() ? p[i] : fallback;
        };
        Dialect d;
        d.heavy_anno = rng.chance(at(0, 0.5));
        d.chains = rng.chance(at(1, 0.5));
        d.floats = rng.chance(at(2, 0.5));
        d.compound = rng.chance(at(3, 0.5));
        d.multi_decl = rng.chance(at(4, 0.45));
        d.parens = rng.chance(at(5, 0.4));
        d.two_args = rng.chance(at(6, 0.5));
        d.indexing = rng.chance(at(7, 0.5));
        d.bool_chain = rng.chance(at(8, 0.4));
        d.alt_form = rng.chance(at(9, 0.5));
        d.rich_types = rng.chance(at(10, 0.5));
        return d;
    }
};

struct Gen {
    Rng rng;
    const GeneratorConfig& cfg;
    Dialect dia;
    std::string out;

    Gen(uint64_t seed, const GeneratorConfig& cfg_)
        : rng(seed), cfg(cfg_), dia(Dialect::draw(rng, cfg_)) {}

    const std::string& pick(const std::vector<std::string>& pool) {
        return pool[rng.below(pool.size())];
    }
    std::string int_lit() { return std::to_string(rng.range(0, 99)); }
    std::string num_lit() {
        return dia.floats && rng.chance(0.35) ? pick(kFloatPool) : int_lit();
    }
    std::string str_lit() { return "\"" + pick(kWordPool) + "\""; }
    double anno_p() const { return dia.heavy_anno ? 0.7 : 0.08; }

    void line(int indent, const std::string& text, int width = 2) {
        out.append(static_cast<size_t>(indent * width), ' ');
        out += text;
        out += '\n';
    }
};

// ---------------------------------------------------------------------------
// MiniJay
// ---------------------------------------------------------------------------

struct MjGen : Gen {
    using Gen::Gen;

    std::string type_name() {
        switch (rng.pick_weighted({2.5, 1.0, 1.0, 1.8})) {
            case 0: return "int";
            case 1: return "bool";
            case 2: return "str";
            default: {
                std::string t = pick(kClassPool);
                if (dia.rich_types && rng.chance(0.4)) {
                    const char* prims[] = {"int", "bool", "str"};
                    t += "<" + (rng.chance(0.5) ? std::string(prims[rng.below(3)])
                                                : pick(kClassPool)) + ">";
                }
                return t;
            }
        }
    }

    std::string member_path() {
        std::string e = pick(kVarPool) + "." + pick(kVarPool);
        if (dia.chains && rng.chance(0.4)) e += "." + pick(kVarPool);
        return e;
    }

    std::string call_args(int depth) {
        const int n = rng.range(0, dia.two_args ? 2 : 1);
        std::string args;
        for (int i = 0; i < n; ++i) {
            if (i) args += ", ";
            args += depth > 0 ? atom(0) : pick(kVarPool);
        }
        return args;
    }

    std::string atom(int depth) {
        switch (rng.pick_weighted(cfg.atom_weights)) {
            case 0: return int_lit();
            case 1: return num_lit();
            case 2: return str_lit();
            case 3: {
                switch (rng.range(0, 2)) {
                    case 0: return "true";
                    case 1: return "false";
                    default: return "null";
                }
            }
            case 4:
                if (dia.parens && depth > 0 && rng.chance(0.3))
                    return "(" + expr(depth - 1) + ")";
                return pick(kVarPool);
            case 5: return member_path();
            case 6: {
                std::string recv;
                if (dia.chains && rng.chance(0.25))
                    recv = pick(kVarPool) + "." + pick(kVarPool) + ".";
                else if (rng.chance(0.35))
                    recv = pick(kVarPool) + ".";
                return recv + pick(kFuncPool) + "(" + call_args(depth) + ")";
            }
            default:
                if (dia.alt_form && rng.chance(0.7))
                    return "new " + pick(kClassPool) + "(" + call_args(0) + ")";
                if (dia.indexing) return pick(kVarPool) + "[" + int_lit() + "]";
                return pick(kVarPool);
        }
    }

    std::string expr(int depth) {
        std::string e = atom(depth);
        if (depth > 0 && rng.chance(cfg.p_binary))
            e += std::string(" ") + kArithOps[rng.below(5)] + " " + expr(depth - 1);
        return e;
    }

    std::string cond() {
        std::string c = atom(0) + " " + kCmpOps[rng.below(6)] + " " + atom(0);
        if (dia.bool_chain && rng.chance(0.45))
            c += std::string(" ") + (rng.chance(0.5) ? "&&" : "||") + " " + atom(0) +
                 " " + kCmpOps[rng.below(6)] + " " + atom(0);
        if (rng.chance(0.1)) c = "!" + pick(kVarPool) + " || " + c;
        return c;
    }

    void comment(int ind) {
        if (!rng.chance(cfg.p_comment)) return;
        if (rng.chance(0.3))
            line(ind, "/* " + pick(kCommentPool) + " */");
        else
            line(ind, "// " + pick(kCommentPool));
    }

    void stmt(int ind, int depth) {
        int kind = rng.pick_weighted(cfg.stmt_weights);
        if (depth <= 0 && (kind == 2 || kind == 3)) kind = rng.chance(0.5) ? 1 : 5;
        switch (kind) {
            case 0: {
                std::string decl = type_name() + " " + pick(kVarPool) + " = " + expr(depth);
                if (dia.multi_decl && rng.chance(0.45)) {
                    decl += ", " + pick(kVarPool);
                    if (rng.chance(0.6)) decl += " = " + expr(0);
                }
                line(ind, decl + ";");
                break;
            }
            case 1: {
                std::string target = pick(kVarPool);
                if (rng.chance(0.25))
                    target = member_path();
                else if (dia.indexing && rng.chance(0.2))
                    target = pick(kVarPool) + "[" + int_lit() + "]";
                if (dia.compound && rng.chance(0.55))
                    line(ind, target + " " + kAugOps[rng.below(4)] + " " + expr(0) + ";");
                else
                    line(ind, target + " = " + expr(depth) + ";");
                break;
            }
            case 2: {
                line(ind, "if (" + cond() + ") {");
                body(ind + 1, depth - 1);
                if (rng.chance(cfg.p_else)) {
                    line(ind, "} else {");
                    body(ind + 1, depth - 1);
                }
                line(ind, "}");
                break;
            }
            case 3:
                line(ind, "while (" + cond() + ") {");
                body(ind + 1, depth - 1);
                line(ind, "}");
                break;
            case 4:
                if (rng.chance(0.12))
                    line(ind, "return;");
                else
                    line(ind, "return " + expr(depth > 0 ? 1 : 0) + ";");
                break;
            default: {
                std::string recv;
                if (dia.chains && rng.chance(0.2))
                    recv = pick(kVarPool) + "." + pick(kVarPool) + ".";
                else if (rng.chance(0.35))
                    recv = pick(kVarPool) + ".";
                line(ind, recv + pick(kFuncPool) + "(" + call_args(0) + ");");
                break;
            }
        }
    }

    void body(int ind, int depth) {
        const int n = depth > 0 ? rng.range(1, 2) : 1;
        for (int i = 0; i < n; ++i) stmt(ind, depth > 0 ? depth : 0);
    }

    void method(int ind, int depth) {
        comment(ind);
        if (rng.chance(anno_p())) line(ind, "@" + pick(kAnnoPool));
        const bool is_void = rng.chance(0.4);
        std::string head = (is_void ? "void" : type_name()) + " " + pick(kFuncPool) + "(";
        const int nparams = rng.range(0, 3);
        for (int i = 0; i < nparams; ++i) {
            if (i) head += ", ";
            head += type_name() + " " + pick(kVarPool);
        }
        head += ") {";
        line(ind, head);
        const int nstmts = rng.range(cfg.min_stmts, cfg.max_stmts);
        for (int i = 0; i < nstmts; ++i) stmt(ind + 1, depth);
        if (!is_void) line(ind + 1, "return " + expr(0) + ";");
        line(ind, "}");
    }

    void field(int ind) {
        comment(ind);
        if (rng.chance(0.6))
            line(ind, type_name() + " " + pick(kVarPool) + " = " + expr(0) + ";");
        else
            line(ind, type_name() + " " + pick(kVarPool) + ";");
    }

    std::string run(int depth) {
        comment(0);
        if (rng.chance(anno_p())) line(0, "@" + pick(kAnnoPool));
        line(0, "class " + pick(kClassPool) + " {");
        const int members = rng.range(cfg.min_members, cfg.max_members);
        for (int m = 0; m < members; ++m) {
            if (rng.chance(0.45))
                field(1);
            else
                method(1, depth - 1);
        }
        line(0, "}");
        return out;
    }
};

// ---------------------------------------------------------------------------
// MiniSnake
// ---------------------------------------------------------------------------

struct MsGen : Gen {
    using Gen::Gen;

    std::string member_path() {
        std::string e = pick(kVarPool) + "." + pick(kVarPool);
        if (dia.chains && rng.chance(0.4)) e += "." + pick(kVarPool);
        return e;
    }

    std::string call_args(int depth) {
        const int n = rng.range(0, dia.two_args ? 2 : 1);
        std::string args;
        for (int i = 0; i < n; ++i) {
            if (i) args += ", ";
            args += depth > 0 ? atom(0) : pick(kVarPool);
        }
        return args;
    }

    std::string atom(int depth) {
        switch (rng.pick_weighted(cfg.atom_weights)) {
            case 0: return int_lit();
            case 1: return num_lit();
            case 2: return str_lit();
            case 3: {
                switch (rng.range(0, 2)) {
                    case 0: return "True";
                    case 1: return "False";
                    default: return "None";
                }
            }
            case 4:
                if (dia.parens && depth > 0 && rng.chance(0.3))
                    return "(" + expr(depth - 1) + ")";
                return pick(kVarPool);
            case 5: return member_path();
            case 6: {
                std::string recv;
                if (dia.chains && rng.chance(0.25))
                    recv = pick(kVarPool) + "." + pick(kVarPool) + ".";
                else if (rng.chance(0.35))
                    recv = pick(kVarPool) + ".";
                return recv + pick(kFuncPool) + "(" + call_args(depth) + ")";
            }
            default:
                if (rng.chance(0.5)) return "[" + num_lit() + ", " + num_lit() + "]";
                if (dia.indexing) return pick(kVarPool) + "[" + int_lit() + "]";
                return pick(kVarPool);
        }
    }

    std::string expr(int depth) {
        std::string e = atom(depth);
        if (depth > 0 && rng.chance(cfg.p_binary)) {
            if (rng.chance(0.15))
                e += std::string(" ") + (rng.chance(0.5) ? "and" : "or") + " " +
                     expr(depth - 1);
            else
                e += std::string(" ") + kArithOps[rng.below(5)] + " " + expr(depth - 1);
        }
        return e;
    }

    std::string cond() {
        std::string c = atom(0) + " " + kCmpOps[rng.below(6)] + " " + atom(0);
        if (dia.bool_chain && rng.chance(0.45))
            c += std::string(" ") + (rng.chance(0.5) ? "and" : "or") + " " + atom(0) +
                 " " + kCmpOps[rng.below(6)] + " " + atom(0);
        if (rng.chance(0.12)) c = "not " + c;
        return c;
    }

    void comment(int ind) {
        if (rng.chance(cfg.p_comment)) line(ind, "# " + pick(kCommentPool), 4);
    }

    void stmt(int ind, int depth) {
        int kind = rng.pick_weighted(cfg.stmt_weights);
        if (depth <= 0 && (kind == 2 || kind == 3)) kind = rng.chance(0.5) ? 1 : 5;
        switch (kind) {
            case 0:
                if (dia.rich_types && rng.chance(0.3))
                    line(ind,
                         pick(kVarPool) + ", " + pick(kVarPool) + " = " + expr(0) +
                             ", " + expr(0),
                         4);
                else
                    line(ind, pick(kVarPool) + " = " + expr(depth), 4);
                break;
            case 1: {
                std::string target = rng.chance(0.25) ? member_path() : pick(kVarPool);
                if (dia.compound && rng.chance(0.6))
                    line(ind, target + " " + kAugOps[rng.below(4)] + " " + expr(0), 4);
                else
                    line(ind, target + " = " + expr(depth), 4);
                break;
            }
            case 2: {
                line(ind, "if " + cond() + ":", 4);
                body(ind + 1, depth - 1);
                if (rng.chance(cfg.p_else)) {
                    line(ind, "else:", 4);
                    body(ind + 1, depth - 1);
                }
                break;
            }
            case 3:
                if (rng.chance(dia.alt_form ? 0.75 : 0.15)) {
                    std::string source = rng.chance(0.4)
                                             ? "[" + int_lit() + ", " + int_lit() + "]"
                                             : pick(kVarPool);
                    line(ind, "for " + pick(kVarPool) + " in " + source + ":", 4);
                } else {
                    line(ind, "while " + cond() + ":", 4);
                }
                body(ind + 1, depth - 1);
                break;
            case 4:
                line(ind, rng.chance(0.85) ? "return " + expr(depth > 0 ? 1 : 0) : "pass",
                     4);
                break;
            default: {
                std::string recv;
                if (dia.chains && rng.chance(0.2))
                    recv = pick(kVarPool) + "." + pick(kVarPool) + ".";
                else if (rng.chance(0.35))
                    recv = pick(kVarPool) + ".";
                line(ind, recv + pick(kFuncPool) + "(" + call_args(0) + ")", 4);
                break;
            }
        }
    }

    void body(int ind, int depth) {
        const int n = depth > 0 ? rng.range(1, 2) : 1;
        for (int i = 0; i < n; ++i) stmt(ind, depth > 0 ? depth : 0);
    }

    void func(int ind, int depth) {
        comment(ind);
        if (rng.chance(anno_p())) line(ind, "@" + pick(kDecoPool), 4);
        std::string head = "def " + pick(kFuncPool) + "(";
        const int nparams = rng.range(0, 3);
        for (int i = 0; i < nparams; ++i) {
            if (i) head += ", ";
            head += pick(kVarPool);
            if (rng.chance(dia.rich_types ? cfg.p_param_type : 0.2))
                head += ": " + pick(kClassPool);
        }
        head += ")";
        if (rng.chance(0.3)) head += " -> " + pick(kClassPool);
        head += ":";
        line(ind, head, 4);
        const int nstmts = std::max(1, rng.range(cfg.min_stmts, cfg.max_stmts));
        for (int i = 0; i < nstmts; ++i) stmt(ind + 1, depth);
        if (rng.chance(0.6)) line(ind + 1, "return " + expr(0), 4);
    }

    std::string run(int depth) {
        comment(0);
        const int items = rng.chance(0.3) ? 2 : 1;
        for (int i = 0; i < items; ++i) {
            if (rng.chance(0.3)) {
                if (rng.chance(anno_p())) line(0, "@" + pick(kDecoPool), 4);
                line(0, "class " + pick(kClassPool) + ":", 4);
                const int members = rng.range(1, 2);
                for (int m = 0; m < members; ++m) {
                    if (rng.chance(0.7))
                        func(1, depth - 1);
                    else
                        stmt(1, 0);
                }
            } else {
                func(0, depth - 1);
            }
        }
        const int trailing = rng.range(items > 1 ? 0 : 1, 1);
        for (int i = 0; i < trailing; ++i) stmt(0, depth > 1 ? 1 : 0);
        return out;
    }
};

// ---------------------------------------------------------------------------
// MiniCee
// ---------------------------------------------------------------------------

struct McGen : Gen {
    using Gen::Gen;

    std::string type_name() {
        switch (rng.pick_weighted({2.5, 1.0, 1.0, 1.2, 1.0})) {
            case 0: return "int";
            case 1: return "float";
            case 2: return "char";
            case 3: return "struct " + pick(kClassPool);
            default: return pick(kClassPool);
        }
    }

    std::string member_sep() {
        return rng.chance(dia.alt_form ? 0.55 : 0.08) ? "->" : ".";
    }

    std::string member_path() {
        std::string e = pick(kVarPool) + member_sep() + pick(kVarPool);
        if (dia.chains && rng.chance(0.4)) e += member_sep() + pick(kVarPool);
        return e;
    }

    std::string call_args(int depth) {
        const int n = rng.range(0, dia.two_args ? 2 : 1);
        std::string args;
        for (int i = 0; i < n; ++i) {
            if (i) args += ", ";
            args += depth > 0 ? atom(0) : pick(kVarPool);
        }
        return args;
    }

    std::string atom(int depth) {
        switch (rng.pick_weighted(cfg.atom_weights)) {
            case 0: return int_lit();
            case 1: return num_lit();
            case 2: return str_lit();
            case 3: return int_lit();  // no bool/null literals here
            case 4:
                if (dia.parens && depth > 0 && rng.chance(0.3))
                    return "(" + expr(depth - 1) + ")";
                return pick(kVarPool);
            case 5: return member_path();
            case 6:
                return pick(kFuncPool) + "(" + call_args(depth) + ")";
            default:
                if (dia.indexing) return pick(kVarPool) + "[" + int_lit() + "]";
                return pick(kVarPool);
        }
    }

    std::string expr(int depth) {
        std::string e = atom(depth);
        if (depth > 0 && rng.chance(cfg.p_binary))
            e += std::string(" ") + kArithOps[rng.below(5)] + " " + expr(depth - 1);
        return e;
    }

    std::string cond() {
        std::string c = atom(0) + " " + kCmpOps[rng.below(6)] + " " + atom(0);
        if (dia.bool_chain && rng.chance(0.45))
            c += std::string(" ") + (rng.chance(0.5) ? "&&" : "||") + " " + atom(0) +
                 " " + kCmpOps[rng.below(6)] + " " + atom(0);
        if (rng.chance(0.1)) c = "!" + pick(kVarPool) + " && " + c;
        return c;
    }

    void comment(int ind) {
        if (!rng.chance(cfg.p_comment)) return;
        if (rng.chance(0.3))
            line(ind, "/* " + pick(kCommentPool) + " */");
        else
            line(ind, "// " + pick(kCommentPool));
    }

    void stmt(int ind, int depth) {
        int kind = rng.pick_weighted(cfg.stmt_weights);
        if (depth <= 0 && (kind == 2 || kind == 3)) kind = rng.chance(0.5) ? 1 : 5;
        switch (kind) {
            case 0: {
                std::string decl;
                if (dia.rich_types && rng.chance(0.3)) {
                    decl = type_name() + " " + pick(kVarPool) + "[" + int_lit() + "]";
                } else {
                    decl = type_name() + " " + pick(kVarPool) + " = " + expr(depth);
                }
                if (dia.multi_decl && rng.chance(0.45)) {
                    decl += ", " + pick(kVarPool);
                    if (rng.chance(0.6)) decl += " = " + expr(0);
                }
                line(ind, decl + ";");
                break;
            }
            case 1: {
                std::string target = pick(kVarPool);
                if (rng.chance(0.25))
                    target = member_path();
                else if (dia.indexing && rng.chance(0.2))
                    target = pick(kVarPool) + "[" + int_lit() + "]";
                if (dia.compound && rng.chance(0.55))
                    line(ind, target + " " + kAugOps[rng.below(4)] + " " + expr(0) + ";");
                else
                    line(ind, target + " = " + expr(depth) + ";");
                break;
            }
            case 2: {
                line(ind, "if (" + cond() + ") {");
                body(ind + 1, depth - 1);
                if (rng.chance(cfg.p_else)) {
                    line(ind, "} else {");
                    body(ind + 1, depth - 1);
                }
                line(ind, "}");
                break;
            }
            case 3:
                line(ind, "while (" + cond() + ") {");
                body(ind + 1, depth - 1);
                line(ind, "}");
                break;
            case 4:
                if (rng.chance(0.12))
                    line(ind, "return;");
                else
                    line(ind, "return " + expr(depth > 0 ? 1 : 0) + ";");
                break;
            default:
                line(ind, pick(kFuncPool) + "(" + call_args(0) + ");");
                break;
        }
    }

    void body(int ind, int depth) {
        const int n = depth > 0 ? rng.range(1, 2) : 1;
        for (int i = 0; i < n; ++i) stmt(ind, depth > 0 ? depth : 0);
    }

    void func(int depth) {
        comment(0);
        const bool is_void = rng.chance(0.4);
        std::string head = (is_void ? "void" : type_name()) + " " + pick(kFuncPool) + "(";
        const int nparams = rng.range(0, 3);
        for (int i = 0; i < nparams; ++i) {
            if (i) head += ", ";
            head += type_name() + " " + pick(kVarPool);
        }
        head += ") {";
        line(0, head);
        const int nstmts = rng.range(cfg.min_stmts, cfg.max_stmts);
        for (int i = 0; i < nstmts; ++i) stmt(1, depth);
        if (!is_void) line(1, "return " + expr(0) + ";");
        line(0, "}");
    }

    std::string run(int depth) {
        comment(0);
        if (rng.chance(0.6)) {
            line(0, "struct " + pick(kClassPool) + " {");
            const int fields = rng.range(1, 2);
            for (int i = 0; i < fields; ++i) {
                std::string fld = type_name() + " " + pick(kVarPool);
                if (dia.rich_types && rng.chance(0.3)) fld += "[" + int_lit() + "]";
                line(1, fld + ";");
            }
            line(0, "};");
        }
        if (rng.chance(0.25))
            line(0, type_name() + " " + pick(kVarPool) + " = " + expr(0) + ";");
        const int funcs = rng.chance(0.3) ? 2 : 1;
        for (int i = 0; i < funcs; ++i) func(depth - 1);
        return out;
    }
};

}  // namespace

std::string generate_minijay(uint64_t seed, int depth_budget, const GeneratorConfig& cfg) {
    if (depth_budget < 1) throw Error("depth_budget must be >= 1");
    MjGen g(Rng::mix(seed, 0x6d6a), cfg);
    return g.run(depth_budget);
}

std::string generate_minisnake(uint64_t seed, int depth_budget, const GeneratorConfig& cfg) {
    if (depth_budget < 1) throw Error("depth_budget must be >= 1");
    MsGen g(Rng::mix(seed, 0x6d73), cfg);
    return g.run(depth_budget);
}

std::string generate_minicee(uint64_t seed, int depth_budget, const GeneratorConfig& cfg) {
    if (depth_budget < 1) throw Error("depth_budget must be >= 1");
    McGen g(Rng::mix(seed, 0x6d63), cfg);
    return g.run(depth_budget);
}

}  // namespace deeplight
