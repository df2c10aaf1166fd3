#include "deeplight/normalizer.hpp"

#include <json.hpp>

#include <map>

namespace deeplight {

namespace {

int type_id_by_name(LanguageId lang, std::string_view name) {
    for (const auto& t : frontend(lang).token_types())
        if (t.name == name) return t.id;
    throw Error("no token type '" + std::string(name) + "' in " +
                std::string(to_string(lang)));
}

constexpr LanguageId MJ = LanguageId::minijay;
constexpr LanguageId MS = LanguageId::minisnake;
constexpr LanguageId MC = LanguageId::minicee;

struct RuleSpec {
    const char* rule;
    std::vector<std::pair<LanguageId, const char*>> members;
};

const std::vector<RuleSpec>& builtin_specs() {
    static const std::vector<RuleSpec> specs = {
        {"ws", {{MJ, "ws"}, {MS, "ws"}, {MC, "ws"}}},
        {"comment", {{MJ, "line_comment"}, {MS, "comment"}, {MC, "line_comment"}}},
        {"block_comment", {{MJ, "block_comment"}, {MC, "block_comment"}}},
        {"ident", {{MJ, "ident"}, {MS, "ident"}, {MC, "ident"}}},
        {"int_lit", {{MJ, "int_lit"}, {MS, "int_lit"}, {MC, "int_lit"}}},
        {"float_lit", {{MJ, "float_lit"}, {MS, "float_lit"}, {MC, "float_lit"}}},
        {"string_lit", {{MJ, "string_lit"}, {MS, "string_lit"}, {MC, "string_lit"}}},
        {"kw_class", {{MJ, "kw_class"}, {MS, "kw_class"}}},
        {"kw_if", {{MJ, "kw_if"}, {MS, "kw_if"}, {MC, "kw_if"}}},
        {"kw_else", {{MJ, "kw_else"}, {MS, "kw_else"}, {MC, "kw_else"}}},
        {"kw_while", {{MJ, "kw_while"}, {MS, "kw_while"}, {MC, "kw_while"}}},
        {"kw_return", {{MJ, "kw_return"}, {MS, "kw_return"}, {MC, "kw_return"}}},
        {"kw_int", {{MJ, "kw_int"}, {MC, "kw_int"}}},
        {"kw_void", {{MJ, "kw_void"}, {MC, "kw_void"}}},
        {"true_lit", {{MJ, "kw_true"}, {MS, "kw_true"}}},
        {"false_lit", {{MJ, "kw_false"}, {MS, "kw_false"}}},
        {"null_lit", {{MJ, "kw_null"}, {MS, "kw_none"}}},
        {"at", {{MJ, "at"}, {MS, "at"}}},
        {"dot", {{MJ, "dot"}, {MS, "dot"}, {MC, "dot"}}},
        {"comma", {{MJ, "comma"}, {MS, "comma"}, {MC, "comma"}}},
        {"semicolon", {{MJ, "semicolon"}, {MC, "semicolon"}}},
        {"colon", {{MS, "colon"}}},
        {"arrow", {{MS, "arrow"}, {MC, "arrow"}}},
        {"lparen", {{MJ, "lparen"}, {MS, "lparen"}, {MC, "lparen"}}},
        {"rparen", {{MJ, "rparen"}, {MS, "rparen"}, {MC, "rparen"}}},
        {"lbrace", {{MJ, "lbrace"}, {MC, "lbrace"}}},
        {"rbrace", {{MJ, "rbrace"}, {MC, "rbrace"}}},
        {"lbracket", {{MJ, "lbracket"}, {MS, "lbracket"}, {MC, "lbracket"}}},
        {"rbracket", {{MJ, "rbracket"}, {MS, "rbracket"}, {MC, "rbracket"}}},
        {"plus", {{MJ, "plus"}, {MS, "plus"}, {MC, "plus"}}},
        {"minus", {{MJ, "minus"}, {MS, "minus"}, {MC, "minus"}}},
        {"star", {{MJ, "star"}, {MS, "star"}, {MC, "star"}}},
        {"slash", {{MJ, "slash"}, {MS, "slash"}, {MC, "slash"}}},
        {"percent", {{MJ, "percent"}, {MS, "percent"}, {MC, "percent"}}},
        {"plus_assign", {{MJ, "plus_assign"}, {MS, "plus_assign"}, {MC, "plus_assign"}}},
        {"minus_assign", {{MJ, "minus_assign"}, {MS, "minus_assign"}, {MC, "minus_assign"}}},
        {"star_assign", {{MJ, "star_assign"}, {MS, "star_assign"}, {MC, "star_assign"}}},
        {"slash_assign", {{MJ, "slash_assign"}, {MS, "slash_assign"}, {MC, "slash_assign"}}},
        {"assign", {{MJ, "assign"}, {MS, "assign"}, {MC, "assign"}}},
        {"eq", {{MJ, "eq"}, {MS, "eq"}, {MC, "eq"}}},
        {"neq", {{MJ, "neq"}, {MS, "neq"}, {MC, "neq"}}},
        {"lt", {{MJ, "lt"}, {MS, "lt"}, {MC, "lt"}}},
        {"gt", {{MJ, "gt"}, {MS, "gt"}, {MC, "gt"}}},
        {"le", {{MJ, "le"}, {MS, "le"}, {MC, "le"}}},
        {"ge", {{MJ, "ge"}, {MS, "ge"}, {MC, "ge"}}},
        {"and_and", {{MJ, "and_and"}, {MC, "and_and"}}},
        {"or_or", {{MJ, "or_or"}, {MC, "or_or"}}},
        {"bang", {{MJ, "bang"}, {MC, "bang"}}},
    };
    return specs;
}

}  // namespace

RuleTable RuleTable::builtin() {
    RuleTable t;
    int next_id = 1;
    for (const auto& spec : builtin_specs()) {
        NormalizationRule r;
        r.name = spec.rule;
        r.shared_id = next_id++;
        for (const auto& [lang, tname] : spec.members)
            r.members.emplace_back(lang, type_id_by_name(lang, tname));
        t.rules.push_back(std::move(r));
    }
    return t;
}

std::string RuleTable::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rules) {
        nlohmann::json members = nlohmann::json::array();
        for (const auto& [lang, type] : r.members)
            members.push_back({{"lang", std::string(to_string(lang))}, {"type_id", type}});
        arr.push_back({{"name", r.name}, {"shared_id", r.shared_id}, {"members", members}});
    }
    return nlohmann::json{{"rules", arr}}.dump(2) + "\n";
}

RuleTable RuleTable::from_json(const std::string& text) {
    RuleTable t;
    nlohmann::json j = nlohmann::json::parse(text);
    for (const auto& rj : j.at("rules")) {
        NormalizationRule r;
        r.name = rj.at("name").get<std::string>();
        r.shared_id = rj.at("shared_id").get<int>();
        for (const auto& mj : rj.at("members")) {
            auto lang = language_from_string(mj.at("lang").get<std::string>());
            if (!lang) throw FormatError("unknown language in rule table");
            r.members.emplace_back(*lang, mj.at("type_id").get<int>());
        }
        t.rules.push_back(std::move(r));
    }
    return t;
}

Vocabulary Vocabulary::build(const RuleTable& rules, bool tn_enabled, int total_size) {
    Vocabulary v;
    v.total_size_ = total_size;
    v.tn_enabled_ = tn_enabled;
    v.shared_count_ = static_cast<int>(rules.rules.size());
    v.rules_ = rules;
    for (int l = 0; l < kLanguageCount; ++l)
        v.type_counts_[l] = frontend(static_cast<LanguageId>(l)).token_type_count();

    int need = 1 + v.shared_count_;
    for (int l = 0; l < kLanguageCount; ++l) {
        v.bases_[l] = need;
        need += v.type_counts_[l];
    }
    if (need > total_size)
        throw VocabularyOverflow("vocabulary needs " + std::to_string(need) + " slots, " +
                                 std::to_string(total_size) + " available (deficit " +
                                 std::to_string(need - total_size) + ")");
    v.build_lookup();
    return v;
}

void Vocabulary::build_lookup() {
    lookup_.assign(kLanguageCount, {});
    for (int l = 0; l < kLanguageCount; ++l) {
        auto& table = lookup_[l];
        table.resize(static_cast<size_t>(type_counts_[l]));
        for (int t = 0; t < type_counts_[l]; ++t) table[t] = bases_[l] + t;
    }
    std::vector<std::vector<bool>> mapped(kLanguageCount);
    for (int l = 0; l < kLanguageCount; ++l)
        mapped[l].assign(static_cast<size_t>(type_counts_[l]), false);
    int expected_id = 1;
    for (const auto& r : rules_.rules) {
        if (r.shared_id != expected_id++)
            throw Error("rule table shared ids must be 1..S in order");
        if (r.members.empty()) throw Error("rule '" + r.name + "' has no members");
        for (const auto& [lang, type] : r.members) {
            const int l = static_cast<int>(lang);
            if (type < 0 || type >= type_counts_[l])
                throw UnknownTokenType("rule '" + r.name + "' names a bad type id");
            if (mapped[l][type])
                throw Error("token type mapped by two rules: " + r.name);
            mapped[l][type] = true;
            if (tn_enabled_) lookup_[l][type] = r.shared_id;
        }
    }
}

void Vocabulary::encode_sequence(LanguageId lang, const std::vector<Token>& tokens,
                                 std::vector<int32_t>& out) const {
    const auto& table = lookup_[static_cast<int>(lang)];
    const int count = static_cast<int>(table.size());
    out.resize(tokens.size());
    for (size_t i = 0; i < tokens.size(); ++i) {
        const int t = tokens[i].type_id;
        if (t < 0 || t >= count)
            throw UnknownTokenType("type_id " + std::to_string(t) + " invalid for " +
                                   std::string(to_string(lang)));
        out[i] = table[t];
    }
}

std::vector<int32_t> Vocabulary::encode_sequence(LanguageId lang,
                                                 const std::vector<Token>& tokens) const {
    std::vector<int32_t> out;
    encode_sequence(lang, tokens, out);
    return out;
}

std::string Vocabulary::layout_json() const {
    nlohmann::json bases, counts;
    for (int l = 0; l < kLanguageCount; ++l) {
        const auto name = std::string(to_string(static_cast<LanguageId>(l)));
        bases[name] = bases_[l];
        counts[name] = type_counts_[l];
    }
    nlohmann::json rules = nlohmann::json::parse(rules_.to_json());
    nlohmann::json j = {{"total_size", total_size_},
                        {"tn_enabled", tn_enabled_},
                        {"shared_count", shared_count_},
                        {"bases", bases},
                        {"type_counts", counts},
                        {"rules", rules.at("rules")}};
    return j.dump(2) + "\n";
}

Vocabulary Vocabulary::from_layout_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad layout json: ") + e.what());
    }
    Vocabulary v;
    v.total_size_ = j.at("total_size").get<int>();
    v.tn_enabled_ = j.at("tn_enabled").get<bool>();
    v.shared_count_ = j.at("shared_count").get<int>();
    for (int l = 0; l < kLanguageCount; ++l) {
        const auto name = std::string(to_string(static_cast<LanguageId>(l)));
        v.bases_[l] = j.at("bases").at(name).get<int>();
        v.type_counts_[l] = j.at("type_counts").at(name).get<int>();
    }
    nlohmann::json rt = {{"rules", j.at("rules")}};
    v.rules_ = RuleTable::from_json(rt.dump());
    v.build_lookup();
    return v;
}

std::array<uint8_t, 32> Vocabulary::layout_hash() const {
    const std::string canon = layout_json();
    return sha256_bytes(canon.data(), canon.size());
}

}  // namespace deeplight
