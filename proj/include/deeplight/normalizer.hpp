#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "deeplight/token.hpp"

namespace deeplight {

// Token Normalization: a pure lookup applied before the model input. The
// vocabulary layout is a function of the language manifest and the rule
// table only; id 0 is reserved for padding and never produced by encoding.
//
// Layout: [0] pad | [1, 1+S) shared region | per-language regions of
// token_type_count slots each, in LanguageId order. The per-language regions
// are sized by the full type count so that models with and without TN share
// one input dimensionality; with TN enabled, slots whose type is covered by
// a rule simply go unused.

constexpr int kDefaultVocabSize = 315;

struct NormalizationRule {
    std::string name;
    int shared_id = 0;
    std::vector<std::pair<LanguageId, int>> members;
};

struct RuleTable {
    std::vector<NormalizationRule> rules;

    // The built-in table: identifiers, literals, comments, whitespace, the
    // shared operator/punctuation set, and keywords spelled alike in at
    // least two languages. 48 rules.
    static RuleTable builtin();

    std::string to_json() const;
    static RuleTable from_json(const std::string& text);
};

class Vocabulary {
  public:
    static Vocabulary build(const RuleTable& rules, bool tn_enabled,
                            int total_size = kDefaultVocabSize);

    int total_size() const { return total_size_; }
    bool tn_enabled() const { return tn_enabled_; }
    int shared_count() const { return shared_count_; }
    static constexpr int pad_id() { return 0; }
    int base(LanguageId lang) const { return bases_[static_cast<int>(lang)]; }

    int encode(LanguageId lang, int type_id) const {
        const auto& table = lookup_[static_cast<int>(lang)];
        if (type_id < 0 || type_id >= static_cast<int>(table.size()))
            throw UnknownTokenType("type_id " + std::to_string(type_id) + " invalid for " +
                                   std::string(to_string(lang)));
        return table[type_id];
    }

    // elementwise encode; out is resized to tokens.size(), no other allocation
    void encode_sequence(LanguageId lang, const std::vector<Token>& tokens,
                         std::vector<int32_t>& out) const;
    std::vector<int32_t> encode_sequence(LanguageId lang,
                                         const std::vector<Token>& tokens) const;

    std::string layout_json() const;
    static Vocabulary from_layout_json(const std::string& text);
    std::array<uint8_t, 32> layout_hash() const;

  private:
    int total_size_ = 0;
    bool tn_enabled_ = false;
    int shared_count_ = 0;
    std::array<int, kLanguageCount> bases_{};
    std::array<int, kLanguageCount> type_counts_{};
    std::vector<std::vector<int32_t>> lookup_;  // [lang][type_id] -> encoded id
    RuleTable rules_;

    void build_lookup();
};

}  // namespace deeplight
