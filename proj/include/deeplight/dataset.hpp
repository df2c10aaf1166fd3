#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "deeplight/token.hpp"

namespace deeplight {

// ---------------------------------------------------------------------------
// Oracle records and dataset construction: folds, multi-language merges,
// few-shot subsets, invalid-derivation snippets, JSON Lines round-trip.
// All randomness flows from named seeds; a full build is reproducible
// byte-for-byte.
// ---------------------------------------------------------------------------

struct SnippetOrigin {
    std::string id;     // source sample
    int from_line = 1;  // inclusive line window
    int to_line = 1;
};

struct LabeledSequence {
    LanguageId lang = LanguageId::minijay;
    std::string id;
    bool invalid = false;
    std::optional<SnippetOrigin> origin;  // set iff invalid
    std::vector<Token> tokens;
    std::vector<uint8_t> t4_labels;  // one T4 class code per token
};

struct FoldSplit {
    int fold = 0;
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
};

struct FewShotSubset {
    int size = 0;
    std::vector<std::string> ids;  // multiset: sampled with replacement
};

struct SnippetLengthDist {
    double mean = 6.0;
    double stddev = 3.0;
    int min_lines = 1;
    int max_lines = 20;
};

// Generates `count` pairwise-distinct samples (dedup key: the token
// type+text sequence). Throws GenerationExhausted after 100*count attempts.
std::vector<LabeledSequence> build_corpus(LanguageId lang, int count, uint64_t seed,
                                          int depth_budget = 3,
                                          const GeneratorConfig& cfg = {});

// Deterministic three-way partition: every sample lands in exactly one
// fold's test set. Rounding: test blocks differ by at most one, validation
// = floor(10% of the non-test pool), train = the rest.
std::vector<FoldSplit> split_folds(const std::vector<LabeledSequence>& corpus,
                                   int n_folds, uint64_t seed);

// Concatenates the per-language fold-k training id lists in LanguageId
// order, then shuffles deterministically.
std::vector<std::pair<LanguageId, std::string>> merge_multilang(
    const std::vector<std::vector<std::string>>& train_ids_per_lang, int fold,
    uint64_t seed);

FewShotSubset sample_fewshot(const std::vector<std::string>& train_ids, int size,
                             uint64_t seed);

// Invalid derivations: contiguous line-window slices of test samples with
// their oracle labels restricted to the window. Windows are redrawn until
// the slice holds at least one non-whitespace token.
std::vector<LabeledSequence> generate_snippets(
    const std::vector<const LabeledSequence*>& test_items, int count,
    const SnippetLengthDist& dist, uint64_t seed, const std::string& id_prefix);

// JSON Lines, one record per sample. Reading reconstructs column/length
// spans by replaying token texts; those two fields are derived data and are
// not persisted.
std::string to_jsonl(const std::vector<LabeledSequence>& items);
std::vector<LabeledSequence> from_jsonl(const std::string& text);
void write_dataset(const std::string& path, const std::vector<LabeledSequence>& items);
std::vector<LabeledSequence> read_dataset(const std::string& path);

// ---------------------------------------------------------------------------
// Whole-directory bundle, as produced by `deeplight gen`
// ---------------------------------------------------------------------------

struct DatasetConfig {
    std::vector<LanguageId> langs = {LanguageId::minijay, LanguageId::minisnake,
                                     LanguageId::minicee};
    int count = 2000;
    uint64_t seed = 7;
    int depth_budget = 3;
    int n_folds = 3;
    int snippet_count = 200;  // per fold
    SnippetLengthDist snippet_dist;
    std::vector<int> fewshot_sizes = {10, 30, 50};
    GeneratorConfig gen;
};

struct LangData {
    LanguageId lang = LanguageId::minijay;
    std::vector<LabeledSequence> corpus;
    std::unordered_map<std::string, int> index;  // id -> corpus position
    std::vector<FoldSplit> folds;
    std::vector<std::vector<LabeledSequence>> snippets;     // [fold]
    std::vector<std::map<int, FewShotSubset>> fewshot;      // [fold][size]

    const LabeledSequence& by_id(const std::string& id) const;
    void rebuild_index();
};

struct Dataset {
    DatasetConfig config;
    std::vector<LangData> langs;

    const LangData& lang(LanguageId id) const;
};

Dataset build_full_dataset(const DatasetConfig& cfg);
void write_dataset_dir(const Dataset& ds, const std::string& dir);
Dataset load_dataset_dir(const std::string& dir);

// Throws Error naming the first violation: train/validation/test overlap,
// few-shot ids outside the fold's training set, or snippet origins outside
// the fold's test set.
void audit_no_leakage(const Dataset& ds);

}  // namespace deeplight
