#include "deeplight/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <unordered_set>

namespace deeplight {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// corpus
// ---------------------------------------------------------------------------

namespace {

uint64_t sequence_key(const std::vector<Token>& toks) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : toks) {
        uint32_t ty = static_cast<uint32_t>(t.type_id);
        h = fnv1a(&ty, sizeof(ty), h);
        h = fnv1a(t.text.data(), t.text.size(), h);
        const uint8_t sep = 0xff;
        h = fnv1a(&sep, 1, h);
    }
    return h;
}

std::string sample_id(LanguageId lang, int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%05d", std::string(to_string(lang)).c_str(), index);
    return buf;
}

int line_count(const std::vector<Token>& toks) {
    int m = 1;
    for (const auto& t : toks) m = std::max(m, t.span.line);
    return m;
}

}  // namespace

std::vector<LabeledSequence> build_corpus(LanguageId lang, int count, uint64_t seed,
                                          int depth_budget, const GeneratorConfig& cfg) {
    if (count < 1) throw Error("build_corpus: count must be >= 1");
    const LanguageFrontend& fe = frontend(lang);
    std::vector<LabeledSequence> out;
    out.reserve(static_cast<size_t>(count));
    std::unordered_set<uint64_t> seen;
    long attempts = 0;
    const long limit = 100L * count;
    for (int index = 0; index < count; ++index) {
        for (;;) {
            if (attempts >= limit)
                throw GenerationExhausted("could not produce " + std::to_string(count) +
                                          " unique samples in " + std::to_string(limit) +
                                          " attempts");
            const uint64_t item_seed = Rng::mix(seed, static_cast<uint64_t>(attempts));
            ++attempts;
            std::string text = fe.generate(item_seed, depth_budget, cfg);
            std::vector<Token> toks = fe.lex(text);
            const uint64_t key = sequence_key(toks);
            if (!seen.insert(key).second) continue;
            ParseResult pr = fe.parse(toks);
            if (!pr.ok())
                throw Error("generated program failed to parse (" +
                            std::string(to_string(lang)) + ", seed " +
                            std::to_string(item_seed) + ")");
            LabeledSequence item;
            item.lang = lang;
            item.id = sample_id(lang, index);
            item.t4_labels = fe.resolve(toks, *pr.root);
            item.tokens = std::move(toks);
            out.push_back(std::move(item));
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// folds / merges / few-shot / snippets
// ---------------------------------------------------------------------------

std::vector<FoldSplit> split_folds(const std::vector<LabeledSequence>& corpus,
                                   int n_folds, uint64_t seed) {
    const int n = static_cast<int>(corpus.size());
    if (n < n_folds * 2) throw CorpusTooSmall("need at least two samples per fold");
    std::vector<int> order(corpus.size());
    for (int i = 0; i < n; ++i) order[i] = i;
    Rng rng(Rng::mix(seed, 0xf01d));
    rng.shuffle(order);

    // contiguous blocks of the shuffled order become the test sets
    std::vector<std::pair<int, int>> blocks;  // [begin, end)
    int begin = 0;
    for (int k = 0; k < n_folds; ++k) {
        int size = n / n_folds + (k < n % n_folds ? 1 : 0);
        blocks.emplace_back(begin, begin + size);
        begin += size;
    }

    std::vector<FoldSplit> folds;
    for (int k = 0; k < n_folds; ++k) {
        FoldSplit f;
        f.fold = k;
        for (int i = blocks[k].first; i < blocks[k].second; ++i)
            f.test.push_back(corpus[order[i]].id);
        std::vector<std::string> pool;
        for (int j = 1; j < n_folds; ++j) {
            const auto& b = blocks[(k + j) % n_folds];
            for (int i = b.first; i < b.second; ++i) pool.push_back(corpus[order[i]].id);
        }
        const size_t val_count = pool.size() / 10;
        f.validation.assign(pool.begin(), pool.begin() + val_count);
        f.train.assign(pool.begin() + val_count, pool.end());
        if (f.train.empty() || f.validation.empty() || f.test.empty())
            throw CorpusTooSmall("a split would be empty");
        folds.push_back(std::move(f));
    }
    return folds;
}

std::vector<std::pair<LanguageId, std::string>> merge_multilang(
    const std::vector<std::vector<std::string>>& train_ids_per_lang, int fold,
    uint64_t seed) {
    std::vector<std::pair<LanguageId, std::string>> stream;
    for (size_t l = 0; l < train_ids_per_lang.size(); ++l)
        for (const auto& id : train_ids_per_lang[l])
            stream.emplace_back(static_cast<LanguageId>(l), id);
    Rng rng(Rng::mix(seed, Rng::mix(0x4d4c, static_cast<uint64_t>(fold))));
    rng.shuffle(stream);
    return stream;
}

FewShotSubset sample_fewshot(const std::vector<std::string>& train_ids, int size,
                             uint64_t seed) {
    if (train_ids.empty()) throw EmptySource("few-shot source is empty");
    if (size < 1) throw Error("few-shot size must be >= 1");
    FewShotSubset s;
    s.size = size;
    Rng rng(Rng::mix(seed, 0xf5));
    for (int i = 0; i < size; ++i)
        s.ids.push_back(train_ids[rng.below(train_ids.size())]);
    return s;
}

std::vector<LabeledSequence> generate_snippets(
    const std::vector<const LabeledSequence*>& test_items, int count,
    const SnippetLengthDist& dist, uint64_t seed, const std::string& id_prefix) {
    if (test_items.empty()) throw EmptySource("snippet source is empty");
    if (count < 1) throw Error("snippet count must be >= 1");
    Rng rng(Rng::mix(seed, 0x51e9));
    std::vector<LabeledSequence> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        for (;;) {
            const LabeledSequence& src = *test_items[rng.below(test_items.size())];
            const int lines = line_count(src.tokens);
            int len = static_cast<int>(std::llround(rng.normal(dist.mean, dist.stddev)));
            len = std::clamp(len, dist.min_lines, dist.max_lines);
            len = std::min(len, lines);
            const int from = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(lines - len + 1)));
            const int to = from + len - 1;

            LabeledSequence snip;
            snip.lang = src.lang;
            snip.invalid = true;
            snip.origin = SnippetOrigin{src.id, from, to};
            bool has_content = false;
            for (size_t t = 0; t < src.tokens.size(); ++t) {
                const int line = src.tokens[t].span.line;
                if (line < from || line > to) continue;
                snip.tokens.push_back(src.tokens[t]);
                snip.t4_labels.push_back(src.t4_labels[t]);
                if (!src.tokens[t].is_whitespace) has_content = true;
            }
            if (!has_content) continue;
            snip.id = id_prefix + "-" + std::to_string(i);
            out.push_back(std::move(snip));
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON Lines
// ---------------------------------------------------------------------------

namespace {

json record_to_json(const LabeledSequence& s) {
    json toks = json::array();
    for (const auto& t : s.tokens)
        toks.push_back({{"t", t.type_id}, {"x", t.text}, {"w", t.is_whitespace},
                        {"l", t.span.line}});
    json y = json::array();
    for (uint8_t c : s.t4_labels) y.push_back(static_cast<int>(c));
    json origin;
    if (s.origin)
        origin = {{"id", s.origin->id},
                  {"from_line", s.origin->from_line},
                  {"to_line", s.origin->to_line}};
    else
        origin = nullptr;
    return json{{"lang", std::string(to_string(s.lang))}, {"id", s.id},
                {"invalid", s.invalid}, {"origin", origin}, {"tokens", toks},
                {"y", y}};
}

LabeledSequence record_from_json(const json& j) {
    LabeledSequence s;
    auto lang = language_from_string(j.at("lang").get<std::string>());
    if (!lang) throw FormatError("unknown language");
    s.lang = *lang;
    s.id = j.at("id").get<std::string>();
    s.invalid = j.at("invalid").get<bool>();
    if (!j.at("origin").is_null()) {
        const auto& o = j.at("origin");
        s.origin = SnippetOrigin{o.at("id").get<std::string>(),
                                 o.at("from_line").get<int>(),
                                 o.at("to_line").get<int>()};
    }
    const auto& toks = j.at("tokens");
    const auto& y = j.at("y");
    if (toks.size() != y.size()) throw FormatError("|tokens| != |y|");
    s.tokens.reserve(toks.size());
    for (const auto& tj : toks) {
        Token t;
        t.type_id = tj.at("t").get<int>();
        t.text = tj.at("x").get<std::string>();
        t.is_whitespace = tj.at("w").get<bool>();
        t.span.line = tj.at("l").get<int>();
        s.tokens.push_back(std::move(t));
    }
    for (const auto& c : y) {
        const int v = c.get<int>();
        if (v < 0 || v > 11) throw FormatError("label out of range");
        s.t4_labels.push_back(static_cast<uint8_t>(v));
    }
    // columns/lengths are derived: replay the concatenated texts
    int col = 1;
    for (auto& t : s.tokens) {
        t.span.col = col;
        t.span.len = static_cast<int>(t.text.size());
        for (char c : t.text) {
            if (c == '\n')
                col = 1;
            else
                ++col;
        }
    }
    return s;
}

}  // namespace

std::string to_jsonl(const std::vector<LabeledSequence>& items) {
    std::string out;
    for (const auto& s : items) {
        out += record_to_json(s).dump();
        out += '\n';
    }
    return out;
}

std::vector<LabeledSequence> from_jsonl(const std::string& text) {
    std::vector<LabeledSequence> out;
    size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        ++line_no;
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

void write_dataset(const std::string& path, const std::vector<LabeledSequence>& items) {
    write_text_file(path, to_jsonl(items));
}

std::vector<LabeledSequence> read_dataset(const std::string& path) {
    return from_jsonl(read_text_file(path));
}

// ---------------------------------------------------------------------------
// directory bundle
// ---------------------------------------------------------------------------

const LabeledSequence& LangData::by_id(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) throw Error("unknown sample id: " + id);
    return corpus[static_cast<size_t>(it->second)];
}

void LangData::rebuild_index() {
    index.clear();
    for (size_t i = 0; i < corpus.size(); ++i) index[corpus[i].id] = static_cast<int>(i);
}

const LangData& Dataset::lang(LanguageId id) const {
    for (const auto& l : langs)
        if (l.lang == id) return l;
    throw Error("dataset has no language " + std::string(to_string(id)));
}

Dataset build_full_dataset(const DatasetConfig& cfg) {
    Dataset ds;
    ds.config = cfg;
    for (LanguageId lang : cfg.langs) {
        LangData ld;
        ld.lang = lang;
        const uint64_t lang_seed = Rng::mix(cfg.seed, static_cast<uint64_t>(lang));
        ld.corpus = build_corpus(lang, cfg.count, lang_seed, cfg.depth_budget, cfg.gen);
        ld.rebuild_index();
        ld.folds = split_folds(ld.corpus, cfg.n_folds, lang_seed);
        for (const auto& f : ld.folds) {
            std::vector<const LabeledSequence*> test_items;
            for (const auto& id : f.test) test_items.push_back(&ld.by_id(id));
            const std::string prefix = std::string(to_string(lang)) + "-f" +
                                       std::to_string(f.fold) + "-snip";
            ld.snippets.push_back(generate_snippets(
                test_items, cfg.snippet_count, cfg.snippet_dist,
                Rng::mix(lang_seed, 100 + static_cast<uint64_t>(f.fold)), prefix));
            std::map<int, FewShotSubset> by_size;
            for (int size : cfg.fewshot_sizes)
                by_size[size] = sample_fewshot(
                    f.train, size,
                    Rng::mix(lang_seed, 200 + static_cast<uint64_t>(f.fold) * 10 +
                                            static_cast<uint64_t>(size)));
            ld.fewshot.push_back(std::move(by_size));
        }
        ds.langs.push_back(std::move(ld));
    }
    return ds;
}

namespace {

json config_to_json(const DatasetConfig& c) {
    json langs = json::array();
    for (auto l : c.langs) langs.push_back(std::string(to_string(l)));
    return json{{"langs", langs},
                {"count", c.count},
                {"seed", c.seed},
                {"depth_budget", c.depth_budget},
                {"n_folds", c.n_folds},
                {"snippet_count", c.snippet_count},
                {"snippet_dist",
                 {{"mean", c.snippet_dist.mean},
                  {"stddev", c.snippet_dist.stddev},
                  {"min_lines", c.snippet_dist.min_lines},
                  {"max_lines", c.snippet_dist.max_lines}}},
                {"fewshot_sizes", c.fewshot_sizes},
                {"generator", json::parse(c.gen.to_json())}};
}

DatasetConfig config_from_json(const json& j) {
    DatasetConfig c;
    c.langs.clear();
    for (const auto& l : j.at("langs")) {
        auto id = language_from_string(l.get<std::string>());
        if (!id) throw FormatError("unknown language in manifest");
        c.langs.push_back(*id);
    }
    c.count = j.at("count").get<int>();
    c.seed = j.at("seed").get<uint64_t>();
    c.depth_budget = j.at("depth_budget").get<int>();
    c.n_folds = j.at("n_folds").get<int>();
    c.snippet_count = j.at("snippet_count").get<int>();
    const auto& d = j.at("snippet_dist");
    c.snippet_dist = {d.at("mean").get<double>(), d.at("stddev").get<double>(),
                      d.at("min_lines").get<int>(), d.at("max_lines").get<int>()};
    c.fewshot_sizes = j.at("fewshot_sizes").get<std::vector<int>>();
    c.gen = GeneratorConfig::from_json(j.at("generator").dump());
    return c;
}

}  // namespace

void write_dataset_dir(const Dataset& ds, const std::string& dir) {
    fs::create_directories(dir);
    write_text_file(dir + "/manifest.json", config_to_json(ds.config).dump(2) + "\n");
    for (const auto& ld : ds.langs) {
        const std::string lang = std::string(to_string(ld.lang));
        write_dataset(dir + "/corpus-" + lang + ".jsonl", ld.corpus);
        json folds = json::array();
        for (const auto& f : ld.folds)
            folds.push_back({{"fold", f.fold},
                             {"train", f.train},
                             {"validation", f.validation},
                             {"test", f.test}});
        write_text_file(dir + "/folds-" + lang + ".json",
                        json{{"lang", lang}, {"folds", folds}}.dump(2) + "\n");
        for (size_t k = 0; k < ld.snippets.size(); ++k)
            write_dataset(dir + "/snippets-" + lang + "-fold" + std::to_string(k) +
                              ".jsonl",
                          ld.snippets[k]);
        for (size_t k = 0; k < ld.fewshot.size(); ++k) {
            json sizes;
            for (const auto& [size, subset] : ld.fewshot[k])
                sizes[std::to_string(size)] = subset.ids;
            write_text_file(dir + "/fewshot-" + lang + "-fold" + std::to_string(k) +
                                ".json",
                            json{{"lang", lang}, {"fold", static_cast<int>(k)},
                                 {"sizes", sizes}}
                                    .dump(2) +
                                "\n");
        }
    }
}

Dataset load_dataset_dir(const std::string& dir) {
    Dataset ds;
    ds.config = config_from_json(json::parse(read_text_file(dir + "/manifest.json")));
    for (LanguageId lang : ds.config.langs) {
        LangData ld;
        ld.lang = lang;
        const std::string name = std::string(to_string(lang));
        ld.corpus = read_dataset(dir + "/corpus-" + name + ".jsonl");
        ld.rebuild_index();
        json fj = json::parse(read_text_file(dir + "/folds-" + name + ".json"));
        for (const auto& f : fj.at("folds")) {
            FoldSplit fold;
            fold.fold = f.at("fold").get<int>();
            fold.train = f.at("train").get<std::vector<std::string>>();
            fold.validation = f.at("validation").get<std::vector<std::string>>();
            fold.test = f.at("test").get<std::vector<std::string>>();
            ld.folds.push_back(std::move(fold));
        }
        for (int k = 0; k < ds.config.n_folds; ++k) {
            ld.snippets.push_back(
                read_dataset(dir + "/snippets-" + name + "-fold" + std::to_string(k) +
                             ".jsonl"));
            json sj = json::parse(
                read_text_file(dir + "/fewshot-" + name + "-fold" + std::to_string(k) +
                               ".json"));
            std::map<int, FewShotSubset> by_size;
            for (const auto& [key, ids] : sj.at("sizes").items()) {
                FewShotSubset subset;
                subset.size = std::stoi(key);
                subset.ids = ids.get<std::vector<std::string>>();
                by_size[subset.size] = std::move(subset);
            }
            ld.fewshot.push_back(std::move(by_size));
        }
        ds.langs.push_back(std::move(ld));
    }
    return ds;
}

void audit_no_leakage(const Dataset& ds) {
    for (const auto& ld : ds.langs) {
        const std::string lang = std::string(to_string(ld.lang));
        for (const auto& f : ld.folds) {
            std::set<std::string> train(f.train.begin(), f.train.end());
            std::set<std::string> val(f.validation.begin(), f.validation.end());
            std::set<std::string> test(f.test.begin(), f.test.end());
            auto overlap = [&](const std::set<std::string>& a,
                               const std::set<std::string>& b) {
                for (const auto& id : a)
                    if (b.count(id)) return true;
                return false;
            };
            if (overlap(train, test) || overlap(val, test) || overlap(train, val))
                throw Error("leakage: overlapping splits in " + lang + " fold " +
                            std::to_string(f.fold));
            if (train.size() + val.size() + test.size() != ld.corpus.size())
                throw Error("leakage audit: fold does not cover corpus in " + lang);
            const auto& shots = ld.fewshot[static_cast<size_t>(f.fold)];
            for (const auto& [size, subset] : shots)
                for (const auto& id : subset.ids)
                    if (!train.count(id))
                        throw Error("leakage: few-shot id outside training set (" + lang +
                                    " fold " + std::to_string(f.fold) + ")");
            for (const auto& snip : ld.snippets[static_cast<size_t>(f.fold)]) {
                if (!snip.invalid || !snip.origin)
                    throw Error("snippet without origin in " + lang);
                if (!test.count(snip.origin->id))
                    throw Error("leakage: snippet origin outside test set (" + lang +
                                " fold " + std::to_string(f.fold) + ")");
            }
        }
    }
}

}  // namespace deeplight
