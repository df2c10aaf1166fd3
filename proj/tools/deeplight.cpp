// deeplight: corpus generation, training, evaluation grids, on-the-fly
// highlighting and latency benchmarks for the mini-language highlighters.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

#include "deeplight/dataset.hpp"
#include "deeplight/hc.hpp"
#include "deeplight/nn.hpp"
#include "deeplight/normalizer.hpp"
#include "deeplight/pipeline.hpp"
#include "deeplight/render.hpp"

namespace fs = std::filesystem;
using namespace deeplight;

namespace {

std::string token_manifest_path(const std::string& dir) { return dir + "/languages.json"; }

std::vector<LanguageId> parse_langs(const std::string& spec) {
    std::vector<LanguageId> out;
    if (spec == "all") {
        out.assign(std::begin(kAllLanguages), std::end(kAllLanguages));
        return out;
    }
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        auto id = language_from_string(part);
        if (!id) throw CLI::ValidationError("--langs", "unknown language: " + part);
        out.push_back(*id);
    }
    if (out.empty()) throw CLI::ValidationError("--langs", "no languages given");
    return out;
}

// layout sidecar next to a model file: X.dlsh -> X.layout.json
std::string layout_path_for(const std::string& model_path) {
    std::string p = model_path;
    const std::string suffix = ".dlsh";
    if (p.size() > suffix.size() && p.compare(p.size() - suffix.size(), suffix.size(), suffix) == 0)
        p.resize(p.size() - suffix.size());
    return p + ".layout.json";
}

CnnShModel load_model_with_layout(const std::string& model_path, Vocabulary& vocab_out) {
    vocab_out = Vocabulary::from_layout_json(read_text_file(layout_path_for(model_path)));
    return load_model(model_path, vocab_out.layout_hash());
}

std::string model_file_name(const Scenario& sc, hc::CoverageTask task, int fold) {
    std::string n = sc.name();
    if (task != hc::CoverageTask::T4) n += "-" + std::string(hc::task_name(task));
    return n + "-fold" + std::to_string(fold);
}

uint64_t model_seed(const Scenario& sc, const std::string& name) {
    return Rng::mix(sc.seed, fnv1a(name.data(), name.size()));
}

int cmd_gen(const std::string& langs_spec, int count, uint64_t seed, int depth,
            int snippet_count, const std::string& gen_config,
            const std::string& out_dir) {
    DatasetConfig cfg;
    cfg.langs = parse_langs(langs_spec);
    cfg.count = count;
    cfg.seed = seed;
    cfg.depth_budget = depth;
    cfg.snippet_count = snippet_count;
    if (!gen_config.empty())
        cfg.gen = GeneratorConfig::from_json(read_text_file(gen_config));
    Dataset ds = build_full_dataset(cfg);
    audit_no_leakage(ds);
    write_dataset_dir(ds, out_dir);
    write_text_file(token_manifest_path(out_dir), token_manifest_json());
    write_text_file(out_dir + "/hc-classes.json", hc::class_table_json());
    write_text_file(out_dir + "/tn-rules.json", RuleTable::builtin().to_json());

    std::cout << "dataset written to " << out_dir << "\n";
    std::cout << "lang        samples  folds  snippets/fold  fewshot sizes\n";
    for (const auto& ld : ds.langs) {
        std::string sizes;
        for (const auto& [size, subset] : ld.fewshot.front()) {
            if (!sizes.empty()) sizes += ",";
            sizes += std::to_string(size);
        }
        std::printf("%-10s  %7zu  %5zu  %13zu  %s\n",
                    std::string(to_string(ld.lang)).c_str(), ld.corpus.size(),
                    ld.folds.size(), ld.snippets.front().size(), sizes.c_str());
    }
    const auto& f0 = ds.langs.front().folds.front();
    std::printf("fold sizes (first lang): train %zu / validation %zu / test %zu\n",
                f0.train.size(), f0.validation.size(), f0.test.size());
    return 0;
}

int cmd_train(const std::string& kind, int size, bool tn, const std::string& lang_s,
              const std::string& base_s, int shots, int fold, const std::string& task_s,
              uint64_t seed, const std::string& rules_path, const std::string& data_dir,
              const std::string& out_dir) {
    Dataset ds = load_dataset_dir(data_dir);
    const RuleTable rules = rules_path.empty()
                                ? RuleTable::builtin()
                                : RuleTable::from_json(read_text_file(rules_path));
    const Vocabulary vocab = Vocabulary::build(rules, tn);
    const hc::CoverageTask task = hc::task_from_string(task_s);
    fs::create_directories(out_dir);

    Scenario sc;
    sc.size = size;
    sc.tn = tn;
    sc.seed = seed;
    if (kind == "sl") {
        sc.kind = ScenarioKind::SL;
        auto lang = language_from_string(lang_s);
        if (!lang) throw CLI::ValidationError("--lang", "a language is required for sl");
        sc.base = *lang;
    } else if (kind == "ml") {
        sc.kind = ScenarioKind::ML;
    } else if (kind == "fs") {
        sc.kind = ScenarioKind::FS;
        auto base = language_from_string(base_s);
        if (!base) throw CLI::ValidationError("--base", "a base language is required for fs");
        sc.base = *base;
        sc.shots = shots;
    } else {
        throw Error("unknown --kind: " + kind);
    }

    ModelConfig cfg;
    cfg.hidden = size;
    cfg.vocab_size = vocab.total_size();

    const std::string name = model_file_name(sc, task, fold);
    TrainLog log;
    CnnShModel model;
    if (sc.kind == ScenarioKind::SL) {
        model = train_sl(ds, *sc.base, fold, task, vocab, cfg, model_seed(sc, name), &log);
    } else if (sc.kind == ScenarioKind::ML) {
        model = train_ml(ds, fold, task, vocab, cfg, model_seed(sc, name), &log);
    } else {
        // the few-shot base is the matching SL model; reuse it if it is
        // already in out_dir, otherwise train it first
        Scenario base_sc{ScenarioKind::SL, size, tn, sc.base, {}, seed};
        const std::string base_name = model_file_name(base_sc, task, fold);
        const std::string base_path = out_dir + "/" + base_name + ".dlsh";
        CnnShModel base;
        if (fs::exists(base_path)) {
            base = load_model(base_path, vocab.layout_hash());
        } else {
            base = train_sl(ds, *sc.base, fold, task, vocab, cfg,
                            model_seed(base_sc, base_name), nullptr);
            save_model(base, base_path);
            write_text_file(layout_path_for(base_path), vocab.layout_json());
        }
        model = finetune_fs(base, ds, *sc.base, shots, fold, task, vocab,
                            model_seed(sc, name), &log);
    }

    const std::string model_path = out_dir + "/" + name + ".dlsh";
    save_model(model, model_path);
    write_text_file(layout_path_for(model_path), vocab.layout_json());
    std::string log_text;
    for (size_t e = 0; e < log.lr_schedule.size(); ++e) {
        char line[128];
        std::snprintf(line, sizeof(line), "epoch %zu lr %g val_accuracy %.6f\n", e,
                      log.lr_schedule[e],
                      e < log.val_accuracy.size() ? log.val_accuracy[e] : 0.0);
        log_text += line;
        std::cout << line;
    }
    write_text_file(out_dir + "/" + name + ".train.log", log_text);
    std::cout << "saved " << model_path << "\n";
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_dir,
             const std::string& lang_s, const std::string& task_s,
             const std::string& split, int fold, const std::string& csv_out) {
    Vocabulary vocab;
    CnnShModel model = load_model_with_layout(model_path, vocab);
    Dataset ds = load_dataset_dir(data_dir);
    auto lang = language_from_string(lang_s);
    if (!lang) throw Error("unknown --lang: " + lang_s);
    const hc::CoverageTask task = hc::task_from_string(task_s);
    const auto items = select_items(ds.lang(*lang), fold, split);
    EvalResult r = evaluate(model, items, task, vocab);
    char line[256];
    std::snprintf(line, sizeof(line), "%s %s %s fold%d: accuracy %.6f (%ld/%ld tokens)\n",
                  lang_s.c_str(), std::string(hc::task_name(task)).c_str(),
                  split.c_str(), fold, r.accuracy(), r.correct, r.total);
    std::cout << line;
    if (!csv_out.empty()) {
        char row[256];
        std::snprintf(row, sizeof(row), "eval,%s,%s,%s,%d,%ld,%.6f\n", lang_s.c_str(),
                      std::string(hc::task_name(task)).c_str(), split.c_str(), fold,
                      r.total, r.accuracy());
        write_text_file(csv_out,
                        std::string("command,eval_lang,task,split,fold,n_tokens,accuracy\n") + row);
    }
    return 0;
}

int cmd_grid(const std::string& plan_path, int rq, uint64_t seed,
             const std::vector<int>& sizes, const std::string& rules_path,
             const std::string& data_dir, const std::string& out_dir) {
    GridPlan plan;
    if (!plan_path.empty()) {
        try {
            plan = GridPlan::from_json(read_text_file(plan_path));
        } catch (const Error& e) {
            const std::string msg = e.what();
            if (msg.find("no scenarios") != std::string::npos)
                throw CLI::ValidationError("--plan", msg);
            throw;
        }
    } else if (rq >= 1 && rq <= 4) {
        plan = GridPlan::rq_preset(rq, seed, sizes);
    } else {
        throw CLI::ValidationError("--plan", "grid needs --plan or --rq");
    }
    Dataset ds = load_dataset_dir(data_dir);
    const RuleTable rules = rules_path.empty()
                                ? RuleTable::builtin()
                                : RuleTable::from_json(read_text_file(rules_path));
    const Vocabulary vtn = Vocabulary::build(rules, true);
    const Vocabulary vplain = Vocabulary::build(rules, false);
    GridResult res = run_grid(plan, ds, vtn, vplain, out_dir);
    long failed = 0;
    for (const auto& c : res.cells) failed += c.failed ? 1 : 0;
    std::cout << res.table;
    std::cout << "cells: " << res.cells.size() << " (" << failed << " failed)\n";
    std::cout << "report: " << out_dir << "/report.csv\n";
    if (failed == static_cast<long>(res.cells.size())) return 1;
    return 0;
}

int cmd_highlight(const std::string& model_path, const std::string& lang_s,
                  const std::string& format, const std::string& theme_path,
                  const std::string& file) {
    Vocabulary vocab;
    CnnShModel model = load_model_with_layout(model_path, vocab);
    auto lang = language_from_string(lang_s);
    if (!lang) throw Error("unknown --lang: " + lang_s);
    Theme theme = theme_path.empty() ? Theme::default_ansi()
                                     : Theme::from_json(read_text_file(theme_path));
    const std::string source = read_text_file(file);

    // the on-the-fly path: lex -> encode -> forward -> argmax -> render.
    // No parsing happens here, so invalid code highlights fine.
    const std::vector<Token> tokens = frontend(*lang).lex(source);
    std::vector<uint8_t> classes(tokens.size(), hc::kUnhighlighted);
    if (!tokens.empty()) {
        const std::vector<int32_t> ids = vocab.encode_sequence(*lang, tokens);
        const std::vector<float> scores = forward(model, ids);
        const int K = model.cfg.n_classes;
        for (size_t t = 0; t < tokens.size(); ++t) {
            const float* row = scores.data() + t * static_cast<size_t>(K);
            int pred = 0;
            for (int k = 1; k < K; ++k)
                if (row[k] > row[pred]) pred = k;
            classes[t] = static_cast<uint8_t>(pred);
        }
    }
    if (format == "ansi")
        std::cout << render_ansi(tokens, classes, theme);
    else
        std::cout << render_html(tokens, classes);
    return 0;
}

int cmd_bench(const std::string& model_path, const std::string& data_dir,
              const std::string& lang_s, int fold, const std::string& out_path) {
    Vocabulary vocab;
    CnnShModel model = load_model_with_layout(model_path, vocab);
    Dataset ds = load_dataset_dir(data_dir);
    auto lang = language_from_string(lang_s);
    if (!lang) throw Error("unknown --lang: " + lang_s);
    const auto inputs = select_items(ds.lang(*lang), fold, "snippets");
    LatencyReport rep = measure_latency(model, vocab, inputs);
    nlohmann::json j = {{"model", model_path},
                        {"hidden", model.cfg.hidden},
                        {"tokens_per_s", rep.tokens_per_s},
                        {"p50_ms", rep.p50_ms},
                        {"p99_ms", rep.p99_ms},
                        {"n_inputs", rep.n_inputs},
                        {"n_tokens", rep.n_tokens}};
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) write_text_file(out_path, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"on-the-fly syntax highlighting models for three mini languages"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate corpora, folds, snippets, few-shot subsets");
    std::string g_langs = "all", g_out = "data";
    int g_count = 2000, g_depth = 3, g_snippets = 200;
    uint64_t g_seed = 7;
    gen->add_option("--langs", g_langs, "all or comma-separated names");
    gen->add_option("--count", g_count, "samples per language")->check(CLI::PositiveNumber);
    gen->add_option("--seed", g_seed, "master seed");
    gen->add_option("--depth", g_depth, "generator depth budget")->check(CLI::PositiveNumber);
    gen->add_option("--snippets", g_snippets, "snippets per fold")->check(CLI::PositiveNumber);
    std::string g_gen_config;
    gen->add_option("--gen-config", g_gen_config, "generator weights json");
    gen->add_option("--out", g_out, "output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "train one model");
    std::string t_kind, t_lang, t_base, t_task = "t4", t_data, t_out = "models";
    int t_size = 32, t_shots = 10, t_fold = 0;
    bool t_tn = false;
    uint64_t t_seed = 1;
    train->add_option("--kind", t_kind, "sl | ml | fs")
        ->required()
        ->check(CLI::IsMember({"sl", "ml", "fs"}));
    train->add_option("--size", t_size, "hidden size")
        ->check(CLI::IsMember({32, 64, 128}));
    train->add_flag("--tn", t_tn, "enable token normalization");
    train->add_option("--lang", t_lang, "language (sl)");
    train->add_option("--base", t_base, "base language (fs)");
    train->add_option("--shots", t_shots, "few-shot size")->check(CLI::IsMember({10, 30, 50}));
    train->add_option("--fold", t_fold, "fold index")->check(CLI::Range(0, 2));
    train->add_option("--task", t_task, "coverage task t1..t4");
    train->add_option("--seed", t_seed, "scenario seed");
    std::string t_rules;
    train->add_option("--rules", t_rules, "normalization rules json");
    train->add_option("--data", t_data, "dataset directory")->required();
    train->add_option("--out", t_out, "model output directory");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a model file");
    std::string e_model, e_data, e_lang, e_task = "t4", e_split = "valid", e_csv;
    int e_fold = 0;
    eval->add_option("--model", e_model)->required();
    eval->add_option("--data", e_data)->required();
    eval->add_option("--lang", e_lang)->required();
    eval->add_option("--task", e_task);
    eval->add_option("--split", e_split)->check(CLI::IsMember({"valid", "snippets"}));
    eval->add_option("--fold", e_fold)->check(CLI::Range(0, 2));
    eval->add_option("--csv", e_csv, "write a one-row csv here");

    // grid
    auto* grid = app.add_subcommand("grid", "run an experiment grid");
    std::string gr_plan, gr_data, gr_out = "grid-out";
    int gr_rq = 0;
    uint64_t gr_seed = 1;
    std::vector<int> gr_sizes = {32};
    grid->add_option("--plan", gr_plan, "plan json");
    grid->add_option("--rq", gr_rq, "research-question preset 1..4")->check(CLI::Range(1, 4));
    grid->add_option("--seed", gr_seed);
    grid->add_option("--sizes", gr_sizes, "model sizes for presets");
    std::string gr_rules;
    grid->add_option("--rules", gr_rules, "normalization rules json");
    grid->add_option("--data", gr_data)->required();
    grid->add_option("--out", gr_out);

    // highlight
    auto* hl = app.add_subcommand("highlight", "highlight a file on the fly");
    std::string h_model, h_lang, h_format = "ansi", h_theme, h_file;
    hl->add_option("--model", h_model)->required();
    hl->add_option("--lang", h_lang)->required();
    hl->add_option("--format", h_format)->check(CLI::IsMember({"ansi", "html"}));
    hl->add_option("--theme", h_theme, "theme json");
    hl->add_option("file", h_file, "source file")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "latency benchmark on snippet inputs");
    std::string b_model, b_data, b_lang = "minijay", b_out;
    int b_fold = 0;
    bench->add_option("--model", b_model)->required();
    bench->add_option("--data", b_data)->required();
    bench->add_option("--lang", b_lang);
    bench->add_option("--fold", b_fold)->check(CLI::Range(0, 2));
    bench->add_option("--out", b_out, "write the json report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen(g_langs, g_count, g_seed, g_depth, g_snippets, g_gen_config, g_out);
        if (train->parsed())
            return cmd_train(t_kind, t_size, t_tn, t_lang, t_base, t_shots, t_fold,
                             t_task, t_seed, t_rules, t_data, t_out);
        if (eval->parsed())
            return cmd_eval(e_model, e_data, e_lang, e_task, e_split, e_fold, e_csv);
        if (grid->parsed())
            return cmd_grid(gr_plan, gr_rq, gr_seed, gr_sizes, gr_rules, gr_data, gr_out);
        if (hl->parsed())
            return cmd_highlight(h_model, h_lang, h_format, h_theme, h_file);
        if (bench->parsed())
            return cmd_bench(b_model, b_data, b_lang, b_fold, b_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
