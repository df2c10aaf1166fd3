#include "deeplight/pipeline.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

namespace deeplight {

namespace fs = std::filesystem;
using hc::CoverageTask;
using nlohmann::json;

// ---------------------------------------------------------------------------
// scenarios
// ---------------------------------------------------------------------------

std::string Scenario::name() const {
    std::string n;
    if (kind == ScenarioKind::FS) n += std::to_string(shots.value_or(0)) + "-";
    switch (kind) {
        case ScenarioKind::SL: n += "SL"; break;
        case ScenarioKind::ML: n += "ML"; break;
        case ScenarioKind::FS: n += "FS"; break;
    }
    n += std::to_string(size);
    if (tn) n += "+TN";
    if (kind != ScenarioKind::ML) n += "-" + std::string(to_string(base.value()));
    return n;
}

namespace {

std::string kind_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::SL: return "sl";
        case ScenarioKind::ML: return "ml";
        case ScenarioKind::FS: return "fs";
    }
    return "?";
}

ScenarioKind kind_from_string(const std::string& s) {
    if (s == "sl") return ScenarioKind::SL;
    if (s == "ml") return ScenarioKind::ML;
    if (s == "fs") return ScenarioKind::FS;
    throw Error("unknown scenario kind: " + s);
}

json scenario_to_json(const Scenario& s) {
    json j = {{"kind", kind_string(s.kind)}, {"size", s.size}, {"tn", s.tn},
              {"seed", s.seed}};
    if (s.base) j["base"] = std::string(to_string(*s.base));
    if (s.shots) j["shots"] = *s.shots;
    return j;
}

Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.kind = kind_from_string(j.at("kind").get<std::string>());
    s.size = j.at("size").get<int>();
    s.tn = j.value("tn", false);
    if (j.contains("seed")) s.seed = j.at("seed").get<uint64_t>();
    if (j.contains("base") && !j.at("base").is_null()) {
        auto lang = language_from_string(j.at("base").get<std::string>());
        if (!lang) throw Error("unknown base language in plan");
        s.base = *lang;
    }
    if (j.contains("shots") && !j.at("shots").is_null())
        s.shots = j.at("shots").get<int>();
    if (s.kind != ScenarioKind::ML && !s.base)
        throw Error("scenario kind " + kind_string(s.kind) + " needs a base language");
    if (s.kind == ScenarioKind::FS && !s.shots)
        throw Error("fs scenario needs shots");
    return s;
}

}  // namespace

std::vector<double> training_schedule() { return {1e-3, 1e-3, 1e-4, 1e-4}; }

// ---------------------------------------------------------------------------
// training core
// ---------------------------------------------------------------------------

namespace {

std::vector<uint8_t> task_labels(const LabeledSequence& s, CoverageTask task) {
    return hc::adapt(s.t4_labels, task);
}

std::vector<uint8_t> content_mask(const LabeledSequence& s) {
    std::vector<uint8_t> m(s.tokens.size());
    for (size_t i = 0; i < m.size(); ++i) m[i] = s.tokens[i].is_whitespace ? 0 : 1;
    return m;
}

CnnShModel train_core(const std::vector<const LabeledSequence*>& stream,
                      const std::vector<const LabeledSequence*>& validation,
                      CoverageTask task, const Vocabulary& vocab, ModelConfig cfg,
                      uint64_t seed, TrainLog* log, const CnnShModel* warm_start) {
    if (stream.empty()) throw EmptySource("training stream is empty");
    CnnShModel model;
    if (warm_start) {
        if (warm_start->layout_hash != vocab.layout_hash())
            throw VocabularyMismatch(
                "base model vocabulary layout differs from the requested one");
        model = *warm_start;
    } else {
        cfg.seed = Rng::mix(seed, 0x1417);
        model = init_model(cfg, vocab.layout_hash());
    }

    OptimizerState opt = OptimizerState::create(model.cfg);
    Workspace ws;
    Params grads;
    Rng dropout_rng(Rng::mix(seed, 0xd0));
    std::vector<int32_t> ids;

    const std::vector<double> schedule = training_schedule();
    std::vector<int> order(stream.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (size_t epoch = 0; epoch < schedule.size(); ++epoch) {
        const float lr = static_cast<float>(schedule[epoch]);
        Rng shuffle_rng(Rng::mix(seed, 0xe0 + epoch));
        shuffle_rng.shuffle(order);
        for (int idx : order) {
            const LabeledSequence& s = *stream[static_cast<size_t>(idx)];
            vocab.encode_sequence(s.lang, s.tokens, ids);
            loss_and_grad(model, ids, task_labels(s, task), content_mask(s), true,
                          &dropout_rng, ws, grads);
            adam_step(model.p, grads, opt, lr);
        }
        if (log) {
            log->lr_schedule.push_back(schedule[epoch]);
            if (!validation.empty())
                log->val_accuracy.push_back(
                    evaluate(model, validation, task, vocab).accuracy());
        }
    }
    return model;
}

}  // namespace

std::vector<const LabeledSequence*> select_items(const LangData& ld, int fold,
                                                 const std::string& split) {
    std::vector<const LabeledSequence*> out;
    if (split == "snippets") {
        for (const auto& s : ld.snippets.at(static_cast<size_t>(fold)))
            out.push_back(&s);
        return out;
    }
    const FoldSplit& f = ld.folds.at(static_cast<size_t>(fold));
    const std::vector<std::string>* ids = nullptr;
    if (split == "valid" || split == "test")
        ids = &f.test;
    else if (split == "train")
        ids = &f.train;
    else if (split == "validation")
        ids = &f.validation;
    else
        throw Error("unknown split: " + split);
    for (const auto& id : *ids) out.push_back(&ld.by_id(id));
    return out;
}

CnnShModel train_sl(const Dataset& ds, LanguageId lang, int fold, CoverageTask task,
                    const Vocabulary& vocab, ModelConfig cfg, uint64_t seed,
                    TrainLog* log) {
    const LangData& ld = ds.lang(lang);
    return train_core(select_items(ld, fold, "train"),
                      select_items(ld, fold, "validation"), task, vocab, cfg, seed,
                      log, nullptr);
}

CnnShModel train_ml(const Dataset& ds, int fold, CoverageTask task,
                    const Vocabulary& vocab, ModelConfig cfg, uint64_t seed,
                    TrainLog* log) {
    std::vector<std::vector<std::string>> per_lang(kLanguageCount);
    for (const auto& ld : ds.langs)
        per_lang[static_cast<size_t>(ld.lang)] =
            ld.folds.at(static_cast<size_t>(fold)).train;
    const auto merged = merge_multilang(per_lang, fold, seed);
    std::vector<const LabeledSequence*> stream;
    stream.reserve(merged.size());
    for (const auto& [lang, id] : merged) stream.push_back(&ds.lang(lang).by_id(id));
    // per-language validation sets stay untouched; pool them for the log only
    std::vector<const LabeledSequence*> validation;
    for (const auto& ld : ds.langs)
        for (const auto& v : select_items(ld, fold, "validation"))
            validation.push_back(v);
    return train_core(stream, validation, task, vocab, cfg, seed, log, nullptr);
}

CnnShModel finetune_fs(const CnnShModel& base, const Dataset& ds, LanguageId base_lang,
                       int shots, int fold, CoverageTask task, const Vocabulary& vocab,
                       uint64_t seed, TrainLog* log) {
    std::vector<const LabeledSequence*> stream;
    std::vector<const LabeledSequence*> validation;
    for (const auto& ld : ds.langs) {
        if (ld.lang == base_lang) continue;
        const auto& subsets = ld.fewshot.at(static_cast<size_t>(fold));
        auto it = subsets.find(shots);
        if (it == subsets.end())
            throw Error("dataset has no few-shot subset of size " + std::to_string(shots));
        for (const auto& id : it->second.ids) stream.push_back(&ld.by_id(id));
        for (const auto& v : select_items(ld, fold, "validation"))
            validation.push_back(v);
    }
    return train_core(stream, validation, task, vocab, base.cfg, seed, log, &base);
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

EvalResult evaluate(const CnnShModel& m, const std::vector<const LabeledSequence*>& items,
                    CoverageTask task, const Vocabulary& vocab, bool projected) {
    if (items.empty()) throw EmptyEvalSet("no items to evaluate");
    EvalResult r;
    Workspace ws;
    std::vector<int32_t> ids;
    const int K = m.cfg.n_classes;
    for (const LabeledSequence* item : items) {
        if (item->tokens.empty()) continue;
        vocab.encode_sequence(item->lang, item->tokens, ids);
        forward_t(m.cfg, m.p, ids, false, nullptr, ws);
        for (size_t t = 0; t < item->tokens.size(); ++t) {
            if (item->tokens[t].is_whitespace) continue;
            const float* row = ws.scores.data() + t * static_cast<size_t>(K);
            int pred = 0;
            for (int k = 1; k < K; ++k)
                if (row[k] > row[pred]) pred = k;
            if (projected) pred = hc::adapt(static_cast<uint8_t>(pred), task);
            const uint8_t truth = hc::adapt(item->t4_labels[t], task);
            r.correct += (pred == truth);
            ++r.total;
        }
    }
    if (r.total == 0) throw EmptyEvalSet("evaluation set has no non-whitespace tokens");
    return r;
}

LatencyReport measure_latency(const CnnShModel& m, const Vocabulary& vocab,
                              const std::vector<const LabeledSequence*>& inputs) {
    if (inputs.empty()) throw EmptyEvalSet("no latency inputs");
    const int prev = omp_get_max_threads();
    omp_set_num_threads(1);
    LatencyReport rep;
    std::vector<double> lat_ms;
    lat_ms.reserve(inputs.size());
    Workspace ws;
    std::vector<int32_t> ids;
    double total_s = 0.0;
    for (const LabeledSequence* item : inputs) {
        if (item->tokens.empty()) continue;
        vocab.encode_sequence(item->lang, item->tokens, ids);
        const auto t0 = std::chrono::steady_clock::now();
        forward_t(m.cfg, m.p, ids, false, nullptr, ws);
        const auto t1 = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(t1 - t0).count();
        total_s += s;
        lat_ms.push_back(s * 1e3);
        rep.n_tokens += static_cast<long>(ids.size());
        ++rep.n_inputs;
    }
    omp_set_num_threads(prev);
    std::sort(lat_ms.begin(), lat_ms.end());
    rep.p50_ms = lat_ms[lat_ms.size() / 2];
    rep.p99_ms = lat_ms[std::min(lat_ms.size() - 1,
                                 static_cast<size_t>(lat_ms.size() * 99 / 100))];
    rep.tokens_per_s = total_s > 0 ? rep.n_tokens / total_s : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// plans
// ---------------------------------------------------------------------------

std::string GridPlan::to_json() const {
    json scen = json::array();
    for (const auto& s : scenarios) scen.push_back(scenario_to_json(s));
    json tasks_j = json::array();
    for (auto t : tasks) tasks_j.push_back(std::string(hc::task_name(t)));
    json j = {{"seed", seed},
              {"scenarios", scen},
              {"folds", folds},
              {"tasks", tasks_j},
              {"splits", splits},
              {"fs_eval_unseen_only", fs_eval_unseen_only},
              {"include_projected", include_projected},
              {"latency", latency},
              {"save_models", save_models},
              {"jobs", jobs}};
    return j.dump(2) + "\n";
}

GridPlan GridPlan::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad plan json: ") + e.what());
    }
    GridPlan p;
    p.seed = j.value("seed", uint64_t{1});
    if (!j.contains("scenarios") || j.at("scenarios").empty())
        throw Error("plan has no scenarios");
    for (const auto& s : j.at("scenarios")) {
        Scenario sc = scenario_from_json(s);
        if (!s.contains("seed")) sc.seed = p.seed;
        p.scenarios.push_back(sc);
    }
    if (j.contains("folds")) p.folds = j.at("folds").get<std::vector<int>>();
    if (j.contains("tasks")) {
        p.tasks.clear();
        for (const auto& t : j.at("tasks"))
            p.tasks.push_back(hc::task_from_string(t.get<std::string>()));
    }
    if (j.contains("splits")) p.splits = j.at("splits").get<std::vector<std::string>>();
    p.fs_eval_unseen_only = j.value("fs_eval_unseen_only", false);
    p.include_projected = j.value("include_projected", false);
    p.latency = j.value("latency", false);
    p.save_models = j.value("save_models", true);
    p.jobs = j.value("jobs", 0);
    return p;
}

GridPlan GridPlan::rq_preset(int rq, uint64_t seed, const std::vector<int>& sizes) {
    GridPlan p;
    p.seed = seed;
    auto add_sl = [&](bool tn) {
        for (int size : sizes)
            for (auto lang : kAllLanguages)
                p.scenarios.push_back({ScenarioKind::SL, size, tn, lang, {}, seed});
    };
    auto add_ml = [&](bool tn) {
        for (int size : sizes)
            p.scenarios.push_back({ScenarioKind::ML, size, tn, {}, {}, seed});
    };
    auto add_fs = [&](bool tn) {
        for (int size : sizes)
            for (auto lang : kAllLanguages)
                for (int shots : {10, 30, 50})
                    p.scenarios.push_back(
                        {ScenarioKind::FS, size, tn, lang, shots, seed});
    };
    switch (rq) {
        case 1:
            add_sl(false);
            add_sl(true);
            break;
        case 2:
            add_sl(false);
            add_sl(true);
            add_ml(false);
            add_ml(true);
            break;
        case 3:
            add_sl(false);
            add_ml(false);
            add_fs(false);
            p.fs_eval_unseen_only = true;
            break;
        case 4:
            add_fs(false);
            add_fs(true);
            p.fs_eval_unseen_only = true;
            break;
        default:
            throw Error("rq preset must be 1..4");
    }
    return p;
}

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

namespace {

std::string model_name(const Scenario& sc, CoverageTask task, int fold) {
    std::string n = sc.name();
    if (task != CoverageTask::T4) n += "-" + std::string(hc::task_name(task));
    return n + "-fold" + std::to_string(fold);
}

std::string train_langs_string(const Scenario& sc, const Dataset& ds) {
    if (sc.kind == ScenarioKind::SL) return std::string(to_string(*sc.base));
    std::string all;
    for (const auto& ld : ds.langs) {
        if (!all.empty()) all += "+";
        all += std::string(to_string(ld.lang));
    }
    if (sc.kind == ScenarioKind::ML) return all;
    std::string others;
    for (const auto& ld : ds.langs) {
        if (ld.lang == *sc.base) continue;
        if (!others.empty()) others += ",";
        others += std::string(to_string(ld.lang));
    }
    return std::string(to_string(*sc.base)) + "+fs(" + others + ")";
}

int resolve_jobs(int plan_jobs) {
    if (plan_jobs > 0) return plan_jobs;
    if (const char* env = std::getenv("DEEPLIGHT_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return omp_get_max_threads();
}

struct ModelJob {
    Scenario sc;
    int fold = 0;
    CoverageTask task = CoverageTask::T4;
    std::string name;
    std::string base_name;  // FS only
};

std::string format_accuracy(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", a);
    return buf;
}

}  // namespace

double mean_accuracy(const std::vector<ExperimentCell>& cells,
                     const std::function<bool(const ExperimentCell&)>& keep) {
    double sum = 0.0;
    long n = 0;
    for (const auto& c : cells) {
        if (c.failed || !keep(c)) continue;
        sum += c.accuracy;
        ++n;
    }
    if (n == 0) throw Error("mean_accuracy: no cells matched");
    return sum / n;
}

GridResult run_grid(const GridPlan& plan, const Dataset& ds, const Vocabulary& vocab_tn,
                    const Vocabulary& vocab_plain, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const std::string models_dir = out_dir + "/models";
    if (plan.save_models) fs::create_directories(models_dir);

    // leakage audit runs before any training starts
    audit_no_leakage(ds);

    auto vocab_for = [&](const Scenario& sc) -> const Vocabulary& {
        return sc.tn ? vocab_tn : vocab_plain;
    };

    // ----- enumerate model jobs (phase 1: SL/ML incl. FS bases; phase 2: FS)
    std::map<std::string, ModelJob> phase1, phase2;
    for (const auto& sc : plan.scenarios) {
        for (int fold : plan.folds) {
            for (CoverageTask task : plan.tasks) {
                if (sc.kind == ScenarioKind::FS) {
                    Scenario base_sc{ScenarioKind::SL, sc.size, sc.tn, sc.base, {},
                                     sc.seed};
                    const std::string base = model_name(base_sc, task, fold);
                    phase1.emplace(base, ModelJob{base_sc, fold, task, base, ""});
                    const std::string name = model_name(sc, task, fold);
                    phase2.emplace(name, ModelJob{sc, fold, task, name, base});
                } else {
                    const std::string name = model_name(sc, task, fold);
                    phase1.emplace(name, ModelJob{sc, fold, task, name, ""});
                }
            }
        }
    }

    std::map<std::string, CnnShModel> registry;
    std::map<std::string, TrainLog> logs;
    std::map<std::string, std::string> train_errors;
    for (const auto& [name, job] : phase1) {
        registry[name];
        logs[name];
    }
    for (const auto& [name, job] : phase2) {
        registry[name];
        logs[name];
    }

    const int jobs = resolve_jobs(plan.jobs);
    omp_set_max_active_levels(1);

    auto run_phase = [&](const std::map<std::string, ModelJob>& phase) {
        std::vector<const ModelJob*> list;
        for (const auto& [name, job] : phase) list.push_back(&job);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
        for (size_t i = 0; i < list.size(); ++i) {
            const ModelJob& job = *list[i];
            try {
                ModelConfig cfg;
                cfg.hidden = job.sc.size;
                cfg.vocab_size = vocab_for(job.sc).total_size();
                const uint64_t mseed =
                    Rng::mix(job.sc.seed, fnv1a(job.name.data(), job.name.size()));
                TrainLog* log = &logs[job.name];
                CnnShModel m;
                if (job.sc.kind == ScenarioKind::SL) {
                    m = train_sl(ds, *job.sc.base, job.fold, job.task, vocab_for(job.sc),
                                 cfg, mseed, log);
                } else if (job.sc.kind == ScenarioKind::ML) {
                    m = train_ml(ds, job.fold, job.task, vocab_for(job.sc), cfg, mseed,
                                 log);
                } else {
                    auto bit = registry.find(job.base_name);
                    if (bit == registry.end() || bit->second.p.emb.empty())
                        throw Error("base model missing: " + job.base_name);
                    m = finetune_fs(bit->second, ds, *job.sc.base, *job.sc.shots,
                                    job.fold, job.task, vocab_for(job.sc), mseed, log);
                }
                registry.find(job.name)->second = std::move(m);
            } catch (const std::exception& e) {
#pragma omp critical
                train_errors[job.name] = e.what();
            }
        }
    };
    run_phase(phase1);
    run_phase(phase2);

    if (plan.save_models) {
        for (const auto& [name, model] : registry) {
            if (model.p.emb.empty()) continue;
            save_model(model, models_dir + "/" + name + ".dlsh");
            const Scenario* sc = nullptr;
            for (const auto& [n, job] : phase1)
                if (n == name) sc = &job.sc;
            for (const auto& [n, job] : phase2)
                if (n == name) sc = &job.sc;
            write_text_file(models_dir + "/" + name + ".layout.json",
                            vocab_for(*sc).layout_json());
            const TrainLog& log = logs[name];
            std::string tl;
            for (size_t e = 0; e < log.lr_schedule.size(); ++e) {
                tl += "epoch " + std::to_string(e) + " lr " +
                      std::to_string(log.lr_schedule[e]);
                if (e < log.val_accuracy.size())
                    tl += " val_accuracy " + format_accuracy(log.val_accuracy[e]);
                tl += "\n";
            }
            write_text_file(models_dir + "/" + name + ".log", tl);
        }
    }

    // ----- evaluation cells
    std::vector<ExperimentCell> cells;
    for (const auto& sc : plan.scenarios) {
        for (int fold : plan.folds) {
            for (const auto& ld : ds.langs) {
                if (plan.fs_eval_unseen_only && sc.kind == ScenarioKind::FS &&
                    sc.base == ld.lang)
                    continue;
                for (CoverageTask task : plan.tasks) {
                    for (const std::string& split : plan.splits) {
                        ExperimentCell cell;
                        cell.scenario = sc.name();
                        cell.size = sc.size;
                        cell.tn = sc.tn;
                        cell.fold = fold;
                        cell.train_langs = train_langs_string(sc, ds);
                        cell.eval_lang = ld.lang;
                        cell.task = task;
                        cell.split = split;
                        cells.push_back(cell);
                        if (plan.include_projected && task != CoverageTask::T4) {
                            cell.projected = true;
                            cells.push_back(cell);
                        }
                    }
                }
            }
        }
    }

#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
    for (size_t i = 0; i < cells.size(); ++i) {
        ExperimentCell& cell = cells[i];
        try {
            Scenario sc;
            bool found = false;
            for (const auto& s : plan.scenarios)
                if (s.name() == cell.scenario) {
                    sc = s;
                    found = true;
                }
            if (!found) throw Error("scenario lookup failed");
            const CoverageTask model_task =
                cell.projected ? CoverageTask::T4 : cell.task;
            const std::string mname = model_name(sc, model_task, cell.fold);
            auto it = train_errors.find(mname);
            if (it != train_errors.end())
                throw Error("training failed: " + it->second);
            auto rit = registry.find(mname);
            if (rit == registry.end() || rit->second.p.emb.empty())
                throw Error("model missing: " + mname);
            const CnnShModel& model = rit->second;
            const auto items =
                select_items(ds.lang(cell.eval_lang), cell.fold, cell.split);
            EvalResult r =
                evaluate(model, items, cell.task, vocab_for(sc), cell.projected);
            cell.n_tokens = r.total;
            cell.accuracy = r.accuracy();
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
        }
    }

    // ----- reports
    GridResult res;
    res.cells = cells;
    std::string csv =
        "scenario,size,tn,fold,train_langs,eval_lang,task,split,n_tokens,accuracy\n";
    for (const auto& c : cells) {
        csv += c.scenario + "," + std::to_string(c.size) + "," +
               (c.tn ? "true" : "false") + "," + std::to_string(c.fold) + "," +
               c.train_langs + "," + std::string(to_string(c.eval_lang)) + "," +
               std::string(hc::task_name(c.task)) + (c.projected ? "-proj" : "") +
               "," + c.split + "," + std::to_string(c.n_tokens) + "," +
               (c.failed ? "NA" : format_accuracy(c.accuracy)) + "\n";
    }
    res.csv = csv;

    // three-fold means keyed by (scenario, eval_lang, task, split, projected)
    std::map<std::string, std::pair<double, int>> means;
    for (const auto& c : cells) {
        if (c.failed) continue;
        const std::string key = c.scenario + "," + std::string(to_string(c.eval_lang)) +
                                "," + std::string(hc::task_name(c.task)) +
                                (c.projected ? "-proj" : "") + "," + c.split;
        auto& [sum, n] = means[key];
        sum += c.accuracy;
        ++n;
    }
    std::string summary = "scenario,eval_lang,task,split,folds,accuracy_mean\n";
    for (const auto& [key, sn] : means) {
        std::istringstream ks(key);
        std::string scn, lang, task, split;
        std::getline(ks, scn, ',');
        std::getline(ks, lang, ',');
        std::getline(ks, task, ',');
        std::getline(ks, split, ',');
        summary += scn + "," + lang + "," + task + "," + split + "," +
                   std::to_string(sn.second) + "," +
                   format_accuracy(sn.first / sn.second) + "\n";
    }
    res.summary_csv = summary;

    // human-readable table: rows = scenarios, columns = language x task
    std::ostringstream table;
    for (const std::string& split : plan.splits) {
        table << "== " << split << " (three-fold means, %) ==\n";
        table << "model";
        for (const auto& ld : ds.langs)
            for (CoverageTask task : plan.tasks)
                table << "\t" << to_string(ld.lang) << ":" << hc::task_name(task);
        table << "\n";
        for (const auto& sc : plan.scenarios) {
            table << sc.name();
            for (const auto& ld : ds.langs) {
                for (CoverageTask task : plan.tasks) {
                    const std::string key = sc.name() + "," +
                                            std::string(to_string(ld.lang)) + "," +
                                            std::string(hc::task_name(task)) + "," +
                                            split;
                    auto it = means.find(key);
                    if (it == means.end()) {
                        table << "\t-";
                    } else {
                        char buf[16];
                        std::snprintf(buf, sizeof(buf), "%.2f",
                                      100.0 * it->second.first / it->second.second);
                        table << "\t" << buf;
                    }
                }
            }
            table << "\n";
        }
        table << "\n";
    }
    res.table = table.str();

    write_text_file(out_dir + "/report.csv", res.csv);
    write_text_file(out_dir + "/summary.csv", res.summary_csv);
    write_text_file(out_dir + "/table.txt", res.table);

    if (plan.latency) {
        std::string lat = "model,tokens_per_s,p50_ms,p99_ms,n_inputs,n_tokens\n";
        std::vector<int> seen_sizes;
        for (const auto& sc : plan.scenarios) {
            if (std::find(seen_sizes.begin(), seen_sizes.end(), sc.size) !=
                seen_sizes.end())
                continue;
            seen_sizes.push_back(sc.size);
            const CoverageTask t4 = CoverageTask::T4;
            const std::string mname = model_name(sc, t4, plan.folds.front());
            const CnnShModel& model = registry[mname];
            if (model.p.emb.empty()) continue;
            const auto inputs =
                select_items(ds.langs.front(), plan.folds.front(), "snippets");
            LatencyReport rep = measure_latency(model, vocab_for(sc), inputs);
            char row[256];
            std::snprintf(row, sizeof(row), "%s,%.0f,%.4f,%.4f,%ld,%ld\n",
                          mname.c_str(), rep.tokens_per_s, rep.p50_ms, rep.p99_ms,
                          rep.n_inputs, rep.n_tokens);
            lat += row;
        }
        write_text_file(out_dir + "/latency.csv", lat);
    }
    return res;
}

}  // namespace deeplight
