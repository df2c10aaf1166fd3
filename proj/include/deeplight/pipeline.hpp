#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "deeplight/dataset.hpp"
#include "deeplight/hc.hpp"
#include "deeplight/nn.hpp"
#include "deeplight/normalizer.hpp"

namespace deeplight {

// ---------------------------------------------------------------------------
// Experiment engine: SL / ML / FS training scenarios, the non-whitespace
// token accuracy metric, and the grid over folds x sizes x tasks x languages
// x splits with CSV/table reports.
// ---------------------------------------------------------------------------

enum class ScenarioKind { SL, ML, FS };

struct Scenario {
    ScenarioKind kind = ScenarioKind::SL;
    int size = 32;  // hidden width: 32, 64 or 128
    bool tn = false;
    std::optional<LanguageId> base;  // SL and FS
    std::optional<int> shots;        // FS: 10, 30, 50
    uint64_t seed = 1;

    // canonical rendering: "SL32+TN-minijay", "ML128", "10-FS32-minijay"
    std::string name() const;
};

struct ExperimentCell {
    std::string scenario;
    int size = 32;
    bool tn = false;
    int fold = 0;
    std::string train_langs;
    LanguageId eval_lang = LanguageId::minijay;
    hc::CoverageTask task = hc::CoverageTask::T4;
    bool projected = false;  // evaluated by projecting a T4-trained model
    std::string split;       // "valid" | "snippets"
    long n_tokens = 0;
    double accuracy = 0.0;
    bool failed = false;
    std::string error;
};

struct TrainLog {
    std::vector<double> lr_schedule;        // one entry per epoch
    std::vector<double> val_accuracy;       // after each epoch
};

// fixed schedule shared by every scenario: two epochs at 1e-3, two at 1e-4,
// Adam, one sequence per update
std::vector<double> training_schedule();

CnnShModel train_sl(const Dataset& ds, LanguageId lang, int fold,
                    hc::CoverageTask task, const Vocabulary& vocab, ModelConfig cfg,
                    uint64_t seed, TrainLog* log = nullptr);

CnnShModel train_ml(const Dataset& ds, int fold, hc::CoverageTask task,
                    const Vocabulary& vocab, ModelConfig cfg, uint64_t seed,
                    TrainLog* log = nullptr);

// Fine-tunes a copy of `base` on the few-shot multisets of every language
// except base_lang, same 2+2 schedule, fresh optimizer state.
CnnShModel finetune_fs(const CnnShModel& base, const Dataset& ds,
                       LanguageId base_lang, int shots, int fold,
                       hc::CoverageTask task, const Vocabulary& vocab, uint64_t seed,
                       TrainLog* log = nullptr);

struct EvalResult {
    long correct = 0;
    long total = 0;  // non-whitespace tokens
    double accuracy() const { return total ? static_cast<double>(correct) / total : 0.0; }
};

// Non-whitespace token accuracy. Ground truth is task-adapted; `projected`
// additionally adapts the argmax predictions (for T4-trained models read out
// at a smaller task).
EvalResult evaluate(const CnnShModel& m, const std::vector<const LabeledSequence*>& items,
                    hc::CoverageTask task, const Vocabulary& vocab,
                    bool projected = false);

struct LatencyReport {
    double tokens_per_s = 0.0;
    double p50_ms = 0.0;
    double p99_ms = 0.0;
    long n_inputs = 0;
    long n_tokens = 0;
};

// single-thread forward latency over one input per request
LatencyReport measure_latency(const CnnShModel& m, const Vocabulary& vocab,
                              const std::vector<const LabeledSequence*>& inputs);

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

struct GridPlan {
    uint64_t seed = 1;
    std::vector<Scenario> scenarios;
    std::vector<int> folds = {0, 1, 2};
    std::vector<hc::CoverageTask> tasks = {hc::CoverageTask::T1, hc::CoverageTask::T2,
                                           hc::CoverageTask::T3, hc::CoverageTask::T4};
    std::vector<std::string> splits = {"valid", "snippets"};
    bool fs_eval_unseen_only = false;
    bool include_projected = false;
    bool latency = false;
    bool save_models = true;
    int jobs = 0;  // 0: DEEPLIGHT_JOBS env var, else hardware

    std::string to_json() const;
    static GridPlan from_json(const std::string& text);
    // desk-scale presets reproducing the research-question layouts
    static GridPlan rq_preset(int rq, uint64_t seed, const std::vector<int>& sizes = {32});
};

struct GridResult {
    std::vector<ExperimentCell> cells;
    std::string csv;          // per-cell rows
    std::string summary_csv;  // three-fold means
    std::string table;        // human-readable
};

// Trains every (scenario, fold, task) model, evaluates all requested cells,
// writes report.csv / summary.csv / table.txt (and models/ when saving) under
// out_dir. Per-cell failures are recorded and the grid continues.
GridResult run_grid(const GridPlan& plan, const Dataset& ds, const Vocabulary& vocab_tn,
                    const Vocabulary& vocab_plain, const std::string& out_dir);

// mean accuracy over cells passing a filter; helpers for reports and gates
double mean_accuracy(const std::vector<ExperimentCell>& cells,
                     const std::function<bool(const ExperimentCell&)>& keep);

// "valid" -> the fold's test items, "snippets" -> the fold's snippet set,
// plus "train" / "validation" for the training-side selections
std::vector<const LabeledSequence*> select_items(const LangData& ld, int fold,
                                                 const std::string& split);

}  // namespace deeplight
