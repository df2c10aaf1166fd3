#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "deeplight/common.hpp"

using namespace deeplight;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string binary() {
    const char* bin = std::getenv("DEEPLIGHT_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "DEEPLIGHT_BIN must point at the deeplight binary");
    return bin;
}

std::string work_dir() {
    static const std::string dir = [] {
        const auto d = fs::temp_directory_path() / "deeplight-tests" / "cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d.string();
    }();
    return dir;
}

RunResult run(const std::string& args) {
    const std::string out_path = work_dir() + "/stdout.txt";
    const std::string err_path = work_dir() + "/stderr.txt";
    const std::string cmd =
        binary() + " " + args + " > " + out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_text_file(out_path);
    r.err = read_text_file(err_path);
    return r;
}

// generated once, reused by the dependent commands
const std::string& data_dir() {
    static const std::string dir = [] {
        const std::string d = work_dir() + "/data";
        RunResult r = run("gen --langs all --count 60 --seed 3 --snippets 20 --out " + d);
        REQUIRE(r.exit_code == 0);
        return d;
    }();
    return dir;
}

const std::string& models_dir() {
    static const std::string dir = [] {
        const std::string d = work_dir() + "/models";
        RunResult r = run("train --kind sl --size 32 --lang minijay --fold 0 --data " +
                          data_dir() + " --out " + d);
        REQUIRE(r.exit_code == 0);
        return d;
    }();
    return dir;
}

std::string html_unescape(std::string s) {
    const std::pair<const char*, const char*> reps[] = {
        {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&#39;", "'"}, {"&amp;", "&"}};
    for (const auto& [from, to] : reps) {
        size_t pos = 0;
        while ((pos = s.find(from, pos)) != std::string::npos) {
            s.replace(pos, std::strlen(from), to);
            pos += std::strlen(to);
        }
    }
    return s;
}

std::string strip_tags(const std::string& s) {
    std::string out;
    bool in_tag = false;
    for (char c : s) {
        if (c == '<') in_tag = true;
        else if (c == '>') in_tag = false;
        else if (!in_tag) out += c;
    }
    return out;
}

std::string strip_ansi(const std::string& s) {
    std::string out;
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '\x1b') {
            while (i < s.size() && s[i] != 'm') ++i;
            ++i;
        } else {
            out += s[i++];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("gen writes corpora, folds, snippets and few-shot files") {
    const std::string& d = data_dir();
    for (const char* lang : {"minijay", "minisnake", "minicee"}) {
        CHECK(fs::exists(d + "/corpus-" + lang + ".jsonl"));
        CHECK(fs::exists(d + "/folds-" + lang + ".json"));
        for (int k = 0; k < 3; ++k) {
            CHECK(fs::exists(d + "/snippets-" + lang + "-fold" + std::to_string(k) + ".jsonl"));
            CHECK(fs::exists(d + "/fewshot-" + lang + "-fold" + std::to_string(k) + ".json"));
        }
    }
    CHECK(fs::exists(d + "/languages.json"));
    CHECK(fs::exists(d + "/hc-classes.json"));
    CHECK(fs::exists(d + "/tn-rules.json"));
    CHECK(fs::exists(d + "/manifest.json"));

    auto manifest = nlohmann::json::parse(read_text_file(d + "/languages.json"));
    REQUIRE(manifest.contains("minijay"));
    CHECK(manifest.at("minijay")[0].contains("type_id"));
    CHECK(manifest.at("minijay")[0].contains("name"));
    CHECK(manifest.at("minijay")[0].contains("is_whitespace"));
}

TEST_CASE("gen is deterministic across reruns") {
    const std::string d2 = work_dir() + "/data2";
    RunResult r = run("gen --langs all --count 60 --seed 3 --snippets 20 --out " + d2);
    REQUIRE(r.exit_code == 0);
    for (const char* f : {"corpus-minijay.jsonl", "folds-minisnake.json",
                          "snippets-minicee-fold1.jsonl", "fewshot-minijay-fold0.json"})
        CHECK(read_text_file(data_dir() + "/" + f) == read_text_file(d2 + "/" + f));
}

TEST_CASE("gen rejects a zero count as a usage error") {
    RunResult r = run("gen --langs all --count 0 --out " + work_dir() + "/bad");
    CHECK(r.exit_code == 2);
}

TEST_CASE("train names single-language models canonically") {
    CHECK(fs::exists(models_dir() + "/SL32-minijay-fold0.dlsh"));
    CHECK(fs::exists(models_dir() + "/SL32-minijay-fold0.layout.json"));
    CHECK(fs::exists(models_dir() + "/SL32-minijay-fold0.train.log"));
    const std::string log = read_text_file(models_dir() + "/SL32-minijay-fold0.train.log");
    CHECK(log.find("epoch 0") != std::string::npos);
    CHECK(log.find("val_accuracy") != std::string::npos);
}

TEST_CASE("train names few-shot TN models canonically") {
    RunResult r = run(
        "train --kind fs --size 32 --tn --base minijay --shots 10 --fold 0 --data " +
        data_dir() + " --out " + models_dir());
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(models_dir() + "/10-FS32+TN-minijay-fold0.dlsh"));
    // the implied SL base was trained and kept alongside
    CHECK(fs::exists(models_dir() + "/SL32+TN-minijay-fold0.dlsh"));
}

TEST_CASE("train rejects an unsupported size, naming the valid ones") {
    RunResult r = run("train --kind sl --size 48 --lang minijay --fold 0 --data " +
                      data_dir() + " --out " + work_dir() + "/m2");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("32") != std::string::npos);
    CHECK(r.err.find("64") != std::string::npos);
    CHECK(r.err.find("128") != std::string::npos);
}

TEST_CASE("eval prints and writes the accuracy") {
    const std::string csv = work_dir() + "/eval.csv";
    RunResult r = run("eval --model " + models_dir() + "/SL32-minijay-fold0.dlsh" +
                      " --data " + data_dir() +
                      " --lang minijay --task t4 --split valid --fold 0 --csv " + csv);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("accuracy") != std::string::npos);
    const std::string text = read_text_file(csv);
    CHECK(text.find("eval,minijay,T4,valid,0,") != std::string::npos);

    RunResult r2 = run("eval --model " + models_dir() + "/SL32-minijay-fold0.dlsh" +
                       " --data " + data_dir() + " --lang minijay --split snippets");
    CHECK(r2.exit_code == 0);
}

TEST_CASE("a model paired with the wrong layout is rejected") {
    // pair the TN-trained model with the plain layout sidecar
    const std::string mism = work_dir() + "/mismatch.dlsh";
    fs::copy_file(models_dir() + "/10-FS32+TN-minijay-fold0.dlsh", mism,
                  fs::copy_options::overwrite_existing);
    write_text_file(work_dir() + "/mismatch.layout.json",
                    read_text_file(models_dir() + "/SL32-minijay-fold0.layout.json"));
    RunResult r = run("eval --model " + mism + " --data " + data_dir() +
                      " --lang minijay");
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("vocabulary layout") != std::string::npos);
}

TEST_CASE("highlight renders ansi and passes text through verbatim") {
    const std::string src = work_dir() + "/sample.mj";
    write_text_file(src, "class Payment { int x = 1; }\n");
    RunResult r = run("highlight --model " + models_dir() + "/SL32-minijay-fold0.dlsh" +
                      " --lang minijay --format ansi " + src);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find('\x1b') != std::string::npos);
    CHECK(strip_ansi(r.out) == read_text_file(src));
}

TEST_CASE("highlight html is a well-formed escaped fragment") {
    const std::string src = work_dir() + "/sample2.mj";
    write_text_file(src, "class A { str s = \"a<b&c\"; }\n");
    RunResult r = run("highlight --model " + models_dir() + "/SL32-minijay-fold0.dlsh" +
                      " --lang minijay --format html " + src);
    REQUIRE(r.exit_code == 0);
    // unescaping the tag-stripped output reproduces the source exactly
    CHECK(html_unescape(strip_tags(r.out)) == read_text_file(src));
    // spans balance
    size_t opens = 0, closes = 0, pos = 0;
    while ((pos = r.out.find("<span", pos)) != std::string::npos) { ++opens; pos += 5; }
    pos = 0;
    while ((pos = r.out.find("</span>", pos)) != std::string::npos) { ++closes; pos += 7; }
    CHECK(opens == closes);
    // the raw '<' of the source never leaks unescaped
    CHECK(r.out.find("\"a<") == std::string::npos);
}

TEST_CASE("highlight of an empty file prints nothing and succeeds") {
    const std::string src = work_dir() + "/empty.mj";
    write_text_file(src, "");
    RunResult r = run("highlight --model " + models_dir() + "/SL32-minijay-fold0.dlsh" +
                      " --lang minijay " + src);
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
}

TEST_CASE("highlight works on code that does not parse") {
    const std::string src = work_dir() + "/invalid.mj";
    write_text_file(src, "class { { int ) ;;; \"unterminated\n@@@@\n");
    RunResult r = run("highlight --model " + models_dir() + "/SL32-minijay-fold0.dlsh" +
                      " --lang minijay " + src);
    CHECK(r.exit_code == 0);
    CHECK(strip_ansi(r.out) == read_text_file(src));
}

TEST_CASE("bench reports positive latency figures, stable across runs") {
    const std::string report = work_dir() + "/bench.json";
    RunResult r = run("bench --model " + models_dir() + "/SL32-minijay-fold0.dlsh" +
                      " --data " + data_dir() + " --lang minijay --out " + report);
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(read_text_file(report));
    CHECK(j.at("tokens_per_s").get<double>() > 0.0);
    CHECK(j.at("p50_ms").get<double>() > 0.0);
    CHECK(j.at("p99_ms").get<double>() >= j.at("p50_ms").get<double>());
    CHECK(j.at("n_inputs").get<long>() == 20);
    CHECK(j.at("n_tokens").get<long>() > 0);

    // p50 is a stable statistic: three runs, best pair within 20%
    double p50s[3];
    p50s[0] = j.at("p50_ms").get<double>();
    for (int i = 1; i < 3; ++i) {
        RunResult ri = run("bench --model " + models_dir() + "/SL32-minijay-fold0.dlsh" +
                           " --data " + data_dir() + " --lang minijay --out " + report);
        REQUIRE(ri.exit_code == 0);
        p50s[i] = nlohmann::json::parse(read_text_file(report)).at("p50_ms").get<double>();
    }
    double best = 1e9;
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            best = std::min(best, std::abs(p50s[a] - p50s[b]) / std::max(p50s[a], p50s[b]));
    CHECK(best < 0.2);
}

TEST_CASE("grid requires a plan or preset; an empty plan is a usage error") {
    RunResult r = run("grid --data " + data_dir() + " --out " + work_dir() + "/g");
    CHECK(r.exit_code == 2);
    const std::string empty_plan = work_dir() + "/empty-plan.json";
    write_text_file(empty_plan, "{\"seed\":1,\"scenarios\":[]}\n");
    RunResult r2 = run("grid --plan " + empty_plan + " --data " + data_dir() +
                       " --out " + work_dir() + "/g2");
    CHECK(r2.exit_code == 2);
}

TEST_CASE("unknown subcommands are usage errors") {
    CHECK(run("frobnicate").exit_code == 2);
    CHECK(run("").exit_code == 2);
}
