#include "deeplight/hc.hpp"

#include <json.hpp>

namespace deeplight::hc {

namespace {

struct ClassInfo {
    const char* name;
    Macrogroup group;
};

const ClassInfo kClasses[kClassCount] = {
    {"unhighlighted", Macrogroup::None},
    {"keyword", Macrogroup::Lexical},
    {"literal", Macrogroup::Lexical},
    {"char_string_literal", Macrogroup::Lexical},
    {"comment", Macrogroup::Lexical},
    {"type_identifier", Macrogroup::Identifier},
    {"function_identifier", Macrogroup::Identifier},
    {"field_identifier", Macrogroup::Identifier},
    {"class_declarator", Macrogroup::Declarator},
    {"function_declarator", Macrogroup::Declarator},
    {"variable_declarator", Macrogroup::Declarator},
    {"annotation_declarator", Macrogroup::Annotation},
};

const char* group_name(Macrogroup g) {
    switch (g) {
        case Macrogroup::None: return "none";
        case Macrogroup::Lexical: return "lexical";
        case Macrogroup::Identifier: return "identifier";
        case Macrogroup::Declarator: return "declarator";
        case Macrogroup::Annotation: return "annotation";
    }
    return "?";
}

void check_code(int code) {
    if (code < 0 || code >= kClassCount)
        throw InvalidLabel("highlight class code out of range: " + std::to_string(code));
}

}  // namespace

std::string_view class_name(int code) {
    check_code(code);
    return kClasses[code].name;
}

Macrogroup class_macrogroup(int code) {
    check_code(code);
    return kClasses[code].group;
}

std::string_view task_name(CoverageTask t) {
    switch (t) {
        case CoverageTask::T1: return "T1";
        case CoverageTask::T2: return "T2";
        case CoverageTask::T3: return "T3";
        case CoverageTask::T4: return "T4";
    }
    return "?";
}

CoverageTask task_from_string(std::string_view s) {
    if (s.size() == 2 && (s[0] == 't' || s[0] == 'T') && s[1] >= '1' && s[1] <= '4')
        return static_cast<CoverageTask>(s[1] - '0');
    throw Error("unknown coverage task: " + std::string(s));
}

bool task_includes(CoverageTask t, Macrogroup g) {
    switch (g) {
        case Macrogroup::None: return false;
        case Macrogroup::Lexical: return true;
        case Macrogroup::Identifier: return t >= CoverageTask::T2;
        case Macrogroup::Declarator: return t >= CoverageTask::T3;
        case Macrogroup::Annotation: return t >= CoverageTask::T4;
    }
    return false;
}

uint8_t adapt(uint8_t label, CoverageTask t) {
    check_code(label);
    return task_includes(t, kClasses[label].group) ? label : uint8_t{kUnhighlighted};
}

std::vector<uint8_t> adapt(std::span<const uint8_t> labels, CoverageTask t) {
    std::vector<uint8_t> out(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) out[i] = adapt(labels[i], t);
    return out;
}

std::string class_table_json() {
    nlohmann::json arr = nlohmann::json::array();
    for (int c = 0; c < kClassCount; ++c) {
        arr.push_back({{"code", c},
                       {"name", kClasses[c].name},
                       {"macrogroup", group_name(kClasses[c].group)}});
    }
    nlohmann::json tasks = nlohmann::json::array();
    for (auto t : kAllTasks) {
        nlohmann::json groups = nlohmann::json::array();
        for (auto g : {Macrogroup::Lexical, Macrogroup::Identifier, Macrogroup::Declarator,
                       Macrogroup::Annotation})
            if (task_includes(t, g)) groups.push_back(group_name(g));
        tasks.push_back({{"task", std::string(task_name(t))}, {"macrogroups", groups}});
    }
    return nlohmann::json{{"classes", arr}, {"coverage_tasks", tasks}}.dump(2) + "\n";
}

}  // namespace deeplight::hc
