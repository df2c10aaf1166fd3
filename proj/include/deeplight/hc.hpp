#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deeplight/common.hpp"

namespace deeplight::hc {

// The 12 highlight classes. Codes are part of the on-disk dataset format and
// of every trained model's output layer, so they are fixed.
enum HighlightClass : uint8_t {
    kUnhighlighted = 0,
    kKeyword = 1,
    kLiteral = 2,
    kCharStringLiteral = 3,
    kComment = 4,
    kTypeIdentifier = 5,
    kFunctionIdentifier = 6,
    kFieldIdentifier = 7,
    kClassDeclarator = 8,
    kFunctionDeclarator = 9,
    kVariableDeclarator = 10,
    kAnnotationDeclarator = 11,
};

constexpr int kClassCount = 12;

enum class Macrogroup : uint8_t { None = 0, Lexical, Identifier, Declarator, Annotation };

std::string_view class_name(int code);            // throws InvalidLabel outside [0,11]
Macrogroup class_macrogroup(int code);            // throws InvalidLabel outside [0,11]

// Coverage tasks. Composition is cumulative in macrogroup order:
// T1 = Lexical, T2 += Identifier, T3 += Declarator, T4 += Annotation.
enum class CoverageTask : uint8_t { T1 = 1, T2 = 2, T3 = 3, T4 = 4 };

constexpr CoverageTask kAllTasks[] = {CoverageTask::T1, CoverageTask::T2,
                                      CoverageTask::T3, CoverageTask::T4};

std::string_view task_name(CoverageTask t);
CoverageTask task_from_string(std::string_view s);  // accepts "t1".."t4" / "T1".."T4"

bool task_includes(CoverageTask t, Macrogroup g);

// Task Adapter: keep a label iff its macrogroup is covered by the task,
// otherwise map it to unhighlighted. Length preserved.
uint8_t adapt(uint8_t label, CoverageTask t);
std::vector<uint8_t> adapt(std::span<const uint8_t> labels, CoverageTask t);

// class/macrogroup table as JSON text (consumed by docs and theme tooling)
std::string class_table_json();

}  // namespace deeplight::hc
