#include "deeplight/render.hpp"

#include <json.hpp>

namespace deeplight {

Theme Theme::default_ansi() {
    Theme t;
    t.sgr[hc::kUnhighlighted] = "";
    t.sgr[hc::kKeyword] = "1;35";            // bold magenta
    t.sgr[hc::kLiteral] = "33";              // yellow
    t.sgr[hc::kCharStringLiteral] = "32";    // green
    t.sgr[hc::kComment] = "90";              // bright black
    t.sgr[hc::kTypeIdentifier] = "36";       // cyan
    t.sgr[hc::kFunctionIdentifier] = "34";   // blue
    t.sgr[hc::kFieldIdentifier] = "94";      // bright blue
    t.sgr[hc::kClassDeclarator] = "1;36";    // bold cyan
    t.sgr[hc::kFunctionDeclarator] = "1;34"; // bold blue
    t.sgr[hc::kVariableDeclarator] = "4;37"; // underlined white
    t.sgr[hc::kAnnotationDeclarator] = "31"; // red
    return t;
}

std::string Theme::to_json() const {
    nlohmann::json j;
    for (int c = 0; c < hc::kClassCount; ++c)
        j[std::string(hc::class_name(c))] = sgr[static_cast<size_t>(c)];
    return j.dump(2) + "\n";
}

Theme Theme::from_json(const std::string& text) {
    Theme t = default_ansi();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad theme json: ") + e.what());
    }
    for (int c = 0; c < hc::kClassCount; ++c) {
        const std::string name(hc::class_name(c));
        if (j.contains(name)) t.sgr[static_cast<size_t>(c)] = j.at(name).get<std::string>();
    }
    if (!t.sgr[hc::kUnhighlighted].empty())
        throw FormatError("theme must leave 'unhighlighted' unstyled");
    return t;
}

std::string render_ansi(const std::vector<Token>& tokens,
                        const std::vector<uint8_t>& classes, const Theme& theme) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        if (tok.text.empty()) continue;  // synthetic
        const uint8_t cls = classes[i];
        const std::string& style =
            tok.is_whitespace ? theme.sgr[hc::kUnhighlighted] : theme.sgr[cls];
        if (style.empty()) {
            out += tok.text;
        } else {
            out += "\x1b[" + style + "m" + tok.text + "\x1b[0m";
        }
    }
    return out;
}

std::string html_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string render_html(const std::vector<Token>& tokens,
                        const std::vector<uint8_t>& classes) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        const Token& tok = tokens[i];
        if (tok.text.empty()) continue;
        const uint8_t cls = classes[i];
        if (tok.is_whitespace || cls == hc::kUnhighlighted) {
            out += html_escape(tok.text);
        } else {
            out += "<span class=\"hc-" + std::string(hc::class_name(cls)) + "\">" +
                   html_escape(tok.text) + "</span>";
        }
    }
    return out;
}

}  // namespace deeplight
