#pragma once

#include <array>
#include <string>
#include <vector>

#include "deeplight/hc.hpp"
#include "deeplight/token.hpp"

namespace deeplight {

// Rendering styles per highlight class. ANSI styles are SGR parameter
// strings ("1;34"); HTML rendering uses the class names directly
// (span class="hc-<name>"). Unhighlighted always renders unstyled.
struct Theme {
    std::array<std::string, hc::kClassCount> sgr;

    static Theme default_ansi();
    std::string to_json() const;
    static Theme from_json(const std::string& text);
};

std::string render_ansi(const std::vector<Token>& tokens,
                        const std::vector<uint8_t>& classes, const Theme& theme);

// entity-escaped; non-unhighlighted, non-whitespace tokens get a span
std::string render_html(const std::vector<Token>& tokens,
                        const std::vector<uint8_t>& classes);

std::string html_escape(const std::string& text);

}  // namespace deeplight
