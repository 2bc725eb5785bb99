#pragma once

#include <string>
#include <vector>

namespace bograph {

enum class Severity { Error, Warning, Note };

inline const char* severity_name(Severity s) {
    switch (s) {
        case Severity::Error: return "error";
        case Severity::Warning: return "warning";
        case Severity::Note: return "note";
    }
    return "?";
}

/// One finding. `rule` is the labeling-rule id "1".."9", "schema" for
/// document-shape problems, or a derive-stage tag.
struct Diagnostic {
    Severity severity = Severity::Error;
    int line = 0;
    int column = 0;
    std::string message;
    std::string rule = "schema";

    std::string to_string() const {
        std::string out = severity_name(severity);
        if (line > 0) {
            out += " at " + std::to_string(line) + ":" + std::to_string(column);
        }
        out += " [rule " + rule + "]: " + message;
        return out;
    }
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

}  // namespace bograph
