#pragma once

#include "bograph/diagnostics.hpp"
#include "bograph/model.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace bograph {

struct ParseReport {
    std::optional<BondGraphModel> model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return model.has_value(); }
};

namespace detail {

struct Token {
    std::string text;
    int column = 0;
};

inline std::vector<Token> tokenize_line(const std::string& line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        int col = static_cast<int>(i) + 1;
        if (line[i] == '"') {
            std::string text = "\"";
            ++i;
            while (i < line.size() && line[i] != '"') text += line[i++];
            if (i < line.size()) {
                text += '"';
                ++i;
            }
            tokens.push_back({text, col});
            continue;
        }
        std::string text;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#')
            text += line[i++];
        tokens.push_back({text, col});
    }
    return tokens;
}

inline std::optional<ElementType> element_from_keyword(const std::string& kw, bool& wants_stroke_toward,
                                                       bool& stroke_constrained) {
    stroke_constrained = false;
    if (kw == "bond") return ElementType::ConnectingBond;
    if (kw == "se") {
        stroke_constrained = true;
        wants_stroke_toward = true;
        return ElementType::Source;
    }
    if (kw == "sf") {
        stroke_constrained = true;
        wants_stroke_toward = false;
        return ElementType::Source;
    }
    if (kw == "i") return ElementType::Inertance;
    if (kw == "c") return ElementType::Compliance;
    if (kw == "r") return ElementType::Resistor;
    if (kw == "tf") return ElementType::Transformer;
    if (kw == "gy") return ElementType::Gyrator;
    return std::nullopt;
}

/// Splits "expr,expr" at top-level commas (commas inside parentheses stay).
inline std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

class DslParser {
public:
    explicit DslParser(const std::string& text) : text_(text) {}

    ParseReport run() {
        std::istringstream in(text_);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto tokens = tokenize_line(line);
            if (tokens.empty()) continue;
            handle(tokens, line_no);
        }
        if (depth_ != Depth::Top)
            error(line_no, 1, "unterminated block; missing 'end'", "schema");
        finish_checks();
        ParseReport report;
        report.diagnostics = std::move(diags_);
        if (!has_errors(report.diagnostics)) report.model = std::move(model_);
        return report;
    }

private:
    enum class Depth { Top, InBranch, InJunction };

    void error(int line, int col, std::string msg, std::string rule) {
        diags_.push_back({Severity::Error, line, col, std::move(msg), std::move(rule)});
    }

    void handle(const std::vector<Token>& t, int line) {
        const std::string& kw = t[0].text;
        if (kw == "graph") {
            if (t.size() < 2 || t[1].text.size() < 2 || t[1].text.front() != '"' ||
                t[1].text.back() != '"') {
                error(line, t[0].column, "graph needs a quoted name", "schema");
                return;
            }
            model_.name = t[1].text.substr(1, t[1].text.size() - 2);
        } else if (kw == "param") {
            if (t.size() < 2) {
                error(line, t[0].column, "param needs an identifier", "schema");
                return;
            }
            std::optional<Rat> def;
            if (t.size() >= 4 && t[2].text == "=") {
                def = parse_rational(t[3].text);
                if (!def) {
                    error(line, t[3].column, "bad rational default '" + t[3].text + "'", "schema");
                    return;
                }
            } else if (t.size() != 2) {
                error(line, t[0].column, "expected: param <ident> [= <rational>]", "schema");
                return;
            }
            if (model_.has_parameter(t[1].text)) {
                error(line, t[1].column, "duplicate parameter '" + t[1].text + "'", "schema");
                return;
            }
            model_.parameters.emplace_back(t[1].text, def);
        } else if (kw == "branch") {
            if (depth_ != Depth::Top) {
                error(line, t[0].column, "branch cannot nest", "schema");
                return;
            }
            int id = 0;
            if (t.size() < 2 || !parse_int(t[1].text, id) || id < 1) {
                error(line, t[0].column, "branch needs a positive integer id", "2");
                return;
            }
            model_.branches.push_back({id, {}});
            depth_ = Depth::InBranch;
        } else if (kw == "junction") {
            if (depth_ != Depth::InBranch) {
                error(line, t[0].column, "junction must appear inside a branch", "schema");
                return;
            }
            int number = 0;
            if (t.size() < 2 || !parse_int(t[1].text, number) || number < 1) {
                error(line, t[0].column, "junction needs a positive integer number", "2");
                return;
            }
            std::optional<bool> kind;
            for (std::size_t i = 2; i < t.size(); ++i) {
                auto [key, value] = split_attr(t[i].text);
                if (key == "kind") {
                    if (value == "0")
                        kind = false;
                    else if (value == "1")
                        kind = true;
                    else
                        error(line, t[i].column, "kind must be 0 or 1", "7");
                } else {
                    error(line, t[i].column, "unknown junction attribute '" + key + "'", "schema");
                }
            }
            if (!kind) {
                error(line, t[0].column, "junction needs kind=<0|1>", "7");
                return;
            }
            model_.branches.back().junctions.push_back({number, *kind, {}});
            depth_ = Depth::InJunction;
        } else if (kw == "bond") {
            if (depth_ != Depth::InJunction) {
                error(line, t[0].column, "bond must appear inside a junction", "schema");
                return;
            }
            parse_bond(t, line);
        } else if (kw == "end") {
            if (depth_ == Depth::InJunction)
                depth_ = Depth::InBranch;
            else if (depth_ == Depth::InBranch)
                depth_ = Depth::Top;
            else
                error(line, t[0].column, "unmatched 'end'", "schema");
        } else {
            error(line, t[0].column, "unknown keyword '" + kw + "'", "schema");
        }
    }

    void parse_bond(const std::vector<Token>& t, int line) {
        Bond bond;
        if (t.size() < 2 || !parse_int(t[1].text, bond.label) || bond.label < 111) {
            error(line, t[0].column, "bond needs a pqr-encoded label", "2");
            return;
        }
        Branch& branch = model_.branches.back();
        Junction& junction = branch.junctions.back();
        auto pos = decode_position(bond.label, branch.id, junction.number);
        if (!pos) {
            error(line, t[1].column,
                  "label " + t[1].text + " does not decode inside branch " +
                      std::to_string(branch.id) + ", junction " + std::to_string(junction.number),
                  "2");
            return;
        }
        if (*pos != static_cast<int>(junction.bonds.size()) + 1) {
            error(line, t[1].column,
                  "label " + t[1].text + " is out of position; expected position " +
                      std::to_string(junction.bonds.size() + 1),
                  "2");
            return;
        }
        if (!seen_labels_.insert(bond.label).second) {
            error(line, t[1].column, "duplicate bond label " + t[1].text, "2");
            return;
        }

        bool have_element = false, have_stroke = false, have_power = false;
        bool stroke_constrained = false, wants_stroke_toward = false;
        std::string element_kw;
        for (std::size_t i = 2; i < t.size(); ++i) {
            auto [key, value] = split_attr(t[i].text);
            if (key == "element") {
                auto e = element_from_keyword(value, wants_stroke_toward, stroke_constrained);
                if (!e) {
                    error(line, t[i].column, "unknown element keyword '" + value + "'", "3");
                    return;
                }
                bond.element = *e;
                element_kw = value;
                have_element = true;
            } else if (key == "stroke") {
                if (value == "junction")
                    bond.causality.stroke_toward_junction = true;
                else if (value == "element")
                    bond.causality.stroke_toward_junction = false;
                else {
                    error(line, t[i].column, "stroke must be junction or element", "4");
                    return;
                }
                have_stroke = true;
            } else if (key == "power") {
                if (value == "in")
                    bond.direction.toward_junction = true;
                else if (value == "out")
                    bond.direction.toward_junction = false;
                else {
                    error(line, t[i].column, "power must be in or out", "5");
                    return;
                }
                have_power = true;
            } else if (key == "branch") {
                int common = 0;
                if (!parse_int(value, common) || common < 1) {
                    error(line, t[i].column, "branch ref needs a bond label", "9");
                    return;
                }
                bond.branch = {true, common};
            } else if (key == "modulus") {
                auto parts = split_top_level(value);
                if (parts.size() != 2) {
                    error(line, t[i].column,
                          "modulus arity must be 2 (effort,flow), got " +
                              std::to_string(parts.size()),
                          "6");
                    return;
                }
                std::string err;
                auto em = ParamExpr::parse(parts[0], &err);
                if (!em) {
                    error(line, t[i].column, "bad effort modulus: " + err, "6");
                    return;
                }
                auto fm = ParamExpr::parse(parts[1], &err);
                if (!fm) {
                    error(line, t[i].column, "bad flow modulus: " + err, "6");
                    return;
                }
                bond.modulus = {*em, *fm};
            } else if (key == "param") {
                if (value.empty()) {
                    error(line, t[i].column, "param needs an identifier", "schema");
                    return;
                }
                bond.parameter = value;
            } else if (key == "p0" || key == "q0") {
                auto r = parse_rational(value);
                if (!r) {
                    error(line, t[i].column, "bad rational '" + value + "'", "schema");
                    return;
                }
                (key == "p0" ? bond.p0 : bond.q0) = *r;
            } else {
                error(line, t[i].column, "unknown bond attribute '" + key + "'", "schema");
                return;
            }
        }
        if (!have_element || !have_stroke || !have_power) {
            error(line, t[0].column, "bond needs element=, stroke= and power=", "schema");
            return;
        }
        if (stroke_constrained &&
            bond.causality.stroke_toward_junction != wants_stroke_toward) {
            error(line, t[0].column,
                  "element '" + element_kw + "' requires stroke=" +
                      (wants_stroke_toward ? std::string("junction") : std::string("element")),
                  "4");
            return;
        }
        junction.bonds.push_back(std::move(bond));
    }

    void finish_checks() {
        // Referenced parameter names must be declared.
        for (const auto& br : model_.branches)
            for (const auto& j : br.junctions)
                for (const auto& b : j.bonds) {
                    std::vector<std::string> used;
                    if (b.parameter) used.push_back(*b.parameter);
                    for (const auto& n : b.modulus.effort_modulus.parameters()) used.push_back(n);
                    for (const auto& n : b.modulus.flow_modulus.parameters()) used.push_back(n);
                    for (const auto& n : used)
                        if (!model_.has_parameter(n))
                            error(0, 0,
                                  "bond " + std::to_string(b.label) +
                                      " references undeclared parameter '" + n + "'",
                                  "schema");
                }
    }

    static bool parse_int(const std::string& s, int& out) {
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        try {
            out = std::stoi(s);
        } catch (...) {
            return false;
        }
        return true;
    }

    static std::pair<std::string, std::string> split_attr(const std::string& s) {
        auto eq = s.find('=');
        if (eq == std::string::npos) return {s, ""};
        return {s.substr(0, eq), s.substr(eq + 1)};
    }

    const std::string& text_;
    BondGraphModel model_;
    std::vector<Diagnostic> diags_;
    std::set<int> seen_labels_;
    Depth depth_ = Depth::Top;
};

}  // namespace detail

inline ParseReport parse(const std::string& text) { return detail::DslParser(text).run(); }

/// Canonical DSL renderer; parse(print_dsl(m)) reproduces m field-for-field.
inline std::string print_dsl(const BondGraphModel& model) {
    std::ostringstream out;
    out << "graph \"" << model.name << "\"\n";
    for (const auto& [name, def] : model.parameters) {
        out << "param " << name;
        if (def) out << " = " << to_string(*def);
        out << "\n";
    }
    for (const auto& br : model.branches) {
        out << "branch " << br.id << "\n";
        for (const auto& j : br.junctions) {
            out << "  junction " << j.number << " kind=" << (j.is_one_junction ? 1 : 0) << "\n";
            for (const auto& b : j.bonds) {
                out << "    bond " << b.label << " element="
                    << element_keyword(b.element, b.causality.stroke_toward_junction)
                    << " stroke=" << (b.causality.stroke_toward_junction ? "junction" : "element")
                    << " power=" << (b.direction.toward_junction ? "in" : "out");
                if (b.branch.present) out << " branch=" << b.branch.common_bond_label;
                if (b.is_two_port())
                    out << " modulus=" << b.modulus.effort_modulus.to_string() << ","
                        << b.modulus.flow_modulus.to_string();
                if (b.parameter) out << " param=" << *b.parameter;
                if (b.p0 != Rat(0)) out << " p0=" << to_string(b.p0);
                if (b.q0 != Rat(0)) out << " q0=" << to_string(b.q0);
                out << "\n";
            }
            out << "  end\n";
        }
        out << "end\n";
    }
    return out.str();
}

namespace detail {

inline bool connector_pair_consistent(const Bond& a, const Bond& b, std::string& why) {
    if (a.element != b.element) {
        why = "element kinds differ";
        return false;
    }
    if (a.direction.toward_junction == b.direction.toward_junction) {
        why = "power directions must be complementary";
        return false;
    }
    if (a.element == ElementType::Gyrator) {
        if (a.causality.stroke_toward_junction != b.causality.stroke_toward_junction) {
            why = "gyrator strokes must agree on both sides";
            return false;
        }
        if (!(a.modulus == b.modulus)) {
            why = "gyrator modulus lists must match";
            return false;
        }
    } else {
        if (a.causality.stroke_toward_junction == b.causality.stroke_toward_junction) {
            why = "strokes must be complementary across the connector";
            return false;
        }
        if (!(a.modulus.effort_modulus == b.modulus.flow_modulus &&
              a.modulus.flow_modulus == b.modulus.effort_modulus)) {
            why = "transformer modulus lists must mirror each other";
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// Model-level label and structure checks (the paper's rules 1, 2, 8, 9 plus
/// connector-pair consistency). Never throws; everything is reported.
inline std::vector<Diagnostic> validate_labels(const BondGraphModel& model) {
    std::vector<Diagnostic> diags;
    auto report = [&](Severity sev, std::string msg, std::string rule) {
        diags.push_back({sev, 0, 0, std::move(msg), std::move(rule)});
    };

    std::set<int> branch_ids;
    std::set<int> all_labels;
    for (const auto& br : model.branches) {
        if (!branch_ids.insert(br.id).second)
            report(Severity::Error, "duplicate branch id " + std::to_string(br.id), "2");
        std::set<int> junction_numbers;
        for (const auto& j : br.junctions) {
            if (!junction_numbers.insert(j.number).second)
                report(Severity::Error,
                       "duplicate junction number " + std::to_string(j.number) + " in branch " +
                           std::to_string(br.id),
                       "2");
            if (j.bonds.empty()) {
                report(Severity::Error,
                       "junction " + std::to_string(j.number) + " has no bonds", "1");
                continue;
            }
            for (std::size_t k = 0; k < j.bonds.size(); ++k) {
                const Bond& b = j.bonds[k];
                all_labels.insert(b.label);
                auto pos = decode_position(b.label, br.id, j.number);
                if (!pos || *pos != static_cast<int>(k) + 1)
                    report(Severity::Error,
                           "bond " + std::to_string(b.label) + " mislabelled for position " +
                               std::to_string(k + 1),
                           "2");
                if (b.is_storage() && !b.parameter)
                    report(Severity::Error,
                           "storage bond " + std::to_string(b.label) + " needs a parameter name",
                           "schema");
                if (b.element == ElementType::ConnectingBond) {
                    if (b.parameter)
                        report(Severity::Error,
                               "connecting bond " + std::to_string(b.label) +
                                   " cannot carry a parameter",
                               "schema");
                    if (!b.modulus.effort_modulus.is_one() || !b.modulus.flow_modulus.is_one())
                        report(Severity::Error,
                               "connecting bond " + std::to_string(b.label) +
                                   " must have modulus [1,1]",
                               "6");
                }
                if (b.is_two_port()) {
                    auto product = b.modulus.effort_modulus * b.modulus.flow_modulus;
                    if (!product.is_one())
                        report(Severity::Error,
                               "two-port bond " + std::to_string(b.label) +
                                   " moduli must be reciprocal",
                               "6");
                }
                if (b.branch.present && !b.is_connector_type())
                    report(Severity::Error,
                           "bond " + std::to_string(b.label) +
                               " carries a branch ref but is not a connecting bond or two-port",
                           "8");
            }
        }
    }

    // Chain connectors: the last bond of each junction pairs with the second
    // last bond of the next junction of the same branch.
    for (const auto& br : model.branches) {
        for (std::size_t i = 0; i + 1 < br.junctions.size(); ++i) {
            const Junction& a = br.junctions[i];
            const Junction& b = br.junctions[i + 1];
            if (a.bonds.empty() || b.bonds.size() < 2) {
                report(Severity::Error,
                       "junctions " + std::to_string(a.number) + " and " +
                           std::to_string(b.number) + " of branch " + std::to_string(br.id) +
                           " cannot be chained",
                       "1");
                continue;
            }
            const Bond& near = a.bonds.back();
            const Bond& far = b.bonds[b.bonds.size() - 2];
            if (!near.is_connector_type() || !far.is_connector_type()) {
                report(Severity::Error,
                       "chain connector between junctions " + std::to_string(a.number) + " and " +
                           std::to_string(b.number) +
                           " must be a connecting bond, transformer or gyrator",
                       "1");
                continue;
            }
            std::string why;
            if (!detail::connector_pair_consistent(near, far, why))
                report(Severity::Error,
                       "connector pair " + std::to_string(near.label) + "/" +
                           std::to_string(far.label) + ": " + why,
                       "6");
        }
        // Connector-typed bonds may only sit in connector slots or carry a
        // branch ref; anything else is an ordering violation of rule 1.
        for (std::size_t i = 0; i < br.junctions.size(); ++i) {
            const Junction& j = br.junctions[i];
            for (std::size_t k = 0; k < j.bonds.size(); ++k) {
                const Bond& bd = j.bonds[k];
                if (!bd.is_connector_type() || bd.branch.present) continue;
                bool last = k + 1 == j.bonds.size();
                bool second_last = k + 2 == j.bonds.size();
                bool slot_ok = (last && i + 1 < br.junctions.size()) || (second_last && i > 0);
                if (!slot_ok)
                    report(Severity::Error,
                           "connector bond " + std::to_string(bd.label) +
                               " is not in a chain connector slot",
                           "1");
            }
        }
    }

    // Branch refs must resolve, and both ends must agree.
    for (const auto& br : model.branches)
        for (const auto& j : br.junctions)
            for (const auto& b : j.bonds) {
                if (!b.branch.present) {
                    if (b.branch.common_bond_label != 0)
                        report(Severity::Error,
                               "bond " + std::to_string(b.label) +
                                   " has common label without branch presence",
                               "8");
                    continue;
                }
                int common = b.branch.common_bond_label;
                if (!all_labels.count(common)) {
                    report(Severity::Error,
                           "bond " + std::to_string(b.label) + " references branch bond " +
                               std::to_string(common) + " which does not exist",
                           "9");
                    continue;
                }
                // Count partners: another branch-flagged bond with the same tag.
                int partners = 0;
                const Bond* partner = nullptr;
                for (const auto& br2 : model.branches)
                    for (const auto& j2 : br2.junctions)
                        for (const auto& b2 : j2.bonds)
                            if (b2.label != b.label && b2.branch.present &&
                                b2.branch.common_bond_label == common) {
                                ++partners;
                                partner = &b2;
                            }
                if (partners == 0)
                    report(Severity::Error,
                           "bond " + std::to_string(b.label) + " has no partner for common bond " +
                               std::to_string(common),
                           "9");
                else if (partners > 1)
                    report(Severity::Error,
                           "common bond " + std::to_string(common) + " is claimed by " +
                               std::to_string(partners + 1) + " bonds",
                           "9");
                else if (partner) {
                    std::string why;
                    if (!detail::connector_pair_consistent(*partner, b, why))
                        report(Severity::Error,
                               "common bond pair " + std::to_string(b.label) + "/" +
                                   std::to_string(partner->label) + ": " + why,
                               "9");
                }
            }

    return diags;
}

}  // namespace bograph
