#pragma once

#include "bograph/parser.hpp"

#include <json.hpp>

namespace bograph {

/// JSON field layout mirrors the 6-tuple ordering of the bond model:
/// label, causality, direction, branch{present,common}, element,
/// modulus [effort, flow], param, p0, q0.
inline std::string to_json(const BondGraphModel& model) {
    nlohmann::ordered_json doc;
    doc["name"] = model.name;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [name, def] : model.parameters)
        params[name] = def ? nlohmann::ordered_json(to_string(*def)) : nlohmann::ordered_json(nullptr);
    doc["parameters"] = params;
    doc["branches"] = nlohmann::ordered_json::array();
    for (const auto& br : model.branches) {
        nlohmann::ordered_json jb;
        jb["id"] = br.id;
        jb["junctions"] = nlohmann::ordered_json::array();
        for (const auto& j : br.junctions) {
            nlohmann::ordered_json jj;
            jj["number"] = j.number;
            jj["kind"] = j.is_one_junction;
            jj["bonds"] = nlohmann::ordered_json::array();
            for (const auto& b : j.bonds) {
                nlohmann::ordered_json bb;
                bb["label"] = b.label;
                bb["causality"] = b.causality.stroke_toward_junction;
                bb["direction"] = b.direction.toward_junction;
                bb["branch"] = {{"present", b.branch.present},
                                {"common", b.branch.common_bond_label}};
                bb["element"] = static_cast<int>(b.element);
                bb["modulus"] = {b.modulus.effort_modulus.to_string(),
                                 b.modulus.flow_modulus.to_string()};
                bb["param"] = b.parameter ? nlohmann::ordered_json(*b.parameter)
                                          : nlohmann::ordered_json(nullptr);
                bb["p0"] = to_string(b.p0);
                bb["q0"] = to_string(b.q0);
                jj["bonds"].push_back(std::move(bb));
            }
            jb["junctions"].push_back(std::move(jj));
        }
        doc["branches"].push_back(std::move(jb));
    }
    return doc.dump(2) + "\n";
}

inline ParseReport from_json(const std::string& text) {
    ParseReport report;
    auto fail = [&](const std::string& msg) {
        report.diagnostics.push_back({Severity::Error, 0, 0, msg, "schema"});
    };
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const std::exception& ex) {
        fail(std::string("malformed JSON: ") + ex.what());
        return report;
    }
    BondGraphModel model;
    try {
        if (!doc.is_object()) throw std::invalid_argument("document must be an object");
        model.name = doc.at("name").get<std::string>();
        for (const auto& [name, value] : doc.at("parameters").items()) {
            std::optional<Rat> def;
            if (!value.is_null()) {
                auto r = parse_rational(value.get<std::string>());
                if (!r) throw std::invalid_argument("bad default for parameter " + name);
                def = *r;
            }
            model.parameters.emplace_back(name, def);
        }
        for (const auto& jb : doc.at("branches")) {
            Branch branch;
            branch.id = jb.at("id").get<int>();
            for (const auto& jj : jb.at("junctions")) {
                Junction junction;
                junction.number = jj.at("number").get<int>();
                junction.is_one_junction = jj.at("kind").get<bool>();
                for (const auto& bb : jj.at("bonds")) {
                    Bond bond;
                    bond.label = bb.at("label").get<int>();
                    bond.causality.stroke_toward_junction = bb.at("causality").get<bool>();
                    bond.direction.toward_junction = bb.at("direction").get<bool>();
                    bond.branch.present = bb.at("branch").at("present").get<bool>();
                    bond.branch.common_bond_label = bb.at("branch").at("common").get<int>();
                    int code = bb.at("element").get<int>();
                    if (code < 0 || code > 6)
                        throw std::invalid_argument("element code " + std::to_string(code) +
                                                    " outside 0..6");
                    bond.element = static_cast<ElementType>(code);
                    const auto& mod = bb.at("modulus");
                    if (!mod.is_array() || mod.size() != 2)
                        throw std::invalid_argument("modulus of bond " +
                                                    std::to_string(bond.label) +
                                                    " must be a 2-element array");
                    std::string err;
                    auto em = ParamExpr::parse(mod[0].get<std::string>(), &err);
                    if (!em) throw std::invalid_argument("bad effort modulus: " + err);
                    auto fm = ParamExpr::parse(mod[1].get<std::string>(), &err);
                    if (!fm) throw std::invalid_argument("bad flow modulus: " + err);
                    bond.modulus = {*em, *fm};
                    if (!bb.at("param").is_null())
                        bond.parameter = bb.at("param").get<std::string>();
                    auto p0 = parse_rational(bb.at("p0").get<std::string>());
                    auto q0 = parse_rational(bb.at("q0").get<std::string>());
                    if (!p0 || !q0) throw std::invalid_argument("bad p0/q0 literal");
                    bond.p0 = *p0;
                    bond.q0 = *q0;
                    junction.bonds.push_back(std::move(bond));
                }
                branch.junctions.push_back(std::move(junction));
            }
            model.branches.push_back(std::move(branch));
        }
    } catch (const std::exception& ex) {
        fail(std::string("schema violation: ") + ex.what());
        return report;
    }
    // The JSON path funnels through the same label validation as the DSL.
    for (auto& d : validate_labels(model))
        if (d.severity == Severity::Error) report.diagnostics.push_back(std::move(d));
    if (!has_errors(report.diagnostics)) report.model = std::move(model);
    return report;
}

}  // namespace bograph
