#pragma once

#include "bograph/derive.hpp"

#include <functional>
#include <sstream>

namespace bograph {

namespace detail {

/// Signal names for dumps: input variables print as their source's parameter
/// name when one is declared, like the paper's e1 = V.
inline std::function<std::string(SignalVar)> dump_namer(const BondGraphModel& model) {
    return [&model](SignalVar v) -> std::string {
        if (v.kind == SignalKind::Input) {
            const Bond* b = model.find_bond(v.bond_label);
            if (b && b->parameter) return *b->parameter;
        }
        return v.to_string();
    };
}

inline std::string render_form(const LinearForm& form,
                               const std::function<std::string(SignalVar)>& name) {
    if (form.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [v, c] : form.coefficients()) {
        bool negative = !c.num().is_zero() && c.num().leading().second < Rat(0);
        RationalFn mag = negative ? -c : c;
        if (first)
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        if (mag.is_one())
            out += name(v);
        else
            out += mag.to_string() + "*" + name(v);
        first = false;
    }
    if (!form.constant_term().is_zero()) {
        const RationalFn& c = form.constant_term();
        bool negative = c.num().leading().second < Rat(0);
        RationalFn mag = negative ? -c : c;
        out += first ? (negative ? "-" : "") : (negative ? " - " : " + ");
        out += mag.to_string();
    }
    return out;
}

}  // namespace detail

/// Deterministic one-equation-per-line dump of a derived system:
/// element laws first, then each junction's summation and equality laws, then
/// the branch/loop couplings. Equality laws that all resolve to the strong
/// bond's signal collapse into one chain line, mirroring f2 = f1 = f3 = f4.
inline std::string render_dump(const BondGraphModel& model, const EquationSystem& system) {
    auto name = detail::dump_namer(model);
    std::ostringstream out;

    for (const auto& br : model.branches)
        for (const auto& j : br.junctions)
            for (const auto& b : j.bonds)
                for (const auto& eq : system.equations) {
                    if (eq.provenance != Provenance::Constitutive || eq.bond_label != b.label)
                        continue;
                    out << "const(" << b.label << "): " << detail::render_form(eq.lhs, name)
                        << " = ";
                    if (eq.rhs_derivative)
                        out << "d/dt[ " << detail::render_form(eq.rhs, name) << " ]";
                    else
                        out << detail::render_form(eq.rhs, name);
                    out << "\n";
                }

    for (const auto& br : model.branches)
        for (const auto& j : br.junctions) {
            std::string jid = std::to_string(br.id) + std::to_string(j.number);
            for (const auto& eq : system.equations) {
                if (eq.branch_id != br.id || eq.junction_number != j.number) continue;
                if (eq.provenance == Provenance::SummationLaw)
                    out << "sum(j=" << jid << "): " << detail::render_form(eq.lhs, name)
                        << " = 0\n";
                else if (eq.provenance == Provenance::DerivativeLaw && eq.lhs_derivative &&
                         eq.rhs.is_zero() && eq.lhs.coefficients().size() > 1)
                    out << "dsum(j=" << jid << "): d/dt[ " << detail::render_form(eq.lhs, name)
                        << " ] = 0\n";
            }
            // Chain the equalities that terminate on the strong bond's own
            // signal; expanded closures get their own lines.
            auto strong = strong_bond_position(j);
            std::vector<std::string> chained;
            LinearForm strong_var;
            if (strong)
                strong_var = LinearForm::variable(
                    {j.common_kind(), j.bonds[static_cast<std::size_t>(*strong - 1)].label});
            for (const auto& b : j.bonds)
                for (const auto& eq : system.equations) {
                    if (eq.provenance != Provenance::EqualityLaw || eq.branch_id != br.id ||
                        eq.junction_number != j.number || eq.bond_label != b.label)
                        continue;
                    if (strong && eq.rhs == strong_var)
                        chained.push_back(detail::render_form(eq.lhs, name));
                    else
                        out << "eq(j=" << jid << "): " << detail::render_form(eq.lhs, name)
                            << " = " << detail::render_form(eq.rhs, name) << "\n";
                }
            if (!chained.empty()) {
                out << "eq(j=" << jid << "): " << detail::render_form(strong_var, name);
                for (const auto& v : chained) out << " = " << v;
                out << "\n";
            }
        }

    for (const auto& eq : system.equations) {
        if (eq.provenance == Provenance::BranchCoupling)
            out << "cpl: " << detail::render_form(eq.lhs, name) << " = "
                << detail::render_form(eq.rhs, name) << "\n";
        else if (eq.provenance == Provenance::LoopCoupling)
            out << "loop: " << detail::render_form(eq.lhs, name) << " = "
                << detail::render_form(eq.rhs, name) << "\n";
    }
    return out.str();
}

}  // namespace bograph
