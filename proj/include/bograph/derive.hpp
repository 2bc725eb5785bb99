#pragma once

#include "bograph/causality.hpp"
#include "bograph/constitutive.hpp"

#include <future>

namespace bograph {

struct EquationSystem {
    std::vector<Equation> equations;
};

struct DeriveResult {
    EquationSystem system;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return !has_errors(diagnostics); }
};

/// Equality law of a junction: common effort on a 0-junction, common flow on
/// a 1-junction. Positions are 1-based.
inline Equation equality_law(const Junction& junction, int k1, int k2,
                             int branch_id = 0) {
    if (k1 == k2) throw std::invalid_argument("equality law needs two distinct bonds");
    auto check = [&](int k) {
        if (k < 1 || k > static_cast<int>(junction.bonds.size()))
            throw std::out_of_range("bond position " + std::to_string(k) + " out of range");
    };
    check(k1);
    check(k2);
    SignalKind kind = junction.common_kind();
    Equation eq;
    eq.lhs = LinearForm::variable({kind, junction.bonds[static_cast<std::size_t>(k1 - 1)].label});
    eq.rhs = LinearForm::variable({kind, junction.bonds[static_cast<std::size_t>(k2 - 1)].label});
    eq.provenance = Provenance::EqualityLaw;
    eq.branch_id = branch_id;
    eq.junction_number = junction.number;
    return eq;
}

/// Signed sum of the junction's law variable over all bonds except the last
/// two (the chain connector slots).
inline LinearForm summation_core(const Junction& junction) {
    if (junction.bonds.size() < 3)
        throw std::invalid_argument("junction " + std::to_string(junction.number) +
                                    " has too few bonds for a summation law");
    LinearForm sum;
    SignalKind kind = junction.law_kind();
    for (std::size_t k = 0; k + 2 < junction.bonds.size(); ++k) {
        const Bond& b = junction.bonds[k];
        sum.add_term({kind, b.label}, RationalFn(b.direction_sign()));
    }
    return sum;
}

/// Modulus seen when crossing this bond: the flow modulus when the stroke is
/// toward the junction, the effort modulus otherwise.
inline ParamExpr modulus_select(const Bond& bond) {
    return bond.causality.stroke_toward_junction ? bond.modulus.flow_modulus
                                                 : bond.modulus.effort_modulus;
}

namespace detail {

enum class Travel { Backward, Forward };

inline SignalKind swap_kind(SignalKind k) {
    if (k == SignalKind::Effort) return SignalKind::Flow;
    if (k == SignalKind::Flow) return SignalKind::Effort;
    return k;
}

struct PathEngine {
    const Branch& branch;
    std::vector<Diagnostic>* diags = nullptr;

    void diagnose(std::string msg, std::string rule = "derive") const {
        if (diags) diags->push_back({Severity::Error, 0, 0, std::move(msg), std::move(rule)});
    }

    const Junction& jn(int i) const { return branch.junctions[static_cast<std::size_t>(i)]; }
    int count() const { return static_cast<int>(branch.junctions.size()); }

    static LinearForm var(SignalKind kind, const Bond& b) {
        return LinearForm::variable({kind, b.label});
    }

    /// Replacement for the `kind` signal of J_g's connector toward the
    /// previous (Backward) or next (Forward) junction, expressed from the far
    /// side of the hop. Gyrators swap the chased kind across the hop.
    LinearForm chase(SignalKind kind, int g, Travel dir, int depth) const {
        if (depth > count()) {
            diagnose("causal path does not terminate at junction " +
                     std::to_string(jn(g).number));
            return LinearForm::zero();
        }
        const Junction& here = jn(g);
        if (here.bonds.size() < 2) {
            diagnose("junction " + std::to_string(here.number) + " has no connector slots");
            return LinearForm::zero();
        }
        const Bond& near = dir == Travel::Backward ? here.bonds[here.bonds.size() - 2]
                                                   : here.bonds.back();
        int h = dir == Travel::Backward ? g - 1 : g + 1;
        if (h < 0 || h >= count()) {
            diagnose("no neighbouring junction to continue the causal path");
            return LinearForm::zero();
        }
        const Junction& there = jn(h);
        int len = static_cast<int>(there.bonds.size());
        if (len < 2) {
            diagnose("junction " + std::to_string(there.number) + " has no connector slots");
            return LinearForm::zero();
        }
        int far_pos = dir == Travel::Backward ? len : len - 1;
        int onward_pos = dir == Travel::Backward ? len - 1 : len;
        bool onward_continues = dir == Travel::Backward ? h > 0 : h + 1 < count();

        SignalKind kind_there =
            near.element == ElementType::Gyrator ? swap_kind(kind) : kind;
        RationalFn m = modulus_select(near).canonical();

        auto strong = strong_bond_position(there);
        if (!strong) {
            diagnose("junction " + std::to_string(there.number) + " has no strong bond");
            return LinearForm::zero();
        }
        const Bond& far = there.bonds[static_cast<std::size_t>(far_pos - 1)];

        const bool sum_kind = kind_there == there.law_kind();
        if (sum_kind) {
            // The far variable only comes out of the junction's own summation
            // law, which requires the far bond to be the strong bond.
            if (*strong != far_pos) {
                diagnose("junction " + std::to_string(there.number) +
                         " cannot supply the summed variable of bond " +
                         std::to_string(far.label));
                return LinearForm::zero();
            }
            LinearForm inner;
            for (int c = 1; c + 2 <= len; ++c) {
                const Bond& b = there.bonds[static_cast<std::size_t>(c - 1)];
                inner.add_term({kind_there, b.label}, RationalFn(b.direction_sign()));
            }
            const Bond& onward = there.bonds[static_cast<std::size_t>(onward_pos - 1)];
            LinearForm onward_repl = onward_continues
                                         ? chase(kind_there, h, dir, depth + 1)
                                         : var(kind_there, onward);
            inner = inner + RationalFn(onward.direction_sign()) * onward_repl;
            return m * (RationalFn(-far.direction_sign()) * inner);
        }
        // Common variable of the far junction: terminate at its strong bond
        // or keep following the chain.
        if (*strong == far_pos) {
            diagnose("causal path into junction " + std::to_string(there.number) +
                     " bounces off its own strong bond");
            return LinearForm::zero();
        }
        if (*strong == onward_pos && onward_continues)
            return m * chase(kind_there, h, dir, depth + 1);
        return m * var(kind_there, there.bonds[static_cast<std::size_t>(*strong - 1)]);
    }

    /// path_select: the junction's common variable, chased across the chain
    /// when its strong bond is one of the connector slots.
    LinearForm resolve_common(SignalKind kind, int i) const {
        const Junction& here = jn(i);
        auto strong = strong_bond_position(here);
        if (!strong) {
            diagnose("junction " + std::to_string(here.number) + " has no strong bond");
            return LinearForm::zero();
        }
        int len = static_cast<int>(here.bonds.size());
        if (*strong == len && i + 1 < count()) return chase(kind, i, Travel::Forward, 0);
        if (*strong == len - 1 && i > 0) return chase(kind, i, Travel::Backward, 0);
        return var(kind, here.bonds[static_cast<std::size_t>(*strong - 1)]);
    }

    /// Position-dependent closure of the summation law.
    LinearForm sum_form(int i) const {
        const Junction& here = jn(i);
        int len = static_cast<int>(here.bonds.size());
        if (len < 3) {
            diagnose("junction " + std::to_string(here.number) +
                     " has too few bonds for a summation law");
            return LinearForm::zero();
        }
        SignalKind kind = here.law_kind();
        LinearForm sum = summation_core(here);
        const Bond& snd = here.bonds[static_cast<std::size_t>(len - 2)];
        const Bond& last = here.bonds[static_cast<std::size_t>(len - 1)];
        const bool single = count() == 1;
        if (single) {
            sum.add_term({kind, snd.label}, RationalFn(snd.direction_sign()));
            sum.add_term({kind, last.label}, RationalFn(last.direction_sign()));
        } else if (i == 0) {
            sum.add_term({kind, snd.label}, RationalFn(snd.direction_sign()));
            sum = sum + RationalFn(last.direction_sign()) * chase(kind, i, Travel::Forward, 0);
        } else if (i == count() - 1) {
            sum.add_term({kind, last.label}, RationalFn(last.direction_sign()));
            sum = sum + RationalFn(snd.direction_sign()) * chase(kind, i, Travel::Backward, 0);
        } else {
            sum = sum + RationalFn(last.direction_sign()) * chase(kind, i, Travel::Forward, 0);
            sum = sum + RationalFn(snd.direction_sign()) * chase(kind, i, Travel::Backward, 0);
        }
        return sum;
    }
};

inline const Branch& branch_at(const BondGraphModel& model, int branch_index) {
    if (branch_index < 0 || branch_index >= static_cast<int>(model.branches.size()))
        throw std::out_of_range("branch index out of range");
    return model.branches[static_cast<std::size_t>(branch_index)];
}

}  // namespace detail

/// Position of junction i in the reversed junction list (Def. 18 works on the
/// reversed list; this is the permutation inverse used by the forward path).
inline int reversed_index(int length, int i) { return length - 1 - i; }

/// Index of the junction with the given stored number, the jun_num_match
/// lookup. nullopt when absent.
inline std::optional<int> find_junction_by_number(const Branch& branch, int number) {
    for (std::size_t i = 0; i < branch.junctions.size(); ++i)
        if (branch.junctions[i].number == number) return static_cast<int>(i);
    return std::nullopt;
}

/// Backward causal path of junction i: the far-side replacement for its
/// second-last bond's law variable. Zero for the first junction; for a
/// single-junction branch it degenerates to the second-last bond's signal.
inline LinearForm backward_path(const BondGraphModel& model, int branch_index, int i,
                                std::vector<Diagnostic>* diags = nullptr) {
    const Branch& branch = detail::branch_at(model, branch_index);
    detail::PathEngine engine{branch, diags};
    const Junction& jn = branch.junctions.at(static_cast<std::size_t>(i));
    SignalKind kind = jn.law_kind();
    if (branch.junctions.size() == 1) {
        if (jn.bonds.size() < 2) return LinearForm::zero();
        return LinearForm::variable({kind, jn.bonds[jn.bonds.size() - 2].label});
    }
    if (i == 0) return LinearForm::zero();
    return engine.chase(kind, i, detail::Travel::Backward, 0);
}

/// Forward causal path of junction i, the mirror of backward_path over the
/// reversed junction list. Junction identity under the reversal is fixed by
/// the stored junction numbers.
inline LinearForm forward_path(const BondGraphModel& model, int branch_index, int i,
                               std::vector<Diagnostic>* diags = nullptr) {
    const Branch& branch = detail::branch_at(model, branch_index);
    detail::PathEngine engine{branch, diags};
    const Junction& jn = branch.junctions.at(static_cast<std::size_t>(i));
    SignalKind kind = jn.law_kind();
    const int len = static_cast<int>(branch.junctions.size());
    if (len == 1) {
        if (jn.bonds.empty()) return LinearForm::zero();
        return LinearForm::variable({kind, jn.bonds.back().label});
    }
    // Round-trip through the reversed list: the junction at reversed position
    // reversed_index(len, i) must carry this junction's number.
    auto matched = find_junction_by_number(branch, jn.number);
    if (!matched || *matched != i) {
        if (diags)
            diags->push_back({Severity::Error, 0, 0,
                              "junction number " + std::to_string(jn.number) +
                                  " is not unique in branch " + std::to_string(branch.id),
                              "derive"});
        return LinearForm::zero();
    }
    if (i == len - 1) return LinearForm::zero();
    return engine.chase(kind, i, detail::Travel::Forward, 0);
}

/// dir(last)*forward + dir(second-last)*backward; the closure a middle
/// junction adds to its summation core.
inline LinearForm causal_paths(const BondGraphModel& model, int branch_index, int i,
                               std::vector<Diagnostic>* diags = nullptr) {
    const Branch& branch = detail::branch_at(model, branch_index);
    const Junction& jn = branch.junctions.at(static_cast<std::size_t>(i));
    if (jn.bonds.size() < 2) return LinearForm::zero();
    const Bond& snd = jn.bonds[jn.bonds.size() - 2];
    const Bond& last = jn.bonds.back();
    return RationalFn(last.direction_sign()) * forward_path(model, branch_index, i, diags) +
           RationalFn(snd.direction_sign()) * backward_path(model, branch_index, i, diags);
}

/// Side-junction closure: the first junction adds its second-last bond
/// directly plus the forward path; the last junction mirrors this; middle
/// junctions contribute nothing here.
inline LinearForm search_path(const BondGraphModel& model, int branch_index, int i,
                              SignalKind kind, std::vector<Diagnostic>* diags = nullptr) {
    const Branch& branch = detail::branch_at(model, branch_index);
    const Junction& jn = branch.junctions.at(static_cast<std::size_t>(i));
    if (jn.bonds.size() < 2) return LinearForm::zero();
    const Bond& snd = jn.bonds[jn.bonds.size() - 2];
    const Bond& last = jn.bonds.back();
    const int len = static_cast<int>(branch.junctions.size());
    detail::PathEngine engine{branch, diags};
    if (i == 0) {
        LinearForm fwd = (len == 1) ? LinearForm::variable({kind, last.label})
                                    : engine.chase(kind, i, detail::Travel::Forward, 0);
        return LinearForm::term({kind, snd.label}, RationalFn(snd.direction_sign())) +
               RationalFn(last.direction_sign()) * fwd;
    }
    if (i == len - 1) {
        LinearForm bwd = engine.chase(kind, i, detail::Travel::Backward, 0);
        return LinearForm::term({kind, last.label}, RationalFn(last.direction_sign())) +
               RationalFn(snd.direction_sign()) * bwd;
    }
    return LinearForm::zero();
}

namespace detail {

inline Equation make_sum_equation(const BondGraphModel& model, int branch_index, int i,
                                  bool derivative, std::vector<Diagnostic>* diags) {
    const Branch& branch = branch_at(model, branch_index);
    PathEngine engine{branch, diags};
    Equation eq;
    eq.lhs = engine.sum_form(i);
    eq.rhs = LinearForm::zero();
    eq.lhs_derivative = derivative;
    eq.provenance = derivative ? Provenance::DerivativeLaw : Provenance::SummationLaw;
    eq.branch_id = branch.id;
    eq.junction_number = branch.junctions[static_cast<std::size_t>(i)].number;
    return eq;
}

inline Equation make_equality_equation(const BondGraphModel& model, int branch_index, int i,
                                       int k, bool derivative,
                                       std::vector<Diagnostic>* diags) {
    const Branch& branch = branch_at(model, branch_index);
    PathEngine engine{branch, diags};
    const Junction& jn = branch.junctions.at(static_cast<std::size_t>(i));
    const Bond& bond = jn.bonds.at(static_cast<std::size_t>(k - 1));
    SignalKind kind = jn.common_kind();
    Equation eq;
    eq.lhs = LinearForm::variable({kind, bond.label});
    eq.rhs = engine.resolve_common(kind, i);
    eq.lhs_derivative = derivative;
    eq.rhs_derivative = derivative;
    eq.provenance = derivative ? Provenance::DerivativeLaw : Provenance::EqualityLaw;
    eq.branch_id = branch.id;
    eq.junction_number = jn.number;
    eq.bond_label = bond.label;
    return eq;
}

}  // namespace detail

/// Equality-law closure of a storage (or any) bond against the junction's
/// causal-path selection.
inline Equation path_selection(const BondGraphModel& model, int branch_index, int i, int k,
                               std::vector<Diagnostic>* diags = nullptr) {
    return detail::make_equality_equation(model, branch_index, i, k, false, diags);
}

/// Same closure with d/dt applied to both sides (differential causality).
inline Equation path_selection_der(const BondGraphModel& model, int branch_index, int i, int k,
                                   std::vector<Diagnostic>* diags = nullptr) {
    return detail::make_equality_equation(model, branch_index, i, k, true, diags);
}

/// Closed summation law of junction i equated to zero.
inline Equation junction_sum(const BondGraphModel& model, int branch_index, int i,
                             std::vector<Diagnostic>* diags = nullptr) {
    return detail::make_sum_equation(model, branch_index, i, false, diags);
}

inline Equation junction_sum_der(const BondGraphModel& model, int branch_index, int i,
                                 std::vector<Diagnostic>* diags = nullptr) {
    return detail::make_sum_equation(model, branch_index, i, true, diags);
}

/// Free-causality dispatch for resistive bonds (stroke, junction kind) ->
/// equality-law or summation-law closure.
inline Equation resistive_path_selection(const BondGraphModel& model, int branch_index, int i,
                                         int k, std::vector<Diagnostic>* diags = nullptr) {
    const Branch& branch = detail::branch_at(model, branch_index);
    const Junction& jn = branch.junctions.at(static_cast<std::size_t>(i));
    const Bond& bond = jn.bonds.at(static_cast<std::size_t>(k - 1));
    if (bond.element != ElementType::Resistor)
        throw std::invalid_argument("bond " + std::to_string(bond.label) + " is not a resistor");
    const bool toward = bond.causality.stroke_toward_junction;
    if (!toward) {
        if (!jn.is_one_junction) return path_selection(model, branch_index, i, k, diags);
        return junction_sum(model, branch_index, i, diags);
    }
    if (!jn.is_one_junction) return junction_sum(model, branch_index, i, diags);
    return path_selection(model, branch_index, i, k, diags);
}

namespace detail {

/// Coupling equations for one physical common bond seen from two bond
/// entries. Orientation follows the strokes: the stroke-toward side receives
/// effort, the other side receives flow; a gyrator crosses the roles.
inline std::vector<Equation> pair_equations(const Bond& a, const Bond& b, Provenance prov,
                                            int branch_id, int junction_number) {
    std::vector<Equation> out;
    auto push = [&](SignalVar lhs, const Bond& scale_side, SignalVar rhs) {
        Equation eq;
        eq.lhs = LinearForm::variable(lhs);
        eq.rhs = LinearForm::term(rhs, modulus_select(scale_side));
        eq.provenance = prov;
        eq.branch_id = branch_id;
        eq.junction_number = junction_number;
        eq.bond_label = lhs.bond_label;
        out.push_back(std::move(eq));
    };
    if (a.element == ElementType::Gyrator) {
        if (a.causality.stroke_toward_junction) {
            push(a.effort_var(), a, b.flow_var());
            push(b.effort_var(), b, a.flow_var());
        } else {
            push(a.flow_var(), a, b.effort_var());
            push(b.flow_var(), b, a.effort_var());
        }
        return out;
    }
    const Bond& toward = a.causality.stroke_toward_junction ? a : b;
    const Bond& away = a.causality.stroke_toward_junction ? b : a;
    push(toward.effort_var(), toward, away.effort_var());
    push(away.flow_var(), away, toward.flow_var());
    return out;
}

}  // namespace detail

/// Equality/coupling laws for every common bond shared by a parent and a
/// child branch. The list is empty (with a note) when no pair matches.
inline std::vector<Equation> branch_coupling(const Branch& parent, const Branch& child,
                                             std::vector<Diagnostic>* diags = nullptr) {
    std::vector<Equation> out;
    if (parent.junctions.empty() || child.junctions.empty()) return out;
    for (const auto& pj : parent.junctions)
        for (const auto& pb : pj.bonds) {
            if (!pb.branch.present) continue;
            for (const auto& cj : child.junctions)
                for (const auto& cb : cj.bonds) {
                    if (!cb.branch.present) continue;
                    if (pb.branch.common_bond_label != cb.branch.common_bond_label) continue;
                    auto eqs = detail::pair_equations(pb, cb, Provenance::BranchCoupling,
                                                      parent.id, pj.number);
                    out.insert(out.end(), eqs.begin(), eqs.end());
                }
        }
    if (out.empty() && diags)
        diags->push_back({Severity::Note, 0, 0,
                          "branches " + std::to_string(parent.id) + " and " +
                              std::to_string(child.id) + " share no common bond",
                          "derive"});
    return out;
}

/// Coupling equations for a causal loop closed inside one branch: the bond at
/// (junction i, position k) is matched against every other bond of the same
/// branch carrying the same common label.
inline std::vector<Equation> causal_loop(const BondGraphModel& model, int branch_index, int i,
                                         int k, std::vector<Diagnostic>* diags = nullptr) {
    const Branch& branch = detail::branch_at(model, branch_index);
    const Junction& jn = branch.junctions.at(static_cast<std::size_t>(i));
    const Bond& bond = jn.bonds.at(static_cast<std::size_t>(k - 1));
    std::vector<Equation> out;
    if (!bond.branch.present || bond.branch.common_bond_label == 0) return out;
    for (std::size_t i1 = 0; i1 < branch.junctions.size(); ++i1) {
        const Junction& j1 = branch.junctions[i1];
        for (std::size_t n = 0; n < j1.bonds.size(); ++n) {
            if (static_cast<int>(i1) == i && static_cast<int>(n) == k - 1) continue;
            const Bond& other = j1.bonds[n];
            if (!other.branch.present ||
                other.branch.common_bond_label != bond.branch.common_bond_label)
                continue;
            auto eqs = detail::pair_equations(bond, other, Provenance::LoopCoupling, branch.id,
                                              jn.number);
            out.insert(out.end(), eqs.begin(), eqs.end());
        }
    }
    if (out.empty() && diags)
        diags->push_back({Severity::Error, 0, 0,
                          "no loop partner for bond " + std::to_string(bond.label) +
                              " (common " + std::to_string(bond.branch.common_bond_label) + ")",
                          "derive"});
    return out;
}

enum class Case { P1, P2, P3, P4, P5, P6, Uncovered };

struct CaseSelection {
    Case selected = Case::Uncovered;
    std::vector<Equation> equations;
};

/// The per-bond dispatch on (junction kind, element type, stroke).
/// P5 emits the loop couplings only when the partner lies in the same branch;
/// cross-branch partners are branch_coupling's job.
inline CaseSelection case_selection(const BondGraphModel& model, int branch_index, int i, int k,
                                    std::vector<Diagnostic>* diags = nullptr) {
    const Branch& branch = detail::branch_at(model, branch_index);
    const Junction& jn = branch.junctions.at(static_cast<std::size_t>(i));
    const Bond& bond = jn.bonds.at(static_cast<std::size_t>(k - 1));
    const bool one = jn.is_one_junction;
    const bool toward = bond.causality.stroke_toward_junction;
    const ElementType ele = bond.element;
    CaseSelection out;

    auto is_connector = [&] {
        return ele == ElementType::ConnectingBond || ele == ElementType::Transformer ||
               ele == ElementType::Gyrator;
    };

    if ((one && ele == ElementType::Inertance && !toward) ||
        (!one && ele == ElementType::Compliance && toward)) {
        out.selected = Case::P1;
        out.equations.push_back(junction_sum(model, branch_index, i, diags));
    } else if ((one && ele == ElementType::Compliance && toward) ||
               (!one && ele == ElementType::Inertance && !toward)) {
        out.selected = Case::P2;
        out.equations.push_back(path_selection(model, branch_index, i, k, diags));
    } else if (ele == ElementType::Resistor) {
        out.selected = Case::P3;
        out.equations.push_back(resistive_path_selection(model, branch_index, i, k, diags));
    } else if ((one && ele == ElementType::Compliance && !toward) ||
               (!one && ele == ElementType::Inertance && toward)) {
        out.selected = Case::P4;
        out.equations.push_back(junction_sum_der(model, branch_index, i, diags));
    } else if (((one && !toward) || (!one && toward)) && bond.branch.present && is_connector()) {
        out.selected = Case::P5;
        out.equations.push_back(junction_sum(model, branch_index, i, diags));
        // In-branch partner -> causal loop equations here and now.
        bool in_branch_partner = false;
        for (const auto& j1 : branch.junctions)
            for (const auto& b1 : j1.bonds)
                if (b1.label != bond.label && b1.branch.present &&
                    b1.branch.common_bond_label == bond.branch.common_bond_label)
                    in_branch_partner = true;
        if (in_branch_partner && bond.label == bond.branch.common_bond_label) {
            auto eqs = causal_loop(model, branch_index, i, k, diags);
            out.equations.insert(out.equations.end(), eqs.begin(), eqs.end());
        }
    } else if (ele == ElementType::ConnectingBond || ele == ElementType::Source ||
               ele == ElementType::Transformer || ele == ElementType::Gyrator) {
        out.selected = Case::P6;
    } else {
        out.selected = Case::Uncovered;
        if (diags)
            diags->push_back(
                {Severity::Error, 0, 0,
                 "no derivation case for bond " + std::to_string(bond.label) + " (junction " +
                     (one ? std::string("1") : std::string("0")) + ", element " +
                     element_keyword(ele, toward) + ", stroke " +
                     (toward ? "junction" : "element") + ")",
                 "derive"});
    }
    return out;
}

namespace detail {

struct BranchEquations {
    std::vector<Equation> equations;
    std::vector<Diagnostic> diagnostics;
};

inline BranchEquations derive_branch(const BondGraphModel& model, int branch_index) {
    BranchEquations out;
    const Branch& branch = model.branches[static_cast<std::size_t>(branch_index)];
    PathEngine engine{branch, &out.diagnostics};
    for (int i = 0; i < static_cast<int>(branch.junctions.size()); ++i) {
        const Junction& jn = branch.junctions[static_cast<std::size_t>(i)];
        bool sum_emitted = false;
        bool dsum_emitted = false;
        std::vector<Equation> junction_eqs;
        auto strong = strong_bond_position(jn);
        for (int k = 1; k <= static_cast<int>(jn.bonds.size()); ++k) {
            auto cs = case_selection(model, branch_index, i, k, &out.diagnostics);
            for (auto& eq : cs.equations) {
                if (eq.provenance == Provenance::SummationLaw) {
                    if (sum_emitted) continue;
                    sum_emitted = true;
                } else if (eq.provenance == Provenance::DerivativeLaw && !eq.rhs_derivative) {
                    if (dsum_emitted) continue;
                    dsum_emitted = true;
                }
                junction_eqs.push_back(std::move(eq));
            }
            // Sources and connectors that do not determine the junction's
            // common variable still obey its equality law.
            if (cs.selected == Case::P6 && strong && *strong != k)
                junction_eqs.push_back(
                    make_equality_equation(model, branch_index, i, k, false, &out.diagnostics));
        }
        out.equations.insert(out.equations.end(), junction_eqs.begin(), junction_eqs.end());

        // Element laws and the energy-variable derivative relations.
        for (const auto& b : jn.bonds) {
            if (b.element == ElementType::Source || b.element == ElementType::Resistor ||
                b.is_storage()) {
                Equation eq = constitutive_equation(b, jn.is_one_junction);
                eq.branch_id = branch.id;
                eq.junction_number = jn.number;
                out.equations.push_back(std::move(eq));
            }
            if (b.is_storage() && b.integral_causality()) {
                Equation der;
                der.lhs = LinearForm::variable(b.element == ElementType::Inertance
                                                   ? b.momentum_var()
                                                   : b.displacement_var());
                der.lhs_derivative = true;
                der.rhs = LinearForm::variable(b.element == ElementType::Inertance
                                                   ? b.effort_var()
                                                   : b.flow_var());
                der.provenance = Provenance::DerivativeLaw;
                der.rhs_derivative = false;
                der.branch_id = branch.id;
                der.junction_number = jn.number;
                der.bond_label = b.label;
                out.equations.push_back(std::move(der));
            }
        }
    }
    return out;
}

}  // namespace detail

/// Runs the case selection over every bond of every junction of every branch,
/// adds the element laws, derivative relations and branch couplings, and
/// returns the full equation system. Branch derivations run concurrently and
/// merge in branch order.
inline DeriveResult derive_system(const BondGraphModel& model) {
    DeriveResult result;
    if (model.branches.empty() ||
        std::all_of(model.branches.begin(), model.branches.end(),
                    [](const Branch& b) { return b.junctions.empty(); })) {
        result.diagnostics.push_back(
            {Severity::Error, 0, 0, "empty model: no junctions to derive", "derive"});
        return result;
    }
    for (auto& d : validate_labels(model)) result.diagnostics.push_back(std::move(d));
    auto causality = check_causal_completeness(model);
    for (const auto& v : causality.violations)
        result.diagnostics.push_back({Severity::Error, 0, 0, v, "derive"});
    if (has_errors(result.diagnostics)) return result;

    std::vector<std::future<detail::BranchEquations>> futures;
    futures.reserve(model.branches.size());
    for (int bi = 0; bi < static_cast<int>(model.branches.size()); ++bi)
        futures.push_back(std::async(std::launch::async, detail::derive_branch, std::cref(model),
                                     bi));
    for (auto& f : futures) {
        auto part = f.get();
        result.system.equations.insert(result.system.equations.end(), part.equations.begin(),
                                       part.equations.end());
        result.diagnostics.insert(result.diagnostics.end(), part.diagnostics.begin(),
                                  part.diagnostics.end());
    }

    // Cross-branch couplings; the parent side owns the common label.
    for (std::size_t a = 0; a < model.branches.size(); ++a)
        for (std::size_t b = a + 1; b < model.branches.size(); ++b) {
            const Branch& ba = model.branches[a];
            const Branch& bb = model.branches[b];
            bool any_pair = false;
            for (const auto& ja : ba.junctions)
                for (const auto& bond_a : ja.bonds)
                    if (bond_a.branch.present)
                        for (const auto& jb : bb.junctions)
                            for (const auto& bond_b : jb.bonds)
                                if (bond_b.branch.present &&
                                    bond_b.branch.common_bond_label ==
                                        bond_a.branch.common_bond_label)
                                    any_pair = true;
            if (!any_pair) continue;
            bool a_is_parent = false;
            for (const auto& ja : ba.junctions)
                for (const auto& bond_a : ja.bonds)
                    if (bond_a.branch.present && bond_a.label == bond_a.branch.common_bond_label)
                        a_is_parent = true;
            auto eqs = a_is_parent ? branch_coupling(ba, bb, &result.diagnostics)
                                   : branch_coupling(bb, ba, &result.diagnostics);
            result.system.equations.insert(result.system.equations.end(), eqs.begin(), eqs.end());
        }
    return result;
}

}  // namespace bograph
