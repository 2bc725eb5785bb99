#pragma once

#include "bograph/derive.hpp"

#include <set>

namespace bograph {

template <typename T>
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Mat() = default;
    Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
    T& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    friend bool operator==(const Mat&, const Mat&) = default;
};

/// Symbolic state-space model x' = A x + B u with exact coefficient entries.
struct StateSpaceModel {
    std::vector<SignalVar> states;  // Momentum/Displacement vars, (branch, junction, position) order
    std::vector<SignalVar> inputs;  // Input vars of the source bonds
    Mat<RationalFn> A;
    Mat<RationalFn> B;
};

struct NumericMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    NumericMatrix() = default;
    NumericMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const double& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

template <typename T>
struct Result {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return value.has_value() && !has_errors(diagnostics); }
};

/// One Momentum var per integral-causal inertance, one Displacement var per
/// integral-causal compliance, in (branch, junction, position) order.
/// Differential-causal storage rejects the model for state-space assembly.
inline Result<std::vector<SignalVar>> state_variables(const BondGraphModel& model) {
    Result<std::vector<SignalVar>> out;
    std::vector<SignalVar> states;
    for (const auto& br : model.branches)
        for (const auto& j : br.junctions)
            for (const auto& b : j.bonds) {
                if (!b.is_storage()) continue;
                if (!b.integral_causality()) {
                    out.diagnostics.push_back(
                        {Severity::Error, 0, 0,
                         "storage bond " + std::to_string(b.label) +
                             " has differential causality; the model is a DAE",
                         "dae"});
                    continue;
                }
                states.push_back(b.element == ElementType::Inertance ? b.momentum_var()
                                                                     : b.displacement_var());
            }
    if (!has_errors(out.diagnostics)) out.value = std::move(states);
    return out;
}

/// Input vars of every source bond, same ordering convention as the states.
inline std::vector<SignalVar> input_variables(const BondGraphModel& model) {
    std::vector<SignalVar> inputs;
    for (const auto& br : model.branches)
        for (const auto& j : br.junctions)
            for (const auto& b : j.bonds)
                if (b.element == ElementType::Source) inputs.push_back(b.input_var());
    return inputs;
}

namespace detail {

/// Extracts variable definitions from the equation system. Summation laws
/// define the single variable they contain that nothing else defines.
inline bool build_definers(const EquationSystem& system, const std::set<SignalVar>& keep,
                           std::map<SignalVar, LinearForm>& defs,
                           std::vector<Diagnostic>& diags) {
    std::vector<const Equation*> sums;
    for (const auto& eq : system.equations) {
        if (eq.lhs_derivative || eq.rhs_derivative) continue;
        if (eq.provenance == Provenance::SummationLaw) {
            sums.push_back(&eq);
            continue;
        }
        // Directly oriented definitions: single lhs variable with unit
        // coefficient.
        if (eq.lhs.coefficients().size() == 1 && eq.lhs.constant_term().is_zero()) {
            const auto& [v, c] = *eq.lhs.coefficients().begin();
            if (c.is_one() && !keep.count(v) && !defs.count(v)) defs.emplace(v, eq.rhs);
        }
    }
    // A summation law defines whichever of its variables nothing else
    // defines. Sums may feed each other through coupling bonds, so iterate to
    // a fixpoint instead of trusting emission order.
    std::vector<bool> done(sums.size(), false);
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t s = 0; s < sums.size(); ++s) {
            if (done[s]) continue;
            LinearForm form = sums[s]->residual();
            std::vector<SignalVar> unresolved;
            for (const auto& [v, c] : form.coefficients())
                if (!defs.count(v) && !keep.count(v)) unresolved.push_back(v);
            if (unresolved.size() != 1) continue;
            SignalVar target = unresolved.front();
            RationalFn coef = form.coefficient(target);
            LinearForm rest = form.substituted(target, LinearForm::zero());
            // coef * target + rest = 0  ->  target = -(1/coef) * rest
            defs.emplace(target, (RationalFn(Rat(-1)) / coef) * rest);
            done[s] = true;
            progress = true;
        }
    }
    bool ok = true;
    for (std::size_t s = 0; s < sums.size(); ++s) {
        if (done[s]) continue;
        diags.push_back({Severity::Error, 0, 0,
                         "summation law of junction " + std::to_string(sums[s]->branch_id) +
                             std::to_string(sums[s]->junction_number) +
                             " does not determine exactly one free variable",
                         "derive"});
        ok = false;
    }
    return ok;
}

}  // namespace detail

/// Gaussian elimination by substitution: every effort/flow variable is
/// replaced through the causal-stroke definitions until each state derivative
/// is a combination of states and inputs only.
inline Result<std::vector<Equation>> reduce_to_state_form(const EquationSystem& system,
                                                          const std::vector<SignalVar>& states,
                                                          const std::vector<SignalVar>& inputs) {
    Result<std::vector<Equation>> out;
    std::set<SignalVar> keep(states.begin(), states.end());
    keep.insert(inputs.begin(), inputs.end());

    std::map<SignalVar, LinearForm> defs;
    if (!detail::build_definers(system, keep, defs, out.diagnostics)) return out;

    std::vector<Equation> reduced;
    for (SignalVar state : states) {
        const Equation* seed = nullptr;
        for (const auto& eq : system.equations)
            if (eq.provenance == Provenance::DerivativeLaw && eq.lhs_derivative &&
                !eq.rhs_derivative && eq.lhs.coefficients().size() == 1 &&
                eq.lhs.coefficients().begin()->first == state)
                seed = &eq;
        if (!seed) {
            out.diagnostics.push_back({Severity::Error, 0, 0,
                                       "no derivative relation for state " + state.to_string(),
                                       "derive"});
            return out;
        }
        LinearForm expr = seed->rhs;
        const std::size_t max_passes = defs.size() + 2;
        std::size_t pass = 0;
        while (true) {
            std::vector<SignalVar> pending;
            for (const auto& [v, c] : expr.coefficients())
                if (!keep.count(v)) pending.push_back(v);
            if (pending.empty()) break;
            if (++pass > max_passes) {
                out.diagnostics.push_back(
                    {Severity::Error, 0, 0,
                     "algebraic loop: substitution did not terminate for state " +
                         state.to_string(),
                     "loop"});
                return out;
            }
            for (SignalVar v : pending) {
                auto it = defs.find(v);
                if (it == defs.end()) {
                    out.diagnostics.push_back({Severity::Error, 0, 0,
                                               "underdetermined variable " + v.to_string() +
                                                   " while reducing " + state.to_string(),
                                               "derive"});
                    return out;
                }
                expr = expr.substituted(v, it->second);
            }
        }
        Equation eq;
        eq.lhs = LinearForm::variable(state);
        eq.lhs_derivative = true;
        eq.rhs = std::move(expr);
        eq.provenance = Provenance::DerivativeLaw;
        eq.bond_label = state.bond_label;
        reduced.push_back(std::move(eq));
    }
    out.value = std::move(reduced);
    return out;
}

/// Reads the A and B matrices off the reduced state equations.
inline Result<StateSpaceModel> assemble(const std::vector<Equation>& state_equations,
                                        const std::vector<SignalVar>& states,
                                        const std::vector<SignalVar>& inputs) {
    Result<StateSpaceModel> out;
    if (states.empty()) {
        out.diagnostics.push_back({Severity::Error, 0, 0,
                                   "degenerate model: no storage states to assemble", "dae"});
        return out;
    }
    if (state_equations.size() != states.size()) {
        out.diagnostics.push_back(
            {Severity::Error, 0, 0, "state equation count does not match state count", "derive"});
        return out;
    }
    StateSpaceModel ssm;
    ssm.states = states;
    ssm.inputs = inputs;
    ssm.A = Mat<RationalFn>(states.size(), states.size());
    ssm.B = Mat<RationalFn>(states.size(), inputs.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Equation& eq = state_equations[i];
        if (!eq.rhs.constant_term().is_zero()) {
            out.diagnostics.push_back({Severity::Error, 0, 0,
                                       "state equation for " + states[i].to_string() +
                                           " has a non-homogeneous constant term",
                                       "derive"});
            return out;
        }
        for (const auto& [v, c] : eq.rhs.coefficients()) {
            auto si = std::find(states.begin(), states.end(), v);
            if (si != states.end()) {
                ssm.A.at(i, static_cast<std::size_t>(si - states.begin())) = c;
                continue;
            }
            auto ui = std::find(inputs.begin(), inputs.end(), v);
            if (ui != inputs.end()) {
                ssm.B.at(i, static_cast<std::size_t>(ui - inputs.begin())) = c;
                continue;
            }
            out.diagnostics.push_back({Severity::Error, 0, 0,
                                       "leftover variable " + v.to_string() +
                                           " in the state equation for " + states[i].to_string(),
                                       "derive"});
            return out;
        }
    }
    out.value = std::move(ssm);
    return out;
}

/// Full pipeline: derive, pick states/inputs, reduce, assemble.
inline Result<StateSpaceModel> build_state_space(const BondGraphModel& model) {
    Result<StateSpaceModel> out;
    auto derived = derive_system(model);
    out.diagnostics = derived.diagnostics;
    if (!derived.ok()) return out;
    auto states = state_variables(model);
    out.diagnostics.insert(out.diagnostics.end(), states.diagnostics.begin(),
                           states.diagnostics.end());
    if (!states.ok()) return out;
    auto inputs = input_variables(model);
    auto reduced = reduce_to_state_form(derived.system, *states.value, inputs);
    out.diagnostics.insert(out.diagnostics.end(), reduced.diagnostics.begin(),
                           reduced.diagnostics.end());
    if (!reduced.ok()) return out;
    auto ssm = assemble(*reduced.value, *states.value, inputs);
    out.diagnostics.insert(out.diagnostics.end(), ssm.diagnostics.begin(),
                           ssm.diagnostics.end());
    if (!ssm.ok()) return out;
    out.value = std::move(ssm.value);
    return out;
}

/// Exact rational evaluation of (A, B) under a full parameter binding, then
/// conversion to double precision.
inline Result<std::pair<NumericMatrix, NumericMatrix>> instantiate(
    const StateSpaceModel& ssm, const std::map<std::string, Rat>& bindings) {
    Result<std::pair<NumericMatrix, NumericMatrix>> out;
    auto binding = [&](const std::string& name) -> Rat {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw EvalError(EvalError::Kind::MissingParameter, name);
        return it->second;
    };
    auto eval_matrix = [&](const Mat<RationalFn>& m, NumericMatrix& numeric) {
        numeric = NumericMatrix(m.rows, m.cols);
        for (std::size_t r = 0; r < m.rows; ++r)
            for (std::size_t c = 0; c < m.cols; ++c)
                numeric.at(r, c) = to_double(m.at(r, c).evaluate(binding));
    };
    try {
        NumericMatrix a, b;
        eval_matrix(ssm.A, a);
        eval_matrix(ssm.B, b);
        out.value = {std::move(a), std::move(b)};
    } catch (const EvalError& ex) {
        out.diagnostics.push_back({Severity::Error, 0, 0, ex.what(),
                                   ex.kind == EvalError::Kind::MissingParameter ? "binding"
                                                                                : "div0"});
    }
    return out;
}

}  // namespace bograph
