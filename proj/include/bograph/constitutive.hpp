#pragma once

#include "bograph/model.hpp"

namespace bograph {

struct IllegalCausality : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline ParamExpr required_param(const Bond& bond) {
    if (!bond.parameter)
        throw IllegalCausality("bond " + std::to_string(bond.label) + " has no parameter name");
    return ParamExpr::param(*bond.parameter);
}

}  // namespace detail

/// Element law of a one-port bond, oriented by its causality.
///
///   Source     e = E (effort source) or f = F (flow source)
///   Resistor   e = R*f (flow input) or f = (1/R)*e
///   Compliance e = q/C (integral) or f = C*de/dt (differential)
///   Inertance  f = p/L (integral) or e = L*df/dt (differential)
///
/// Junctions and two-ports have no standalone law here; their behaviour is
/// carried by the junction laws and the coupling equations.
inline Equation constitutive_equation(const Bond& bond, bool junction_is_one) {
    (void)junction_is_one;  // the element laws do not depend on the junction kind
    Equation eq;
    eq.provenance = Provenance::Constitutive;
    eq.bond_label = bond.label;
    const bool toward = bond.causality.stroke_toward_junction;
    switch (bond.element) {
        case ElementType::Source:
            // The stroke determines the source kind: an effort source always
            // imposes effort on its junction.
            eq.lhs = LinearForm::variable(toward ? bond.effort_var() : bond.flow_var());
            eq.rhs = LinearForm::variable(bond.input_var());
            return eq;
        case ElementType::Resistor: {
            ParamExpr r = detail::required_param(bond);
            if (toward) {
                eq.lhs = LinearForm::variable(bond.effort_var());
                eq.rhs = LinearForm::term(bond.flow_var(), r);
            } else {
                eq.lhs = LinearForm::variable(bond.flow_var());
                eq.rhs = LinearForm::term(bond.effort_var(), ParamExpr::one() / r);
            }
            return eq;
        }
        case ElementType::Compliance: {
            ParamExpr c = detail::required_param(bond);
            if (toward) {
                eq.lhs = LinearForm::variable(bond.effort_var());
                eq.rhs = LinearForm::term(bond.displacement_var(), ParamExpr::one() / c);
            } else {
                eq.lhs = LinearForm::variable(bond.flow_var());
                eq.rhs = LinearForm::term(bond.effort_var(), c);
                eq.rhs_derivative = true;
            }
            return eq;
        }
        case ElementType::Inertance: {
            ParamExpr l = detail::required_param(bond);
            if (!toward) {
                eq.lhs = LinearForm::variable(bond.flow_var());
                eq.rhs = LinearForm::term(bond.momentum_var(), ParamExpr::one() / l);
            } else {
                eq.lhs = LinearForm::variable(bond.effort_var());
                eq.rhs = LinearForm::term(bond.flow_var(), l);
                eq.rhs_derivative = true;
            }
            return eq;
        }
        default:
            throw IllegalCausality("element '" +
                                   std::string(element_keyword(bond.element, toward)) +
                                   "' has no constitutive equation");
    }
}

}  // namespace bograph
