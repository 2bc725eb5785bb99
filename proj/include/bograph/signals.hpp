#pragma once

#include "bograph/param_expr.hpp"

#include <compare>
#include <map>

namespace bograph {

enum class SignalKind { Effort, Flow, Momentum, Displacement, Input };

inline char signal_prefix(SignalKind k) {
    switch (k) {
        case SignalKind::Effort: return 'e';
        case SignalKind::Flow: return 'f';
        case SignalKind::Momentum: return 'p';
        case SignalKind::Displacement: return 'q';
        case SignalKind::Input: return 'u';
    }
    return '?';
}

/// One time signal of one bond: e(112), f(112), p(112), q(113) or u(111).
struct SignalVar {
    SignalKind kind;
    int bond_label;

    auto operator<=>(const SignalVar&) const = default;

    std::string to_string() const {
        return std::string(1, signal_prefix(kind)) + "(" + std::to_string(bond_label) + ")";
    }
};

/// Exact linear combination of signal variables plus a constant term.
/// Zero coefficients are never stored.
class LinearForm {
public:
    LinearForm() = default;

    static LinearForm variable(SignalVar v) {
        LinearForm f;
        f.coeffs_.emplace(v, RationalFn(Rat(1)));
        return f;
    }
    static LinearForm term(SignalVar v, const ParamExpr& coefficient) {
        return term(v, coefficient.canonical());
    }
    static LinearForm term(SignalVar v, RationalFn coefficient) {
        LinearForm f;
        if (!coefficient.is_zero()) f.coeffs_.emplace(v, std::move(coefficient));
        return f;
    }
    static LinearForm constant(RationalFn c) {
        LinearForm f;
        f.constant_ = std::move(c);
        return f;
    }
    static LinearForm zero() { return LinearForm(); }

    const std::map<SignalVar, RationalFn>& coefficients() const { return coeffs_; }
    const RationalFn& constant_term() const { return constant_; }

    bool is_zero() const { return coeffs_.empty() && constant_.is_zero(); }

    /// Coefficient of `v`, zero when absent.
    RationalFn coefficient(SignalVar v) const {
        auto it = coeffs_.find(v);
        return it == coeffs_.end() ? RationalFn() : it->second;
    }

    bool contains(SignalVar v) const { return coeffs_.count(v) != 0; }

    void add_term(SignalVar v, const RationalFn& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = coeffs_.emplace(v, c);
        if (!inserted) {
            it->second = it->second + c;
            if (it->second.is_zero()) coeffs_.erase(it);
        }
    }

    friend LinearForm operator+(const LinearForm& a, const LinearForm& b) {
        LinearForm out = a;
        for (const auto& [v, c] : b.coeffs_) out.add_term(v, c);
        out.constant_ = out.constant_ + b.constant_;
        return out;
    }

    friend LinearForm operator-(const LinearForm& a) {
        LinearForm out;
        for (const auto& [v, c] : a.coeffs_) out.coeffs_.emplace(v, -c);
        out.constant_ = -a.constant_;
        return out;
    }

    friend LinearForm operator-(const LinearForm& a, const LinearForm& b) { return a + (-b); }

    friend LinearForm operator*(const RationalFn& k, const LinearForm& a) {
        LinearForm out;
        if (k.is_zero()) return out;
        for (const auto& [v, c] : a.coeffs_) out.coeffs_.emplace(v, k * c);
        out.constant_ = k * a.constant_;
        return out;
    }

    /// Substitutes `v := replacement` once.
    LinearForm substituted(SignalVar v, const LinearForm& replacement) const {
        auto it = coeffs_.find(v);
        if (it == coeffs_.end()) return *this;
        RationalFn c = it->second;
        LinearForm out = *this;
        out.coeffs_.erase(v);
        return out + c * replacement;
    }

    friend bool operator==(const LinearForm&, const LinearForm&) = default;

    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [v, c] : coeffs_) {
            append_term(out, c, v.to_string(), first);
            first = false;
        }
        if (!constant_.is_zero()) append_term(out, constant_, "", first);
        return out;
    }

private:
    static void append_term(std::string& out, const RationalFn& coef, const std::string& var,
                            bool first) {
        // Pull the sign of the numerator out front; the canonical denominator
        // is always positive.
        bool negative = !coef.num().is_zero() && coef.num().leading().second < Rat(0);
        RationalFn mag = negative ? -coef : coef;
        if (first)
            out += negative ? "-" : "";
        else
            out += negative ? " - " : " + ";
        if (var.empty()) {
            out += mag.to_string();
        } else if (mag.is_one()) {
            out += var;
        } else {
            out += mag.to_string() + "*" + var;
        }
    }

    std::map<SignalVar, RationalFn> coeffs_;
    RationalFn constant_;
};

/// linform_add / linform_scale as free functions for symmetry with the
/// operator forms.
inline LinearForm linform_add(const LinearForm& a, const LinearForm& b) { return a + b; }
inline LinearForm linform_scale(const ParamExpr& k, const LinearForm& a) {
    return k.canonical() * a;
}

enum class Provenance {
    EqualityLaw,
    SummationLaw,
    Constitutive,
    BranchCoupling,
    LoopCoupling,
    DerivativeLaw,
};

inline const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::EqualityLaw: return "equality";
        case Provenance::SummationLaw: return "summation";
        case Provenance::Constitutive: return "constitutive";
        case Provenance::BranchCoupling: return "branch-coupling";
        case Provenance::LoopCoupling: return "loop-coupling";
        case Provenance::DerivativeLaw: return "derivative";
    }
    return "?";
}

/// lhs = rhs, with optional d/dt applied to either side. The derivative flag
/// is only meaningful for Momentum/Displacement/Effort/Flow variables.
struct Equation {
    LinearForm lhs;
    LinearForm rhs;
    bool lhs_derivative = false;
    bool rhs_derivative = false;
    Provenance provenance = Provenance::Constitutive;

    // Where the equation came from, for rendering and deterministic ordering.
    int branch_id = 0;
    int junction_number = 0;
    int bond_label = 0;

    friend bool operator==(const Equation&, const Equation&) = default;

    /// lhs - rhs as a single form; only valid when no derivative flag is set.
    LinearForm residual() const { return lhs - rhs; }
};

}  // namespace bograph
