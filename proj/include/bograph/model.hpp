#pragma once

#include "bograph/signals.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bograph {

/// Element codes follow the paper's fixed integer assignment and are stable
/// across serialization.
enum class ElementType : int {
    ConnectingBond = 0,
    Source = 1,
    Inertance = 2,
    Compliance = 3,
    Resistor = 4,
    Transformer = 5,
    Gyrator = 6,
};

inline const char* element_keyword(ElementType e, bool stroke_toward_junction) {
    switch (e) {
        case ElementType::ConnectingBond: return "bond";
        case ElementType::Source: return stroke_toward_junction ? "se" : "sf";
        case ElementType::Inertance: return "i";
        case ElementType::Compliance: return "c";
        case ElementType::Resistor: return "r";
        case ElementType::Transformer: return "tf";
        case ElementType::Gyrator: return "gy";
    }
    return "?";
}

struct Causality {
    bool stroke_toward_junction = false;
    auto operator<=>(const Causality&) const = default;
};

struct PowerDirection {
    bool toward_junction = false;
    auto operator<=>(const PowerDirection&) const = default;
};

/// Branch linkage of a bond. `common_bond_label` is the parent-side label of
/// the common bond shared by both branches; 0 when absent.
struct BranchRef {
    bool present = false;
    int common_bond_label = 0;
    auto operator<=>(const BranchRef&) const = default;
};

/// [effort modulus, flow modulus] of a two-port. Both exactly 1 for anything
/// that is not a transformer or gyrator.
struct Modulus {
    ParamExpr effort_modulus = ParamExpr::one();
    ParamExpr flow_modulus = ParamExpr::one();
    friend bool operator==(const Modulus& a, const Modulus& b) {
        return a.effort_modulus == b.effort_modulus && a.flow_modulus == b.flow_modulus;
    }
};

struct Bond {
    int label = 0;  // pqr encoding: branch p, junction q, position r
    Causality causality;
    PowerDirection direction;
    BranchRef branch;
    ElementType element = ElementType::ConnectingBond;
    Modulus modulus;
    std::optional<std::string> parameter;
    Rat p0{0};
    Rat q0{0};

    SignalVar effort_var() const { return {SignalKind::Effort, label}; }
    SignalVar flow_var() const { return {SignalKind::Flow, label}; }
    SignalVar momentum_var() const { return {SignalKind::Momentum, label}; }
    SignalVar displacement_var() const { return {SignalKind::Displacement, label}; }
    SignalVar input_var() const { return {SignalKind::Input, label}; }

    bool is_two_port() const {
        return element == ElementType::Transformer || element == ElementType::Gyrator;
    }
    bool is_connector_type() const {
        return element == ElementType::ConnectingBond || is_two_port();
    }
    bool is_storage() const {
        return element == ElementType::Inertance || element == ElementType::Compliance;
    }

    /// Integral causality: I receives effort (stroke away from the junction),
    /// C receives flow (stroke toward the junction).
    bool integral_causality() const {
        if (element == ElementType::Inertance) return !causality.stroke_toward_junction;
        if (element == ElementType::Compliance) return causality.stroke_toward_junction;
        return false;
    }

    /// Direction sign of the power half-arrow: +1 toward the junction.
    Rat direction_sign() const { return direction.toward_junction ? Rat(1) : Rat(-1); }

    friend bool operator==(const Bond&, const Bond&) = default;
};

struct Junction {
    int number = 0;              // the q digit of this junction's bond labels
    bool is_one_junction = false;  // true = 1-junction, false = 0-junction
    std::vector<Bond> bonds;     // anti-clockwise; chain connectors last

    /// The effort-summing junction sums efforts (1-junction); the
    /// flow-summing junction sums flows (0-junction).
    SignalKind law_kind() const { return is_one_junction ? SignalKind::Effort : SignalKind::Flow; }
    /// Variable every bond of this junction shares.
    SignalKind common_kind() const { return is_one_junction ? SignalKind::Flow : SignalKind::Effort; }

    friend bool operator==(const Junction&, const Junction&) = default;
};

struct Branch {
    int id = 0;
    std::vector<Junction> junctions;
    friend bool operator==(const Branch&, const Branch&) = default;
};

struct BondGraphModel {
    std::string name;
    /// Declared parameters with optional default values, in declaration order.
    std::vector<std::pair<std::string, std::optional<Rat>>> parameters;
    std::vector<Branch> branches;

    bool has_parameter(const std::string& n) const {
        for (const auto& [name_, _] : parameters)
            if (name_ == n) return true;
        return false;
    }

    const Bond* find_bond(int label) const {
        for (const auto& br : branches)
            for (const auto& j : br.junctions)
                for (const auto& b : j.bonds)
                    if (b.label == label) return &b;
        return nullptr;
    }

    friend bool operator==(const BondGraphModel&, const BondGraphModel&) = default;
};

/// Composes the pqr label from branch p, junction q and position r.
inline int compose_label(int p, int q, int r) {
    std::string s = std::to_string(p) + std::to_string(q) + std::to_string(r);
    return std::stoi(s);
}

/// Checks that `label` decodes as (p, q, r) in its enclosing context: the
/// last digit is the position and the prefix must match branch and junction.
/// Positions run 1..9, so a junction holds at most nine bonds.
inline std::optional<int> decode_position(int label, int branch_id, int junction_number) {
    std::string s = std::to_string(label);
    std::string prefix = std::to_string(branch_id) + std::to_string(junction_number);
    if (s.size() != prefix.size() + 1) return std::nullopt;
    if (s.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    int r = s.back() - '0';
    if (r < 1) return std::nullopt;
    return r;
}

}  // namespace bograph
