#pragma once

#include "bograph/parser.hpp"

#include <map>

namespace bograph {

/// Position (1-based) of the bond whose stroke orientation matches `toward`,
/// scanning from the highest position down. nullopt when no bond matches.
inline std::optional<int> strong_bond(const Junction& junction, bool toward) {
    for (int k = static_cast<int>(junction.bonds.size()); k >= 1; --k)
        if (junction.bonds[static_cast<std::size_t>(k - 1)].causality.stroke_toward_junction ==
            toward)
            return k;
    return std::nullopt;
}

/// Position of the junction's strong bond: the single flow-determining bond
/// of a 1-junction (stroke away) or effort-determining bond of a 0-junction
/// (stroke toward). Unique on a causally complete junction.
inline std::optional<int> strong_bond_position(const Junction& junction) {
    return strong_bond(junction, !junction.is_one_junction);
}

struct CausalityReport {
    bool complete = false;
    /// (branch id, junction number) -> strong bond label.
    std::map<std::pair<int, int>, int> strong_bonds;
    std::vector<int> differential_storage_bonds;
    std::vector<std::string> violations;
};

/// Verifies that every junction determines its common variable exactly once
/// and that connector strokes agree across junction and branch boundaries.
/// Storage bonds in differential causality are listed, not rejected.
inline CausalityReport check_causal_completeness(const BondGraphModel& model) {
    CausalityReport report;
    for (const auto& br : model.branches) {
        for (const auto& j : br.junctions) {
            int determiners = 0;
            int strong_label = 0;
            const bool wanted = !j.is_one_junction;  // stroke orientation of the strong bond
            for (const auto& b : j.bonds) {
                if (b.causality.stroke_toward_junction == wanted) {
                    ++determiners;
                    strong_label = b.label;
                }
                if (b.element == ElementType::Inertance && b.causality.stroke_toward_junction)
                    report.differential_storage_bonds.push_back(b.label);
                if (b.element == ElementType::Compliance && !b.causality.stroke_toward_junction)
                    report.differential_storage_bonds.push_back(b.label);
            }
            const char* role = j.is_one_junction ? "flow" : "effort";
            if (determiners == 0)
                report.violations.push_back("junction " + std::to_string(br.id) +
                                            std::to_string(j.number) + ": no " + role +
                                            "-determining bond");
            else if (determiners > 1)
                report.violations.push_back("junction " + std::to_string(br.id) +
                                            std::to_string(j.number) + ": " +
                                            std::to_string(determiners) + " " + role +
                                            "-determining bonds");
            else
                report.strong_bonds[{br.id, j.number}] = strong_label;
        }
        // Chain connector strokes must describe one physical stroke.
        for (std::size_t i = 0; i + 1 < br.junctions.size(); ++i) {
            const Junction& a = br.junctions[i];
            const Junction& b = br.junctions[i + 1];
            if (a.bonds.empty() || b.bonds.size() < 2) continue;
            const Bond& near = a.bonds.back();
            const Bond& far = b.bonds[b.bonds.size() - 2];
            std::string why;
            if (!detail::connector_pair_consistent(near, far, why))
                report.violations.push_back("connector " + std::to_string(near.label) + "/" +
                                            std::to_string(far.label) + ": " + why);
        }
    }
    report.complete = report.violations.empty();
    return report;
}

}  // namespace bograph
