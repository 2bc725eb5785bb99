#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bograph {

/// Series RLC circuit driven by a voltage source, the single 1-junction
/// textbook model.
inline const char* corpus_rlc() {
    return R"(# Series RLC circuit: Se-1-I/C/R, one 1-junction
graph "rlc"
param V
param L
param C
param R
branch 1
  junction 1 kind=1
    bond 111 element=se stroke=junction power=in param=V
    bond 112 element=i stroke=element power=out param=L
    bond 113 element=c stroke=junction power=out param=C
    bond 114 element=r stroke=junction power=out param=R
  end
end
)";
}

/// Two-branch model: a driven 1-junction feeding a 0-junction through a
/// transformer, a second source loop, and a resistive-compliant child branch
/// hanging off the 0-junction via common bond 131/212.
inline const char* corpus_fig6() {
    return R"(# Two-branch model with transformer and child branch on the 0-junction
graph "fig6"
param E1
param E2
param L1
param L2
param R1
param R2
param C2
param n
branch 1
  junction 1 kind=1
    bond 111 element=i stroke=element power=out param=L1
    bond 112 element=r stroke=junction power=out param=R1
    bond 113 element=se stroke=junction power=in param=E1
    bond 114 element=tf stroke=junction power=out modulus=1/n,n
  end
  junction 3 kind=0
    bond 131 element=bond stroke=junction power=out branch=131
    bond 132 element=tf stroke=element power=in modulus=n,1/n
    bond 133 element=bond stroke=element power=out
  end
  junction 4 kind=1
    bond 141 element=i stroke=element power=out param=L2
    bond 142 element=bond stroke=junction power=in
    bond 143 element=se stroke=junction power=in param=E2
  end
end
branch 2
  junction 1 kind=1
    bond 211 element=c stroke=junction power=out param=C2
    bond 212 element=bond stroke=element power=in branch=131
    bond 213 element=r stroke=junction power=out param=R2
  end
end
)";
}

/// Index finger flexion/extension drive train of the prosthetic hand: motor
/// electrical loop, gyrator, motor inertia with damping, gear transformer,
/// frame inertia, and the spring-damper finger joint.
inline const char* corpus_hand_index() {
    return R"(# Index finger flexion/extension: Se-1-GY-1-TF-0-1 drive train
graph "hand-index"
param Ra_4
param Motor_4
param Jm_4
param Dm_4
param Geer_4
param J_4
param D_4
param K_2
param V_4
branch 4
  junction 1 kind=1
    bond 411 element=r stroke=element power=out param=Ra_4
    bond 412 element=se stroke=junction power=in param=V_4
    bond 413 element=gy stroke=junction power=out modulus=1/Motor_4,Motor_4
  end
  junction 2 kind=1
    bond 421 element=i stroke=element power=out param=Jm_4
    bond 422 element=r stroke=junction power=out param=Dm_4
    bond 423 element=gy stroke=junction power=in modulus=1/Motor_4,Motor_4
    bond 424 element=tf stroke=junction power=out modulus=1/Geer_4,Geer_4
  end
  junction 3 kind=0
    bond 431 element=i stroke=element power=out param=J_4
    bond 432 element=tf stroke=element power=in modulus=Geer_4,1/Geer_4
    bond 433 element=bond stroke=junction power=out
  end
  junction 4 kind=1
    bond 441 element=c stroke=junction power=out param=K_2
    bond 442 element=bond stroke=element power=in
    bond 443 element=r stroke=junction power=out param=D_4
  end
end
)";
}

inline std::vector<std::string> corpus_names() { return {"rlc", "fig6", "hand-index"}; }

/// DSL text of a builtin example. When BOGRAPH_CORPUS_DIR is set, NAME.bg in
/// that directory takes precedence over the builtin text.
inline std::optional<std::string> corpus_text(const std::string& name) {
    if (const char* dir = std::getenv("BOGRAPH_CORPUS_DIR")) {
        std::ifstream in(std::string(dir) + "/" + name + ".bg");
        if (in) {
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        }
    }
    if (name == "rlc") return corpus_rlc();
    if (name == "fig6") return corpus_fig6();
    if (name == "hand-index") return corpus_hand_index();
    return std::nullopt;
}

}  // namespace bograph
