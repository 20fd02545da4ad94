#pragma once
//
// Constant-scale knobs and the named profiles that bundle them.
//
// The literal constants of the sample-size schedules (20000, 4000, the
// factors of 100) are analysis artifacts; at desk scale they mean millions of
// rounds. Every schedule multiplies its constant by a knob so the algorithm's
// structure is untouched while the absolute sizes shrink.
//

#include "amdl/error.hpp"

#include <charconv>
#include <string>
#include <string_view>

namespace amdl {

struct Knobs {
    double cT = 1.0;       // Hedge rounds
    double cT1 = 1.0;      // Hedge auxiliary (ERM store) sample size
    double cEta = 1.0;     // Hedge step size
    double cEps1 = 1.0;    // Hedge auxiliary excess error
    double cN0 = 1.0;      // agreement-region sample size of the small-eps stage
    double cN = 1.0;       // RPU batch size
    double cBatches = 1.0; // RPU batch count
    double cNaive = 1.0;   // naive per-distribution ERM sample size
    bool dfFinalEpsN = false; // final distribution-free epoch targets eps_n instead of eps

    void validate() const {
        for (double v : {cT, cT1, cEta, cEps1, cN0, cN, cBatches, cNaive})
            require(v > 0.0, "knobs must be positive");
    }
};

/// Literal constants.
inline Knobs fidelityProfile() { return {}; }

/// Scaled constants used by the acceptance suites and the default CLI runs.
inline Knobs deskProfile() {
    Knobs k;
    k.cEps1 = 25.0;
    k.cEta = 50.0;
    k.cT = 2e-5;
    k.cT1 = 1e-3;
    k.cN0 = 0.1;
    k.cN = 0.05;
    k.cBatches = 0.1;
    k.cNaive = 1.0;
    return k;
}

inline Knobs profileByName(std::string_view name) {
    if (name == "fidelity") return fidelityProfile();
    if (name == "desk") return deskProfile();
    throw contract_error("unknown profile '" + std::string(name) + "'");
}

/// Applies a `key=value` override.
inline void applyKnob(Knobs& knobs, std::string_view assignment) {
    const auto eq = assignment.find('=');
    require(eq != std::string_view::npos, "knob override must look like key=value");
    const auto key = assignment.substr(0, eq);
    const auto text = assignment.substr(eq + 1);
    if (key == "dfFinalEpsN") {
        require(text == "0" || text == "1" || text == "true" || text == "false", "dfFinalEpsN takes 0/1/true/false");
        knobs.dfFinalEpsN = text == "1" || text == "true";
        return;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    require(ec == std::errc() && ptr == text.data() + text.size(), "knob value is not a number");
    if (key == "cT") knobs.cT = value;
    else if (key == "cT1") knobs.cT1 = value;
    else if (key == "cEta") knobs.cEta = value;
    else if (key == "cEps1") knobs.cEps1 = value;
    else if (key == "cN0") knobs.cN0 = value;
    else if (key == "cN") knobs.cN = value;
    else if (key == "cBatches") knobs.cBatches = value;
    else if (key == "cNaive") knobs.cNaive = value;
    else throw contract_error("unknown knob '" + std::string(key) + "'");
    knobs.validate();
}

} // namespace amdl
