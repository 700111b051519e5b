#pragma once

#include <optional>

#include "palmlab/transport.hpp"

namespace palmlab {

struct ConditionReport {
    bool ok = true;
    int omega = -1;  // first outcome where the orbit densities differ
    int orbit = -1;
    Scalar lhs, rhs;  // orbit mean density of xi resp. eta at the witness
};

// Solvability test for the balancing problem: a kernel moving xi onto eta
// P-a.e. exists exactly when the orbit-averaged densities at the origin
// agree on every P-charged orbit.
ConditionReport check_orbit_intensity_match(const OmegaMeasure& P, const RandomMeasure& xi,
                                            const RandomMeasure& eta,
                                            Precheck pc = Precheck::enforce);

struct ExistenceResult {
    ConditionReport condition;
    std::optional<TransportKernel> kernel;  // present iff condition.ok
};

// Constructs the balancing kernel when the condition holds. On a P-charged
// orbit with mass, every unit of source mass is spread over that outcome's
// target measure: T(w, s) = eta(w) / eta(w)(G). Rows stay put on null orbits
// and where both measures vanish. The kernel is re-checked (invariance, unit
// rows, balancing) before it is returned.
ExistenceResult construct_balancing_kernel(const OmegaMeasure& P, const RandomMeasure& xi,
                                           const RandomMeasure& eta,
                                           Precheck pc = Precheck::enforce);

}  // namespace palmlab
