#pragma once

#include <optional>

#include "palmlab/flow_space.hpp"

namespace palmlab {

// Preconditions are cheap to state but not always cheap to re-verify in bulk
// loops. `enforce` validates them and throws InvalidInput on violation;
// `trust` skips validation after the caller has already established them.
enum class Precheck { enforce, trust };

struct PalmResult {
    OmegaMeasure measure;                     // weight{w'} = |B|^-1 sum_w sum_{s in B} P{w} xi(w){s} [flow(s,w)=w']
    Scalar intensity;                         // total mass; equals E_P[xi{0}] for any window
    std::optional<OmegaMeasure> normalized;   // present iff intensity > 0
};

// Palm measure of xi under P over the window B. Requires P stationary,
// xi flow-adapted, B nonempty. The result does not depend on B; the window
// independence is itself a checked property elsewhere.
PalmResult palm_measure(const OmegaMeasure& P, const RandomMeasure& xi, const Subset& B,
                        Precheck pc = Precheck::enforce);

// Both sides of the defining duality for one test function
// f : (outcome, element) -> Scalar, flat-indexed f[w * N + s].
// lhs = E_P[sum_s f(flow(s,w), s) xi(w){s}],  rhs = E_palm[sum_s f(w, s)].
struct CampbellValues {
    Scalar lhs, rhs;
    bool equal() const { return lhs == rhs; }
};
CampbellValues check_refined_campbell(const OmegaMeasure& P, const RandomMeasure& xi,
                                      const std::vector<Scalar>& f, Precheck pc = Precheck::enforce);

struct BasisWitness {
    bool ok = true;
    int omega = -1, s = -1;  // first failing indicator pair in scan order
    Scalar lhs, rhs;
};
// The duality over the full indicator basis, hence over all f.
BasisWitness check_refined_campbell_basis(const OmegaMeasure& P, const RandomMeasure& xi,
                                          Precheck pc = Precheck::enforce);

// Reconstruction of the underlying stationary measure from a Palm measure:
// out{w'} = sum_w Q{w} sum_s k(xi(flow(-s,w)), s) [flow(-s,w)=w'] where
// k(mu, s) = mu{s} / sum_t mu{t}^2. Recovers P restricted to outcomes with
// nonzero total mass when Q is the Palm measure of (P, xi).
OmegaMeasure invert_palm(const OmegaMeasure& Q, const RandomMeasure& xi,
                         Precheck pc = Precheck::enforce);

// Characterization test: Q is a Palm measure of xi (for some stationary P)
// iff the transport identity
//   E_Q[sum_s g(flow(s,w), -s) xi(w){s}] = E_Q[sum_s g(w, s) xi(w){s}]
// holds for all g; checked over the full indicator basis. The witness is the
// first failing basis pair (w', s') in scan order.
BasisWitness check_mecke(const OmegaMeasure& Q, const RandomMeasure& xi,
                         Precheck pc = Precheck::enforce);

// Direct per-pair evaluation of both Mecke sums for one indicator pair,
// bypassing the table accumulation. Used to re-verify witnesses.
CampbellValues mecke_pair_values(const OmegaMeasure& Q, const RandomMeasure& xi, int omega, int s);

// Orbit-wise mean mass density: E_P[xi(B) | invariant events] with |B| = 1.
// Zero on P-null orbits. Constant on orbits; independent of the singleton.
std::vector<Scalar> sample_intensity(const OmegaMeasure& P, const RandomMeasure& xi, const Subset& B,
                                     Precheck pc = Precheck::enforce);

// Palm measure reweighted by the inverse orbit density:
// out{w} = palm{w} / density(w). Equals the Palm measure of the density-
// normalized random measure; both routes are computed and compared.
// Requires every P-charged orbit to have positive density.
OmegaMeasure modified_palm(const OmegaMeasure& P, const RandomMeasure& xi,
                           Precheck pc = Precheck::enforce);

}  // namespace palmlab
