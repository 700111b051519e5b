#include "palmlab/existence.hpp"

#include <string>
#include <utility>

#include "palmlab/palm.hpp"
#include "palmlab/util.hpp"

namespace palmlab {

namespace {

void ensure_positive_intensity(const OmegaMeasure& P, const RandomMeasure& xi, const char* what,
                               const char* where) {
    Scalar acc;
    const int M = P.space->outcomes();
    for (int w = 0; w < M; ++w) acc += P.at(w) * xi.at(w).at(0);
    if (acc.is_zero())
        throw InvalidInput(std::string(where) + ": " + what + " has zero intensity under P");
}

}  // namespace

ConditionReport check_orbit_intensity_match(const OmegaMeasure& P, const RandomMeasure& xi,
                                            const RandomMeasure& eta, Precheck pc) {
    require_same_space(P, xi, "balance condition");
    require_same_space(P, eta, "balance condition");
    if (pc == Precheck::enforce) {
        require_stationary(P, "balance condition");
        require_adapted(xi, "source measure", "balance condition");
        require_adapted(eta, "target measure", "balance condition");
        ensure_positive_intensity(P, xi, "source measure", "balance condition");
        ensure_positive_intensity(P, eta, "target measure", "balance condition");
    }
    const FlowSpace& sp = *P.space;
    const Subset origin = Subset::singleton(sp.group(), 0);
    std::vector<Scalar> dx = sample_intensity(P, xi, origin, Precheck::trust);
    std::vector<Scalar> de = sample_intensity(P, eta, origin, Precheck::trust);

    ConditionReport rep;
    const int M = sp.outcomes();
    for (int w = 0; w < M; ++w)
        if (!(dx[w] == de[w])) {
            rep.ok = false;
            rep.omega = w;
            rep.lhs = dx[w];
            rep.rhs = de[w];
            break;
        }
    if (!rep.ok) {
        OrbitDecomposition od = orbits(sp);
        rep.orbit = od.orbit_of[rep.omega];
    }
    return rep;
}

ExistenceResult construct_balancing_kernel(const OmegaMeasure& P, const RandomMeasure& xi,
                                           const RandomMeasure& eta, Precheck pc) {
    ExistenceResult res;
    res.condition = check_orbit_intensity_match(P, xi, eta, pc);
    if (!res.condition.ok) return res;

    const FlowSpace& sp = *P.space;
    const GroupPtr gp = sp.group_ptr();
    const int N = static_cast<int>(gp->order());
    const int M = sp.outcomes();

    // Orbits that P charges carry mass-preserving rows; everything else gets
    // the identity row so the kernel stays total and invariant.
    OrbitDecomposition od = orbits(sp);
    std::vector<bool> charged(od.count(), false);
    for (int w = 0; w < M; ++w)
        if (P.at(w).sign() > 0) charged[od.orbit_of[w]] = true;

    std::vector<GMeasure> cells;
    cells.reserve(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w) {
        GMeasure row = zero_measure(gp);
        bool spread = false;
        if (charged[od.orbit_of[w]]) {
            Scalar m = total_mass(eta.at(w));
            if (!m.is_zero()) {
                row = scale_measure(eta.at(w), m.inverse());
                spread = true;
            }
        }
        for (int s = 0; s < N; ++s)
            cells.push_back(spread ? row : dirac(gp, s));
    }
    TransportKernel T = TransportKernel::from_cells(P.space, std::move(cells));

    if (!T.markovian())
        throw InternalDefect("constructed balancing kernel has a non-unit row");
    KernelInvarianceReport inv = is_invariant_kernel(T);
    if (!inv.ok)
        throw InternalDefect("constructed balancing kernel lost invariance at outcome " +
                             std::to_string(inv.omega));
    BalancingReport bal = is_balancing(T, xi, eta, P);
    if (!bal.ok)
        throw InternalDefect("constructed kernel fails to balance at outcome " +
                             std::to_string(bal.omega));
    res.kernel = std::move(T);
    return res;
}

}  // namespace palmlab
