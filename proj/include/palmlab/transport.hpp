#pragma once

#include <functional>
#include <optional>

#include "palmlab/palm.hpp"

namespace palmlab {

// Weighted transport kernel: a group measure T(w, s, .) for every outcome w
// and source location s. "Invariant" means
//   T(flow(t,w), s-t, B-t) = T(w, s, B) for all w, s, t, B;
// every invariant kernel is determined by its source-0 rows via
//   T(w, s, B) = T(flow(s,w), 0, B-s).
class TransportKernel {
public:
    static TransportKernel from_cells(SpacePtr space, std::vector<GMeasure> cells);
    // Invariant extension of source-0 rows: cell(w,s){b} = base[flow(s,w)]{b-s}.
    static TransportKernel from_base(SpacePtr space, const std::vector<GMeasure>& base);
    static TransportKernel identity(SpacePtr space);  // T(w,s) = point mass at s

    const SpacePtr& space() const { return space_; }
    const GMeasure& at(int w, int s) const {
        return cells_[static_cast<std::size_t>(w) * space_->group().order() + s];
    }
    const GMeasure& base_row(int w) const { return at(w, 0); }

    bool markovian() const { return markovian_; }       // every row total == 1
    const Scalar& sup_total() const { return sup_total_; }

private:
    TransportKernel() = default;
    SpacePtr space_;
    std::vector<GMeasure> cells_;  // [w * N + s]
    bool markovian_ = false;
    Scalar sup_total_;
};

struct KernelInvarianceReport {
    bool ok = true;
    int omega = -1, s = -1, t = -1, b = -1;
    Scalar lhs, rhs;
};
KernelInvarianceReport is_invariant_kernel(const TransportKernel& T);

// Kernel with density kappa against eta: T(w,s){t} = kappa(w,s,t) * eta(w){t}.
// kappa is flat-indexed [(w*N + s)*N + t] and must satisfy
// kappa(flow(r,w), s-r, t-r) = kappa(w,s,t); eta must be flow-adapted.
TransportKernel kernel_from_density(const std::vector<Scalar>& kappa, const RandomMeasure& eta,
                                    Precheck pc = Precheck::enforce);

// eta(w) = sum_s xi(w){s} T(w,s,.)
RandomMeasure push_through(const RandomMeasure& xi, const TransportKernel& T);

struct BalancingReport {
    bool ok = true;
    int omega = -1, b = -1;  // first P-charged outcome and location where push != eta
    Scalar lhs, rhs;
};
BalancingReport is_balancing(const TransportKernel& T, const RandomMeasure& xi,
                             const RandomMeasure& eta, const OmegaMeasure& P);

// Reverse kernel: T*(w,t){s} = T(w,s){t} xi(w){s} / eta(w){t} where
// eta(w){t} > 0 on P-charged orbits; point mass at t elsewhere. The defining
// relation  T(w,s){t} xi(w){s} = T*(w,t){s} eta(w){t}  is re-verified on all
// P-charged outcomes before returning.
TransportKernel reverse_kernel(const TransportKernel& T, const RandomMeasure& xi,
                               const RandomMeasure& eta, const OmegaMeasure& P,
                               Precheck pc = Precheck::enforce);

struct RelationReport {
    bool ok = true;
    int omega = -1, s = -1, t = -1;
    Scalar lhs, rhs;
};
// The symmetric relation above, checked on every P-charged outcome.
RelationReport check_reverse_relation(const TransportKernel& T, const TransportKernel& Tstar,
                                      const RandomMeasure& xi, const RandomMeasure& eta,
                                      const OmegaMeasure& P);

// Exchange identity between the two Palm measures:
//   E_palm(xi)[sum_t h(flow(t,w), -t) T(w,0){t}] = E_palm(eta)[sum_s h(w, s) T*(w,0){s}]
// h flat-indexed [w * N + s]. Requires the reverse relation to hold.
CampbellValues check_exchange(const TransportKernel& T, const TransportKernel& Tstar,
                              const RandomMeasure& xi, const RandomMeasure& eta,
                              const OmegaMeasure& P, const std::vector<Scalar>& h,
                              Precheck pc = Precheck::enforce);
BasisWitness check_exchange_basis(const TransportKernel& T, const TransportKernel& Tstar,
                                  const RandomMeasure& xi, const RandomMeasure& eta,
                                  const OmegaMeasure& P, Precheck pc = Precheck::enforce);

// Kernel-free exchange special case:
//   E_palm(xi)[sum_t h(flow(t,w), -t) eta(w){t}] = E_palm(eta)[sum_s h(w, s) xi(w){s}]
CampbellValues check_intensity_exchange(const RandomMeasure& xi, const RandomMeasure& eta,
                                        const OmegaMeasure& P, const std::vector<Scalar>& h,
                                        Precheck pc = Precheck::enforce);
BasisWitness check_intensity_exchange_basis(const RandomMeasure& xi, const RandomMeasure& eta,
                                            const OmegaMeasure& P, Precheck pc = Precheck::enforce);

// Two ways to total an invariant density kappa over windows of equal size:
//   E_P[sum_{s,t} 1_B(t) kappa(w,s,t) eta(w){s} xi(w){t}]
// = E_P[sum_{s,t} 1_B'(s) kappa(w,s,t) eta(w){s} xi(w){t}]   when |B| = |B'|.
CampbellValues check_mass_transport(const std::vector<Scalar>& kappa, const RandomMeasure& eta,
                                    const RandomMeasure& xi, const OmegaMeasure& P,
                                    const Subset& B, const Subset& Bprime,
                                    Precheck pc = Precheck::enforce);

// Equivalence between balancing and the Palm transport identity
//   E_palm(xi)[sum_t f(flow(t,w)) T(w,0){t}] = E_palm(eta)[f] for all f.
// Both sides of the equivalence are evaluated independently.
struct DualityReport {
    bool balancing = false;
    bool palm_identity = false;
    bool agree() const { return balancing == palm_identity; }
    int balancing_omega = -1;   // witness when !balancing
    int identity_omega = -1;    // witness when !palm_identity
    Scalar identity_lhs, identity_rhs;
};
DualityReport check_balancing_palm_duality(const TransportKernel& T, const RandomMeasure& xi,
                                           const RandomMeasure& eta, const OmegaMeasure& P,
                                           Precheck pc = Precheck::enforce);

// Allocation rule: a measurable map tau(w, s) with
// tau(flow(t,w), s-t) = tau(w,s) - t. Determined by pi(w) := tau(w, 0) via
// tau(w, s) = pi(flow(s,w)) + s.
struct AllocationRule {
    SpacePtr space;
    std::vector<int32_t> target;  // [w * N + s] -> element

    static AllocationRule from_pi(SpacePtr space, const std::vector<int>& pi);
    int at(int w, int s) const {
        return target[static_cast<std::size_t>(w) * space->group().order() + s];
    }
};

struct CovarianceReport {
    bool ok = true;
    int omega = -1, s = -1, t = -1;
};
CovarianceReport is_covariant(const AllocationRule& tau);

TransportKernel kernel_from_allocation(const AllocationRule& tau);

// w -> flow(tau(w,0), w): the outcome re-anchored at its own allocation target.
std::vector<int> shift_by_allocation(const AllocationRule& tau);

// Allocation version of the duality: the image of palm(xi) under the
// re-anchoring map equals palm(eta) iff tau transports xi to eta P-a.e.
DualityReport check_allocation_palm_coupling(const AllocationRule& tau, const RandomMeasure& xi,
                                             const RandomMeasure& eta, const OmegaMeasure& P,
                                             Precheck pc = Precheck::enforce);

// Density-normalized version: T transports the density-normalized measures
// into each other P-a.e. iff the same transport identity links the two
// modified Palm measures. Requires positive densities on P-charged orbits.
DualityReport check_modified_palm_duality(const TransportKernel& T, const RandomMeasure& xi,
                                          const RandomMeasure& eta, const OmegaMeasure& P,
                                          Precheck pc = Precheck::enforce);

// Row-wise convex/conic combination: sum_i coeff_i * kernel_i.
TransportKernel combine_kernels(const std::vector<std::pair<Scalar, TransportKernel>>& parts);
// Two-step transport: (T then S)(w,s){b} = sum_u T(w,s){u} S(w,u){b}.
TransportKernel compose_kernels(const TransportKernel& T, const TransportKernel& S);

}  // namespace palmlab
