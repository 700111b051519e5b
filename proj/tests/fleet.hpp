#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "palmlab/generators.hpp"
#include "palmlab/serialize.hpp"
#include "palmlab/transport.hpp"

namespace fleet {

struct Instance {
    std::string name;
    palmlab::SpaceBundle bundle;
};

// Deterministic zoo of spaces: one-point, translation (several profiles,
// some with irrational masses), mark fields over assorted laws and value
// sets, orbit-reweighted variants, two-species products. Group order <= 12,
// outcome count <= 4096, more than 100 entries.
std::vector<Instance> build_fleet();

// The slice where exhaustive window sweeps stay cheap: group order <= 8 and
// outcome count <= 256.
std::vector<Instance> build_small_fleet();

// Independent oracle for "Q is a recentering law of xi under some stationary
// measure": on each orbit, Q must be one nonnegative multiple of the map
// w -> xi(w){0}. Decided exactly, no transport identity involved.
bool is_palm_form(const palmlab::OmegaMeasure& Q, const palmlab::RandomMeasure& xi);

// Deterministic jitter that takes Q off palm form while keeping the
// zero-mass precondition (Q stays zero wherever xi(w) has no mass at all).
// Candidates are scanned from a seed-dependent start until the oracle
// reports non-palm-form; nullopt when no candidate works on this instance.
std::optional<palmlab::OmegaMeasure> perturb_off_palm(const palmlab::OmegaMeasure& Q,
                                                      const palmlab::RandomMeasure& xi,
                                                      std::uint64_t seed);

// Target measures for balancing work.
palmlab::RandomMeasure shifted_eta(const palmlab::RandomMeasure& xi, int shift);
// Orbit density of xi times unit mass everywhere: balanceable by design.
palmlab::RandomMeasure density_haar_eta(const palmlab::SpaceBundle& b);
// Unit mass everywhere: balanceable only when every charged orbit has
// density exactly one.
palmlab::RandomMeasure plain_haar_eta(const palmlab::SpaceBundle& b);

// Invariant Markov kernel with seeded sparse base rows.
palmlab::TransportKernel random_invariant_kernel(const palmlab::SpacePtr& sp, std::uint64_t seed);

// Row-sum-preserving corruption: moves mass inside one base row and
// re-extends invariantly, scanning candidates until the result stops
// balancing (xi, eta) under P. Markov stays intact. nullopt if every
// candidate still balances.
std::optional<palmlab::TransportKernel> corrupt_kernel(const palmlab::TransportKernel& T,
                                                       const palmlab::RandomMeasure& xi,
                                                       const palmlab::RandomMeasure& eta,
                                                       const palmlab::OmegaMeasure& P,
                                                       std::uint64_t seed);

// Invariant density kappa[(w*N+s)*N+t] built from a seeded base profile.
std::vector<palmlab::Scalar> random_invariant_density(const palmlab::SpacePtr& sp,
                                                      std::uint64_t seed);

}  // namespace fleet
