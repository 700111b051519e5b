#pragma once

#include <cstdint>
#include <vector>

#include "palmlab/transport.hpp"

namespace palmlab {

// Window redistribution kernel: from source t, spread the mass of xi sitting
// on the translated window C + t back over that window, proportionally to
// xi. Rows whose window carries no xi-mass stay put. Markovian by
// construction; invariant whenever xi is flow-adapted.
TransportKernel window_kernel(const RandomMeasure& xi, const Subset& C,
                              Precheck pc = Precheck::enforce);
// Single row of the above, without materializing the kernel.
GMeasure window_kernel_row(const RandomMeasure& xi, const Subset& C, int w, int t);

struct WindowWitness {
    std::vector<int> window;  // members of the failing window
    int omega = -1;           // outcome coordinate of the failing basis pair
    int g = -1;               // group coordinate
    Scalar lhs, rhs;
};

struct MassStatReport {
    bool holds = true;
    bool complete = true;   // the window universe was every nonempty subset
    long sets_checked = 0;
    WindowWitness witness;  // populated iff !holds
};

// Invariance of Q under randomized window recentering, tested window by
// window against the product basis of outcome and group indicators. For a
// window C and a pair (w', g'):
//
//   sum_w Q{w} sum_{r in C} sum_s T_C(w,-r){s} 1{flow(s,w)=w'} 1{s+r=g'} / |C|
//     must equal  Q{w'} 1{g' in C} / |C|.
//
// Default universe: every nonempty window when |G| <= 12; otherwise all
// singletons plus the prefixes of the element enumeration (complete=false).
// The witness is the first failure, windows in generation order, (w', g')
// lexicographic. Requires Q to vanish wherever xi(w) has no mass at all.
MassStatReport is_mass_stationary(const OmegaMeasure& Q, const RandomMeasure& xi,
                                  Precheck pc = Precheck::enforce);
MassStatReport is_mass_stationary(const OmegaMeasure& Q, const RandomMeasure& xi,
                                  const std::vector<Subset>& windows,
                                  Precheck pc = Precheck::enforce);
std::vector<Subset> default_window_universe(const FiniteAbelianGroup& g);

// Window-pair kernel: the window kernel averaged over a uniform shift r of
// the window, keeping only mass that lands in D relative to the source:
//   T_{C,D}(w,t){s} = sum_{r in C} 1_D(s - t + r) T_C(w, t - r){s} / |C|.
// Sub-Markovian and invariant; additive in D.
TransportKernel window_pair_kernel(const RandomMeasure& xi, const Subset& C, const Subset& D,
                                   Precheck pc = Precheck::enforce);

struct PushMatchReport {
    bool ok = true;
    int omega = -1, b = -1;
    Scalar lhs, rhs;
};
// Pushing xi through the window-pair kernel scales xi by |C meet D| / |C|
// at every single outcome, exactly, regardless of fallback rows.
PushMatchReport check_window_pair_push(const RandomMeasure& xi, const Subset& C, const Subset& D,
                                       Precheck pc = Precheck::enforce);

struct BatteryReport {
    MassStatReport direct;   // the windowed identity route
    bool battery = true;     // every mass-preserving kernel left Q fixed
    long kernels_checked = 0;
    std::vector<int> window;    // failing window C (family route)
    int window_d = -1;          // failing target element d (family route)
    int random_index = -1;      // failing random kernel, when applicable
    int omega = -1;
    Scalar lhs, rhs;
    bool agree() const { return direct.holds == battery; }
};

// Two independent routes to one verdict. Route one is the windowed identity
// above. Route two pushes Q through xi-preserving invariant kernels and
// demands a fixed point: the window-pair family, exhausted through its
// single-element target slices (additivity in D makes that decomposition
// exact), plus seeded random mixtures and compositions of normalized family
// members with the identity. The two routes agree on every valid input;
// agree() returning false would mean a defect in one of them.
BatteryReport check_preserving_battery(const OmegaMeasure& Q, const RandomMeasure& xi,
                                       int random_kernels, std::uint64_t seed,
                                       Precheck pc = Precheck::enforce);

struct WindowBiasValues {
    Scalar lhs, rhs;              // two-site window, point-at-one event
    Scalar whole_group_lhs, whole_group_rhs;  // window = all of G: sides agree
    Scalar full_event_lhs, full_event_rhs;    // event = everything: both are 1
};
// Three-site binary field, recentering weighted by the window kernel row at
// the origin only. Skipping the window-shift randomization biases the
// average: lhs = 3/8 vs rhs = 1/2 on the pinned instance.
WindowBiasValues window_bias_example();

struct TwoSpeciesReport {
    bool palm_verified = false;      // Q matches the normalized recentering law of species one
    bool irrational_masses = false;  // the combined field really uses the irrational unit
    long germs_enumerated = 0;       // per-orbit covariant rule germs examined
    long preserving_germs = 0;       // germs preserving the combined field at Q-charged outcomes
    bool all_preserving_fix_first = true;  // each such germ preserves species one alone
    bool all_preserving_invariant = true;  // and recentering by it leaves Q unchanged
    MassStatReport combined;         // verdict for the combined field: fails
    MassStatReport first_only;       // verdict for species one alone: holds
};

// Two independent binary fields on one group, diagonal shift. Q adjoins a
// point of species one at the origin. The combined field weights species two
// by r2, so preservation splits by rational and irrational parts: every
// covariant allocation rule preserving the combined field fixes Q, yet Q is
// not mass-stationary for the combined field. Exhaustive over rule germs,
// orbit by orbit.
TwoSpeciesReport two_species_example(const std::vector<long>& moduli, long p_num = 1,
                                     long p_den = 2);

}  // namespace palmlab
