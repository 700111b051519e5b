#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace palmlab {

// Floating-point Monte-Carlo side of the library. Everything here is
// driven by counter-based seeds: a (seed, stream, replicate) triple fully
// determines every draw, so reports are bit-identical across runs and
// machines. No std:: distributions are used for that reason.

struct TorusConfig {
    int n = 16;               // side length per axis
    int d = 2;                // number of axes
    long k = 16;              // points per replicate; must divide n^d
    long q_num = 1, q_den = 2;  // site occupation odds for field sampling
    std::uint64_t seed = 0;
    long replicates = 100000;
    int radius_max = 3;       // box statistic radii 1..radius_max, counts clipped at 3r
};

// Site-proposing deferred acceptance between sites and points with quota
// n^d / k per point. Sites rank points by torus L1 distance, ties toward the
// smaller point tuple; points rank sites by distance, ties toward the larger
// site tuple. The outcome is the unique site-optimal stable assignment.
struct AllocationMap {
    int n = 0, d = 0;
    long quota = 0;
    std::vector<int> points;         // point site indices, strictly ascending
    std::vector<int> site_to_point;  // site index -> matched point's site index
};

AllocationMap stable_marriage_allocate(int n, int d, const std::vector<int>& point_sites);

// One uniformly drawn exactly-k point set, ascending site indices. Same
// sampler and stream as the allocation side of the coupling run, so
// `seed` reproduces that run's first replicate.
std::vector<int> sample_point_sites(int n, int d, long k, std::uint64_t seed);

bool quota_exact(const AllocationMap& a);

struct BlockingPair {
    bool stable = true;
    int site = -1, point_site = -1;  // a pair both sides strictly prefer
};
BlockingPair find_blocking_pair(const AllocationMap& a);

// Header "site_0,..,site_{d-1},point_0,..,point_{d-1}", one row per site.
std::string allocation_csv(const AllocationMap& a);

struct TvRow {
    long replicates = 0;
    double tv = 0.0;  // total variation distance between the two histograms
};

struct CouplingReport {
    std::vector<TvRow> rows;          // recenter-at-allocation vs recenter-at-uniform-point
    std::vector<TvRow> control_rows;  // recenter-at-allocation vs uniform-site origin
    long quota_violations = 0;        // allocations with a wrong bucket size (always 0)
    bool stability_spot_ok = true;    // exhaustive no-blocking-pair check, first replicate
};

// Empirical law of the clipped box-count statistic around the origin's
// allocated point vs around a uniformly chosen point, over exactly-k point
// sets. The two laws agree exactly, so the reported distance is pure
// sampling noise; the control column keeps a fat gap since its center is
// almost never a point. Snapshots at 10^3, 10^4, 10^5 up to cfg.replicates.
CouplingReport verify_shift_coupling(const TorusConfig& cfg);

struct ResampleReport {
    std::vector<TvRow> rows;
};

// Window-shift resampling on a sampled field: draw a window offset U, move
// to a field point V drawn from the window kernel row at -U, and compare the
// joint law of (statistic after recentering at V, U + V) against
// (statistic, U). The window is the segment {0..c_len-1} along axis 0.
// With palm_origin the field is conditioned to carry the origin and the two
// laws agree; without it the gap stays bounded away from zero.
ResampleReport verify_window_resample(const TorusConfig& cfg, int c_len, bool palm_origin);

}  // namespace palmlab
