#include "palmlab/torus.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "palmlab/util.hpp"

namespace palmlab {

namespace {

struct TorusRng {
    std::uint64_t state;
    std::uint64_t next() { return splitmix64(state++); }
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }
    // True with probability num/den, decided by one 64-bit draw against a
    // fixed integer threshold.
    bool chance(long num, long den) {
        const unsigned __int128 scaled =
            (static_cast<unsigned __int128>(num) << 64) / static_cast<unsigned __int128>(den);
        return next() < static_cast<std::uint64_t>(scaled);
    }
};

long power_sites(int n, int d) {
    long N = 1;
    for (int i = 0; i < d; ++i) {
        N *= n;
        if (N > (1L << 22)) throw InvalidInput("torus: n^d too large");
    }
    return N;
}

void decode(int site, int n, int d, int* coords) {
    for (int i = d - 1; i >= 0; --i) {
        coords[i] = site % n;
        site /= n;
    }
}

int axis_dist(int a, int b, int n) {
    int diff = a - b;
    if (diff < 0) diff = -diff;
    return diff < n - diff ? diff : n - diff;
}

int l1_dist(const int* a, const int* b, int n, int d) {
    int acc = 0;
    for (int i = 0; i < d; ++i) acc += axis_dist(a[i], b[i], n);
    return acc;
}

int linf_dist(const int* a, const int* b, int n, int d) {
    int acc = 0;
    for (int i = 0; i < d; ++i) {
        const int v = axis_dist(a[i], b[i], n);
        if (v > acc) acc = v;
    }
    return acc;
}

}  // namespace

AllocationMap stable_marriage_allocate(int n, int d, const std::vector<int>& point_sites) {
    if (n < 2 || d < 1) throw InvalidInput("torus allocation: need n >= 2, d >= 1");
    const long N = power_sites(n, d);
    if (point_sites.empty()) throw InvalidInput("torus allocation: no points");
    std::vector<int> pts = point_sites;
    std::sort(pts.begin(), pts.end());
    if (std::adjacent_find(pts.begin(), pts.end()) != pts.end())
        throw InvalidInput("torus allocation: duplicate point site");
    if (pts.front() < 0 || pts.back() >= N)
        throw InvalidInput("torus allocation: point site out of range");
    const long k = static_cast<long>(pts.size());
    if (N % k != 0) throw InvalidInput("torus allocation: point count must divide site count");
    if (N * k > (1L << 22)) throw InvalidInput("torus allocation: instance too large");
    const long quota = N / k;

    std::vector<int> pcoord(static_cast<std::size_t>(k) * d);
    for (long j = 0; j < k; ++j) decode(pts[j], n, d, &pcoord[j * d]);

    // site_key: distance first, then the point enumeration order (ascending
    // site index = ascending tuple). point_key: distance first, then the
    // larger site tuple.
    std::vector<int> scratch(d);
    std::vector<std::uint64_t> prefs(static_cast<std::size_t>(N) * k);
    for (long s = 0; s < N; ++s) {
        decode(static_cast<int>(s), n, d, scratch.data());
        std::uint64_t* row = &prefs[static_cast<std::size_t>(s) * k];
        for (long j = 0; j < k; ++j)
            row[j] = (static_cast<std::uint64_t>(l1_dist(scratch.data(), &pcoord[j * d], n, d))
                      << 22) |
                     static_cast<std::uint64_t>(j);
        std::sort(row, row + k);
    }
    auto point_key = [&](long j, long s) -> std::uint64_t {
        decode(static_cast<int>(s), n, d, scratch.data());
        const std::uint64_t dist = l1_dist(scratch.data(), &pcoord[j * d], n, d);
        return (dist << 22) | static_cast<std::uint64_t>(N - 1 - s);
    };

    // Each point keeps its `quota` best proposals; the worst sits on top.
    struct Held {
        std::uint64_t key;
        int site;
        bool operator<(const Held& o) const { return key < o.key; }
    };
    std::vector<std::priority_queue<Held>> held(k);
    std::vector<int> next_choice(static_cast<std::size_t>(N), 0);
    std::vector<int> free_sites(static_cast<std::size_t>(N));
    for (long s = 0; s < N; ++s) free_sites[s] = static_cast<int>(N - 1 - s);

    std::vector<int> match(static_cast<std::size_t>(N), -1);
    while (!free_sites.empty()) {
        const int s = free_sites.back();
        free_sites.pop_back();
        const std::uint64_t* row = &prefs[static_cast<std::size_t>(s) * k];
        int choice = next_choice[s]++;
        if (choice >= k) throw InternalDefect("torus allocation: proposals exhausted");
        const long j = static_cast<long>(row[choice] & ((1ULL << 22) - 1));
        Held cand{point_key(j, s), s};
        if (static_cast<long>(held[j].size()) < quota) {
            held[j].push(cand);
            match[s] = static_cast<int>(j);
        } else if (cand.key < held[j].top().key) {
            free_sites.push_back(held[j].top().site);
            match[held[j].top().site] = -1;
            held[j].pop();
            held[j].push(cand);
            match[s] = static_cast<int>(j);
        } else {
            free_sites.push_back(s);
        }
    }

    AllocationMap out;
    out.n = n;
    out.d = d;
    out.quota = quota;
    out.points = std::move(pts);
    out.site_to_point.resize(static_cast<std::size_t>(N));
    for (long s = 0; s < N; ++s) out.site_to_point[s] = out.points[match[s]];
    return out;
}

bool quota_exact(const AllocationMap& a) {
    const long N = power_sites(a.n, a.d);
    std::vector<long> bucket(a.points.size(), 0);
    for (long s = 0; s < N; ++s) {
        const auto it = std::lower_bound(a.points.begin(), a.points.end(), a.site_to_point[s]);
        if (it == a.points.end() || *it != a.site_to_point[s]) return false;
        ++bucket[it - a.points.begin()];
    }
    for (long b : bucket)
        if (b != a.quota) return false;
    return true;
}

BlockingPair find_blocking_pair(const AllocationMap& a) {
    const long N = power_sites(a.n, a.d);
    const long k = static_cast<long>(a.points.size());
    std::vector<int> pcoord(static_cast<std::size_t>(k) * a.d);
    for (long j = 0; j < k; ++j) decode(a.points[j], a.n, a.d, &pcoord[j * a.d]);
    std::vector<int> scratch(a.d);

    auto site_key = [&](long s, long j) -> std::uint64_t {
        decode(static_cast<int>(s), a.n, a.d, scratch.data());
        const std::uint64_t dist = l1_dist(scratch.data(), &pcoord[j * a.d], a.n, a.d);
        return (dist << 22) | static_cast<std::uint64_t>(j);
    };
    auto point_key = [&](long j, long s) -> std::uint64_t {
        decode(static_cast<int>(s), a.n, a.d, scratch.data());
        const std::uint64_t dist = l1_dist(scratch.data(), &pcoord[j * a.d], a.n, a.d);
        return (dist << 22) | static_cast<std::uint64_t>(N - 1 - s);
    };

    std::vector<long> match_idx(static_cast<std::size_t>(N));
    std::vector<std::uint64_t> worst(k, 0);
    for (long s = 0; s < N; ++s) {
        const auto it = std::lower_bound(a.points.begin(), a.points.end(), a.site_to_point[s]);
        const long j = it - a.points.begin();
        match_idx[s] = j;
        const std::uint64_t pk = point_key(j, s);
        if (pk > worst[j]) worst[j] = pk;
    }
    BlockingPair out;
    for (long s = 0; s < N; ++s) {
        const std::uint64_t mine = site_key(s, match_idx[s]);
        for (long j = 0; j < k; ++j) {
            if (j == match_idx[s]) continue;
            if (site_key(s, j) < mine && point_key(j, s) < worst[j]) {
                out.stable = false;
                out.site = static_cast<int>(s);
                out.point_site = a.points[j];
                return out;
            }
        }
    }
    return out;
}

std::string allocation_csv(const AllocationMap& a) {
    const long N = power_sites(a.n, a.d);
    std::ostringstream os;
    for (int i = 0; i < a.d; ++i) os << "site_" << i << ",";
    for (int i = 0; i < a.d; ++i) os << "point_" << i << (i + 1 < a.d ? "," : "\n");
    std::vector<int> sc(a.d), pc(a.d);
    for (long s = 0; s < N; ++s) {
        decode(static_cast<int>(s), a.n, a.d, sc.data());
        decode(a.site_to_point[s], a.n, a.d, pc.data());
        for (int i = 0; i < a.d; ++i) os << sc[i] << ",";
        for (int i = 0; i < a.d; ++i) os << pc[i] << (i + 1 < a.d ? "," : "\n");
    }
    return os.str();
}

namespace {

// Clipped box counts around a center: radii 1..R, count capped at 3r.
// One integer key encodes the whole tuple.
int stat_key(const std::vector<int>& point_coords, long count, const int* center, int n, int d,
             int radius_max) {
    int key = 0;
    for (int r = 1; r <= radius_max; ++r) {
        const int cap = 3 * r;
        int c = 0;
        for (long j = 0; j < count; ++j)
            if (linf_dist(&point_coords[j * d], center, n, d) <= r) ++c;
        if (c > cap) c = cap;
        key = key * (cap + 1) + c;
    }
    return key;
}

int stat_cells(int radius_max) {
    int cells = 1;
    for (int r = 1; r <= radius_max; ++r) cells *= 3 * r + 1;
    return cells;
}

std::vector<long> schedule_for(long replicates) {
    std::vector<long> out;
    for (long step : {1000L, 10000L, 100000L})
        if (step < replicates) out.push_back(step);
    out.push_back(replicates);
    return out;
}

double histogram_tv(const std::vector<long>& h1, const std::vector<long>& h2, long total) {
    double acc = 0.0;
    for (std::size_t i = 0; i < h1.size(); ++i) {
        const double diff = static_cast<double>(h1[i]) - static_cast<double>(h2[i]);
        acc += diff < 0 ? -diff : diff;
    }
    return acc / (2.0 * static_cast<double>(total));
}

void sample_k_subset(TorusRng& rng, long N, long k, std::vector<int>& idx, std::vector<int>& out) {
    idx.resize(static_cast<std::size_t>(N));
    for (long i = 0; i < N; ++i) idx[i] = static_cast<int>(i);
    out.clear();
    for (long i = 0; i < k; ++i) {
        const long j = i + static_cast<long>(rng.below(static_cast<std::uint64_t>(N - i)));
        std::swap(idx[i], idx[j]);
        out.push_back(idx[i]);
    }
    std::sort(out.begin(), out.end());
}

void check_torus_config(const TorusConfig& cfg) {
    if (cfg.n < 2 || cfg.d < 1) throw InvalidInput("torus: need n >= 2, d >= 1");
    if (cfg.radius_max < 1 || cfg.radius_max > 8)
        throw InvalidInput("torus: radius_max must sit in [1, 8]");
    if (cfg.replicates < 1) throw InvalidInput("torus: need at least one replicate");
}

}  // namespace

CouplingReport verify_shift_coupling(const TorusConfig& cfg) {
    check_torus_config(cfg);
    const long N = power_sites(cfg.n, cfg.d);
    if (cfg.k < 1 || N % cfg.k != 0)
        throw InvalidInput("torus coupling: point count must divide site count");

    const int cells = stat_cells(cfg.radius_max);
    std::vector<long> h_alloc(cells, 0), h_point(cells, 0), h_site(cells, 0);
    std::vector<int> idx, pts, coords(static_cast<std::size_t>(cfg.k) * cfg.d);
    std::vector<int> center(cfg.d);

    CouplingReport rep;
    std::vector<long> steps = schedule_for(cfg.replicates);
    std::size_t next_step = 0;

    for (long i = 0; i < cfg.replicates; ++i) {
        // Allocation side: recenter at the point matched to a uniform origin
        // site. The uniform origin is what makes the two laws agree exactly:
        // with exact quotas, averaging tau over all origins weights every
        // point of the configuration equally.
        {
            TorusRng rng{derive_seed(cfg.seed, 11, static_cast<std::uint64_t>(i))};
            sample_k_subset(rng, N, cfg.k, idx, pts);
            AllocationMap a = stable_marriage_allocate(cfg.n, cfg.d, pts);
            if (!quota_exact(a)) ++rep.quota_violations;
            if (i == 0 && N <= 4096) rep.stability_spot_ok = find_blocking_pair(a).stable;
            for (long j = 0; j < cfg.k; ++j) decode(a.points[j], cfg.n, cfg.d, &coords[j * cfg.d]);
            const long origin = static_cast<long>(rng.below(static_cast<std::uint64_t>(N)));
            decode(a.site_to_point[origin], cfg.n, cfg.d, center.data());
            ++h_alloc[stat_key(coords, cfg.k, center.data(), cfg.n, cfg.d, cfg.radius_max)];
        }
        // Typical-point side: recenter at a uniformly drawn point.
        {
            TorusRng rng{derive_seed(cfg.seed, 12, static_cast<std::uint64_t>(i))};
            sample_k_subset(rng, N, cfg.k, idx, pts);
            for (long j = 0; j < cfg.k; ++j) decode(pts[j], cfg.n, cfg.d, &coords[j * cfg.d]);
            decode(pts[rng.below(static_cast<std::uint64_t>(cfg.k))], cfg.n, cfg.d, center.data());
            ++h_point[stat_key(coords, cfg.k, center.data(), cfg.n, cfg.d, cfg.radius_max)];
        }
        // Control: recenter at a uniform site, almost never a point.
        {
            TorusRng rng{derive_seed(cfg.seed, 13, static_cast<std::uint64_t>(i))};
            sample_k_subset(rng, N, cfg.k, idx, pts);
            for (long j = 0; j < cfg.k; ++j) decode(pts[j], cfg.n, cfg.d, &coords[j * cfg.d]);
            decode(static_cast<int>(rng.below(static_cast<std::uint64_t>(N))), cfg.n, cfg.d,
                   center.data());
            ++h_site[stat_key(coords, cfg.k, center.data(), cfg.n, cfg.d, cfg.radius_max)];
        }
        if (next_step < steps.size() && i + 1 == steps[next_step]) {
            rep.rows.push_back({i + 1, histogram_tv(h_alloc, h_point, i + 1)});
            rep.control_rows.push_back({i + 1, histogram_tv(h_alloc, h_site, i + 1)});
            ++next_step;
        }
    }
    return rep;
}

ResampleReport verify_window_resample(const TorusConfig& cfg, int c_len, bool palm_origin) {
    check_torus_config(cfg);
    const long N = power_sites(cfg.n, cfg.d);
    if (c_len < 1 || c_len > cfg.n) throw InvalidInput("torus resample: window must fit one axis");
    if (cfg.q_num <= 0 || cfg.q_den <= 0 || cfg.q_num >= cfg.q_den)
        throw InvalidInput("torus resample: occupation odds must sit strictly between 0 and 1");

    // The window is {0..c_len-1} along axis 0: site index stride of axis 0
    // is n^(d-1).
    long stride = 1;
    for (int i = 1; i < cfg.d; ++i) stride *= cfg.n;

    const int cells = stat_cells(cfg.radius_max);
    std::vector<long> h_lhs(static_cast<std::size_t>(cells) * N, 0);
    std::vector<long> h_rhs(static_cast<std::size_t>(cells) * N, 0);

    std::vector<char> field(static_cast<std::size_t>(N));
    std::vector<int> occupied, window_hits, coords, center(cfg.d), origin(cfg.d, 0);

    ResampleReport rep;
    std::vector<long> steps = schedule_for(cfg.replicates);
    std::size_t next_step = 0;

    auto add_sites = [&](int a, int b) {
        // coordinate-wise sum of two site indices
        int out = 0, mul = 1;
        for (int i = 0; i < cfg.d; ++i) {
            const int da = (a / mul) % cfg.n, db = (b / mul) % cfg.n;
            out += ((da + db) % cfg.n) * mul;
            if (i + 1 < cfg.d) mul *= cfg.n;
        }
        return out;
    };
    auto neg_site = [&](int a) {
        int out = 0, mul = 1;
        for (int i = 0; i < cfg.d; ++i) {
            const int da = (a / mul) % cfg.n;
            out += ((cfg.n - da) % cfg.n) * mul;
            if (i + 1 < cfg.d) mul *= cfg.n;
        }
        return out;
    };

    for (long i = 0; i < cfg.replicates; ++i) {
        TorusRng rng{derive_seed(cfg.seed, 21, static_cast<std::uint64_t>(i))};
        occupied.clear();
        for (long s = 0; s < N; ++s) field[s] = rng.chance(cfg.q_num, cfg.q_den) ? 1 : 0;
        if (palm_origin) field[0] = 1;
        for (long s = 0; s < N; ++s)
            if (field[s]) occupied.push_back(static_cast<int>(s));

        const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(c_len)) * stride);
        const int nu = neg_site(u);
        window_hits.clear();
        for (int c = 0; c < c_len; ++c) {
            const int site = add_sites(static_cast<int>(c * stride), nu);
            if (field[site]) window_hits.push_back(site);
        }
        const int v = window_hits.empty()
                          ? nu
                          : window_hits[rng.below(static_cast<std::uint64_t>(window_hits.size()))];

        coords.resize(occupied.size() * static_cast<std::size_t>(cfg.d));
        for (std::size_t j = 0; j < occupied.size(); ++j)
            decode(occupied[j], cfg.n, cfg.d, &coords[j * cfg.d]);

        decode(v, cfg.n, cfg.d, center.data());
        const int lhs_stat = stat_key(coords, static_cast<long>(occupied.size()), center.data(),
                                      cfg.n, cfg.d, cfg.radius_max);
        ++h_lhs[static_cast<std::size_t>(lhs_stat) * N + add_sites(u, v)];

        const int rhs_stat = stat_key(coords, static_cast<long>(occupied.size()), origin.data(),
                                      cfg.n, cfg.d, cfg.radius_max);
        ++h_rhs[static_cast<std::size_t>(rhs_stat) * N + u];

        if (next_step < steps.size() && i + 1 == steps[next_step]) {
            rep.rows.push_back({i + 1, histogram_tv(h_lhs, h_rhs, i + 1)});
            ++next_step;
        }
    }
    return rep;
}

std::vector<int> sample_point_sites(int n, int d, long k, std::uint64_t seed) {
    if (n < 2 || d < 1) throw InvalidInput("torus: need n >= 2, d >= 1");
    const long N = power_sites(n, d);
    if (k < 1 || k > N) throw InvalidInput("torus: k must sit in [1, n^d]");
    TorusRng rng{derive_seed(seed, 11, 0)};
    std::vector<int> idx, out;
    sample_k_subset(rng, N, k, idx, out);
    return out;
}

}  // namespace palmlab
