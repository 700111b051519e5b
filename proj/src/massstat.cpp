#include "palmlab/massstat.hpp"

#include <string>
#include <utility>

#include "palmlab/generators.hpp"
#include "palmlab/palm.hpp"
#include "palmlab/util.hpp"

namespace palmlab {

namespace {

struct MixRng {
    std::uint64_t state;
    std::uint64_t next() { return splitmix64(state++); }
    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

void ensure_window(const Subset& C, const FiniteAbelianGroup& g, const char* where) {
    if (C.empty()) throw InvalidInput(std::string(where) + ": empty window");
    if (C.mask.size() != static_cast<std::size_t>(g.order()))
        throw InvalidInput(std::string(where) + ": window built for a different group");
}

// Q may not sit on outcomes carrying no mass at all; recentering is
// undefined there.
void ensure_no_massless_charge(const OmegaMeasure& Q, const RandomMeasure& xi,
                               const char* where) {
    const int M = Q.space->outcomes();
    for (int w = 0; w < M; ++w) {
        if (Q.at(w).sign() < 0)
            throw InvalidInput(std::string(where) + ": negative weight at outcome " +
                               Q.space->label(w));
        if (!Q.at(w).is_zero() && total_mass(xi.at(w)).is_zero())
            throw InvalidInput(std::string(where) + ": outcome " + Q.space->label(w) +
                               " is charged but carries no mass");
    }
}

Scalar window_mass(const GMeasure& mu, const Subset& C, int shift, const FiniteAbelianGroup& g) {
    Scalar m;
    for (int c : C.members) m += mu.at(g.add(c, shift));
    return m;
}

MassStatReport run_windows(const OmegaMeasure& Q, const RandomMeasure& xi,
                           const std::vector<Subset>& windows, bool complete) {
    const FlowSpace& sp = *Q.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();

    MassStatReport rep;
    rep.complete = complete;
    for (const Subset& C : windows) {
        ++rep.sets_checked;
        const int K = C.size();
        const Scalar invK = Scalar::rational(1, K);

        // lhs table over (outcome, element) pairs: recenter at a source s
        // drawn from the window kernel at -r, then report the point s + r.
        std::vector<Scalar> lhs(static_cast<std::size_t>(M) * N);
        for (int w = 0; w < M; ++w) {
            if (Q.at(w).is_zero()) continue;
            const Scalar q = Q.at(w) * invK;
            for (int r : C.members) {
                Scalar m = window_mass(xi.at(w), C, g.neg(r), g);
                if (!m.is_zero()) {
                    const Scalar qm = q * m.inverse();
                    for (int c : C.members) {
                        const int s = g.sub(c, r);
                        const Scalar& x = xi.at(w).at(s);
                        if (!x.is_zero())
                            lhs[static_cast<std::size_t>(sp.flow(s, w)) * N + c] += qm * x;
                    }
                } else {
                    const int s = g.neg(r);
                    lhs[static_cast<std::size_t>(sp.flow(s, w)) * N + 0] += q;
                }
            }
        }

        for (int wp = 0; wp < M; ++wp)
            for (int gp = 0; gp < N; ++gp) {
                const Scalar rhs = C.contains(gp) ? Q.at(wp) * invK : Scalar();
                const Scalar& got = lhs[static_cast<std::size_t>(wp) * N + gp];
                if (!(got == rhs)) {
                    rep.holds = false;
                    rep.witness.window = C.members;
                    rep.witness.omega = wp;
                    rep.witness.g = gp;
                    rep.witness.lhs = got;
                    rep.witness.rhs = rhs;
                    return rep;
                }
            }
    }
    return rep;
}

}  // namespace

GMeasure window_kernel_row(const RandomMeasure& xi, const Subset& C, int w, int t) {
    const FiniteAbelianGroup& g = xi.space->group();
    ensure_window(C, g, "window kernel row");
    Scalar m = window_mass(xi.at(w), C, t, g);
    if (m.is_zero()) return dirac(xi.space->group_ptr(), t);
    GMeasure row = zero_measure(xi.space->group_ptr());
    const Scalar inv = m.inverse();
    for (int c : C.members) {
        const int s = g.add(c, t);
        const Scalar& x = xi.at(w).at(s);
        if (!x.is_zero()) row.mass[s] = x * inv;
    }
    return row;
}

TransportKernel window_kernel(const RandomMeasure& xi, const Subset& C, Precheck pc) {
    if (!xi.space) throw InvalidInput("window kernel: missing space");
    ensure_window(C, xi.space->group(), "window kernel");
    if (pc == Precheck::enforce) require_adapted(xi, "weight field", "window kernel");
    const FlowSpace& sp = *xi.space;
    const int N = static_cast<int>(sp.group().order());
    const int M = sp.outcomes();
    std::vector<GMeasure> cells;
    cells.reserve(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int t = 0; t < N; ++t) cells.push_back(window_kernel_row(xi, C, w, t));
    return TransportKernel::from_cells(xi.space, std::move(cells));
}

std::vector<Subset> default_window_universe(const FiniteAbelianGroup& g) {
    const int N = static_cast<int>(g.order());
    std::vector<Subset> out;
    if (N <= 12) {
        const std::uint64_t top = (1ULL << N);
        out.reserve(top - 1);
        for (std::uint64_t bits = 1; bits < top; ++bits) out.push_back(Subset::from_mask_bits(g, bits));
        return out;
    }
    // Too many subsets to sweep: singletons plus enumeration prefixes.
    for (int e = 0; e < N; ++e) out.push_back(Subset::singleton(g, e));
    std::vector<int> prefix{0};
    for (int e = 1; e < N; ++e) {
        prefix.push_back(e);
        out.push_back(Subset::of(g, prefix));
    }
    return out;
}

MassStatReport is_mass_stationary(const OmegaMeasure& Q, const RandomMeasure& xi, Precheck pc) {
    require_same_space(Q, xi, "mass-stationarity check");
    const FiniteAbelianGroup& g = Q.space->group();
    if (pc == Precheck::enforce) {
        require_adapted(xi, "weight field", "mass-stationarity check");
        ensure_no_massless_charge(Q, xi, "mass-stationarity check");
    }
    return run_windows(Q, xi, default_window_universe(g), g.order() <= 12);
}

MassStatReport is_mass_stationary(const OmegaMeasure& Q, const RandomMeasure& xi,
                                  const std::vector<Subset>& windows, Precheck pc) {
    require_same_space(Q, xi, "mass-stationarity check");
    const FiniteAbelianGroup& g = Q.space->group();
    for (const Subset& C : windows) ensure_window(C, g, "mass-stationarity check");
    if (pc == Precheck::enforce) {
        require_adapted(xi, "weight field", "mass-stationarity check");
        ensure_no_massless_charge(Q, xi, "mass-stationarity check");
    }
    return run_windows(Q, xi, windows, false);
}

TransportKernel window_pair_kernel(const RandomMeasure& xi, const Subset& C, const Subset& D,
                                   Precheck pc) {
    if (!xi.space) throw InvalidInput("window pair kernel: missing space");
    const FiniteAbelianGroup& g = xi.space->group();
    ensure_window(C, g, "window pair kernel");
    if (D.mask.size() != static_cast<std::size_t>(g.order()))
        throw InvalidInput("window pair kernel: target set built for a different group");
    if (pc == Precheck::enforce) require_adapted(xi, "weight field", "window pair kernel");

    const FlowSpace& sp = *xi.space;
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    const Scalar invK = Scalar::rational(1, C.size());
    std::vector<GMeasure> cells;
    cells.reserve(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int t = 0; t < N; ++t) {
            GMeasure out = zero_measure(sp.group_ptr());
            for (int r : C.members) {
                GMeasure part = window_kernel_row(xi, C, w, g.sub(t, r));
                for (int s = 0; s < N; ++s) {
                    if (part.at(s).is_zero()) continue;
                    if (D.contains(g.add(g.sub(s, t), r))) out.mass[s] += invK * part.at(s);
                }
            }
            cells.push_back(std::move(out));
        }
    return TransportKernel::from_cells(xi.space, std::move(cells));
}

PushMatchReport check_window_pair_push(const RandomMeasure& xi, const Subset& C, const Subset& D,
                                       Precheck pc) {
    TransportKernel T = window_pair_kernel(xi, C, D, pc);
    const FlowSpace& sp = *xi.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    int both = 0;
    for (int c : C.members)
        if (D.contains(c)) ++both;
    const Scalar frac = Scalar::rational(both, C.size());

    PushMatchReport rep;
    RandomMeasure pushed = push_through(xi, T);
    for (int w = 0; w < M; ++w)
        for (int b = 0; b < N; ++b) {
            const Scalar want = frac * xi.at(w).at(b);
            if (!(pushed.at(w).at(b) == want)) {
                rep.ok = false;
                rep.omega = w;
                rep.b = b;
                rep.lhs = pushed.at(w).at(b);
                rep.rhs = want;
                return rep;
            }
        }
    return rep;
}

namespace {

// Source-0 row of the normalized single-target slice of the window pair
// kernel: row{t} = 1_C(d - t) * T_C(w, t - d){t}. Written out directly so the
// battery route shares no code with run_windows.
GMeasure slice_base_row(const RandomMeasure& xi, const Subset& C, int d, int w) {
    const FiniteAbelianGroup& g = xi.space->group();
    GMeasure row = zero_measure(xi.space->group_ptr());
    for (int r : C.members) {
        const int t = g.sub(d, r);
        Scalar m = window_mass(xi.at(w), C, g.sub(t, d), g);
        if (!m.is_zero()) {
            // t lands in C + (t - d) exactly when d is in C.
            if (C.contains(d)) {
                const Scalar& x = xi.at(w).at(t);
                if (!x.is_zero()) row.mass[t] += x * m.inverse();
            }
        } else if (d == 0) {
            row.mass[t] += Scalar(1);
        }
    }
    return row;
}

}  // namespace

BatteryReport check_preserving_battery(const OmegaMeasure& Q, const RandomMeasure& xi,
                                       int random_kernels, std::uint64_t seed, Precheck pc) {
    if (random_kernels < 0) throw InvalidInput("preserving battery: negative kernel count");
    BatteryReport rep;
    rep.direct = is_mass_stationary(Q, xi, pc);

    const FlowSpace& sp = *Q.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();

    // Family route: for each window C and target element d, push Q through
    // the slice and demand |C meet {d}| / |C| of Q back. Additivity in the
    // target set makes the single-element slices carry the whole family.
    std::vector<int> charged;
    for (int w = 0; w < M; ++w)
        if (!Q.at(w).is_zero()) charged.push_back(w);

    std::vector<Subset> universe = default_window_universe(g);
    for (const Subset& C : universe) {
        const int K = C.size();
        const Scalar invK = Scalar::rational(1, K);

        // Reciprocal window masses per (charged outcome, window shift -r);
        // zero stands in for an empty window.
        std::vector<Scalar> recip(charged.size() * static_cast<std::size_t>(K));
        for (std::size_t ci = 0; ci < charged.size(); ++ci)
            for (int ri = 0; ri < K; ++ri) {
                Scalar m = window_mass(xi.at(charged[ci]), C, g.neg(C.members[ri]), g);
                if (!m.is_zero()) recip[ci * K + ri] = m.inverse();
            }

        std::vector<int> targets = C.members;
        if (!C.contains(0)) targets.push_back(0);  // stay-put rows surface at d = 0
        for (int d : targets) {
            ++rep.kernels_checked;
            const bool in_window = C.contains(d);
            std::vector<Scalar> image(static_cast<std::size_t>(M));
            for (std::size_t ci = 0; ci < charged.size(); ++ci) {
                const int w = charged[ci];
                const Scalar q = Q.at(w) * invK;
                for (int ri = 0; ri < K; ++ri) {
                    const int s = g.sub(d, C.members[ri]);
                    const Scalar& rm = recip[ci * K + ri];
                    if (!rm.is_zero()) {
                        if (!in_window) continue;
                        const Scalar& x = xi.at(w).at(s);
                        if (!x.is_zero()) image[sp.flow(s, w)] += q * rm * x;
                    } else if (d == 0) {
                        image[sp.flow(s, w)] += q;
                    }
                }
            }
            for (int wp = 0; wp < M; ++wp) {
                const Scalar want = in_window ? Q.at(wp) * invK : Scalar();
                if (!(image[wp] == want)) {
                    rep.battery = false;
                    rep.window = C.members;
                    rep.window_d = d;
                    rep.omega = wp;
                    rep.lhs = image[wp];
                    rep.rhs = want;
                    return rep;
                }
            }
        }
    }

    // Random mixtures and compositions of normalized slices with the
    // identity; every one of them moves xi onto itself, so a mass-stationary
    // Q must be a fixed point of the recentering image.
    for (int i = 0; i < random_kernels; ++i) {
        MixRng rng{derive_seed(seed, 57, static_cast<std::uint64_t>(i))};
        auto random_slice = [&]() {
            std::uint64_t bits;
            if (N <= 20) {
                bits = rng.below((1ULL << N) - 1) + 1;
            } else {
                bits = 0;
                for (int j = 0; j < 8; ++j) bits |= 1ULL << rng.below(static_cast<std::uint64_t>(N));
            }
            Subset C = Subset::from_mask_bits(g, bits);
            const int d = C.members[rng.below(static_cast<std::uint64_t>(C.size()))];
            // slice_base_row already carries the |C| normalization.
            std::vector<GMeasure> base;
            base.reserve(M);
            for (int w = 0; w < M; ++w) base.push_back(slice_base_row(xi, C, d, w));
            return TransportKernel::from_base(Q.space, base);
        };
        auto random_mixture = [&]() {
            const int parts = 2 + static_cast<int>(rng.below(3));
            std::vector<std::pair<Scalar, TransportKernel>> mix;
            long total = 0;
            std::vector<long> raw;
            for (int j = 0; j < parts; ++j) {
                raw.push_back(1 + static_cast<long>(rng.below(4)));
                total += raw.back();
            }
            for (int j = 0; j < parts; ++j) {
                TransportKernel T = (j == 0) ? TransportKernel::identity(Q.space) : random_slice();
                mix.emplace_back(Scalar::rational(raw[j], total), std::move(T));
            }
            return combine_kernels(mix);
        };
        TransportKernel T = random_mixture();
        if (i % 4 == 3) T = compose_kernels(T, random_mixture());

        ++rep.kernels_checked;
        std::vector<Scalar> image(static_cast<std::size_t>(M));
        for (int w = 0; w < M; ++w) {
            if (Q.at(w).is_zero()) continue;
            const GMeasure& row = T.at(w, 0);
            for (int t = 0; t < N; ++t)
                if (!row.at(t).is_zero()) image[sp.flow(t, w)] += Q.at(w) * row.at(t);
        }
        for (int wp = 0; wp < M; ++wp)
            if (!(image[wp] == Q.at(wp))) {
                rep.battery = false;
                rep.random_index = i;
                rep.omega = wp;
                rep.lhs = image[wp];
                rep.rhs = Q.at(wp);
                return rep;
            }
    }
    return rep;
}

WindowBiasValues window_bias_example() {
    GroupPtr g = make_group({3});
    MarkField mf = make_mark_field(g, {Scalar(0), Scalar(1)},
                                   {Scalar::rational(1, 2), Scalar::rational(1, 2)});
    const FlowSpace& sp = *mf.space;
    const int M = sp.outcomes();

    PalmResult pr = palm_measure(mf.P, mf.xi, Subset::singleton(*g, 0));
    if (!pr.normalized) throw InternalDefect("window bias example: degenerate field");
    const OmegaMeasure& Q = *pr.normalized;

    const Subset C = Subset::of(*g, {0, 1});
    const Subset whole = Subset::full(*g);
    std::vector<char> A(M, 0);
    for (int w = 0; w < M; ++w) A[w] = mf.digit(w, 1) == 1 ? 1 : 0;

    auto average = [&](const Subset& window, bool everything) {
        Scalar acc;
        for (int w = 0; w < M; ++w) {
            if (Q.at(w).is_zero()) continue;
            GMeasure row = window_kernel_row(mf.xi, window, w, 0);
            for (int s = 0; s < static_cast<int>(g->order()); ++s) {
                if (row.at(s).is_zero()) continue;
                if (everything || A[sp.flow(s, w)]) acc += Q.at(w) * row.at(s);
            }
        }
        return acc;
    };

    WindowBiasValues out;
    out.lhs = average(C, false);
    out.full_event_lhs = average(C, true);
    out.whole_group_lhs = average(whole, false);
    Scalar qa;
    for (int w = 0; w < M; ++w)
        if (A[w]) qa += Q.at(w);
    out.rhs = qa;
    out.whole_group_rhs = qa;
    out.full_event_rhs = Q.total();
    return out;
}

TwoSpeciesReport two_species_example(const std::vector<long>& moduli, long p_num, long p_den) {
    GroupPtr g = make_group(moduli);
    const int N = static_cast<int>(g->order());
    if (N > 4) throw InvalidInput("two species example: rule enumeration is exhaustive only up to order 4");
    if (p_num <= 0 || p_den <= 0 || p_num >= p_den)
        throw InvalidInput("two species example: success weight must sit strictly between 0 and 1");

    const Scalar p = Scalar::rational(p_num, p_den);
    const Scalar q1 = Scalar(1) - p;
    MarkField A = make_mark_field(g, {Scalar(0), Scalar(1)}, {q1, p});
    MarkField B = make_mark_field(g, {Scalar(0), Scalar(1)}, {q1, p});
    SpacePtr prod = product_space(A.space, B.space);
    const int MB = B.space->outcomes();
    const int M = prod->outcomes();
    OmegaMeasure P = product_measure(A.P, B.P, prod);
    RandomMeasure xi1 = lift_left(A.xi, prod, MB);
    RandomMeasure xi2 = lift_right(B.xi, prod, MB);

    RandomMeasure xi(prod);
    for (int w = 0; w < M; ++w)
        xi.at(w) = add_measures(xi1.at(w), scale_measure(xi2.at(w), Scalar::root_two()));

    TwoSpeciesReport rep;
    for (int w = 0; w < M && !rep.irrational_masses; ++w)
        for (int b = 0; b < N; ++b)
            if (sgn(xi.at(w).at(b).irr_part()) != 0) {
                rep.irrational_masses = true;
                break;
            }

    // Q: species one conditioned to carry the origin, species two untouched.
    OmegaMeasure Q(prod);
    for (int a = 0; a < A.space->outcomes(); ++a) {
        if (A.digit(a, 0) != 1) continue;
        for (int b = 0; b < MB; ++b) {
            Scalar weight(1);
            for (int e = 1; e < N; ++e) weight *= A.digit(a, e) == 1 ? p : q1;
            for (int e = 0; e < N; ++e) weight *= B.digit(b, e) == 1 ? p : q1;
            Q.at(a * MB + b) = weight;
        }
    }

    PalmResult pr = palm_measure(P, xi1, Subset::singleton(*g, 0));
    rep.palm_verified = pr.normalized.has_value();
    if (rep.palm_verified)
        for (int w = 0; w < M; ++w)
            if (!(pr.normalized->at(w) == Q.at(w))) {
                rep.palm_verified = false;
                break;
            }

    // Exhaustive covariant allocation rules, one origin-target germ per
    // orbit. Preservation splits into rational and irrational parts, so a
    // germ preserving the combined field preserves each species alone.
    OrbitDecomposition od = orbits(*prod);
    std::vector<int> pos(M, -1);
    for (const std::vector<int>& mem : od.members)
        for (std::size_t j = 0; j < mem.size(); ++j) pos[mem[j]] = static_cast<int>(j);

    for (const std::vector<int>& mem : od.members) {
        bool charged = false;
        for (int w : mem)
            if (!Q.at(w).is_zero()) charged = true;
        if (!charged) continue;

        const int k = static_cast<int>(mem.size());
        std::vector<int> pi(k, 0);
        auto preserves = [&](const RandomMeasure& field, int w) {
            std::vector<Scalar> pushed(static_cast<std::size_t>(N));
            for (int s = 0; s < N; ++s) {
                const Scalar& x = field.at(w).at(s);
                if (x.is_zero()) continue;
                pushed[g->add(pi[pos[prod->flow(s, w)]], s)] += x;
            }
            for (int b = 0; b < N; ++b)
                if (!(pushed[b] == field.at(w).at(b))) return false;
            return true;
        };
        while (true) {
            ++rep.germs_enumerated;
            bool keep = true;
            for (int w : mem)
                if (!Q.at(w).is_zero() && !preserves(xi, w)) {
                    keep = false;
                    break;
                }
            if (keep) {
                ++rep.preserving_germs;
                for (int w : mem)
                    if (!Q.at(w).is_zero() && !preserves(xi1, w)) rep.all_preserving_fix_first = false;
                std::vector<Scalar> image(M);
                for (int w : mem)
                    if (!Q.at(w).is_zero()) image[prod->flow(pi[pos[w]], w)] += Q.at(w);
                for (int w : mem)
                    if (!(image[w] == Q.at(w))) rep.all_preserving_invariant = false;
            }
            int j = 0;
            while (j < k && pi[j] == N - 1) pi[j++] = 0;
            if (j == k) break;
            ++pi[j];
        }
    }

    rep.combined = is_mass_stationary(Q, xi);
    rep.first_only = is_mass_stationary(Q, xi1);
    return rep;
}

}  // namespace palmlab
