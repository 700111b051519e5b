#include "palmlab/palm.hpp"

#include "palmlab/util.hpp"

namespace palmlab {

namespace {

void enforce_palm_pre(const OmegaMeasure& P, const RandomMeasure& xi, const char* where) {
    require_same_space(P, xi, where);
    auto st = is_stationary(P);
    if (!st.ok)
        throw InvalidInput(std::string(where) + ": measure not stationary at (s=" +
                           P.space->group().element_text(st.s) + ", outcome " + P.space->label(st.omega) + ")");
    auto inv = is_invariant_rm(xi);
    if (!inv.ok)
        throw InvalidInput(std::string(where) + ": random measure not flow-adapted at (outcome " +
                           xi.space->label(inv.omega) + ", s=" + xi.space->group().element_text(inv.s) +
                           ", b=" + xi.space->group().element_text(inv.b) + ")");
}

void enforce_no_zero_mass_charge(const OmegaMeasure& Q, const RandomMeasure& xi, const char* where) {
    for (int w = 0; w < Q.space->outcomes(); ++w)
        if (!Q.at(w).is_zero() && xi.at(w).is_zero())
            throw InvalidInput(std::string(where) + ": measure charges outcome " + Q.space->label(w) +
                               " whose group measure is zero");
}

}  // namespace

PalmResult palm_measure(const OmegaMeasure& P, const RandomMeasure& xi, const Subset& B, Precheck pc) {
    if (B.empty()) throw InvalidInput("palm_measure: empty window");
    if (pc == Precheck::enforce) enforce_palm_pre(P, xi, "palm_measure");
    const FlowSpace& sp = *P.space;
    PalmResult out;
    out.measure = OmegaMeasure(P.space);
    for (int w = 0; w < sp.outcomes(); ++w) {
        if (P.at(w).is_zero()) continue;
        const GMeasure& mu = xi.at(w);
        for (int s : B.members) {
            if (mu.at(s).is_zero()) continue;
            out.measure.at(sp.flow(s, w)) += P.at(w) * mu.at(s);
        }
    }
    const Scalar inv_count = Scalar(1) / Scalar(B.size());
    for (auto& v : out.measure.weight) v *= inv_count;
    out.intensity = out.measure.total();
    if (out.intensity.sign() > 0) {
        OmegaMeasure norm = out.measure;
        const Scalar inv = out.intensity.inverse();
        for (auto& v : norm.weight) v *= inv;
        out.normalized = std::move(norm);
    }
    return out;
}

CampbellValues check_refined_campbell(const OmegaMeasure& P, const RandomMeasure& xi,
                                      const std::vector<Scalar>& f, Precheck pc) {
    const FlowSpace& sp = *P.space;
    const int N = static_cast<int>(sp.group().order());
    if (f.size() != static_cast<std::size_t>(sp.outcomes()) * N)
        throw InvalidInput("check_refined_campbell: f has wrong size");
    if (pc == Precheck::enforce) enforce_palm_pre(P, xi, "check_refined_campbell");
    auto palm = palm_measure(P, xi, Subset::singleton(sp.group(), 0), Precheck::trust);
    CampbellValues v;
    for (int w = 0; w < sp.outcomes(); ++w) {
        if (!P.at(w).is_zero()) {
            Scalar inner;
            for (int s = 0; s < N; ++s) {
                const Scalar& m = xi.at(w).at(s);
                if (m.is_zero()) continue;
                inner += f[static_cast<std::size_t>(sp.flow(s, w)) * N + s] * m;
            }
            v.lhs += P.at(w) * inner;
        }
        if (!palm.measure.at(w).is_zero()) {
            Scalar inner;
            for (int s = 0; s < N; ++s) inner += f[static_cast<std::size_t>(w) * N + s];
            v.rhs += palm.measure.at(w) * inner;
        }
    }
    return v;
}

BasisWitness check_refined_campbell_basis(const OmegaMeasure& P, const RandomMeasure& xi, Precheck pc) {
    if (pc == Precheck::enforce) enforce_palm_pre(P, xi, "check_refined_campbell_basis");
    const FlowSpace& sp = *P.space;
    const int N = static_cast<int>(sp.group().order());
    const int M = sp.outcomes();
    auto palm = palm_measure(P, xi, Subset::singleton(sp.group(), 0), Precheck::trust);
    std::vector<Scalar> lhs(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w) {
        if (P.at(w).is_zero()) continue;
        for (int s = 0; s < N; ++s) {
            const Scalar& m = xi.at(w).at(s);
            if (m.is_zero()) continue;
            lhs[static_cast<std::size_t>(sp.flow(s, w)) * N + s] += P.at(w) * m;
        }
    }
    BasisWitness rep;
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            const Scalar& l = lhs[static_cast<std::size_t>(w) * N + s];
            const Scalar& r = palm.measure.at(w);
            if (l != r) {
                rep.ok = false;
                rep.omega = w;
                rep.s = s;
                rep.lhs = l;
                rep.rhs = r;
                return rep;
            }
        }
    return rep;
}

OmegaMeasure invert_palm(const OmegaMeasure& Q, const RandomMeasure& xi, Precheck pc) {
    require_same_space(Q, xi, "invert_palm");
    if (pc == Precheck::enforce) {
        auto inv = is_invariant_rm(xi);
        if (!inv.ok) throw InvalidInput("invert_palm: random measure not flow-adapted");
        enforce_no_zero_mass_charge(Q, xi, "invert_palm");
    }
    const FlowSpace& sp = *Q.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    // den[w] = sum_t xi(w){t}^2; positive wherever xi(w) is nonzero.
    std::vector<Scalar> den(sp.outcomes());
    for (int w = 0; w < sp.outcomes(); ++w) {
        Scalar d;
        for (int t = 0; t < N; ++t) {
            const Scalar& m = xi.at(w).at(t);
            if (!m.is_zero()) d += m * m;
        }
        den[w] = std::move(d);
    }
    OmegaMeasure out(Q.space);
    for (int w = 0; w < sp.outcomes(); ++w) {
        if (Q.at(w).is_zero()) continue;
        for (int s = 0; s < N; ++s) {
            const int wm = sp.flow(g.neg(s), w);
            const Scalar& m = xi.at(wm).at(s);
            if (m.is_zero()) continue;
            out.at(wm) += Q.at(w) * m / den[wm];
        }
    }
    return out;
}

BasisWitness check_mecke(const OmegaMeasure& Q, const RandomMeasure& xi, Precheck pc) {
    require_same_space(Q, xi, "check_mecke");
    if (pc == Precheck::enforce) {
        auto inv = is_invariant_rm(xi);
        if (!inv.ok) throw InvalidInput("check_mecke: random measure not flow-adapted");
        enforce_no_zero_mass_charge(Q, xi, "check_mecke");
    }
    const FlowSpace& sp = *Q.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    std::vector<Scalar> lhs(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w) {
        if (Q.at(w).is_zero()) continue;
        for (int s = 0; s < N; ++s) {
            const Scalar& m = xi.at(w).at(s);
            if (m.is_zero()) continue;
            lhs[static_cast<std::size_t>(sp.flow(s, w)) * N + g.neg(s)] += Q.at(w) * m;
        }
    }
    BasisWitness rep;
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            const Scalar& l = lhs[static_cast<std::size_t>(w) * N + s];
            Scalar r = Q.at(w) * xi.at(w).at(s);
            if (l != r) {
                rep.ok = false;
                rep.omega = w;
                rep.s = s;
                rep.lhs = l;
                rep.rhs = std::move(r);
                return rep;
            }
        }
    return rep;
}

CampbellValues mecke_pair_values(const OmegaMeasure& Q, const RandomMeasure& xi, int omega, int s) {
    const FlowSpace& sp = *Q.space;
    const FiniteAbelianGroup& g = sp.group();
    CampbellValues v;
    // lhs: sum over w with flow(-s, w) = omega of Q{w} xi(w){-s}; scan all
    // outcomes rather than inverting the flow, to stay independent of the
    // table-based path.
    const int ms = g.neg(s);
    for (int w = 0; w < sp.outcomes(); ++w) {
        if (Q.at(w).is_zero()) continue;
        if (sp.flow(ms, w) == omega) v.lhs += Q.at(w) * xi.at(w).at(ms);
    }
    v.rhs = Q.at(omega) * xi.at(omega).at(s);
    return v;
}

std::vector<Scalar> sample_intensity(const OmegaMeasure& P, const RandomMeasure& xi, const Subset& B,
                                     Precheck pc) {
    if (B.size() != 1) throw InvalidInput("sample_intensity: window must be a singleton");
    if (pc == Precheck::enforce) enforce_palm_pre(P, xi, "sample_intensity");
    std::vector<Scalar> f(P.space->outcomes());
    for (int w = 0; w < P.space->outcomes(); ++w) f[w] = xi.at(w).at(B.members[0]);
    return conditional_on_invariant(P, f);
}

OmegaMeasure modified_palm(const OmegaMeasure& P, const RandomMeasure& xi, Precheck pc) {
    if (pc == Precheck::enforce) enforce_palm_pre(P, xi, "modified_palm");
    const FlowSpace& sp = *P.space;
    const Subset origin = Subset::singleton(sp.group(), 0);
    const auto density = sample_intensity(P, xi, origin, Precheck::trust);
    for (int w = 0; w < sp.outcomes(); ++w)
        if (!P.at(w).is_zero() && density[w].is_zero())
            throw InvalidInput("modified_palm: P-charged orbit with zero density at outcome " + sp.label(w));
    auto palm = palm_measure(P, xi, origin, Precheck::trust);

    OmegaMeasure direct(P.space);
    for (int w = 0; w < sp.outcomes(); ++w)
        if (!palm.measure.at(w).is_zero()) direct.at(w) = palm.measure.at(w) / density[w];

    // Second route: Palm measure of the density-normalized random measure.
    RandomMeasure scaled(P.space);
    for (int w = 0; w < sp.outcomes(); ++w)
        if (!density[w].is_zero()) scaled.at(w) = scale_measure(xi.at(w), density[w].inverse());
    auto via_scaled = palm_measure(P, scaled, origin, Precheck::trust);
    for (int w = 0; w < sp.outcomes(); ++w)
        if (direct.at(w) != via_scaled.measure.at(w))
            throw InternalDefect("modified_palm: the two defining routes disagree at outcome " + sp.label(w));
    return direct;
}

}  // namespace palmlab
