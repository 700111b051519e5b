#include "palmlab/transport.hpp"

#include <string>
#include <utility>

#include "palmlab/util.hpp"

namespace palmlab {

namespace {

void ensure_stationary(const OmegaMeasure& P, const char* where) { require_stationary(P, where); }

void ensure_adapted(const RandomMeasure& xi, const char* what, const char* where) {
    require_adapted(xi, what, where);
}

void ensure_kernel_space(const TransportKernel& T, const OmegaMeasure& P, const char* where) {
    if (!P.space || !T.space()->same_as(*P.space))
        throw InvalidInput(std::string(where) + ": kernel built over a different space");
}

void ensure_invariant_kernel(const TransportKernel& T, const char* where) {
    KernelInvarianceReport r = is_invariant_kernel(T);
    if (!r.ok)
        throw InvalidInput(std::string(where) + ": kernel not invariant at (outcome " +
                           std::to_string(r.omega) + ", s=" +
                           T.space()->group().element_text(r.s) + ", t=" +
                           T.space()->group().element_text(r.t) + ")");
}

// kappa(flow(r,w), s-r, t-r) = kappa(w,s,t); the full orbit scan, not just
// a generating set, so the witness is always the first offender.
void ensure_invariant_density(const std::vector<Scalar>& kappa, const FlowSpace& sp,
                              const char* where) {
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    auto K = [&](int w, int s, int t) -> const Scalar& {
        return kappa[(static_cast<std::size_t>(w) * N + s) * N + t];
    };
    for (int w = 0; w < M; ++w)
        for (int r = 1; r < N; ++r) {
            const int wr = sp.flow(r, w);
            for (int s = 0; s < N; ++s)
                for (int t = 0; t < N; ++t)
                    if (!(K(wr, g.sub(s, r), g.sub(t, r)) == K(w, s, t)))
                        throw InvalidInput(std::string(where) +
                                           ": density not invariant at (outcome " +
                                           std::to_string(w) + ", s=" + g.element_text(s) +
                                           ", t=" + g.element_text(t) + ", shift r=" +
                                           g.element_text(r) + ")");
        }
}

}  // namespace

TransportKernel TransportKernel::from_cells(SpacePtr space, std::vector<GMeasure> cells) {
    if (!space) throw InvalidInput("transport kernel: missing space");
    const int N = static_cast<int>(space->group().order());
    const int M = space->outcomes();
    if (cells.size() != static_cast<std::size_t>(M) * N)
        throw InvalidInput("transport kernel: need one row per (outcome, source) pair");
    TransportKernel T;
    T.markovian_ = true;
    T.sup_total_ = Scalar(0);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            const GMeasure& row = cells[static_cast<std::size_t>(w) * N + s];
            if (!row.group || !row.group->same_as(space->group()))
                throw InvalidInput("transport kernel: row group mismatch");
            for (int b = 0; b < N; ++b)
                if (row.at(b).sign() < 0)
                    throw InvalidInput("transport kernel: negative mass in row (outcome " +
                                       std::to_string(w) + ", s=" +
                                       space->group().element_text(s) + ")");
            Scalar tot = total_mass(row);
            if (!(tot == Scalar(1))) T.markovian_ = false;
            if (tot > T.sup_total_) T.sup_total_ = tot;
        }
    T.space_ = std::move(space);
    T.cells_ = std::move(cells);
    return T;
}

TransportKernel TransportKernel::from_base(SpacePtr space, const std::vector<GMeasure>& base) {
    if (!space) throw InvalidInput("transport kernel: missing space");
    const int N = static_cast<int>(space->group().order());
    const int M = space->outcomes();
    if (base.size() != static_cast<std::size_t>(M))
        throw InvalidInput("transport kernel: need one base row per outcome");
    std::vector<GMeasure> cells(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s)
            cells[static_cast<std::size_t>(w) * N + s] =
                shift_measure(base[space->flow(s, w)], space->group().neg(s));
    return from_cells(std::move(space), std::move(cells));
}

TransportKernel TransportKernel::identity(SpacePtr space) {
    if (!space) throw InvalidInput("transport kernel: missing space");
    const int N = static_cast<int>(space->group().order());
    const int M = space->outcomes();
    std::vector<GMeasure> cells;
    cells.reserve(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) cells.push_back(dirac(space->group_ptr(), s));
    return from_cells(std::move(space), std::move(cells));
}

KernelInvarianceReport is_invariant_kernel(const TransportKernel& T) {
    const FlowSpace& sp = *T.space();
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    KernelInvarianceReport rep;
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            const GMeasure& row = T.at(w, s);
            for (int t = 1; t < N; ++t) {
                const GMeasure& moved = T.at(sp.flow(t, w), g.sub(s, t));
                for (int b = 0; b < N; ++b) {
                    const Scalar& lhs = moved.at(g.sub(b, t));
                    const Scalar& rhs = row.at(b);
                    if (!(lhs == rhs)) {
                        rep.ok = false;
                        rep.omega = w;
                        rep.s = s;
                        rep.t = t;
                        rep.b = b;
                        rep.lhs = lhs;
                        rep.rhs = rhs;
                        return rep;
                    }
                }
            }
        }
    return rep;
}

TransportKernel kernel_from_density(const std::vector<Scalar>& kappa, const RandomMeasure& eta,
                                    Precheck pc) {
    if (!eta.space) throw InvalidInput("density kernel: missing space");
    const SpacePtr& space = eta.space;
    const FiniteAbelianGroup& g = space->group();
    const int N = static_cast<int>(g.order());
    const int M = space->outcomes();
    if (kappa.size() != static_cast<std::size_t>(M) * N * N)
        throw InvalidInput("density kernel: density table has wrong size");
    if (pc == Precheck::enforce) {
        ensure_adapted(eta, "base measure", "density kernel");
        for (const Scalar& v : kappa)
            if (v.sign() < 0) throw InvalidInput("density kernel: negative density value");
        ensure_invariant_density(kappa, *space, "density kernel");
    }
    std::vector<GMeasure> cells(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            GMeasure row(space->group_ptr());
            for (int t = 0; t < N; ++t) {
                const Scalar& k = kappa[(static_cast<std::size_t>(w) * N + s) * N + t];
                if (k.is_zero() || eta.at(w).at(t).is_zero()) continue;
                row.at(t) = k * eta.at(w).at(t);
            }
            cells[static_cast<std::size_t>(w) * N + s] = std::move(row);
        }
    return TransportKernel::from_cells(space, std::move(cells));
}

RandomMeasure push_through(const RandomMeasure& xi, const TransportKernel& T) {
    if (!xi.space || !T.space()->same_as(*xi.space))
        throw InvalidInput("push through kernel: space mismatch");
    const int N = static_cast<int>(xi.space->group().order());
    const int M = xi.space->outcomes();
    RandomMeasure out(xi.space);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            const Scalar& c = xi.at(w).at(s);
            if (c.is_zero()) continue;
            const GMeasure& row = T.at(w, s);
            for (int b = 0; b < N; ++b) {
                if (row.at(b).is_zero()) continue;
                out.at(w).at(b) += c * row.at(b);
            }
        }
    return out;
}

BalancingReport is_balancing(const TransportKernel& T, const RandomMeasure& xi,
                             const RandomMeasure& eta, const OmegaMeasure& P) {
    require_same_space(P, xi, "balancing check");
    require_same_space(P, eta, "balancing check");
    ensure_kernel_space(T, P, "balancing check");
    const int N = static_cast<int>(P.space->group().order());
    const int M = P.space->outcomes();
    BalancingReport rep;
    for (int w = 0; w < M; ++w) {
        if (P.at(w).sign() <= 0) continue;
        GMeasure got(P.space->group_ptr());
        for (int s = 0; s < N; ++s) {
            const Scalar& c = xi.at(w).at(s);
            if (c.is_zero()) continue;
            const GMeasure& row = T.at(w, s);
            for (int b = 0; b < N; ++b)
                if (!row.at(b).is_zero()) got.at(b) += c * row.at(b);
        }
        for (int b = 0; b < N; ++b)
            if (!(got.at(b) == eta.at(w).at(b))) {
                rep.ok = false;
                rep.omega = w;
                rep.b = b;
                rep.lhs = got.at(b);
                rep.rhs = eta.at(w).at(b);
                return rep;
            }
    }
    return rep;
}

TransportKernel reverse_kernel(const TransportKernel& T, const RandomMeasure& xi,
                               const RandomMeasure& eta, const OmegaMeasure& P, Precheck pc) {
    require_same_space(P, xi, "reverse kernel");
    require_same_space(P, eta, "reverse kernel");
    ensure_kernel_space(T, P, "reverse kernel");
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "reverse kernel");
        ensure_adapted(xi, "source measure", "reverse kernel");
        ensure_adapted(eta, "target measure", "reverse kernel");
        ensure_invariant_kernel(T, "reverse kernel");
    }
    const FlowSpace& sp = *P.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();

    // The defining relation pins T* only where eta has mass on charged
    // orbits; elsewhere any Markov row keeps it a kernel, and the point mass
    // at the source is the one choice that also keeps it invariant.
    OrbitDecomposition od = orbits(sp);
    std::vector<char> charged(od.members.size(), 0);
    for (int w = 0; w < M; ++w)
        if (P.at(w).sign() > 0) charged[od.orbit_of[w]] = 1;

    std::vector<GMeasure> cells(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w) {
        const bool on_charged = charged[od.orbit_of[w]] != 0;
        for (int t = 0; t < N; ++t) {
            if (!on_charged || eta.at(w).at(t).is_zero()) {
                cells[static_cast<std::size_t>(w) * N + t] = dirac(sp.group_ptr(), t);
                continue;
            }
            const Scalar inv_mass = eta.at(w).at(t).inverse();
            GMeasure row(sp.group_ptr());
            for (int s = 0; s < N; ++s) {
                const Scalar& m = T.at(w, s).at(t);
                const Scalar& xs = xi.at(w).at(s);
                if (m.is_zero() || xs.is_zero()) continue;
                row.at(s) = m * xs * inv_mass;
            }
            cells[static_cast<std::size_t>(w) * N + t] = std::move(row);
        }
    }
    TransportKernel rev = TransportKernel::from_cells(P.space, std::move(cells));
    RelationReport rel = check_reverse_relation(T, rev, xi, eta, P);
    if (!rel.ok)
        throw InvalidInput("reverse kernel: no reverse exists; relation fails at (outcome " +
                           std::to_string(rel.omega) + ", s=" + g.element_text(rel.s) + ", t=" +
                           g.element_text(rel.t) + "): " + rel.lhs.str() + " vs " +
                           rel.rhs.str());
    return rev;
}

RelationReport check_reverse_relation(const TransportKernel& T, const TransportKernel& Tstar,
                                      const RandomMeasure& xi, const RandomMeasure& eta,
                                      const OmegaMeasure& P) {
    require_same_space(P, xi, "reverse relation check");
    require_same_space(P, eta, "reverse relation check");
    ensure_kernel_space(T, P, "reverse relation check");
    ensure_kernel_space(Tstar, P, "reverse relation check");
    const int N = static_cast<int>(P.space->group().order());
    const int M = P.space->outcomes();
    RelationReport rep;
    for (int w = 0; w < M; ++w) {
        if (P.at(w).sign() <= 0) continue;
        for (int s = 0; s < N; ++s)
            for (int t = 0; t < N; ++t) {
                Scalar lhs = T.at(w, s).at(t) * xi.at(w).at(s);
                Scalar rhs = Tstar.at(w, t).at(s) * eta.at(w).at(t);
                if (!(lhs == rhs)) {
                    rep.ok = false;
                    rep.omega = w;
                    rep.s = s;
                    rep.t = t;
                    rep.lhs = lhs;
                    rep.rhs = rhs;
                    return rep;
                }
            }
    }
    return rep;
}

CampbellValues check_exchange(const TransportKernel& T, const TransportKernel& Tstar,
                              const RandomMeasure& xi, const RandomMeasure& eta,
                              const OmegaMeasure& P, const std::vector<Scalar>& h, Precheck pc) {
    const FlowSpace& sp = *P.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    if (h.size() != static_cast<std::size_t>(M) * N)
        throw InvalidInput("exchange check: test table has wrong size");
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "exchange check");
        ensure_adapted(xi, "source measure", "exchange check");
        ensure_adapted(eta, "target measure", "exchange check");
        RelationReport rel = check_reverse_relation(T, Tstar, xi, eta, P);
        if (!rel.ok)
            throw InvalidInput("exchange check: kernels are not reverse to each other at (outcome " +
                               std::to_string(rel.omega) + ", s=" + g.element_text(rel.s) +
                               ", t=" + g.element_text(rel.t) + ")");
    }
    const Subset origin = Subset::singleton(g, 0);
    OmegaMeasure px = palm_measure(P, xi, origin, Precheck::trust).measure;
    OmegaMeasure pe = palm_measure(P, eta, origin, Precheck::trust).measure;
    CampbellValues out;
    for (int w = 0; w < M; ++w) {
        const Scalar& pw = px.at(w);
        if (pw.is_zero()) continue;
        for (int t = 0; t < N; ++t) {
            const Scalar& c = T.at(w, 0).at(t);
            if (c.is_zero()) continue;
            out.lhs += pw * c * h[static_cast<std::size_t>(sp.flow(t, w)) * N + g.neg(t)];
        }
    }
    for (int w = 0; w < M; ++w) {
        const Scalar& qw = pe.at(w);
        if (qw.is_zero()) continue;
        for (int s = 0; s < N; ++s) {
            const Scalar& c = Tstar.at(w, 0).at(s);
            if (c.is_zero()) continue;
            out.rhs += qw * c * h[static_cast<std::size_t>(w) * N + s];
        }
    }
    return out;
}

BasisWitness check_exchange_basis(const TransportKernel& T, const TransportKernel& Tstar,
                                  const RandomMeasure& xi, const RandomMeasure& eta,
                                  const OmegaMeasure& P, Precheck pc) {
    const FlowSpace& sp = *P.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "exchange check");
        ensure_adapted(xi, "source measure", "exchange check");
        ensure_adapted(eta, "target measure", "exchange check");
        RelationReport rel = check_reverse_relation(T, Tstar, xi, eta, P);
        if (!rel.ok)
            throw InvalidInput("exchange check: kernels are not reverse to each other at (outcome " +
                               std::to_string(rel.omega) + ", s=" + g.element_text(rel.s) +
                               ", t=" + g.element_text(rel.t) + ")");
    }
    const Subset origin = Subset::singleton(g, 0);
    OmegaMeasure px = palm_measure(P, xi, origin, Precheck::trust).measure;
    OmegaMeasure pe = palm_measure(P, eta, origin, Precheck::trust).measure;
    std::vector<Scalar> lhs(static_cast<std::size_t>(M) * N), rhs(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w) {
        const Scalar& pw = px.at(w);
        if (pw.is_zero()) continue;
        for (int t = 0; t < N; ++t) {
            const Scalar& c = T.at(w, 0).at(t);
            if (c.is_zero()) continue;
            lhs[static_cast<std::size_t>(sp.flow(t, w)) * N + g.neg(t)] += pw * c;
        }
    }
    for (int w = 0; w < M; ++w) {
        const Scalar& qw = pe.at(w);
        if (qw.is_zero()) continue;
        for (int s = 0; s < N; ++s) rhs[static_cast<std::size_t>(w) * N + s] = qw * Tstar.at(w, 0).at(s);
    }
    BasisWitness rep;
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            const std::size_t i = static_cast<std::size_t>(w) * N + s;
            if (!(lhs[i] == rhs[i])) {
                rep.ok = false;
                rep.omega = w;
                rep.s = s;
                rep.lhs = lhs[i];
                rep.rhs = rhs[i];
                return rep;
            }
        }
    return rep;
}

CampbellValues check_intensity_exchange(const RandomMeasure& xi, const RandomMeasure& eta,
                                        const OmegaMeasure& P, const std::vector<Scalar>& h,
                                        Precheck pc) {
    require_same_space(P, xi, "intensity exchange check");
    require_same_space(P, eta, "intensity exchange check");
    const FlowSpace& sp = *P.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    if (h.size() != static_cast<std::size_t>(M) * N)
        throw InvalidInput("intensity exchange check: test table has wrong size");
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "intensity exchange check");
        ensure_adapted(xi, "first measure", "intensity exchange check");
        ensure_adapted(eta, "second measure", "intensity exchange check");
    }
    const Subset origin = Subset::singleton(g, 0);
    OmegaMeasure px = palm_measure(P, xi, origin, Precheck::trust).measure;
    OmegaMeasure pe = palm_measure(P, eta, origin, Precheck::trust).measure;
    CampbellValues out;
    for (int w = 0; w < M; ++w) {
        const Scalar& pw = px.at(w);
        if (pw.is_zero()) continue;
        for (int t = 0; t < N; ++t) {
            const Scalar& c = eta.at(w).at(t);
            if (c.is_zero()) continue;
            out.lhs += pw * c * h[static_cast<std::size_t>(sp.flow(t, w)) * N + g.neg(t)];
        }
    }
    for (int w = 0; w < M; ++w) {
        const Scalar& qw = pe.at(w);
        if (qw.is_zero()) continue;
        for (int s = 0; s < N; ++s) {
            const Scalar& c = xi.at(w).at(s);
            if (c.is_zero()) continue;
            out.rhs += qw * c * h[static_cast<std::size_t>(w) * N + s];
        }
    }
    return out;
}

BasisWitness check_intensity_exchange_basis(const RandomMeasure& xi, const RandomMeasure& eta,
                                            const OmegaMeasure& P, Precheck pc) {
    require_same_space(P, xi, "intensity exchange check");
    require_same_space(P, eta, "intensity exchange check");
    const FlowSpace& sp = *P.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "intensity exchange check");
        ensure_adapted(xi, "first measure", "intensity exchange check");
        ensure_adapted(eta, "second measure", "intensity exchange check");
    }
    const Subset origin = Subset::singleton(g, 0);
    OmegaMeasure px = palm_measure(P, xi, origin, Precheck::trust).measure;
    OmegaMeasure pe = palm_measure(P, eta, origin, Precheck::trust).measure;
    std::vector<Scalar> lhs(static_cast<std::size_t>(M) * N), rhs(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w) {
        const Scalar& pw = px.at(w);
        if (pw.is_zero()) continue;
        for (int t = 0; t < N; ++t) {
            const Scalar& c = eta.at(w).at(t);
            if (c.is_zero()) continue;
            lhs[static_cast<std::size_t>(sp.flow(t, w)) * N + g.neg(t)] += pw * c;
        }
    }
    for (int w = 0; w < M; ++w) {
        const Scalar& qw = pe.at(w);
        if (qw.is_zero()) continue;
        for (int s = 0; s < N; ++s) rhs[static_cast<std::size_t>(w) * N + s] = qw * xi.at(w).at(s);
    }
    BasisWitness rep;
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            const std::size_t i = static_cast<std::size_t>(w) * N + s;
            if (!(lhs[i] == rhs[i])) {
                rep.ok = false;
                rep.omega = w;
                rep.s = s;
                rep.lhs = lhs[i];
                rep.rhs = rhs[i];
                return rep;
            }
        }
    return rep;
}

CampbellValues check_mass_transport(const std::vector<Scalar>& kappa, const RandomMeasure& eta,
                                    const RandomMeasure& xi, const OmegaMeasure& P,
                                    const Subset& B, const Subset& Bprime, Precheck pc) {
    require_same_space(P, eta, "mass transport check");
    require_same_space(P, xi, "mass transport check");
    const FlowSpace& sp = *P.space;
    const int N = static_cast<int>(sp.group().order());
    const int M = sp.outcomes();
    if (B.empty() || Bprime.empty())
        throw InvalidInput("mass transport check: windows must be nonempty");
    if (B.size() != Bprime.size())
        throw InvalidInput("mass transport check: windows must have equal size");
    if (kappa.size() != static_cast<std::size_t>(M) * N * N)
        throw InvalidInput("mass transport check: density table has wrong size");
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "mass transport check");
        ensure_adapted(eta, "first measure", "mass transport check");
        ensure_adapted(xi, "second measure", "mass transport check");
        ensure_invariant_density(kappa, sp, "mass transport check");
    }
    auto K = [&](int w, int s, int t) -> const Scalar& {
        return kappa[(static_cast<std::size_t>(w) * N + s) * N + t];
    };
    CampbellValues out;
    for (int w = 0; w < M; ++w) {
        const Scalar& pw = P.at(w);
        if (pw.is_zero()) continue;
        for (int s = 0; s < N; ++s) {
            const Scalar& es = eta.at(w).at(s);
            if (es.is_zero()) continue;
            for (int t : B.members) {
                const Scalar& xt = xi.at(w).at(t);
                if (xt.is_zero()) continue;
                out.lhs += pw * K(w, s, t) * es * xt;
            }
        }
        for (int s : Bprime.members) {
            const Scalar& es = eta.at(w).at(s);
            if (es.is_zero()) continue;
            for (int t = 0; t < N; ++t) {
                const Scalar& xt = xi.at(w).at(t);
                if (xt.is_zero()) continue;
                out.rhs += pw * K(w, s, t) * es * xt;
            }
        }
    }
    return out;
}

DualityReport check_balancing_palm_duality(const TransportKernel& T, const RandomMeasure& xi,
                                           const RandomMeasure& eta, const OmegaMeasure& P,
                                           Precheck pc) {
    require_same_space(P, xi, "duality check");
    require_same_space(P, eta, "duality check");
    ensure_kernel_space(T, P, "duality check");
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "duality check");
        ensure_adapted(xi, "source measure", "duality check");
        ensure_adapted(eta, "target measure", "duality check");
        ensure_invariant_kernel(T, "duality check");
        if (!T.markovian())
            throw InvalidInput("duality check: kernel rows must all have unit mass");
    }
    const FlowSpace& sp = *P.space;
    const int N = static_cast<int>(sp.group().order());
    const int M = sp.outcomes();

    DualityReport rep;
    BalancingReport bal = is_balancing(T, xi, eta, P);
    rep.balancing = bal.ok;
    if (!bal.ok) rep.balancing_omega = bal.omega;

    const Subset origin = Subset::singleton(sp.group(), 0);
    OmegaMeasure px = palm_measure(P, xi, origin, Precheck::trust).measure;
    OmegaMeasure pe = palm_measure(P, eta, origin, Precheck::trust).measure;
    std::vector<Scalar> pushed(M);
    for (int w = 0; w < M; ++w) {
        const Scalar& pw = px.at(w);
        if (pw.is_zero()) continue;
        const GMeasure& row = T.at(w, 0);
        for (int t = 0; t < N; ++t) {
            if (row.at(t).is_zero()) continue;
            pushed[sp.flow(t, w)] += pw * row.at(t);
        }
    }
    rep.palm_identity = true;
    for (int w = 0; w < M; ++w)
        if (!(pushed[w] == pe.at(w))) {
            rep.palm_identity = false;
            rep.identity_omega = w;
            rep.identity_lhs = pushed[w];
            rep.identity_rhs = pe.at(w);
            break;
        }
    return rep;
}

AllocationRule AllocationRule::from_pi(SpacePtr space, const std::vector<int>& pi) {
    if (!space) throw InvalidInput("allocation rule: missing space");
    const int N = static_cast<int>(space->group().order());
    const int M = space->outcomes();
    if (pi.size() != static_cast<std::size_t>(M))
        throw InvalidInput("allocation rule: need one target per outcome");
    for (int v : pi)
        if (v < 0 || v >= N) throw InvalidInput("allocation rule: target out of range");
    AllocationRule tau;
    tau.space = space;
    tau.target.resize(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s)
            tau.target[static_cast<std::size_t>(w) * N + s] =
                space->group().add(pi[space->flow(s, w)], s);
    return tau;
}

CovarianceReport is_covariant(const AllocationRule& tau) {
    if (!tau.space) throw InvalidInput("covariance check: missing space");
    const FlowSpace& sp = *tau.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();
    if (tau.target.size() != static_cast<std::size_t>(M) * N)
        throw InvalidInput("covariance check: target table has wrong size");
    CovarianceReport rep;
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s)
            for (int t = 1; t < N; ++t)
                if (tau.at(sp.flow(t, w), g.sub(s, t)) != g.sub(tau.at(w, s), t)) {
                    rep.ok = false;
                    rep.omega = w;
                    rep.s = s;
                    rep.t = t;
                    return rep;
                }
    return rep;
}

TransportKernel kernel_from_allocation(const AllocationRule& tau) {
    if (!tau.space) throw InvalidInput("allocation kernel: missing space");
    const FlowSpace& sp = *tau.space;
    const int N = static_cast<int>(sp.group().order());
    const int M = sp.outcomes();
    if (tau.target.size() != static_cast<std::size_t>(M) * N)
        throw InvalidInput("allocation kernel: target table has wrong size");
    std::vector<GMeasure> cells;
    cells.reserve(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) cells.push_back(dirac(sp.group_ptr(), tau.at(w, s)));
    return TransportKernel::from_cells(tau.space, std::move(cells));
}

std::vector<int> shift_by_allocation(const AllocationRule& tau) {
    if (!tau.space) throw InvalidInput("allocation shift: missing space");
    const FlowSpace& sp = *tau.space;
    const int M = sp.outcomes();
    std::vector<int> out(M);
    for (int w = 0; w < M; ++w) out[w] = sp.flow(tau.at(w, 0), w);
    return out;
}

DualityReport check_allocation_palm_coupling(const AllocationRule& tau, const RandomMeasure& xi,
                                             const RandomMeasure& eta, const OmegaMeasure& P,
                                             Precheck pc) {
    require_same_space(P, xi, "allocation coupling check");
    require_same_space(P, eta, "allocation coupling check");
    if (!tau.space || !tau.space->same_as(*P.space))
        throw InvalidInput("allocation coupling check: rule built over a different space");
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "allocation coupling check");
        ensure_adapted(xi, "source measure", "allocation coupling check");
        ensure_adapted(eta, "target measure", "allocation coupling check");
        CovarianceReport cov = is_covariant(tau);
        if (!cov.ok)
            throw InvalidInput("allocation coupling check: rule not covariant at (outcome " +
                               std::to_string(cov.omega) + ", s=" +
                               tau.space->group().element_text(cov.s) + ", t=" +
                               tau.space->group().element_text(cov.t) + ")");
    }
    const FlowSpace& sp = *P.space;
    const int N = static_cast<int>(sp.group().order());
    const int M = sp.outcomes();

    DualityReport rep;
    // Allocation moves each source point to its target site, so the push of
    // xi is a preimage sum rather than a kernel product.
    rep.balancing = true;
    for (int w = 0; w < M && rep.balancing; ++w) {
        if (P.at(w).is_zero()) continue;
        std::vector<Scalar> pushed(static_cast<std::size_t>(N));
        for (int s = 0; s < N; ++s) {
            const Scalar& m = xi.at(w).at(s);
            if (!m.is_zero()) pushed[tau.at(w, s)] += m;
        }
        for (int b = 0; b < N; ++b)
            if (!(pushed[b] == eta.at(w).at(b))) {
                rep.balancing = false;
                rep.balancing_omega = w;
                break;
            }
    }

    // Image of the xi table under recentering at the origin's target vs the
    // eta table, both unnormalized.
    const Subset origin = Subset::singleton(sp.group(), 0);
    OmegaMeasure px = palm_measure(P, xi, origin, Precheck::trust).measure;
    OmegaMeasure pe = palm_measure(P, eta, origin, Precheck::trust).measure;
    std::vector<int> recenter = shift_by_allocation(tau);
    std::vector<Scalar> image(static_cast<std::size_t>(M));
    for (int w = 0; w < M; ++w)
        if (!px.at(w).is_zero()) image[recenter[w]] += px.at(w);
    rep.palm_identity = true;
    for (int w = 0; w < M; ++w)
        if (!(image[w] == pe.at(w))) {
            rep.palm_identity = false;
            rep.identity_omega = w;
            rep.identity_lhs = image[w];
            rep.identity_rhs = pe.at(w);
            break;
        }
    return rep;
}

DualityReport check_modified_palm_duality(const TransportKernel& T, const RandomMeasure& xi,
                                          const RandomMeasure& eta, const OmegaMeasure& P,
                                          Precheck pc) {
    require_same_space(P, xi, "modified duality check");
    require_same_space(P, eta, "modified duality check");
    ensure_kernel_space(T, P, "modified duality check");
    if (pc == Precheck::enforce) {
        ensure_stationary(P, "modified duality check");
        ensure_adapted(xi, "source measure", "modified duality check");
        ensure_adapted(eta, "target measure", "modified duality check");
        ensure_invariant_kernel(T, "modified duality check");
        if (!T.markovian())
            throw InvalidInput("modified duality check: kernel rows must all have unit mass");
    }
    const FlowSpace& sp = *P.space;
    const FiniteAbelianGroup& g = sp.group();
    const int N = static_cast<int>(g.order());
    const int M = sp.outcomes();

    const Subset origin = Subset::singleton(g, 0);
    std::vector<Scalar> dx = sample_intensity(P, xi, origin, Precheck::trust);
    std::vector<Scalar> de = sample_intensity(P, eta, origin, Precheck::trust);
    for (int w = 0; w < M; ++w)
        if (P.at(w).sign() > 0 && (dx[w].is_zero() || de[w].is_zero()))
            throw InvalidInput(
                "modified duality check: zero orbit density on a charged outcome (outcome " +
                std::to_string(w) + ")");

    // Density-normalized pair. Zero rows on null orbits; those never enter
    // the charged-outcome scans below.
    RandomMeasure xin(P.space), etan(P.space);
    for (int w = 0; w < M; ++w) {
        if (!dx[w].is_zero()) xin.at(w) = scale_measure(xi.at(w), dx[w].inverse());
        if (!de[w].is_zero()) etan.at(w) = scale_measure(eta.at(w), de[w].inverse());
    }

    OmegaMeasure mx = modified_palm(P, xi, Precheck::trust);
    OmegaMeasure me = modified_palm(P, eta, Precheck::trust);

    DualityReport rep;
    BalancingReport bal = is_balancing(T, xin, etan, P);
    rep.balancing = bal.ok;
    if (!bal.ok) rep.balancing_omega = bal.omega;

    std::vector<Scalar> pushed(M);
    for (int w = 0; w < M; ++w) {
        const Scalar& pw = mx.at(w);
        if (pw.is_zero()) continue;
        const GMeasure& row = T.at(w, 0);
        for (int t = 0; t < N; ++t) {
            if (row.at(t).is_zero()) continue;
            pushed[sp.flow(t, w)] += pw * row.at(t);
        }
    }
    rep.palm_identity = true;
    for (int w = 0; w < M; ++w)
        if (!(pushed[w] == me.at(w))) {
            rep.palm_identity = false;
            rep.identity_omega = w;
            rep.identity_lhs = pushed[w];
            rep.identity_rhs = me.at(w);
            break;
        }
    return rep;
}

TransportKernel combine_kernels(const std::vector<std::pair<Scalar, TransportKernel>>& parts) {
    if (parts.empty()) throw InvalidInput("kernel combination: no parts");
    const SpacePtr& space = parts.front().second.space();
    const int N = static_cast<int>(space->group().order());
    const int M = space->outcomes();
    for (const auto& [c, K] : parts) {
        if (!K.space()->same_as(*space)) throw InvalidInput("kernel combination: space mismatch");
        if (c.sign() < 0) throw InvalidInput("kernel combination: negative coefficient");
    }
    std::vector<GMeasure> cells(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            GMeasure acc(space->group_ptr());
            for (const auto& [c, K] : parts) {
                if (c.is_zero()) continue;
                const GMeasure& row = K.at(w, s);
                for (int b = 0; b < N; ++b)
                    if (!row.at(b).is_zero()) acc.at(b) += c * row.at(b);
            }
            cells[static_cast<std::size_t>(w) * N + s] = std::move(acc);
        }
    return TransportKernel::from_cells(space, std::move(cells));
}

TransportKernel compose_kernels(const TransportKernel& T, const TransportKernel& S) {
    if (!S.space()->same_as(*T.space()))
        throw InvalidInput("kernel composition: space mismatch");
    const SpacePtr& space = T.space();
    const int N = static_cast<int>(space->group().order());
    const int M = space->outcomes();
    std::vector<GMeasure> cells(static_cast<std::size_t>(M) * N);
    for (int w = 0; w < M; ++w)
        for (int s = 0; s < N; ++s) {
            GMeasure acc(space->group_ptr());
            const GMeasure& first = T.at(w, s);
            for (int u = 0; u < N; ++u) {
                const Scalar& c = first.at(u);
                if (c.is_zero()) continue;
                const GMeasure& row = S.at(w, u);
                for (int b = 0; b < N; ++b)
                    if (!row.at(b).is_zero()) acc.at(b) += c * row.at(b);
            }
            cells[static_cast<std::size_t>(w) * N + s] = std::move(acc);
        }
    return TransportKernel::from_cells(space, std::move(cells));
}

}  // namespace palmlab
