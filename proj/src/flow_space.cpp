#include "palmlab/flow_space.hpp"

#include <algorithm>

#include "palmlab/util.hpp"

namespace palmlab {

std::shared_ptr<const FlowSpace> FlowSpace::make(GroupPtr group, int outcome_count,
                                                 std::vector<int32_t> flow,
                                                 std::vector<std::string> labels) {
    if (!group) throw InvalidInput("flow space needs a group");
    if (outcome_count <= 0) throw InvalidInput("flow space needs at least one outcome");
    const long N = group->order();
    if (flow.size() != static_cast<std::size_t>(N) * outcome_count)
        throw InvalidInput("flow table has wrong size");
    for (int32_t w : flow)
        if (w < 0 || w >= outcome_count) throw InvalidInput("flow table entry out of range");
    auto sp = std::shared_ptr<FlowSpace>(new FlowSpace());
    sp->group_ = std::move(group);
    sp->outcome_count_ = outcome_count;
    sp->flow_ = std::move(flow);
    if (labels.empty()) {
        labels.resize(outcome_count);
        for (int w = 0; w < outcome_count; ++w) labels[w] = std::to_string(w);
    }
    if (labels.size() != static_cast<std::size_t>(outcome_count))
        throw InvalidInput("label list has wrong size");
    sp->labels_ = std::move(labels);

    const FiniteAbelianGroup& g = *sp->group_;
    for (int w = 0; w < outcome_count; ++w)
        if (sp->flow(0, w) != w)
            throw InvalidInput("flow(0,.) is not the identity at outcome " + sp->label(w));
    for (int s = 0; s < N; ++s)
        for (int t = 0; t < N; ++t) {
            const int st = g.add(s, t);
            for (int w = 0; w < outcome_count; ++w)
                if (sp->flow(s, sp->flow(t, w)) != sp->flow(st, w))
                    throw InvalidInput("flow is not a group action at (s=" + g.element_text(s) +
                                       ", t=" + g.element_text(t) + ", outcome " + sp->label(w) + ")");
        }
    return sp;
}

Scalar OmegaMeasure::total() const {
    Scalar t;
    for (const auto& w : weight) t += w;
    return t;
}

StationarityReport is_stationary(const OmegaMeasure& P) {
    const FlowSpace& sp = *P.space;
    StationarityReport rep;
    for (int s = 0; s < sp.group().order(); ++s)
        for (int w = 0; w < sp.outcomes(); ++w) {
            const Scalar& moved = P.at(sp.flow(s, w));
            const Scalar& here = P.at(w);
            if (moved != here) {
                rep.ok = false;
                rep.s = s;
                rep.omega = w;
                rep.moved = moved;
                rep.here = here;
                return rep;
            }
        }
    return rep;
}

RmInvarianceReport is_invariant_rm(const RandomMeasure& xi) {
    const FlowSpace& sp = *xi.space;
    const FiniteAbelianGroup& g = sp.group();
    RmInvarianceReport rep;
    for (int w = 0; w < sp.outcomes(); ++w)
        for (int s = 0; s < g.order(); ++s) {
            const GMeasure& shifted = xi.at(sp.flow(s, w));
            const GMeasure& base = xi.at(w);
            for (int b = 0; b < g.order(); ++b) {
                const Scalar& lhs = shifted.at(b);
                const Scalar& rhs = base.at(g.add(b, s));
                if (lhs != rhs) {
                    rep.ok = false;
                    rep.omega = w;
                    rep.s = s;
                    rep.b = b;
                    rep.lhs = lhs;
                    rep.rhs = rhs;
                    return rep;
                }
            }
        }
    return rep;
}

OrbitDecomposition orbits(const FlowSpace& space) {
    OrbitDecomposition od;
    od.orbit_of.assign(space.outcomes(), -1);
    for (int w = 0; w < space.outcomes(); ++w) {
        if (od.orbit_of[w] != -1) continue;
        const int id = od.count();
        std::vector<int> mem;
        for (int s = 0; s < space.group().order(); ++s) {
            const int v = space.flow(s, w);
            if (od.orbit_of[v] == -1) {
                od.orbit_of[v] = id;
                mem.push_back(v);
            }
        }
        std::sort(mem.begin(), mem.end());
        od.members.push_back(std::move(mem));
    }
    return od;
}

std::vector<Scalar> conditional_on_invariant(const OmegaMeasure& P, const std::vector<Scalar>& f) {
    return conditional_on_invariant(P, f, orbits(*P.space));
}

std::vector<Scalar> conditional_on_invariant(const OmegaMeasure& P, const std::vector<Scalar>& f,
                                             const OrbitDecomposition& od) {
    if (f.size() != P.weight.size()) throw InvalidInput("conditional: f has wrong size");
    std::vector<Scalar> out(P.weight.size());
    for (const auto& mem : od.members) {
        Scalar wsum, fsum;
        for (int w : mem) {
            wsum += P.at(w);
            fsum += P.at(w) * f[w];
        }
        Scalar avg;  // zero on null orbits
        if (!wsum.is_zero()) avg = fsum / wsum;
        for (int w : mem) out[w] = avg;
    }
    return out;
}

void require_same_space(const OmegaMeasure& P, const RandomMeasure& xi, const char* where) {
    if (!P.space || !xi.space || !P.space->same_as(*xi.space))
        throw InvalidInput(std::string(where) + ": measure and random measure live on different spaces");
}

void require_stationary(const OmegaMeasure& P, const char* where) {
    StationarityReport st = is_stationary(P);
    if (!st.ok)
        throw InvalidInput(std::string(where) + ": weights not shift-invariant, moved by s=" +
                           P.space->group().element_text(st.s) + " at outcome " +
                           P.space->label(st.omega));
}

void require_adapted(const RandomMeasure& xi, const char* what, const char* where) {
    RmInvarianceReport rm = is_invariant_rm(xi);
    if (!rm.ok)
        throw InvalidInput(std::string(where) + ": " + what +
                           " not flow-adapted at outcome " + xi.space->label(rm.omega) +
                           ", s=" + xi.space->group().element_text(rm.s));
}

}  // namespace palmlab
