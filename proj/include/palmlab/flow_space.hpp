#pragma once

#include <memory>
#include <string>
#include <vector>

#include "palmlab/measure.hpp"

namespace palmlab {

// Finite outcome set carrying a group action ("flow"). The action table is
// validated eagerly at construction: flow(0,.) is the identity and
// flow(s, flow(t, w)) = flow(s+t, w) for all s, t, w. Immutable afterwards,
// safe to share across threads.
class FlowSpace {
public:
    static std::shared_ptr<const FlowSpace> make(GroupPtr group, int outcome_count,
                                                 std::vector<int32_t> flow,
                                                 std::vector<std::string> labels = {});

    const FiniteAbelianGroup& group() const { return *group_; }
    const GroupPtr& group_ptr() const { return group_; }
    int outcomes() const { return outcome_count_; }

    int flow(int s, int w) const { return flow_[static_cast<std::size_t>(s) * outcome_count_ + w]; }
    const std::string& label(int w) const { return labels_[w]; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool same_as(const FlowSpace& o) const { return this == &o; }

private:
    FlowSpace() = default;
    GroupPtr group_;
    int outcome_count_ = 0;
    std::vector<int32_t> flow_;
    std::vector<std::string> labels_;
};

using SpacePtr = std::shared_ptr<const FlowSpace>;

// Nonnegative weight per outcome. Totals need not be 1: finite measures,
// not just probabilities, are supported throughout.
struct OmegaMeasure {
    SpacePtr space;
    std::vector<Scalar> weight;

    OmegaMeasure() = default;
    explicit OmegaMeasure(SpacePtr s) : space(std::move(s)), weight(space->outcomes()) {}

    const Scalar& at(int w) const { return weight[w]; }
    Scalar& at(int w) { return weight[w]; }
    Scalar total() const;
};

// One group measure per outcome.
struct RandomMeasure {
    SpacePtr space;
    std::vector<GMeasure> at_outcome;

    RandomMeasure() = default;
    explicit RandomMeasure(SpacePtr s)
        : space(s), at_outcome(space->outcomes(), GMeasure(space->group_ptr())) {}

    const GMeasure& at(int w) const { return at_outcome[w]; }
    GMeasure& at(int w) { return at_outcome[w]; }
};

struct StationarityReport {
    bool ok = true;
    int s = -1, omega = -1;  // first violation in (s, omega) scan order
    Scalar moved, here;
};
// P is stationary iff P{flow(s,w)} = P{w} for all s, w.
StationarityReport is_stationary(const OmegaMeasure& P);

struct RmInvarianceReport {
    bool ok = true;
    int omega = -1, s = -1, b = -1;
    Scalar lhs, rhs;
};
// xi is flow-adapted iff xi(flow(s,w)){b} = xi(w){b+s} for all w, s, b.
RmInvarianceReport is_invariant_rm(const RandomMeasure& xi);

struct OrbitDecomposition {
    std::vector<int> orbit_of;               // outcome -> orbit id
    std::vector<std::vector<int>> members;   // orbit id -> sorted outcomes
    int count() const { return static_cast<int>(members.size()); }
};
OrbitDecomposition orbits(const FlowSpace& space);

// Orbit-wise average of f under P: the conditional expectation given the
// flow-invariant events. Zero on P-null orbits.
std::vector<Scalar> conditional_on_invariant(const OmegaMeasure& P, const std::vector<Scalar>& f);
std::vector<Scalar> conditional_on_invariant(const OmegaMeasure& P, const std::vector<Scalar>& f,
                                             const OrbitDecomposition& od);

void require_same_space(const OmegaMeasure& P, const RandomMeasure& xi, const char* where);
// Precondition guards: throw InvalidInput with the first witness in the message.
void require_stationary(const OmegaMeasure& P, const char* where);
void require_adapted(const RandomMeasure& xi, const char* what, const char* where);

}  // namespace palmlab
