#pragma once

#include "palmlab/flow_space.hpp"

namespace palmlab {

// Independent marks: one mark per group element, outcome = full mark
// configuration, flow = coordinate shift, P = product of the site law,
// xi = sum over sites of mark_value * point mass at the site.
struct MarkField {
    SpacePtr space;
    OmegaMeasure P;
    RandomMeasure xi;
    int mark_count = 0;

    // Mark index at site e of outcome w (digits, site 0 most significant).
    int digit(int w, int e) const;
};

MarkField make_mark_field(GroupPtr g, std::vector<Scalar> mark_values,
                          std::vector<Scalar> mark_law, long outcome_cap = 1L << 20);

// Outcomes are the group elements themselves, flow(s,w) = w + s.
SpacePtr make_translation_space(GroupPtr g);

// One-point configurations: outcome w = "the point sits at w". The point
// seen from an origin moved by s sits at w - s.
SpacePtr make_one_point_space(GroupPtr g);

// Product of two spaces over the same group, flow acting diagonally.
// Outcome (a,b) has index a * B.outcomes() + b.
SpacePtr product_space(const SpacePtr& A, const SpacePtr& B);
OmegaMeasure product_measure(const OmegaMeasure& PA, const OmegaMeasure& PB, const SpacePtr& prod);
RandomMeasure lift_left(const RandomMeasure& xiA, const SpacePtr& prod, int right_outcomes);
RandomMeasure lift_right(const RandomMeasure& xiB, const SpacePtr& prod, int right_outcomes);

}  // namespace palmlab
