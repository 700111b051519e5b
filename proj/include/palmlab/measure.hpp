#pragma once

#include <vector>

#include "palmlab/group.hpp"
#include "palmlab/scalar.hpp"

namespace palmlab {

// Nonnegative measure on the group, stored as a dense table of point masses
// indexed by element. Exact scalar entries; no tolerance is involved in any
// operation or comparison.
struct GMeasure {
    GroupPtr group;
    std::vector<Scalar> mass;

    GMeasure() = default;
    explicit GMeasure(GroupPtr g) : group(std::move(g)), mass(group->order()) {}

    const Scalar& at(int e) const { return mass[e]; }
    Scalar& at(int e) { return mass[e]; }
    bool is_zero() const;
};

GMeasure zero_measure(GroupPtr g);
GMeasure dirac(GroupPtr g, int e);
GMeasure haar(GroupPtr g);  // unit mass at every element

// result{b} = mu{b+s}; the measure seen from an origin moved by s.
GMeasure shift_measure(const GMeasure& mu, int s);
GMeasure restrict_measure(const GMeasure& mu, const Subset& B);
GMeasure add_measures(const GMeasure& x, const GMeasure& y);
GMeasure scale_measure(const GMeasure& mu, const Scalar& c);  // c >= 0 enforced

Scalar total_mass(const GMeasure& mu);
Scalar mass_on(const GMeasure& mu, const Subset& B);
std::vector<int> support_of(const GMeasure& mu);
bool measures_equal(const GMeasure& x, const GMeasure& y);

}  // namespace palmlab
