#include "palmlab/measure.hpp"

#include "palmlab/util.hpp"

namespace palmlab {

bool GMeasure::is_zero() const {
    for (const auto& m : mass)
        if (!m.is_zero()) return false;
    return true;
}

GMeasure zero_measure(GroupPtr g) { return GMeasure(std::move(g)); }

GMeasure dirac(GroupPtr g, int e) {
    GMeasure mu(std::move(g));
    mu.at(e) = Scalar(1);
    return mu;
}

GMeasure haar(GroupPtr g) {
    GMeasure mu(std::move(g));
    for (auto& m : mu.mass) m = Scalar(1);
    return mu;
}

GMeasure shift_measure(const GMeasure& mu, int s) {
    GMeasure res(mu.group);
    const auto& g = *mu.group;
    for (int b = 0; b < g.order(); ++b) res.at(b) = mu.at(g.add(b, s));
    return res;
}

GMeasure restrict_measure(const GMeasure& mu, const Subset& B) {
    GMeasure res(mu.group);
    for (int e : B.members) res.at(e) = mu.at(e);
    return res;
}

GMeasure add_measures(const GMeasure& x, const GMeasure& y) {
    if (!x.group->same_as(*y.group)) throw InvalidInput("measure addition across different groups");
    GMeasure res = x;
    for (int e = 0; e < x.group->order(); ++e) res.at(e) += y.at(e);
    return res;
}

GMeasure scale_measure(const GMeasure& mu, const Scalar& c) {
    if (c.sign() < 0) throw InvalidInput("negative scaling of a measure");
    GMeasure res = mu;
    for (auto& m : res.mass) m *= c;
    return res;
}

Scalar total_mass(const GMeasure& mu) {
    Scalar t;
    for (const auto& m : mu.mass) t += m;
    return t;
}

Scalar mass_on(const GMeasure& mu, const Subset& B) {
    Scalar t;
    for (int e : B.members) t += mu.at(e);
    return t;
}

std::vector<int> support_of(const GMeasure& mu) {
    std::vector<int> s;
    for (int e = 0; e < mu.group->order(); ++e)
        if (!mu.at(e).is_zero()) s.push_back(e);
    return s;
}

bool measures_equal(const GMeasure& x, const GMeasure& y) {
    if (!x.group->same_as(*y.group)) return false;
    for (int e = 0; e < x.group->order(); ++e)
        if (x.at(e) != y.at(e)) return false;
    return true;
}

}  // namespace palmlab
