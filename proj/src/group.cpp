#include "palmlab/group.hpp"

#include <algorithm>

#include "palmlab/util.hpp"

namespace palmlab {

namespace {
constexpr long kAddTableCap = 1024;  // cache the full addition table below this order
}

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<long> moduli) : moduli_(std::move(moduli)) {
    if (moduli_.empty()) throw InvalidInput("group needs at least one modulus");
    for (long m : moduli_) {
        if (m < 1) throw InvalidInput("group modulus must be >= 1");
        if (order_ > (1L << 40) / m) throw InvalidInput("group order out of range");
        order_ *= m;
    }
    neg_table_.resize(order_);
    for (int e = 0; e < order_; ++e) {
        auto t = tuple_of(e);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = (moduli_[i] - t[i]) % moduli_[i];
        neg_table_[e] = index_of(t);
    }
    if (order_ <= kAddTableCap) {
        add_table_.resize(static_cast<std::size_t>(order_) * order_);
        for (int a = 0; a < order_; ++a)
            for (int b = 0; b < order_; ++b)
                add_table_[static_cast<std::size_t>(a) * order_ + b] = add_slow(a, b);
    }
}

int FiniteAbelianGroup::add_slow(int a, int b) const {
    long res = 0;
    long ra = a, rb = b;
    // Mixed-radix digits, first coordinate most significant.
    long stride = order_;
    for (long m : moduli_) {
        stride /= m;
        long da = ra / stride, db = rb / stride;
        ra -= da * stride;
        rb -= db * stride;
        res += ((da + db) % m) * stride;
    }
    return static_cast<int>(res);
}

std::vector<long> FiniteAbelianGroup::tuple_of(int e) const {
    std::vector<long> t(moduli_.size());
    long r = e, stride = order_;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        stride /= moduli_[i];
        t[i] = r / stride;
        r -= t[i] * stride;
    }
    return t;
}

int FiniteAbelianGroup::index_of(const std::vector<long>& tuple) const {
    if (tuple.size() != moduli_.size()) throw InvalidInput("element tuple has wrong rank");
    long idx = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
        long x = tuple[i];
        if (x < 0 || x >= moduli_[i]) throw InvalidInput("element coordinate out of range");
        idx = idx * moduli_[i] + x;
    }
    return static_cast<int>(idx);
}

std::string FiniteAbelianGroup::element_text(int e) const {
    auto t = tuple_of(e);
    std::string s = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

int FiniteAbelianGroup::parse_element(const std::string& text) const {
    if (text.size() < 3 || text.front() != '(' || text.back() != ')')
        throw InvalidInput("malformed element '" + text + "'");
    std::vector<long> t;
    long cur = 0;
    bool have_digit = false;
    for (std::size_t i = 1; i + 1 <= text.size() - 1; ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            cur = cur * 10 + (c - '0');
            have_digit = true;
        } else if (c == ',') {
            if (!have_digit) throw InvalidInput("malformed element '" + text + "'");
            t.push_back(cur);
            cur = 0;
            have_digit = false;
        } else {
            throw InvalidInput("malformed element '" + text + "'");
        }
    }
    if (!have_digit) throw InvalidInput("malformed element '" + text + "'");
    t.push_back(cur);
    return index_of(t);
}

GroupPtr make_group(std::vector<long> moduli) {
    return std::make_shared<const FiniteAbelianGroup>(std::move(moduli));
}

Subset Subset::of(const FiniteAbelianGroup& g, std::vector<int> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    Subset s;
    s.mask.assign(g.order(), 0);
    for (int e : members) {
        if (e < 0 || e >= g.order()) throw InvalidInput("subset member out of range");
        s.mask[e] = 1;
    }
    s.members = std::move(members);
    return s;
}

Subset Subset::singleton(const FiniteAbelianGroup& g, int e) { return of(g, {e}); }

Subset Subset::full(const FiniteAbelianGroup& g) {
    std::vector<int> all(g.order());
    for (int e = 0; e < g.order(); ++e) all[e] = e;
    return of(g, std::move(all));
}

Subset Subset::from_mask_bits(const FiniteAbelianGroup& g, std::uint64_t bits) {
    if (g.order() > 63) throw InvalidInput("mask subsets need group order <= 63");
    std::vector<int> m;
    for (int e = 0; e < g.order(); ++e)
        if (bits & (1ULL << e)) m.push_back(e);
    return of(g, std::move(m));
}

std::string Subset::text(const FiniteAbelianGroup& g) const {
    std::string s = "{";
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (i) s += ",";
        s += g.element_text(members[i]);
    }
    return s + "}";
}

}  // namespace palmlab
