#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace palmlab {

// Finite Abelian group presented as Z_{m1} x ... x Z_{mk}. Elements are
// identified with indices 0..order-1 in lexicographic order of their
// coordinate tuples (first coordinate most significant). Index 0 is the
// neutral element.
class FiniteAbelianGroup {
public:
    explicit FiniteAbelianGroup(std::vector<long> moduli);

    long order() const { return order_; }
    int rank() const { return static_cast<int>(moduli_.size()); }
    const std::vector<long>& moduli() const { return moduli_; }

    int add(int a, int b) const {
        if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * order_ + b];
        return add_slow(a, b);
    }
    int neg(int a) const { return neg_table_[a]; }
    int sub(int a, int b) const { return add(a, neg(b)); }

    std::vector<long> tuple_of(int e) const;
    int index_of(const std::vector<long>& tuple) const;

    // Text form "(x1,...,xk)", e.g. "(2)" or "(1,0,3)".
    std::string element_text(int e) const;
    int parse_element(const std::string& text) const;

    bool same_as(const FiniteAbelianGroup& o) const { return moduli_ == o.moduli_; }

private:
    int add_slow(int a, int b) const;

    std::vector<long> moduli_;
    long order_ = 1;
    std::vector<int32_t> add_table_;  // populated for small orders
    std::vector<int32_t> neg_table_;
};

using GroupPtr = std::shared_ptr<const FiniteAbelianGroup>;

GroupPtr make_group(std::vector<long> moduli);

// Subset of group elements; members kept sorted ascending. Used both as an
// integration window and as an event over group elements.
struct Subset {
    std::vector<int> members;
    std::vector<char> mask;  // size = group order

    static Subset of(const FiniteAbelianGroup& g, std::vector<int> members);
    static Subset singleton(const FiniteAbelianGroup& g, int e);
    static Subset full(const FiniteAbelianGroup& g);
    // Bits of `bits` select element indices; group order must be <= 63.
    static Subset from_mask_bits(const FiniteAbelianGroup& g, std::uint64_t bits);

    int size() const { return static_cast<int>(members.size()); }
    bool empty() const { return members.empty(); }
    bool contains(int e) const { return mask[e] != 0; }
    std::string text(const FiniteAbelianGroup& g) const;
};

}  // namespace palmlab
