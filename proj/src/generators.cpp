#include "palmlab/generators.hpp"

#include "palmlab/util.hpp"

namespace palmlab {

namespace {

// Digit of w at position e, base `marks`, site 0 most significant of N digits.
int digit_at(long w, int e, int marks, int N) {
    long p = 1;
    for (int i = 0; i < N - 1 - e; ++i) p *= marks;
    return static_cast<int>((w / p) % marks);
}

}  // namespace

int MarkField::digit(int w, int e) const {
    return digit_at(w, e, mark_count, static_cast<int>(space->group().order()));
}

MarkField make_mark_field(GroupPtr g, std::vector<Scalar> mark_values,
                          std::vector<Scalar> mark_law, long outcome_cap) {
    const int N = static_cast<int>(g->order());
    const int marks = static_cast<int>(mark_values.size());
    if (marks < 1) throw InvalidInput("mark field needs at least one mark value");
    if (mark_law.size() != mark_values.size())
        throw InvalidInput("mark law and mark values disagree in size");
    Scalar law_total;
    for (const auto& p : mark_law) {
        if (p.sign() < 0) throw InvalidInput("mark law has a negative weight");
        law_total += p;
    }
    if (law_total != Scalar(1)) throw InvalidInput("mark law does not sum to 1");
    for (const auto& v : mark_values)
        if (v.sign() < 0) throw InvalidInput("mark value is negative");

    long M = 1;
    for (int i = 0; i < N; ++i) {
        if (M > outcome_cap / marks) throw InvalidInput("mark field exceeds outcome cap");
        M *= marks;
    }

    std::vector<int32_t> flow(static_cast<std::size_t>(N) * M);
    std::vector<std::string> labels(M);
    for (long w = 0; w < M; ++w) {
        std::string lab(N, '0');
        for (int e = 0; e < N; ++e) {
            int d = digit_at(w, e, marks, N);
            lab[e] = d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + d - 10);
        }
        labels[w] = std::move(lab);
    }
    for (int s = 0; s < N; ++s)
        for (long w = 0; w < M; ++w) {
            long v = 0;
            for (int e = 0; e < N; ++e) v = v * marks + digit_at(w, g->add(e, s), marks, N);
            flow[static_cast<std::size_t>(s) * M + w] = static_cast<int32_t>(v);
        }

    MarkField mf;
    mf.mark_count = marks;
    mf.space = FlowSpace::make(g, static_cast<int>(M), std::move(flow), std::move(labels));
    mf.P = OmegaMeasure(mf.space);
    mf.xi = RandomMeasure(mf.space);
    for (long w = 0; w < M; ++w) {
        Scalar pw(1);
        for (int e = 0; e < N; ++e) {
            const int d = digit_at(w, e, marks, N);
            pw *= mark_law[d];
            mf.xi.at(static_cast<int>(w)).at(e) = mark_values[d];
        }
        mf.P.at(static_cast<int>(w)) = pw;
    }
    return mf;
}

SpacePtr make_translation_space(GroupPtr g) {
    const int N = static_cast<int>(g->order());
    std::vector<int32_t> flow(static_cast<std::size_t>(N) * N);
    std::vector<std::string> labels(N);
    for (int s = 0; s < N; ++s)
        for (int w = 0; w < N; ++w) flow[static_cast<std::size_t>(s) * N + w] = g->add(w, s);
    for (int w = 0; w < N; ++w) labels[w] = g->element_text(w);
    return FlowSpace::make(std::move(g), N, std::move(flow), std::move(labels));
}

SpacePtr make_one_point_space(GroupPtr g) {
    const int N = static_cast<int>(g->order());
    std::vector<int32_t> flow(static_cast<std::size_t>(N) * N);
    std::vector<std::string> labels(N);
    for (int s = 0; s < N; ++s)
        for (int w = 0; w < N; ++w) flow[static_cast<std::size_t>(s) * N + w] = g->sub(w, s);
    for (int w = 0; w < N; ++w) labels[w] = "p=" + g->element_text(w);
    return FlowSpace::make(std::move(g), N, std::move(flow), std::move(labels));
}

SpacePtr product_space(const SpacePtr& A, const SpacePtr& B) {
    if (!A->group().same_as(B->group())) throw InvalidInput("product space needs a common group");
    const int N = static_cast<int>(A->group().order());
    const long MA = A->outcomes(), MB = B->outcomes();
    const long M = MA * MB;
    std::vector<int32_t> flow(static_cast<std::size_t>(N) * M);
    std::vector<std::string> labels(M);
    for (long a = 0; a < MA; ++a)
        for (long b = 0; b < MB; ++b)
            labels[a * MB + b] = A->label(static_cast<int>(a)) + "|" + B->label(static_cast<int>(b));
    for (int s = 0; s < N; ++s)
        for (long a = 0; a < MA; ++a)
            for (long b = 0; b < MB; ++b)
                flow[static_cast<std::size_t>(s) * M + a * MB + b] =
                    static_cast<int32_t>(A->flow(s, static_cast<int>(a)) * MB + B->flow(s, static_cast<int>(b)));
    return FlowSpace::make(A->group_ptr(), static_cast<int>(M), std::move(flow), std::move(labels));
}

OmegaMeasure product_measure(const OmegaMeasure& PA, const OmegaMeasure& PB, const SpacePtr& prod) {
    const long MA = PA.space->outcomes(), MB = PB.space->outcomes();
    if (prod->outcomes() != MA * MB) throw InvalidInput("product measure: outcome counts disagree");
    OmegaMeasure P(prod);
    for (long a = 0; a < MA; ++a)
        for (long b = 0; b < MB; ++b)
            P.at(static_cast<int>(a * MB + b)) = PA.at(static_cast<int>(a)) * PB.at(static_cast<int>(b));
    return P;
}

RandomMeasure lift_left(const RandomMeasure& xiA, const SpacePtr& prod, int right_outcomes) {
    const long MA = xiA.space->outcomes();
    if (prod->outcomes() != MA * right_outcomes) throw InvalidInput("lift_left: outcome counts disagree");
    RandomMeasure out(prod);
    for (long a = 0; a < MA; ++a)
        for (long b = 0; b < right_outcomes; ++b)
            out.at(static_cast<int>(a * right_outcomes + b)) = xiA.at(static_cast<int>(a));
    return out;
}

RandomMeasure lift_right(const RandomMeasure& xiB, const SpacePtr& prod, int right_outcomes) {
    const long MB = xiB.space->outcomes();
    if (MB != right_outcomes || prod->outcomes() % MB != 0)
        throw InvalidInput("lift_right: outcome counts disagree");
    RandomMeasure out(prod);
    const long MA = prod->outcomes() / MB;
    for (long a = 0; a < MA; ++a)
        for (long b = 0; b < MB; ++b)
            out.at(static_cast<int>(a * MB + b)) = xiB.at(static_cast<int>(b));
    return out;
}

}  // namespace palmlab
