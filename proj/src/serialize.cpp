#include "palmlab/serialize.hpp"

#include <initializer_list>
#include <string_view>

#include "json.hpp"
#include "palmlab/util.hpp"

namespace palmlab {
namespace {

using ojson = nlohmann::ordered_json;

ojson parse_doc(const std::string& text, const char* where) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string(where) + ": " + e.what());
    }
}

void expect_keys(const ojson& o, std::initializer_list<std::string_view> allowed, const char* where) {
    if (!o.is_object()) throw InvalidInput(std::string(where) + ": expected a JSON object");
    for (const auto& item : o.items()) {
        bool known = false;
        for (auto k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known) throw InvalidInput(std::string(where) + ": unknown field \"" + item.key() + "\"");
    }
}

const ojson& field(const ojson& o, const char* key, const char* where) {
    auto it = o.find(key);
    if (it == o.end()) throw InvalidInput(std::string(where) + ": missing field \"" + key + "\"");
    return *it;
}

long as_long(const ojson& v, const char* what, const char* where) {
    if (!v.is_number_integer()) throw InvalidInput(std::string(where) + ": " + what + " must be an integer");
    return v.get<long>();
}

std::string as_string(const ojson& v, const char* what, const char* where) {
    if (!v.is_string()) throw InvalidInput(std::string(where) + ": " + what + " must be a string");
    return v.get<std::string>();
}

Scalar parse_mass(const ojson& v, const char* what, const char* where) {
    Scalar x = Scalar::parse(as_string(v, what, where));
    if (x.sign() < 0) throw InvalidInput(std::string(where) + ": " + what + " is negative");
    return x;
}

ojson measure_row(const GMeasure& mu) {
    ojson row = ojson::array();
    for (const auto& m : mu.mass) row.push_back(m.str());
    return row;
}

GMeasure row_to_measure(const ojson& row, const GroupPtr& g, const char* what, const char* where) {
    if (!row.is_array() || static_cast<long>(row.size()) != g->order())
        throw InvalidInput(std::string(where) + ": " + what + " must list one mass per group element");
    GMeasure mu(g);
    for (long e = 0; e < g->order(); ++e) mu.at(static_cast<int>(e)) = parse_mass(row[e], what, where);
    return mu;
}

ojson random_measure_doc(const RandomMeasure& xi) {
    ojson rows = ojson::array();
    for (int w = 0; w < xi.space->outcomes(); ++w) rows.push_back(measure_row(xi.at(w)));
    return rows;
}

RandomMeasure doc_to_random_measure(const ojson& rows, const SpacePtr& sp, const char* what,
                                    const char* where) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != sp->outcomes())
        throw InvalidInput(std::string(where) + ": " + what + " must list one row per outcome");
    RandomMeasure xi(sp);
    for (int w = 0; w < sp->outcomes(); ++w)
        xi.at(w) = row_to_measure(rows[w], sp->group_ptr(), what, where);
    return xi;
}

}  // namespace

std::string space_to_json(const SpaceBundle& b) {
    const FlowSpace& sp = *b.space;
    const FiniteAbelianGroup& g = sp.group();
    ojson doc;
    doc["schema"] = "palmlab-space-v1";
    doc["moduli"] = g.moduli();
    doc["outcomes"] = sp.outcomes();
    ojson elems = ojson::array();
    for (long e = 0; e < g.order(); ++e) elems.push_back(g.element_text(static_cast<int>(e)));
    doc["elements"] = elems;
    doc["labels"] = sp.labels();
    ojson flow = ojson::array();
    for (long s = 0; s < g.order(); ++s) {
        ojson row = ojson::array();
        for (int w = 0; w < sp.outcomes(); ++w) row.push_back(sp.flow(static_cast<int>(s), w));
        flow.push_back(std::move(row));
    }
    doc["flow"] = flow;
    ojson weights = ojson::array();
    for (int w = 0; w < sp.outcomes(); ++w) weights.push_back(b.P.at(w).str());
    doc["weights"] = weights;
    doc["xi"] = random_measure_doc(b.xi);
    if (b.eta) doc["eta"] = random_measure_doc(*b.eta);
    return doc.dump(1);
}

SpaceBundle space_from_json(const std::string& text) {
    const char* where = "space document";
    ojson doc = parse_doc(text, where);
    expect_keys(doc, {"schema", "moduli", "outcomes", "elements", "labels", "flow", "weights", "xi", "eta"},
                where);
    if (as_string(field(doc, "schema", where), "schema", where) != "palmlab-space-v1")
        throw InvalidInput(std::string(where) + ": schema must be \"palmlab-space-v1\"");

    const ojson& jm = field(doc, "moduli", where);
    if (!jm.is_array() || jm.empty()) throw InvalidInput(std::string(where) + ": moduli must be a nonempty array");
    std::vector<long> moduli;
    for (const auto& v : jm) moduli.push_back(as_long(v, "modulus", where));
    GroupPtr g = make_group(moduli);

    const ojson& je = field(doc, "elements", where);
    if (!je.is_array() || static_cast<long>(je.size()) != g->order())
        throw InvalidInput(std::string(where) + ": elements must list every group element");
    for (long e = 0; e < g->order(); ++e)
        if (as_string(je[e], "element", where) != g->element_text(static_cast<int>(e)))
            throw InvalidInput(std::string(where) + ": elements are not in enumeration order");

    long m = as_long(field(doc, "outcomes", where), "outcomes", where);
    if (m < 1 || m > (1L << 22)) throw InvalidInput(std::string(where) + ": outcomes out of range");
    int outcomes = static_cast<int>(m);

    const ojson& jl = field(doc, "labels", where);
    if (!jl.is_array() || static_cast<int>(jl.size()) != outcomes)
        throw InvalidInput(std::string(where) + ": labels must list one label per outcome");
    std::vector<std::string> labels;
    for (const auto& v : jl) labels.push_back(as_string(v, "label", where));

    const ojson& jf = field(doc, "flow", where);
    if (!jf.is_array() || static_cast<long>(jf.size()) != g->order())
        throw InvalidInput(std::string(where) + ": flow must have one row per group element");
    std::vector<int32_t> flow;
    flow.reserve(static_cast<std::size_t>(g->order()) * outcomes);
    for (long s = 0; s < g->order(); ++s) {
        const ojson& row = jf[s];
        if (!row.is_array() || static_cast<int>(row.size()) != outcomes)
            throw InvalidInput(std::string(where) + ": flow rows must have one entry per outcome");
        for (int w = 0; w < outcomes; ++w) {
            long t = as_long(row[w], "flow entry", where);
            if (t < 0 || t >= outcomes) throw InvalidInput(std::string(where) + ": flow entry out of range");
            flow.push_back(static_cast<int32_t>(t));
        }
    }
    SpacePtr sp = FlowSpace::make(g, outcomes, std::move(flow), std::move(labels));

    const ojson& jw = field(doc, "weights", where);
    if (!jw.is_array() || static_cast<int>(jw.size()) != outcomes)
        throw InvalidInput(std::string(where) + ": weights must list one mass per outcome");
    SpaceBundle b;
    b.space = sp;
    b.P = OmegaMeasure(sp);
    for (int w = 0; w < outcomes; ++w) b.P.at(w) = parse_mass(jw[w], "weight", where);
    b.xi = doc_to_random_measure(field(doc, "xi", where), sp, "xi", where);
    if (doc.contains("eta")) b.eta = doc_to_random_measure(doc["eta"], sp, "eta", where);
    return b;
}

std::string kernel_to_json(const TransportKernel& T) {
    const FlowSpace& sp = *T.space();
    const long n = sp.group().order();
    ojson doc;
    doc["schema"] = "palmlab-kernel-v1";
    doc["moduli"] = sp.group().moduli();
    doc["outcomes"] = sp.outcomes();
    ojson entries = ojson::array();
    for (int w = 0; w < sp.outcomes(); ++w)
        for (long s = 0; s < n; ++s) {
            const GMeasure& row = T.at(w, static_cast<int>(s));
            for (long t = 0; t < n; ++t)
                if (!row.at(static_cast<int>(t)).is_zero())
                    entries.push_back(ojson::array({w, s, t, row.at(static_cast<int>(t)).str()}));
        }
    doc["entries"] = entries;
    return doc.dump(1);
}

TransportKernel kernel_from_json(const std::string& text, const SpacePtr& space) {
    const char* where = "kernel document";
    ojson doc = parse_doc(text, where);
    expect_keys(doc, {"schema", "moduli", "outcomes", "entries"}, where);
    if (as_string(field(doc, "schema", where), "schema", where) != "palmlab-kernel-v1")
        throw InvalidInput(std::string(where) + ": schema must be \"palmlab-kernel-v1\"");

    const ojson& jm = field(doc, "moduli", where);
    std::vector<long> moduli;
    if (!jm.is_array()) throw InvalidInput(std::string(where) + ": moduli must be an array");
    for (const auto& v : jm) moduli.push_back(as_long(v, "modulus", where));
    if (moduli != space->group().moduli())
        throw InvalidInput(std::string(where) + ": moduli do not match the space");
    if (as_long(field(doc, "outcomes", where), "outcomes", where) != space->outcomes())
        throw InvalidInput(std::string(where) + ": outcome count does not match the space");

    const long n = space->group().order();
    const int m = space->outcomes();
    std::vector<GMeasure> cells(static_cast<std::size_t>(m) * n, GMeasure(space->group_ptr()));
    const ojson& jes = field(doc, "entries", where);
    if (!jes.is_array()) throw InvalidInput(std::string(where) + ": entries must be an array");
    long prev = -1;
    for (const auto& e : jes) {
        if (!e.is_array() || e.size() != 4)
            throw InvalidInput(std::string(where) + ": entries must be [outcome, source, target, mass]");
        long w = as_long(e[0], "entry outcome", where);
        long s = as_long(e[1], "entry source", where);
        long t = as_long(e[2], "entry target", where);
        if (w < 0 || w >= m || s < 0 || s >= n || t < 0 || t >= n)
            throw InvalidInput(std::string(where) + ": entry index out of range");
        long key = (w * n + s) * n + t;
        if (key <= prev) throw InvalidInput(std::string(where) + ": entries must be strictly ascending");
        prev = key;
        cells[static_cast<std::size_t>(w) * n + s].at(static_cast<int>(t)) =
            parse_mass(e[3], "entry mass", where);
    }
    return TransportKernel::from_cells(space, std::move(cells));
}

}  // namespace palmlab
