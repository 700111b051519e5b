#include "palmlab/suite.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "palmlab/existence.hpp"
#include "palmlab/generators.hpp"
#include "palmlab/massstat.hpp"
#include "palmlab/palm.hpp"
#include "palmlab/torus.hpp"
#include "palmlab/util.hpp"

namespace palmlab {
namespace {

using ojson = nlohmann::ordered_json;

void expect_keys(const ojson& o, std::initializer_list<std::string_view> allowed, const char* where) {
    if (!o.is_object()) throw InvalidInput(std::string(where) + ": expected a JSON object");
    for (const auto& item : o.items()) {
        bool known = false;
        for (auto k : allowed)
            if (item.key() == k) { known = true; break; }
        if (!known) throw InvalidInput(std::string(where) + ": unknown field \"" + item.key() + "\"");
    }
}

mpq_class rational_text(const std::string& text, const char* what) {
    auto slash = text.find('/');
    try {
        mpz_class num(slash == std::string::npos ? text : text.substr(0, slash));
        mpz_class den(slash == std::string::npos ? std::string("1") : text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        mpq_class q(num, den);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw InvalidInput(std::string("config: ") + what + " is not a rational: \"" + text + "\"");
    }
}

// Config scalars: canonical "a/b+c/d*r2" or plain rational "a/b" / "a".
Scalar config_scalar(const ojson& v, const char* what) {
    if (!v.is_string()) throw InvalidInput(std::string("config: ") + what + " must be a string");
    const std::string text = v.get<std::string>();
    if (text.find("*r2") != std::string::npos) return Scalar::parse(text);
    return Scalar::rational(rational_text(text, what));
}

std::vector<long> config_moduli(const ojson& o) {
    auto it = o.find("moduli");
    if (it == o.end()) throw InvalidInput("config: generator needs \"moduli\"");
    if (!it->is_array() || it->empty()) throw InvalidInput("config: moduli must be a nonempty array");
    std::vector<long> moduli;
    for (const auto& v : *it) {
        if (!v.is_number_integer()) throw InvalidInput("config: moduli entries must be integers");
        moduli.push_back(v.get<long>());
    }
    return moduli;
}

std::vector<Scalar> scalar_list(const ojson& v, const char* what) {
    if (!v.is_array()) throw InvalidInput(std::string("config: ") + what + " must be an array");
    std::vector<Scalar> out;
    for (const auto& e : v) out.push_back(config_scalar(e, what));
    return out;
}

SpaceBundle bundle_from_generator(const ojson& sp, long exact_cap) {
    auto it = sp.find("generator");
    if (it == sp.end() || !it->is_string())
        throw InvalidInput("config: space needs either \"inline\" or a \"generator\" name");
    const std::string gen = it->get<std::string>();

    if (gen == "mark-field") {
        expect_keys(sp, {"generator", "moduli", "mark_values", "mark_law"}, "config space");
        GroupPtr g = make_group(config_moduli(sp));
        std::vector<Scalar> values{Scalar(0), Scalar(1)};
        std::vector<Scalar> law{Scalar::rational(1, 2), Scalar::rational(1, 2)};
        if (sp.contains("mark_values")) values = scalar_list(sp["mark_values"], "mark_values");
        if (sp.contains("mark_law")) law = scalar_list(sp["mark_law"], "mark_law");
        MarkField mf = make_mark_field(g, std::move(values), std::move(law), exact_cap);
        return SpaceBundle{mf.space, mf.P, mf.xi, std::nullopt};
    }

    if (gen == "one-point") {
        expect_keys(sp, {"generator", "moduli"}, "config space");
        GroupPtr g = make_group(config_moduli(sp));
        SpacePtr space = make_one_point_space(g);
        SpaceBundle b;
        b.space = space;
        b.P = OmegaMeasure(space);
        b.xi = RandomMeasure(space);
        Scalar share = Scalar(1) / Scalar(static_cast<long>(space->outcomes()));
        for (int w = 0; w < space->outcomes(); ++w) {
            b.P.at(w) = share;
            b.xi.at(w).at(w) = Scalar(1);
        }
        return b;
    }

    if (gen == "translation") {
        expect_keys(sp, {"generator", "moduli", "profile"}, "config space");
        GroupPtr g = make_group(config_moduli(sp));
        SpacePtr space = make_translation_space(g);
        const int n = static_cast<int>(g->order());
        std::vector<Scalar> profile(n);
        profile[0] = Scalar(1);
        if (sp.contains("profile")) {
            profile = scalar_list(sp["profile"], "profile");
            if (static_cast<int>(profile.size()) != n)
                throw InvalidInput("config: profile must list one mass per group element");
            for (const auto& x : profile)
                if (x.sign() < 0) throw InvalidInput("config: profile masses must be nonnegative");
        }
        SpaceBundle b;
        b.space = space;
        b.P = OmegaMeasure(space);
        b.xi = RandomMeasure(space);
        Scalar share = Scalar(1) / Scalar(static_cast<long>(n));
        for (int w = 0; w < n; ++w) {
            b.P.at(w) = share;
            for (int e = 0; e < n; ++e) b.xi.at(w).at(e) = profile[g->add(e, w)];
        }
        return b;
    }

    if (gen == "two-species") {
        expect_keys(sp, {"generator", "moduli", "p"}, "config space");
        GroupPtr g = make_group(config_moduli(sp));
        Scalar p = Scalar::rational(1, 2);
        if (sp.contains("p")) p = config_scalar(sp["p"], "p");
        if (!p.is_rational() || p.sign() <= 0 || p >= Scalar(1))
            throw InvalidInput("config: p must be a rational strictly between 0 and 1");
        Scalar q = Scalar(1) - p;
        MarkField one = make_mark_field(g, {Scalar(0), Scalar(1)}, {q, p}, exact_cap);
        MarkField two = make_mark_field(g, {Scalar(0), Scalar(1)}, {q, p}, exact_cap);
        SpacePtr prod = product_space(one.space, two.space);
        SpaceBundle b;
        b.space = prod;
        b.P = product_measure(one.P, two.P, prod);
        RandomMeasure x1 = lift_left(one.xi, prod, two.space->outcomes());
        RandomMeasure x2 = lift_right(two.xi, prod, two.space->outcomes());
        b.xi = RandomMeasure(prod);
        for (int w = 0; w < prod->outcomes(); ++w)
            b.xi.at(w) = add_measures(x1.at(w), scale_measure(x2.at(w), Scalar::root_two()));
        return b;
    }

    throw InvalidInput("config: unknown generator \"" + gen + "\"");
}

std::string element_name(const FiniteAbelianGroup& g, int e) { return g.element_text(e); }

std::string describe_outcome(const SpaceBundle& b, int w) {
    const std::string& l = b.space->label(w);
    std::ostringstream os;
    os << w;
    if (!l.empty()) os << " \"" << l << "\"";
    return os.str();
}

using CheckFn = std::function<std::pair<bool, std::string>(const SpaceBundle&, std::uint64_t)>;

std::pair<bool, std::string> run_stationarity(const SpaceBundle& b, std::uint64_t) {
    StationarityReport r = is_stationary(b.P);
    if (r.ok) return {true, ""};
    std::ostringstream os;
    os << "weight moved by s=" << element_name(b.space->group(), r.s) << " at outcome "
       << describe_outcome(b, r.omega) << ": " << r.moved << " vs " << r.here;
    return {false, os.str()};
}

std::pair<bool, std::string> run_rm_invariance(const SpaceBundle& b, std::uint64_t) {
    auto describe = [&](const char* what, const RmInvarianceReport& r) {
        std::ostringstream os;
        os << what << " not flow-adapted at outcome " << describe_outcome(b, r.omega)
           << ", s=" << element_name(b.space->group(), r.s)
           << ", b=" << element_name(b.space->group(), r.b) << ": " << r.lhs << " vs " << r.rhs;
        return os.str();
    };
    RmInvarianceReport r = is_invariant_rm(b.xi);
    if (!r.ok) return {false, describe("xi", r)};
    if (b.eta) {
        RmInvarianceReport re = is_invariant_rm(*b.eta);
        if (!re.ok) return {false, describe("eta", re)};
    }
    return {true, ""};
}

std::pair<bool, std::string> run_orbit_partition(const SpaceBundle& b, std::uint64_t) {
    const FlowSpace& sp = *b.space;
    OrbitDecomposition od = orbits(sp);
    std::vector<int> seen(sp.outcomes(), 0);
    for (int o = 0; o < od.count(); ++o) {
        const auto& mem = od.members[o];
        if (mem.empty()) return {false, "empty orbit in the decomposition"};
        for (std::size_t i = 0; i < mem.size(); ++i) {
            int w = mem[i];
            if (i > 0 && mem[i - 1] >= w) return {false, "orbit members not sorted ascending"};
            if (od.orbit_of[w] != o) return {false, "orbit_of disagrees with members"};
            seen[w] += 1;
        }
    }
    for (int w = 0; w < sp.outcomes(); ++w) {
        if (seen[w] != 1) {
            std::ostringstream os;
            os << "outcome " << describe_outcome(b, w) << " appears " << seen[w] << " times";
            return {false, os.str()};
        }
        for (long s = 0; s < sp.group().order(); ++s)
            if (od.orbit_of[sp.flow(static_cast<int>(s), w)] != od.orbit_of[w]) {
                std::ostringstream os;
                os << "orbit not closed under the flow at outcome " << describe_outcome(b, w)
                   << ", s=" << element_name(sp.group(), static_cast<int>(s));
                return {false, os.str()};
            }
    }
    return {true, ""};
}

std::pair<bool, std::string> run_palm_window_independence(const SpaceBundle& b, std::uint64_t) {
    const FiniteAbelianGroup& g = b.space->group();
    PalmResult ref = palm_measure(b.P, b.xi, Subset::singleton(g, 0));
    auto compare = [&](const Subset& B) -> std::pair<bool, std::string> {
        PalmResult got = palm_measure(b.P, b.xi, B, Precheck::trust);
        for (int w = 0; w < b.space->outcomes(); ++w)
            if (got.measure.at(w) != ref.measure.at(w)) {
                std::ostringstream os;
                os << "window " << B.text(g) << " changes the table at outcome "
                   << describe_outcome(b, w) << ": " << got.measure.at(w) << " vs "
                   << ref.measure.at(w);
                return {false, os.str()};
            }
        return {true, ""};
    };
    for (long e = 1; e < g.order(); ++e) {
        auto r = compare(Subset::singleton(g, static_cast<int>(e)));
        if (!r.first) return r;
    }
    // Every window table is the average of its singleton tables, so the
    // full window adds only a smoke check on the averaging itself.
    return compare(Subset::full(g));
}

std::pair<bool, std::string> run_refined_campbell(const SpaceBundle& b, std::uint64_t) {
    BasisWitness r = check_refined_campbell_basis(b.P, b.xi);
    if (r.ok) return {true, ""};
    std::ostringstream os;
    os << "indicator pair outcome=" << describe_outcome(b, r.omega)
       << " s=" << element_name(b.space->group(), r.s) << ": " << r.lhs << " vs " << r.rhs;
    return {false, os.str()};
}

std::pair<bool, std::string> run_mecke(const SpaceBundle& b, std::uint64_t) {
    const FiniteAbelianGroup& g = b.space->group();
    OmegaMeasure Q = palm_measure(b.P, b.xi, Subset::singleton(g, 0)).measure;
    BasisWitness r = check_mecke(Q, b.xi);
    if (r.ok) return {true, ""};
    std::ostringstream os;
    os << "indicator pair outcome=" << describe_outcome(b, r.omega)
       << " s=" << element_name(g, r.s) << ": " << r.lhs << " vs " << r.rhs;
    return {false, os.str()};
}

std::pair<bool, std::string> run_palm_inversion(const SpaceBundle& b, std::uint64_t) {
    const FiniteAbelianGroup& g = b.space->group();
    OmegaMeasure Q = palm_measure(b.P, b.xi, Subset::singleton(g, 0)).measure;
    OmegaMeasure back = invert_palm(Q, b.xi);
    for (int w = 0; w < b.space->outcomes(); ++w) {
        if (total_mass(b.xi.at(w)).is_zero()) continue;
        if (back.at(w) != b.P.at(w)) {
            std::ostringstream os;
            os << "reconstruction differs at outcome " << describe_outcome(b, w) << ": "
               << back.at(w) << " vs " << b.P.at(w);
            return {false, os.str()};
        }
    }
    return {true, ""};
}

std::pair<bool, std::string> run_mass_stationarity(const SpaceBundle& b, std::uint64_t) {
    const FiniteAbelianGroup& g = b.space->group();
    OmegaMeasure Q = palm_measure(b.P, b.xi, Subset::singleton(g, 0)).measure;
    MassStatReport r;
    if (g.order() <= 8) {
        r = is_mass_stationary(Q, b.xi);
    } else {
        // Budgeted sweep for large groups: singletons plus enumeration
        // prefixes. The exhaustive universe is exercised by the test fleet.
        std::vector<Subset> windows;
        for (long e = 0; e < g.order(); ++e) windows.push_back(Subset::singleton(g, static_cast<int>(e)));
        std::vector<int> prefix;
        for (long e = 0; e < g.order(); ++e) {
            prefix.push_back(static_cast<int>(e));
            if (prefix.size() >= 2) windows.push_back(Subset::of(g, prefix));
        }
        r = is_mass_stationary(Q, b.xi, windows);
    }
    if (r.holds) return {true, ""};
    std::ostringstream os;
    os << "window " << Subset::of(g, r.witness.window).text(g) << " outcome "
       << describe_outcome(b, r.witness.omega) << " element "
       << element_name(g, r.witness.g) << ": " << r.witness.lhs << " vs " << r.witness.rhs;
    return {false, os.str()};
}

std::pair<bool, std::string> run_window_bias_example(const SpaceBundle&, std::uint64_t) {
    WindowBiasValues v = window_bias_example();
    std::ostringstream os;
    if (v.lhs != Scalar::rational(3, 8) || v.rhs != Scalar::rational(1, 2)) {
        os << "two-site window values off: lhs=" << v.lhs << " rhs=" << v.rhs;
        return {false, os.str()};
    }
    if (v.whole_group_lhs != v.whole_group_rhs) {
        os << "whole-group sides differ: " << v.whole_group_lhs << " vs " << v.whole_group_rhs;
        return {false, os.str()};
    }
    if (v.full_event_lhs != Scalar(1) || v.full_event_rhs != Scalar(1)) {
        os << "full-event sides are not 1: " << v.full_event_lhs << " vs " << v.full_event_rhs;
        return {false, os.str()};
    }
    return {true, ""};
}

const std::vector<std::pair<std::string, CheckFn>>& registry() {
    static const std::vector<std::pair<std::string, CheckFn>> table = {
        {"stationarity", run_stationarity},
        {"rm-invariance", run_rm_invariance},
        {"orbit-partition", run_orbit_partition},
        {"palm-window-independence", run_palm_window_independence},
        {"refined-campbell", run_refined_campbell},
        {"mecke", run_mecke},
        {"palm-inversion", run_palm_inversion},
        {"mass-stationarity", run_mass_stationarity},
        {"window-bias-example", run_window_bias_example},
    };
    return table;
}

const CheckFn& checker_named(const std::string& name) {
    for (const auto& [n, fn] : registry())
        if (n == name) return fn;
    throw InvalidInput("config: unknown checker \"" + name + "\"");
}

// Short form for repro tables: plain "a/b" when rational.
std::string brief(const Scalar& x) {
    if (x.is_rational()) return x.rat_part().get_str();
    return x.str();
}

std::string sig12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
}

ReproResult repro_example65() {
    ReproResult rr;
    rr.name = "example65";
    WindowBiasValues v = window_bias_example();
    const bool main_ok = v.lhs == Scalar::rational(3, 8) && v.rhs == Scalar::rational(1, 2);
    const bool whole_ok = v.whole_group_lhs == Scalar::rational(1, 2) &&
                          v.whole_group_rhs == Scalar::rational(1, 2);
    const bool full_ok = v.full_event_lhs == Scalar(1) && v.full_event_rhs == Scalar(1);
    std::ostringstream os;
    os << "window-bias on the three-site binary field, window {(0),(1)}\n";
    os << "lhs=" << brief(v.lhs) << " rhs=" << brief(v.rhs)
       << " verdict=" << (main_ok ? "MATCHES-PAPER" : "DIVERGES") << "\n";
    os << "whole-group-window lhs=" << brief(v.whole_group_lhs)
       << " rhs=" << brief(v.whole_group_rhs)
       << " verdict=" << (whole_ok ? "MATCHES-PAPER" : "DIVERGES") << "\n";
    os << "full-event lhs=" << brief(v.full_event_lhs) << " rhs=" << brief(v.full_event_rhs)
       << " verdict=" << (full_ok ? "MATCHES-PAPER" : "DIVERGES") << "\n";
    rr.ok = main_ok && whole_ok && full_ok;
    rr.text = os.str();
    return rr;
}

ReproResult repro_example71() {
    ReproResult rr;
    rr.name = "example71";
    TwoSpeciesReport rep = two_species_example({3}, 1, 2);
    GroupPtr g = make_group({3});
    std::ostringstream os;
    os << "two-species field on z3, p=1/2\n";
    os << "combined-field verdict="
       << (rep.combined.holds ? "MASS-STATIONARY" : "NOT-MASS-STATIONARY") << "\n";
    if (!rep.combined.holds) {
        os << "witness window=" << Subset::of(*g, rep.combined.witness.window).text(*g)
           << " outcome=" << rep.combined.witness.omega
           << " element=" << g->element_text(rep.combined.witness.g)
           << " lhs=" << rep.combined.witness.lhs << " rhs=" << rep.combined.witness.rhs << "\n";
    }
    os << "species-one verdict="
       << (rep.first_only.holds ? "MASS-STATIONARY" : "NOT-MASS-STATIONARY") << "\n";
    os << "recentering-law-check " << (rep.palm_verified ? "PASS" : "FAIL") << "\n";
    os << "irrational-masses " << (rep.irrational_masses ? "PASS" : "FAIL") << "\n";
    os << "rule-germs=" << rep.germs_enumerated << " preserving=" << rep.preserving_germs << "\n";
    os << "invariance: preserving rules fix species one "
       << (rep.all_preserving_fix_first ? "PASS" : "FAIL") << "\n";
    os << "invariance: preserving rules leave the recentering law fixed "
       << (rep.all_preserving_invariant ? "PASS" : "FAIL") << "\n";
    rr.ok = !rep.combined.holds && rep.first_only.holds && rep.palm_verified &&
            rep.irrational_masses && rep.preserving_germs > 0 && rep.all_preserving_fix_first &&
            rep.all_preserving_invariant;
    rr.text = os.str();
    return rr;
}

ReproResult repro_coupling(std::uint64_t seed) {
    ReproResult rr;
    rr.name = "coupling";
    TorusConfig cfg;
    cfg.seed = seed;
    CouplingReport rep = verify_shift_coupling(cfg);
    std::ostringstream os;
    os << "torus shift-coupling, n=" << cfg.n << " d=" << cfg.d << " k=" << cfg.k
       << " seed=" << cfg.seed << "\n";
    os << "replicates tv control_tv\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        os << rep.rows[i].replicates << " " << sig12(rep.rows[i].tv) << " "
           << sig12(rep.control_rows[i].tv) << "\n";
    }
    os << "quota-violations=" << rep.quota_violations << " stability-spot="
       << (rep.stability_spot_ok ? "PASS" : "FAIL") << "\n";
    const TvRow& last = rep.rows.back();
    const TvRow& last_control = rep.control_rows.back();
    rr.ok = last.tv < 0.05 && last_control.tv > 0.1 && rep.quota_violations == 0 &&
            rep.stability_spot_ok;
    rr.text = os.str();
    return rr;
}

}  // namespace

const std::vector<std::string>& known_checkers() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [n, fn] : registry()) out.push_back(n);
        return out;
    }();
    return names;
}

RunConfig config_from_json(const std::string& text) {
    ojson doc;
    try {
        doc = ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    expect_keys(doc, {"schema", "seed", "exact_cap", "space", "checkers"}, "config");
    auto schema = doc.find("schema");
    if (schema == doc.end() || !schema->is_string() || schema->get<std::string>() != "palmlab-config-v1")
        throw InvalidInput("config: schema must be \"palmlab-config-v1\"");

    RunConfig cfg;
    if (doc.contains("seed")) {
        const ojson& js = doc["seed"];
        if (!js.is_number_unsigned() && !js.is_number_integer())
            throw InvalidInput("config: seed must be an integer");
        if (js.is_number_integer() && js.get<long long>() < 0)
            throw InvalidInput("config: seed must be nonnegative");
        cfg.seed = js.get<std::uint64_t>();
    }
    if (doc.contains("exact_cap")) {
        const ojson& jc = doc["exact_cap"];
        if (!jc.is_number_integer() || jc.get<long>() < 1)
            throw InvalidInput("config: exact_cap must be a positive integer");
        cfg.exact_cap = jc.get<long>();
    }

    auto jspace = doc.find("space");
    if (jspace == doc.end()) throw InvalidInput("config: missing field \"space\"");
    if (!jspace->is_object()) throw InvalidInput("config: space must be an object");
    if (jspace->contains("inline")) {
        expect_keys(*jspace, {"inline"}, "config space");
        cfg.bundle = space_from_json((*jspace)["inline"].dump());
    } else {
        cfg.bundle = bundle_from_generator(*jspace, cfg.exact_cap);
    }

    if (doc.contains("checkers")) {
        const ojson& jc = doc["checkers"];
        if (!jc.is_array()) throw InvalidInput("config: checkers must be an array of names");
        for (const auto& v : jc) {
            if (!v.is_string()) throw InvalidInput("config: checkers must be an array of names");
            std::string name = v.get<std::string>();
            checker_named(name);  // validates
            bool dup = false;
            for (const auto& have : cfg.checkers)
                if (have == name) { dup = true; break; }
            if (!dup) cfg.checkers.push_back(std::move(name));
        }
    } else {
        cfg.checkers = known_checkers();
    }
    return cfg;
}

SuiteReport run_suite(const RunConfig& cfg) {
    SuiteReport report;
    for (const auto& name : cfg.checkers) {
        const CheckFn& fn = checker_named(name);
        CheckOutcome out;
        out.checker = name;
        auto start = std::chrono::steady_clock::now();
        try {
            auto [holds, witness] = fn(cfg.bundle, cfg.seed);
            out.holds = holds;
            out.witness = witness;
        } catch (const InvalidInput& e) {
            out.holds = false;
            out.witness = std::string("precondition: ") + e.what();
        }
        out.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
        report.all_hold = report.all_hold && out.holds;
        report.results.push_back(std::move(out));
    }
    return report;
}

std::string report_to_json(const SuiteReport& report) {
    ojson doc;
    doc["schema"] = "palmlab-report-v1";
    doc["all_hold"] = report.all_hold;
    ojson rows = ojson::array();
    for (const auto& r : report.results) {
        ojson row;
        row["checker"] = r.checker;
        row["holds"] = r.holds;
        row["witness"] = r.witness;
        row["millis"] = r.millis;
        rows.push_back(std::move(row));
    }
    doc["results"] = rows;
    return doc.dump(1);
}

ReproResult run_repro(const std::string& name, std::uint64_t seed) {
    if (name == "example65") return repro_example65();
    if (name == "example71") return repro_example71();
    if (name == "coupling") return repro_coupling(seed);
    throw InvalidInput("unknown repro target \"" + name + "\"; known: example65, example71, coupling");
}

}  // namespace palmlab
