#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "palmlab/existence.hpp"
#include "palmlab/massstat.hpp"
#include "palmlab/serialize.hpp"
#include "palmlab/suite.hpp"
#include "palmlab/torus.hpp"
#include "palmlab/util.hpp"

namespace {

using palmlab::InvalidInput;
using ojson = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot read \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write \"" + path + "\"");
    out << text;
    if (!out) throw InvalidInput("short write to \"" + path + "\"");
}

// JSON goes to --out when given, otherwise to stdout.
void emit(const std::string& out_path, const std::string& json_text, const std::string& human) {
    if (out_path.empty()) {
        std::cout << json_text << "\n";
    } else {
        write_file(out_path, json_text + "\n");
        if (!human.empty()) std::cout << human;
    }
}

std::string sig12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::string(buf);
}

long parse_long_strict(const std::string& text, const char* what) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(text, &pos);
    } catch (const std::exception&) {
        throw InvalidInput(std::string(what) + " is not an integer: \"" + text + "\"");
    }
    if (pos != text.size()) throw InvalidInput(std::string(what) + " is not an integer: \"" + text + "\"");
    return v;
}

void parse_odds(const std::string& text, long& num, long& den, const char* what) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        num = parse_long_strict(text, what);
        den = 1;
    } else {
        num = parse_long_strict(text.substr(0, slash), what);
        den = parse_long_strict(text.substr(slash + 1), what);
    }
    if (den <= 0 || num < 0 || num > den)
        throw InvalidInput(std::string(what) + " must be a probability a/b with 0 <= a <= b");
}

// PALMLAB_THREADS and --threads are accepted and validated. Execution is
// sequential either way; no reported value depends on the setting.
void validate_threads(long t, const char* source) {
    if (t < 1) throw InvalidInput(std::string(source) + ": thread count must be at least 1");
}

struct Globals {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    long threads = 0;  // 0 = unset
};

int cmd_check(const Globals& g, const std::vector<std::string>& only) {
    if (g.config.empty()) throw InvalidInput("check needs --config");
    palmlab::RunConfig cfg = palmlab::config_from_json(read_file(g.config));
    if (!only.empty()) cfg.checkers = only;
    palmlab::SuiteReport rep = palmlab::run_suite(cfg);
    std::ostringstream human;
    for (const auto& r : rep.results) {
        human << r.checker << ": " << (r.holds ? "PASS" : "FAIL");
        if (!r.witness.empty()) human << " (" << r.witness << ")";
        human << "\n";
    }
    emit(g.out, palmlab::report_to_json(rep), human.str());
    return rep.all_hold ? 0 : 3;
}

int cmd_repro(const Globals& g, const std::string& name) {
    palmlab::ReproResult rr = palmlab::run_repro(name, g.seed);
    std::cout << rr.text;
    if (!g.out.empty()) {
        ojson doc;
        doc["schema"] = "palmlab-repro-v1";
        doc["name"] = rr.name;
        doc["ok"] = rr.ok;
        doc["text"] = rr.text;
        write_file(g.out, doc.dump(1) + "\n");
    }
    return rr.ok ? 0 : 3;
}

int cmd_torus_allocate(const Globals& g, int n, int d, long k, const std::string& csv_path) {
    std::vector<int> pts = palmlab::sample_point_sites(n, d, k, g.seed);
    palmlab::AllocationMap a = palmlab::stable_marriage_allocate(n, d, pts);
    const bool quota_ok = palmlab::quota_exact(a);
    palmlab::BlockingPair bp = palmlab::find_blocking_pair(a);
    if (!quota_ok) throw palmlab::InternalDefect("allocation missed the quota");
    if (!bp.stable)
        throw palmlab::InternalDefect("allocation has a blocking pair at site " +
                                      std::to_string(bp.site));
    if (!csv_path.empty()) write_file(csv_path, palmlab::allocation_csv(a));
    ojson doc;
    doc["schema"] = "palmlab-torus-v1";
    doc["mode"] = "allocate";
    doc["n"] = n;
    doc["d"] = d;
    doc["k"] = k;
    doc["quota"] = a.quota;
    doc["seed"] = g.seed;
    doc["quota_exact"] = quota_ok;
    doc["stable"] = bp.stable;
    doc["points"] = a.points;
    emit(g.out, doc.dump(1), "allocate: quota " + std::to_string(a.quota) + ", stable\n");
    return 0;
}

int cmd_torus_coupling(const Globals& g, const palmlab::TorusConfig& cfg) {
    palmlab::CouplingReport rep = palmlab::verify_shift_coupling(cfg);
    if (rep.quota_violations != 0) throw palmlab::InternalDefect("allocation missed the quota");
    if (!rep.stability_spot_ok) throw palmlab::InternalDefect("allocation has a blocking pair");
    ojson rows = ojson::array();
    std::ostringstream human;
    human << "replicates tv control_tv\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        ojson row;
        row["replicates"] = rep.rows[i].replicates;
        row["tv"] = rep.rows[i].tv;
        row["control_tv"] = rep.control_rows[i].tv;
        rows.push_back(std::move(row));
        human << rep.rows[i].replicates << " " << sig12(rep.rows[i].tv) << " "
              << sig12(rep.control_rows[i].tv) << "\n";
    }
    ojson doc;
    doc["schema"] = "palmlab-torus-v1";
    doc["mode"] = "coupling";
    doc["n"] = cfg.n;
    doc["d"] = cfg.d;
    doc["k"] = cfg.k;
    doc["seed"] = cfg.seed;
    doc["replicates"] = cfg.replicates;
    doc["radius_max"] = cfg.radius_max;
    doc["rows"] = rows;
    doc["quota_violations"] = rep.quota_violations;
    doc["stability_spot_ok"] = rep.stability_spot_ok;
    emit(g.out, doc.dump(1), human.str());
    return 0;
}

int cmd_torus_massstat_mc(const Globals& g, const palmlab::TorusConfig& cfg, int c_len,
                          bool control) {
    palmlab::ResampleReport rep = palmlab::verify_window_resample(cfg, c_len, !control);
    ojson rows = ojson::array();
    std::ostringstream human;
    human << "replicates tv\n";
    for (const auto& r : rep.rows) {
        ojson row;
        row["replicates"] = r.replicates;
        row["tv"] = r.tv;
        rows.push_back(std::move(row));
        human << r.replicates << " " << sig12(r.tv) << "\n";
    }
    ojson doc;
    doc["schema"] = "palmlab-torus-v1";
    doc["mode"] = "massstat-mc";
    doc["n"] = cfg.n;
    doc["d"] = cfg.d;
    doc["q"] = std::to_string(cfg.q_num) + "/" + std::to_string(cfg.q_den);
    doc["c_len"] = c_len;
    doc["palm_origin"] = !control;
    doc["seed"] = cfg.seed;
    doc["replicates"] = cfg.replicates;
    doc["radius_max"] = cfg.radius_max;
    doc["rows"] = rows;
    emit(g.out, doc.dump(1), human.str());
    return 0;
}

std::pair<bool, std::string> describe_two_species(const std::string& group_name,
                                                  const std::string& p_text,
                                                  const palmlab::TwoSpeciesReport& rep,
                                                  const palmlab::FiniteAbelianGroup& g) {
    std::ostringstream os;
    os << "two-species field on " << group_name << ", p=" << p_text << "\n";
    os << "combined-field verdict="
       << (rep.combined.holds ? "MASS-STATIONARY" : "NOT-MASS-STATIONARY") << "\n";
    if (!rep.combined.holds) {
        os << "witness window=" << palmlab::Subset::of(g, rep.combined.witness.window).text(g)
           << " outcome=" << rep.combined.witness.omega
           << " element=" << g.element_text(rep.combined.witness.g)
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
    const bool ok = !rep.combined.holds && rep.first_only.holds && rep.palm_verified &&
                    rep.irrational_masses && rep.preserving_germs > 0 &&
                    rep.all_preserving_fix_first && rep.all_preserving_invariant;
    return {ok, os.str()};
}

int cmd_massstat_example71(const Globals& g, const std::string& group_name,
                           const std::string& p_text) {
    std::vector<long> moduli;
    if (group_name == "z2") moduli = {2};
    else if (group_name == "z3") moduli = {3};
    else if (group_name == "z4") moduli = {4};
    else throw InvalidInput("unknown --group \"" + group_name + "\"; use z2, z3 or z4");
    long pn = 0, pd = 0;
    parse_odds(p_text, pn, pd, "--p");
    if (pn == 0 || pn == pd) throw InvalidInput("--p must sit strictly between 0 and 1");
    palmlab::TwoSpeciesReport rep = palmlab::two_species_example(moduli, pn, pd);
    auto gp = palmlab::make_group(moduli);
    auto [ok, text] = describe_two_species(group_name, p_text, rep, *gp);
    std::cout << text;
    if (!g.out.empty()) {
        ojson doc;
        doc["schema"] = "palmlab-repro-v1";
        doc["name"] = "example71";
        doc["ok"] = ok;
        doc["text"] = text;
        write_file(g.out, doc.dump(1) + "\n");
    }
    return ok ? 0 : 3;
}

palmlab::SpaceBundle load_bundle(const Globals& g, const std::string& space_path) {
    if (!space_path.empty() && !g.config.empty())
        throw InvalidInput("give either --space or --config, not both");
    if (!space_path.empty()) return palmlab::space_from_json(read_file(space_path));
    if (!g.config.empty()) return palmlab::config_from_json(read_file(g.config)).bundle;
    throw InvalidInput("need a space: pass --space or --config");
}

int cmd_palm(const Globals& g, const std::string& space_path, const std::string& window_text) {
    palmlab::SpaceBundle b = load_bundle(g, space_path);
    const palmlab::FiniteAbelianGroup& grp = b.space->group();
    std::vector<int> members;
    std::stringstream ss(window_text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        long e = parse_long_strict(tok, "--window element");
        if (e < 0 || e >= grp.order()) throw InvalidInput("--window element out of range");
        members.push_back(static_cast<int>(e));
    }
    palmlab::Subset B = palmlab::Subset::of(grp, members);
    palmlab::PalmResult pr = palmlab::palm_measure(b.P, b.xi, B);
    ojson doc;
    doc["schema"] = "palmlab-palm-v1";
    ojson window = ojson::array();
    for (int e : B.members) window.push_back(grp.element_text(e));
    doc["window"] = window;
    doc["intensity"] = pr.intensity.str();
    ojson weights = ojson::array();
    for (int w = 0; w < b.space->outcomes(); ++w) weights.push_back(pr.measure.at(w).str());
    doc["weights"] = weights;
    if (pr.normalized) {
        ojson norm = ojson::array();
        for (int w = 0; w < b.space->outcomes(); ++w) norm.push_back(pr.normalized->at(w).str());
        doc["normalized"] = norm;
    } else {
        doc["normalized"] = nullptr;
    }
    emit(g.out, doc.dump(1), "intensity=" + pr.intensity.str() + "\n");
    return 0;
}

int cmd_transport_invariant(const Globals& g, const std::string& space_path,
                            const std::string& kernel_path) {
    palmlab::SpaceBundle b = palmlab::space_from_json(read_file(space_path));
    palmlab::TransportKernel T = palmlab::kernel_from_json(read_file(kernel_path), b.space);
    palmlab::KernelInvarianceReport r = palmlab::is_invariant_kernel(T);
    ojson doc;
    doc["schema"] = "palmlab-transport-v1";
    doc["mode"] = "invariant";
    doc["invariant"] = r.ok;
    doc["markovian"] = T.markovian();
    if (!r.ok) {
        doc["witness_outcome"] = r.omega;
        doc["witness_s"] = b.space->group().element_text(r.s);
        doc["witness_t"] = b.space->group().element_text(r.t);
        doc["witness_b"] = b.space->group().element_text(r.b);
    }
    emit(g.out, doc.dump(1),
         std::string("invariant=") + (r.ok ? "yes" : "no") + " markovian=" +
             (T.markovian() ? "yes" : "no") + "\n");
    return r.ok ? 0 : 3;
}

int cmd_transport_duality(const Globals& g, const std::string& space_path,
                          const std::string& kernel_path) {
    palmlab::SpaceBundle b = palmlab::space_from_json(read_file(space_path));
    if (!b.eta) throw InvalidInput("duality needs a space document with \"eta\"");
    palmlab::TransportKernel T = palmlab::kernel_from_json(read_file(kernel_path), b.space);
    palmlab::DualityReport d = palmlab::check_balancing_palm_duality(T, b.xi, *b.eta, b.P);
    if (!d.agree())
        throw palmlab::InternalDefect("balancing and the recentering identity disagree");
    ojson doc;
    doc["schema"] = "palmlab-transport-v1";
    doc["mode"] = "duality";
    doc["balancing"] = d.balancing;
    doc["palm_identity"] = d.palm_identity;
    emit(g.out, doc.dump(1),
         std::string("balancing=") + (d.balancing ? "yes" : "no") + " palm-identity=" +
             (d.palm_identity ? "yes" : "no") + "\n");
    return d.balancing ? 0 : 3;
}

int cmd_exists(const Globals& g, const std::string& space_path) {
    palmlab::SpaceBundle b = palmlab::space_from_json(read_file(space_path));
    if (!b.eta) throw InvalidInput("exists needs a space document with \"eta\"");
    palmlab::ExistenceResult res = palmlab::construct_balancing_kernel(b.P, b.xi, *b.eta);
    ojson doc;
    doc["schema"] = "palmlab-exists-v1";
    doc["condition_ok"] = res.condition.ok;
    if (!res.condition.ok) {
        doc["witness_outcome"] = res.condition.omega;
        doc["witness_orbit"] = res.condition.orbit;
        doc["witness_lhs"] = res.condition.lhs.str();
        doc["witness_rhs"] = res.condition.rhs.str();
        std::cout << doc.dump(1) << "\n";
        return 3;
    }
    if (!g.out.empty()) {
        write_file(g.out, palmlab::kernel_to_json(*res.kernel) + "\n");
        std::cout << "condition holds; kernel written to " << g.out << "\n";
    } else {
        doc["kernel"] = ojson::parse(palmlab::kernel_to_json(*res.kernel));
        std::cout << doc.dump(1) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verification engine for recentering laws and invariant transports"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "run-config JSON file");
    app.add_option("--out", g.out, "write the JSON report here instead of stdout");
    app.add_option("--seed", g.seed, "base seed for anything randomized");
    app.add_option("--threads", g.threads, "accepted for interface stability; execution is sequential");
    app.set_version_flag("--version", "palmlab 1.0.0");

    auto* c_check = app.add_subcommand("check", "run the checker suite from --config");
    c_check->fallthrough();

    auto* c_repro = app.add_subcommand("repro", "reproduce a pinned result table");
    c_repro->fallthrough();
    std::string repro_name;
    c_repro->add_option("name", repro_name, "example65, example71 or coupling")->required();

    auto* c_torus = app.add_subcommand("torus", "Monte-Carlo runs on the discrete torus");
    c_torus->fallthrough();
    c_torus->require_subcommand(1);
    int t_n = 16, t_d = 2, t_radii = 3, t_clen = 2;
    long t_k = 16, t_reps = 100000;
    std::string t_csv, t_q = "1/2";
    bool t_control = false;
    auto* c_alloc = c_torus->add_subcommand("allocate", "one stable allocation, optionally as CSV");
    c_alloc->fallthrough();
    c_alloc->add_option("--n", t_n, "side length");
    c_alloc->add_option("--d", t_d, "axes");
    c_alloc->add_option("--k", t_k, "number of points");
    c_alloc->add_option("--csv", t_csv, "write site,point coordinate rows here");
    auto* c_coup = c_torus->add_subcommand("coupling", "allocation vs uniform-point recentering");
    c_coup->fallthrough();
    c_coup->add_option("--n", t_n, "side length");
    c_coup->add_option("--d", t_d, "axes");
    c_coup->add_option("--k", t_k, "points per replicate");
    c_coup->add_option("--replicates", t_reps, "replicate count");
    c_coup->add_option("--radii", t_radii, "largest box radius in the statistic");
    auto* c_mc = c_torus->add_subcommand("massstat-mc", "window-resampling check on sampled fields");
    c_mc->fallthrough();
    c_mc->add_option("--n", t_n, "side length");
    c_mc->add_option("--d", t_d, "axes");
    c_mc->add_option("--q", t_q, "site occupation probability a/b");
    c_mc->add_option("--c-len", t_clen, "window length along axis 0");
    c_mc->add_option("--replicates", t_reps, "replicate count");
    c_mc->add_option("--radii", t_radii, "largest box radius in the statistic");
    c_mc->add_flag("--control", t_control, "skip the origin conditioning (laws then differ)");

    auto* c_mass = app.add_subcommand("massstat", "mass-stationarity checks and pinned instances");
    c_mass->fallthrough();
    c_mass->require_subcommand(1);
    auto* m_check = c_mass->add_subcommand("check", "run only the mass-stationarity checker");
    m_check->fallthrough();
    auto* m_e65 = c_mass->add_subcommand("example65", "window-bias values on the pinned field");
    m_e65->fallthrough();
    auto* m_e71 = c_mass->add_subcommand("example71", "two-species counterexample");
    m_e71->fallthrough();
    std::string m_group = "z3", m_p = "1/2";
    m_e71->add_option("--group", m_group, "z2, z3 or z4");
    m_e71->add_option("--p", m_p, "species occupation probability a/b");

    auto* c_palm = app.add_subcommand("palm", "print the recentering table of a space");
    c_palm->fallthrough();
    std::string palm_space, palm_window = "0";
    c_palm->add_option("--space", palm_space, "space JSON file");
    c_palm->add_option("--window", palm_window, "comma-separated element indices");

    auto* c_trans = app.add_subcommand("transport", "kernel checks");
    c_trans->fallthrough();
    c_trans->require_subcommand(1);
    std::string tr_space, tr_kernel;
    auto* tr_inv = c_trans->add_subcommand("invariant", "invariance and row totals of a kernel");
    tr_inv->fallthrough();
    tr_inv->add_option("--space", tr_space, "space JSON file")->required();
    tr_inv->add_option("--kernel", tr_kernel, "kernel JSON file")->required();
    auto* tr_dual = c_trans->add_subcommand("duality", "balancing vs the recentering identity");
    tr_dual->fallthrough();
    tr_dual->add_option("--space", tr_space, "space JSON file with eta")->required();
    tr_dual->add_option("--kernel", tr_kernel, "kernel JSON file")->required();

    auto* c_exists = app.add_subcommand("exists", "solvability of the balancing problem");
    c_exists->fallthrough();
    std::string ex_space;
    c_exists->add_option("--space", ex_space, "space JSON file with eta")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (const char* env = std::getenv("PALMLAB_THREADS")) {
            validate_threads(parse_long_strict(env, "PALMLAB_THREADS"), "PALMLAB_THREADS");
        }
        if (g.threads != 0) validate_threads(g.threads, "--threads");

        if (*c_check) return cmd_check(g, {});
        if (*c_repro) return cmd_repro(g, repro_name);
        if (*c_alloc) return cmd_torus_allocate(g, t_n, t_d, t_k, t_csv);
        if (*c_coup) {
            palmlab::TorusConfig cfg;
            cfg.n = t_n;
            cfg.d = t_d;
            cfg.k = t_k;
            cfg.seed = g.seed;
            cfg.replicates = t_reps;
            cfg.radius_max = t_radii;
            return cmd_torus_coupling(g, cfg);
        }
        if (*c_mc) {
            palmlab::TorusConfig cfg;
            cfg.n = t_n;
            cfg.d = t_d;
            cfg.seed = g.seed;
            cfg.replicates = t_reps;
            cfg.radius_max = t_radii;
            parse_odds(t_q, cfg.q_num, cfg.q_den, "--q");
            return cmd_torus_massstat_mc(g, cfg, t_clen, t_control);
        }
        if (*m_check) return cmd_check(g, {"mass-stationarity"});
        if (*m_e65) return cmd_repro(g, "example65");
        if (*m_e71) return cmd_massstat_example71(g, m_group, m_p);
        if (*c_palm) return cmd_palm(g, palm_space, palm_window);
        if (*tr_inv) return cmd_transport_invariant(g, tr_space, tr_kernel);
        if (*tr_dual) return cmd_transport_duality(g, tr_space, tr_kernel);
        if (*c_exists) return cmd_exists(g, ex_space);
        throw InvalidInput("no subcommand selected");
    } catch (const palmlab::InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const palmlab::InternalDefect& e) {
        std::cerr << "internal defect: " << e.what() << "\n";
        return 4;
    }
}
