// Command-line front end: datasets in, deterministic reports out.
// Exit codes: 0 pass, 1 verification failure, 2 input error.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sftorient/boundary.hpp"
#include "sftorient/czindex.hpp"
#include "sftorient/dataset.hpp"
#include "sftorient/detline_sweep.hpp"
#include "sftorient/loop_io.hpp"
#include "sftorient/tuples.hpp"
#include "sftorient/weyl.hpp"

namespace {

using namespace sftorient;
using nlohmann::json;

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_input = 2;

struct Common {
    std::string dataset;
    std::string convention = "ht";
    std::string prefactor = "none";
    std::string out = "json";
    std::string gradings;
    std::uint64_t seed = 1;
};

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw InputError(std::string(what) + ": '" + item + "' is not an integer");
        }
    }
    return out;
}

Dataset load(const Common& c) {
    std::optional<std::vector<int>> g;
    if (!c.gradings.empty()) {
        g = parse_int_list(c.gradings, "--gradings");
    }
    return load_dataset(c.dataset, g);
}

void print_element(const weyl::WeylAlgebra& alg, const weyl::WeylElement& f, const std::string& out) {
    if (out == "text") {
        std::cout << alg.to_text(f);
    } else {
        std::cout << alg.to_json(f).dump(2) << "\n";
    }
}

void add_dataset_options(CLI::App* sub, Common& c, bool convention, bool prefactor) {
    sub->add_option("dataset", c.dataset, "dataset JSON file")->required();
    sub->add_option("--gradings", c.gradings, "comma-separated orbit gradings in declaration order");
    if (convention) {
        sub->add_option("--convention", c.convention, "orientation convention")->check(CLI::IsMember({"ht", "bm"}));
    }
    if (prefactor) {
        sub->add_option("--h-prefactor", c.prefactor, "weight of each curve in H")
            ->check(CLI::IsMember({"none", "inv-mneg"}));
    }
}

void add_out_option(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "report format")->check(CLI::IsMember({"json", "text"}));
}

int cmd_hamiltonian(const Common& c) {
    const Dataset ds = load(c);
    const auto alg = weyl::WeylAlgebra::from_dataset(ds);
    print_element(alg, weyl::build_hamiltonian(alg, ds, weyl::parse_prefactor(c.prefactor)), c.out);
    return exit_pass;
}

int cmd_h_square(const Common& c) {
    const Dataset ds = load(c);
    const auto alg = weyl::WeylAlgebra::from_dataset(ds);
    const auto hh = weyl::h_square(alg, ds, weyl::parse_prefactor(c.prefactor));
    print_element(alg, hh, c.out);
    if (ds.geometry_consistent && !hh.is_zero()) {
        std::cerr << ds.source << ": flagged geometry-consistent but H.H has " << hh.size() << " nonzero terms\n";
        return exit_fail;
    }
    return exit_pass;
}

int cmd_claim_check(const Common& c, bool weighting, bool triples) {
    const Dataset ds = load(c);
    boundary::Options opt;
    opt.convention = parse_convention(c.convention);
    opt.prefactor = weyl::parse_prefactor(c.prefactor);
    opt.multiplicity_weighting = weighting;
    const auto report = boundary::claim_check(ds, opt);
    if (c.out == "text") {
        for (const auto& p : report.profiles) {
            std::cout << (p.ok ? "ok   " : "FAIL ") << "g=" << p.profile.genus << " pos=(";
            for (std::size_t i = 0; i < p.profile.pos.size(); ++i) {
                std::cout << (i ? "," : "") << p.profile.pos[i];
            }
            std::cout << ") neg=(";
            for (std::size_t i = 0; i < p.profile.neg.size(); ++i) {
                std::cout << (i ? "," : "") << p.profile.neg[i];
            }
            std::cout << ") algebraic=" << to_fraction_string(p.algebraic)
                      << " geometric=" << to_fraction_string(p.geometric) << "\n";
        }
    } else {
        std::cout << boundary::report_to_json(report, triples).dump(2) << "\n";
    }
    return report.all_ok() ? exit_pass : exit_fail;
}

weyl::WordOrder word_order(const Common& c) {
    return parse_convention(c.convention) == Convention::bm ? weyl::WordOrder::reversed : weyl::WordOrder::ascending;
}

int cmd_chom_d(const Common& c, const std::string& orbit) {
    const Dataset ds = load(c);
    const auto alg = weyl::WeylAlgebra::from_dataset(ds);
    json out = json::object();
    std::ostringstream text;
    for (const auto& o : alg.declared()) {
        if (!orbit.empty() && o.id != orbit) {
            continue;
        }
        const auto d = weyl::contact_d(alg, ds, o.id, word_order(c));
        out[o.id] = alg.to_json(d);
        text << "d " << o.id << " =\n" << alg.to_text(d, false);
    }
    if (!orbit.empty() && out.empty()) {
        throw InputError(ds.source + ": unknown orbit id '" + orbit + "'");
    }
    std::cout << (c.out == "text" ? text.str() : out.dump(2) + "\n");
    return exit_pass;
}

int cmd_chom_d2(const Common& c) {
    const Dataset ds = load(c);
    const auto alg = weyl::WeylAlgebra::from_dataset(ds);
    json out = json::object();
    bool all_zero = true;
    for (const auto& o : alg.declared()) {
        const auto d = weyl::contact_d(alg, ds, o.id, word_order(c));
        const auto d2 = weyl::contact_d_apply(alg, ds, d, word_order(c));
        all_zero = all_zero && d2.is_zero();
        out[o.id] = alg.to_json(d2);
    }
    if (c.out == "text") {
        for (const auto& [id, v] : out.items()) {
            std::cout << "d^2 " << id << " = " << (v.empty() ? "0" : v.dump()) << "\n";
        }
    } else {
        std::cout << json{{"d_squared", out}, {"zero", all_zero}}.dump(2) << "\n";
    }
    return all_zero ? exit_pass : exit_fail;
}

int cmd_index(int n, int genus, int c1, const std::string& mu_pos, const std::string& mu_neg, const std::string& out) {
    auto to_long = [](const std::vector<int>& v) { return std::vector<long>(v.begin(), v.end()); };
    const auto mp = to_long(mu_pos.empty() ? std::vector<int>{} : parse_int_list(mu_pos, "--mu-pos"));
    const auto mn = to_long(mu_neg.empty() ? std::vector<int>{} : parse_int_list(mu_neg, "--mu-neg"));
    CRTupleShape t;
    t.n = n;
    t.genus = genus;
    t.c1 = c1;
    for (long m : mp) {
        t.pos.push_back(grading_from_mu(m, n));
    }
    for (long m : mn) {
        t.neg.push_back(grading_from_mu(m, n));
    }
    if (genus < 0) {
        throw InputError("--genus must be non-negative");
    }
    const long fi = fredholm_index(t, mp, mn);
    const long vd = virtual_dimension(t, mp, mn);
    if (out == "text") {
        std::cout << "fredholm_index " << fi << "\nvirtual_dimension " << vd << "\nind " << ind(t) << "\n";
    } else {
        std::cout << json{{"fredholm_index", fi}, {"virtual_dimension", vd}, {"ind", ind(t)}}.dump(2) << "\n";
    }
    return exit_pass;
}

int cmd_cz(const std::string& loop_path, std::size_t steps, int modes, std::optional<int> n, const std::string& out) {
    cz::SymmetricLoop s = [&] {
        try {
            return cz::load_loop(loop_path);
        } catch (const std::invalid_argument& e) {
            throw InputError(e.what());
        }
    }();
    if (steps < 16) {
        throw InputError("--steps must be at least 16");
    }
    const int half = n.value_or(s.dim() / 2 + 1);
    json report;
    const bool admissible = cz::is_admissible(s, steps);
    report["admissible"] = admissible;
    if (admissible) {
        const int mu = cz::conley_zehnder(s, steps);
        report["mu_cz"] = mu;
        report["grading"] = mod2(mu + half - 1);
        report["lambda"] = cz::spectral_gap(s, modes);
        report["symplectic_defect"] = cz::symplectic_defect(cz::solve_symplectic_path(s, steps));
    } else {
        report["mu_cz"] = nullptr;
        report["lambda"] = nullptr;
    }
    if (out == "text") {
        for (const auto& [k, v] : report.items()) {
            std::cout << k << " " << v.dump() << "\n";
        }
    } else {
        std::cout << report.dump(2) << "\n";
    }
    return exit_pass;
}

int cmd_detline(std::uint64_t seed, int count, std::size_t max_dim, const std::string& out) {
    const auto r = detline::run_detline_sweep(seed, count, max_dim);
    json report = json::array();
    for (const auto* c : r.all()) {
        report.push_back({{"property", c->name}, {"passed", c->passed}, {"failed", c->failed}, {"ok", c->ok()}});
    }
    if (out == "text") {
        for (const auto* c : r.all()) {
            std::cout << (c->ok() ? "PASS " : "FAIL ") << c->name << " (" << c->passed << "/"
                      << c->passed + c->failed << ")\n";
        }
    } else {
        std::cout << json{{"seed", seed}, {"count", count}, {"properties", report}}.dump(2) << "\n";
    }
    return r.ok() ? exit_pass : exit_fail;
}

int cmd_capping_change(const Common& c, const std::string& eps_text) {
    const Dataset ds = load(c);
    const auto alg = weyl::WeylAlgebra::from_dataset(ds);
    std::map<std::string, int> eps;
    std::stringstream ss(eps_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw InputError("--eps: expected id=+1 or id=-1, got '" + item + "'");
        }
        const std::string id = item.substr(0, eq);
        ds.orbit(id);
        const auto v = parse_int_list(item.substr(eq + 1), "--eps");
        if (v.size() != 1 || (v[0] != 1 && v[0] != -1)) {
            throw InputError("--eps: sign for '" + id + "' must be +1 or -1");
        }
        eps[id] = v[0];
    }
    const auto e = weyl::eps_by_rank(alg, eps);
    const auto pre = weyl::parse_prefactor(c.prefactor);
    const auto h = weyl::build_hamiltonian(alg, ds, pre);
    const auto h2 = alg.capping_change(e, h);
    // phi(D x) = D'(phi x) on every generator.
    bool intertwines = true;
    for (std::size_t o = 0; o < alg.orbit_count(); ++o) {
        for (auto kind : {weyl::Kind::q, weyl::Kind::p}) {
            const auto x = alg.generator({kind, static_cast<int>(o)});
            const auto lhs = alg.capping_change(e, weyl::differential_D(alg, h, x));
            const auto rhs = weyl::differential_D(alg, h2, alg.capping_change(e, x));
            intertwines = intertwines && lhs == rhs;
        }
    }
    if (c.out == "text") {
        std::cout << alg.to_text(h2) << "intertwines " << (intertwines ? "true" : "false") << "\n";
    } else {
        std::cout << json{{"hamiltonian", alg.to_json(h2)}, {"intertwines", intertwines}}.dump(2) << "\n";
    }
    return intertwines ? exit_pass : exit_fail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Orientation signs, the Weyl super-algebra and the master equation H.H = 0"};
    app.require_subcommand(1);
    Common common;

    auto* ham = app.add_subcommand("hamiltonian", "print the potential H");
    add_dataset_options(ham, common, false, true);
    add_out_option(ham, common);

    auto* hsq = app.add_subcommand("h-square", "print H.H in normal form");
    add_dataset_options(hsq, common, false, true);
    add_out_option(hsq, common);

    bool weighting = false;
    bool triples = false;
    auto* claim = app.add_subcommand("claim-check", "compare H.H with boundary counts, profile by profile");
    add_dataset_options(claim, common, true, true);
    add_out_option(claim, common);
    claim->add_flag("--weight-multiplicities", weighting, "divide gluings by the multiplicities of glued orbits");
    claim->add_flag("--triples", triples, "list every contributing (u, u', theta)");

    std::string orbit;
    auto* chd = app.add_subcommand("chom-d", "contact homology differential of the generators");
    add_dataset_options(chd, common, true, false);
    add_out_option(chd, common);
    chd->add_option("--orbit", orbit, "only this generator");

    auto* chd2 = app.add_subcommand("chom-d2", "check d^2 = 0 on every generator");
    add_dataset_options(chd2, common, true, false);
    add_out_option(chd2, common);

    int n = 2;
    int genus = 0;
    int c1 = 0;
    std::string mu_pos;
    std::string mu_neg;
    auto* idx = app.add_subcommand("index", "Fredholm index and virtual dimension");
    idx->add_option("--n", n, "ambient half-dimension")->required();
    idx->add_option("--genus", genus, "genus");
    idx->add_option("--c1", c1, "relative first Chern number");
    idx->add_option("--mu-pos", mu_pos, "Conley-Zehnder indices at positive ends, comma-separated");
    idx->add_option("--mu-neg", mu_neg, "Conley-Zehnder indices at negative ends, comma-separated");
    add_out_option(idx, common);

    std::string loop;
    std::size_t steps = cz::default_steps;
    int modes = cz::default_modes;
    std::optional<int> ambient;
    auto* czc = app.add_subcommand("cz", "admissibility, Conley-Zehnder index and spectral gap of a loop");
    czc->add_option("--loop", loop, "loop JSON file")->required();
    czc->add_option("--steps", steps, "integration steps");
    czc->add_option("--modes", modes, "Fourier truncation");
    czc->add_option("--n", ambient, "ambient half-dimension (default dim/2 + 1)");
    add_out_option(czc, common);

    int count = 200;
    std::size_t max_dim = 5;
    auto* det = app.add_subcommand("detline-selftest", "randomized determinant-line identities");
    det->add_option("--seed", common.seed, "random seed");
    det->add_option("--count", count, "instances per property");
    det->add_option("--max-dim", max_dim, "largest domain/target dimension");
    add_out_option(det, common);

    std::string eps;
    auto* cap = app.add_subcommand("capping-change", "rescale generators by capping signs and check D' phi = phi D");
    add_dataset_options(cap, common, false, true);
    add_out_option(cap, common);
    cap->add_option("--eps", eps, "signs as id=+1|-1, comma-separated (unlisted orbits keep +1)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_pass : exit_input;
    }

    try {
        if (*ham) return cmd_hamiltonian(common);
        if (*hsq) return cmd_h_square(common);
        if (*claim) return cmd_claim_check(common, weighting, triples);
        if (*chd) return cmd_chom_d(common, orbit);
        if (*chd2) return cmd_chom_d2(common);
        if (*idx) return cmd_index(n, genus, c1, mu_pos, mu_neg, common.out);
        if (*czc) return cmd_cz(loop, steps, modes, ambient, common.out);
        if (*det) return cmd_detline(common.seed, count, max_dim, common.out);
        if (*cap) return cmd_capping_change(common, eps);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_fail;
    }
    return exit_input;
}
