// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "sftorient/boundary.hpp"
#include "sftorient/czindex.hpp"
#include "sftorient/dataset.hpp"
#include "sftorient/detline_sweep.hpp"
#include "sftorient/random.hpp"
#include "sftorient/tuples.hpp"
#include "sftorient/weyl.hpp"

using namespace sftorient;

namespace {

const std::string data_dir = SFTORIENT_DATA;
constexpr double pi = std::numbers::pi;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            detail << what;
        }
        ok = ok && cond;
    }
};

std::vector<std::array<int, 4>> admissible_gradings() {
    std::vector<std::array<int, 4>> out;
    for (unsigned mask = 0; mask < 16; ++mask) {
        const std::array<int, 4> d{int(mask & 1), int((mask >> 1) & 1), int((mask >> 2) & 1), int((mask >> 3) & 1)};
        if ((d[3] + d[0] + d[1]) % 2 == 1 && (d[0] + d[1] + d[2]) % 2 == 1) {
            out.push_back(d);
        }
    }
    return out;
}

Dataset example(const std::array<int, 4>& d) {
    return load_dataset(data_dir + "/four-orbit-example.json", std::vector<int>(d.begin(), d.end()));
}

void worked_example(Outcome& out) {
    const auto grads = admissible_gradings();
    out.require(grads.size() == 4, "expected 4 admissible grading vectors");
    for (const auto& d : grads) {
        const auto ds = example(d);
        const auto alg = weyl::WeylAlgebra::from_dataset(ds);
        const Rational a = ds.curves[0].count;
        const Rational b = ds.curves[1].count;
        out.require(a == 2 && b == 3, "example file must carry a = 2, b = 3");
        const auto hh = weyl::h_square(alg, ds);
        const int d1 = d[0], d2 = d[1], d3 = d[2], d4 = d[3];
        const std::string tag = " at d = (" + std::to_string(d1) + "," + std::to_string(d2) + "," +
                                std::to_string(d3) + "," + std::to_string(d4) + ")";
        out.require(alg.coefficient_of(hh, {alg.q("2"), alg.p("4"), alg.p("3"), alg.p("2")}, -1) ==
                        a * b * parity_sign(d2 + d2 * d3 + d2 * d4 + d3 * d4),
                    "q2 p4 p3 p2 coefficient" + tag);
        out.require(alg.coefficient_of(hh, {alg.q("1"), alg.p("4"), alg.p("3"), alg.p("1")}, -1) ==
                        a * b * parity_sign(d1 + d1 * d2 + d1 * d4 + d3 * d4),
                    "q1 p4 p3 p1 coefficient" + tag);
        out.require(alg.coefficient_of(hh, {alg.p("4"), alg.p("3")}, 0) == a * b * parity_sign(d3 * d4),
                    "p4 p3 coefficient" + tag);
        out.require(hh.size() == 3, "H.H has extra terms" + tag);
        for (const auto& [k, c] : hh.terms()) {
            out.require(!(k.q.size() == 2 && k.p.size() == 4), "q1 q2 p4 p3 p2 p1 multiple survives" + tag);
        }
    }
    out.detail << "4 admissible gradings, three monomials each";
}

void claim_sweep(Outcome& out) {
    std::mt19937_64 rng(20261014);
    int profiles = 0;
    for (int i = 0; i < 100; ++i) {
        const auto ds = random::random_dataset(rng);
        for (const auto& o : ds.orbits) {
            out.require(o.multiplicity == 1, "random dataset with multiplicity != 1");
        }
        const auto report = boundary::claim_check(ds);
        out.require(report.all_ok(), "dataset " + std::to_string(i) + " fails:\n" +
                                         boundary::report_to_json(report, true).dump(1));
        profiles += static_cast<int>(report.profiles.size());
    }
    out.detail << "100 datasets, " << profiles << " profiles";
}

void third_moduli_space(Outcome& out) {
    for (const auto& d : admissible_gradings()) {
        const auto ds = example(d);
        const auto alg = weyl::WeylAlgebra::from_dataset(ds);
        const auto prof = boundary::glued_profile(alg, ds.curves[0], ds.curves[1], {{{0, 0}}});
        const Rational ab = ds.curves[0].count * ds.curves[1].count;
        const int d2 = d[1], d3 = d[2], d4 = d[3];
        out.require(prof.pos == std::vector<std::string>{"2", "3", "4"} && prof.neg == std::vector<std::string>{"2"},
                    "glued profile is not (2 3 4 ; 2)");
        out.require(boundary::geometric_coefficient(ds, alg, prof, {}) ==
                        ab * parity_sign(d2 + d2 * d3 + d2 * d4 + d3 * d4 + 1),
                    "boundary count differs");
    }
    out.detail << "4 admissible gradings";
}

void detline_lemmas(Outcome& out) {
    const auto result = detline::run_detline_sweep(20261014, 200, 5);
    for (const auto* c : result.all()) {
        out.require(c->ok() && c->passed == 200, c->name + ": " + std::to_string(c->failed) + " failures");
    }
    out.detail << "5 properties x 200 instances";
}

void index_formulas(Outcome& out) {
    for (int n : {2, 3, 4}) {
        for (long mu = -3; mu <= 3; ++mu) {
            out.require(fredholm_index(trivial_tuple(grading_from_mu(mu, n), n), {mu}, {mu}) == 2,
                        "trivial tuple index != 2");
        }
    }
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> small(0, 3);
    std::uniform_int_distribution<long> mu(-6, 6);
    for (int i = 0; i < 100; ++i) {
        CRTupleShape t;
        t.n = 2 + small(rng);
        t.genus = small(rng);
        t.c1 = small(rng) - 1;
        std::vector<long> mp(static_cast<std::size_t>(small(rng)));
        std::vector<long> mm(static_cast<std::size_t>(small(rng)));
        for (auto& m : mp) {
            m = mu(rng);
            t.pos.push_back(grading_from_mu(m, t.n));
        }
        for (auto& m : mm) {
            m = mu(rng);
            t.neg.push_back(grading_from_mu(m, t.n));
        }
        out.require(mod2(fredholm_index(t, mp, mm)) == ind(t), "index parity");
        out.require(mod2(virtual_dimension(t, mp, mm)) == ind(t), "virtual dimension parity");
    }
    out.detail << "trivial tuples n = 2,3,4; 100 random parity checks";
}

void cz_numerics(Outcome& out) {
    double worst_lambda = 0.0;
    double worst_defect = 0.0;
    double worst_doubling = 0.0;
    for (double a : {pi / 2, pi, 3 * pi / 2, 5.0, 3 * pi + 0.1, -pi / 2}) {
        const auto s = cz::SymmetricLoop::scalar(2, a);
        const int expected = a > 0 ? 2 * static_cast<int>(std::floor(a / (2 * pi))) + 1 : -1;
        const double r = std::fmod(std::fabs(a), 2 * pi);
        const double dist = std::min(r, 2 * pi - r);
        const int mu = cz::conley_zehnder(s, 256);
        const double lambda = cz::spectral_gap(s, 128);
        const double defect = cz::symplectic_defect(cz::solve_symplectic_path(s, 256));
        const std::string tag = " for a = " + std::to_string(a);
        out.require(mu == expected, "mu_CZ = " + std::to_string(mu) + tag);
        out.require(std::fabs(lambda - dist) < 1e-6, "lambda" + tag);
        out.require(defect < 1e-8, "symplectic defect" + tag);
        out.require(cz::conley_zehnder(s, 512) == mu, "mu changes under N -> 2N" + tag);
        const double doubled = std::fabs(cz::spectral_gap(s, 256) - lambda);
        out.require(doubled < 1e-8, "lambda changes under modes -> 2 modes" + tag);
        worst_lambda = std::max(worst_lambda, std::fabs(lambda - dist));
        worst_defect = std::max(worst_defect, defect);
        worst_doubling = std::max(worst_doubling, doubled);
    }
    out.detail << "max |dlambda| " << worst_lambda << ", max defect " << worst_defect << ", max doubling change "
               << worst_doubling;
}

void algebra_laws(Outcome& out) {
    std::mt19937_64 rng(77);
    const int count = 100;
    for (int i = 0; i < count; ++i) {
        auto alg = random::random_algebra(rng, 4);
        while (alg.grading(0) + alg.grading(1) + alg.grading(2) + alg.grading(3) == 0) {
            alg = random::random_algebra(rng, 4);
        }
        const auto f = random::random_element(alg, rng, 3, 4);
        const auto g = random::random_element(alg, rng, 3, 4);
        const auto h = random::random_element(alg, rng, 3, 4);
        out.require(alg.mul(alg.mul(f, g), h) == alg.mul(f, alg.mul(g, h)), "associativity");

        weyl::WeylElement odd;
        while (odd.is_zero()) {
            odd = random::random_element(alg, rng, 3, 4, 1);
            odd += random::random_element(alg, rng, 1, 1, 1);
        }
        const auto [g_even, g_odd] = alg.split_by_grade(g);
        for (const auto& part : {g_even, g_odd}) {
            out.require(Rational(2) * alg.super_commutator(odd, alg.super_commutator(odd, part)) ==
                            alg.super_commutator(alg.super_commutator(odd, odd), part),
                        "graded Jacobi");
        }

        // Odd elements of the commutative q-part square to zero.
        weyl::WeylElement q_odd;
        const auto q_source = random::random_element(alg, rng, 4, 5, 1);
        for (const auto& [k, c] : q_source.terms()) {
            if (k.p.empty()) {
                q_odd.add(k, c);
            }
        }
        for (int o = 0; o < static_cast<int>(alg.orbit_count()); ++o) {
            if (alg.grading(o) == 1) {
                q_odd += alg.generator({weyl::Kind::q, o});
                out.require(alg.normal_order({{weyl::Kind::p, o}, {weyl::Kind::p, o}}).is_zero(), "p^2 != 0");
                break;
            }
        }
        out.require(alg.mul(q_odd, q_odd).is_zero(), "odd square");

        const auto w = random::random_word(alg, rng, 8);
        const auto fast = alg.normal_order(w, 1, 0, alg.zero_homology());
        for (auto strategy : {weyl::Strategy::leftmost, weyl::Strategy::rightmost, weyl::Strategy::random}) {
            out.require(weyl::normal_order_rewrite(alg, w, 1, 0, alg.zero_homology(), strategy, &rng) == fast,
                        "confluence");
        }

        std::vector<int> eps(alg.orbit_count());
        for (auto& e : eps) {
            e = random::uniform(rng, 0, 1) ? 1 : -1;
        }
        out.require(alg.capping_change(eps, alg.mul(f, g)) ==
                        alg.mul(alg.capping_change(eps, f), alg.capping_change(eps, g)),
                    "capping change is not multiplicative");
        out.require(alg.capping_change(eps, alg.capping_change(eps, f)) == f, "capping change is not an involution");
    }
    out.detail << count << " instances of each law";
}

void contact_square(Outcome& out) {
    const auto ds = load_dataset(data_dir + "/chom-cancel.json");
    out.require(ds.geometry_consistent, "dataset not flagged geometry-consistent");
    for (const auto& c : ds.curves) {
        out.require(c.genus == 0, "dataset has higher genus curves");
    }
    const auto alg = weyl::WeylAlgebra::from_dataset(ds);
    out.require(boundary::claim_check(ds).all_ok(), "claim check fails on the dataset");
    int nonzero = 0;
    for (const auto& o : ds.orbits) {
        const auto d = weyl::contact_d(alg, ds, o.id);
        nonzero += d.is_zero() ? 0 : 1;
        out.require(weyl::contact_d_apply(alg, ds, d).is_zero(), "d^2 of " + o.id + " is not zero");
    }
    out.require(nonzero > 0, "differential is identically zero");
    out.require(weyl::genus0_p_linear(weyl::h_square(alg, ds)).is_zero(), "g = 0 p-linear part of H.H");
    out.detail << nonzero << " generators with nonzero differential";
}

} // namespace

int main() {
    struct Criterion {
        int number;
        std::string name;
        double limit_seconds;  // 0: no limit
        std::function<void(Outcome&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "worked example H.H", 1.0, worked_example},
        {2, "claim identity on 100 random datasets", 60.0, claim_sweep},
        {3, "boundary count of the glued moduli space", 0.0, third_moduli_space},
        {4, "determinant-line lemmas", 30.0, detline_lemmas},
        {5, "index formulas", 0.0, index_formulas},
        {6, "Conley-Zehnder and spectral gap numerics", 30.0, cz_numerics},
        {7, "algebra laws", 0.0, algebra_laws},
        {8, "contact differential squares to zero", 0.0, contact_square},
    };
    bool all = true;
    for (const auto& c : criteria) {
        Outcome out;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(out);
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail << "exception: " << e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && secs >= c.limit_seconds) {
            out.ok = false;
            out.detail << " (took " << secs << " s, limit " << c.limit_seconds << " s)";
        }
        all = all && out.ok;
        std::cout << "criterion " << c.number << " [" << c.name << "]: " << (out.ok ? "PASS" : "FAIL") << " ("
                  << secs << " s) " << out.detail.str() << "\n";
    }
    return all ? 0 : 1;
}
