#ifndef SFTORIENT_BOUNDARY_HPP
#define SFTORIENT_BOUNDARY_HPP

// Brute-force comparison of the coefficients of H.H with signed counts of
// broken configurations.  In a product term  (u') * (u)  the left factor u' is
// the lower curve and u the upper one; a gluing map sends negative ends of u to
// positive ends of u'.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sftorient/dataset.hpp"
#include "sftorient/signs.hpp"
#include "sftorient/weyl.hpp"

namespace sftorient::boundary {

struct GluingMap {
    /// (position in neg(u), position in pos(u')), ascending in the first entry.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    friend auto operator<=>(const GluingMap&, const GluingMap&) = default;
};

struct GluedProfile {
    int genus = 0;
    std::vector<std::string> pos;
    std::vector<std::string> neg;
    std::vector<long> homology;

    int hbar() const { return genus - 1; }
    friend auto operator<=>(const GluedProfile&, const GluedProfile&) = default;
};

/// All orbit-compatible, nonempty partial bijections neg(u) -> pos(u2), shortest first.
inline std::vector<GluingMap> enumerate_gluings(const CurveRecord& u, const CurveRecord& u2) {
    std::vector<GluingMap> out;
    GluingMap current;
    std::vector<bool> used(u2.pos.size(), false);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == u.neg.size()) {
            if (!current.pairs.empty()) {
                out.push_back(current);
            }
            return;
        }
        self(self, i + 1);
        for (std::size_t j = 0; j < u2.pos.size(); ++j) {
            if (!used[j] && u2.pos[j] == u.neg[i]) {
                used[j] = true;
                current.pairs.emplace_back(i, j);
                self(self, i + 1);
                current.pairs.pop_back();
                used[j] = false;
            }
        }
    };
    rec(rec, 0);
    std::stable_sort(out.begin(), out.end(), [](const GluingMap& a, const GluingMap& b) {
        return a.pairs.size() != b.pairs.size() ? a.pairs.size() < b.pairs.size() : a.pairs < b.pairs;
    });
    return out;
}

namespace detail {

inline void check_gluing(const CurveRecord& u, const CurveRecord& u2, const GluingMap& theta) {
    if (theta.pairs.empty()) {
        throw std::invalid_argument("gluing map must glue at least one end");
    }
    std::set<std::size_t> dom;
    std::set<std::size_t> img;
    for (const auto& [i, j] : theta.pairs) {
        if (i >= u.neg.size() || j >= u2.pos.size()) {
            throw std::invalid_argument("gluing map refers to a missing end");
        }
        if (!dom.insert(i).second || !img.insert(j).second) {
            throw std::invalid_argument("gluing map is not injective");
        }
        if (u.neg[i] != u2.pos[j]) {
            throw std::invalid_argument("gluing map pairs ends on different orbits");
        }
    }
    if (!std::is_sorted(theta.pairs.begin(), theta.pairs.end())) {
        throw std::invalid_argument("gluing map pairs must be listed by ascending negative end");
    }
}

/// Stable sort of ids by orbit rank, returning the permutation new[i] = old[perm[i]].
inline std::vector<std::size_t> sorting_perm(const weyl::WeylAlgebra& alg, const std::vector<std::string>& ids) {
    std::vector<std::size_t> perm(ids.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return alg.rank_of(ids[a]) < alg.rank_of(ids[b]); });
    return perm;
}

template <typename T>
std::vector<T> permuted(const std::vector<T>& v, const std::vector<std::size_t>& perm) {
    std::vector<T> out;
    out.reserve(perm.size());
    for (auto p : perm) {
        out.push_back(v[p]);
    }
    return out;
}

inline std::vector<int> gradings(const weyl::WeylAlgebra& alg, const std::vector<std::string>& ids) {
    std::vector<int> g;
    for (const auto& id : ids) {
        g.push_back(alg.grading(alg.rank_of(id)));
    }
    return g;
}

/// Ends of the glued curve before sorting: pos = (unglued pos of u', pos of u),
/// neg = (neg of u', unglued neg of u).
inline std::pair<std::vector<std::string>, std::vector<std::string>>
raw_glued_ends(const CurveRecord& u, const CurveRecord& u2, const GluingMap& theta) {
    std::set<std::size_t> dom;
    std::set<std::size_t> img;
    for (const auto& [i, j] : theta.pairs) {
        dom.insert(i);
        img.insert(j);
    }
    std::vector<std::string> pos;
    for (std::size_t j = 0; j < u2.pos.size(); ++j) {
        if (!img.count(j)) {
            pos.push_back(u2.pos[j]);
        }
    }
    pos.insert(pos.end(), u.pos.begin(), u.pos.end());
    std::vector<std::string> neg = u2.neg;
    for (std::size_t i = 0; i < u.neg.size(); ++i) {
        if (!dom.count(i)) {
            neg.push_back(u.neg[i]);
        }
    }
    return {pos, neg};
}

} // namespace detail

inline GluedProfile glued_profile(const weyl::WeylAlgebra& alg, const CurveRecord& u, const CurveRecord& u2,
                                  const GluingMap& theta) {
    detail::check_gluing(u, u2, theta);
    auto [pos, neg] = detail::raw_glued_ends(u, u2, theta);
    GluedProfile prof;
    prof.genus = u.genus + u2.genus + static_cast<int>(theta.pairs.size()) - 1;
    prof.pos = detail::permuted(pos, detail::sorting_perm(alg, pos));
    prof.neg = detail::permuted(neg, detail::sorting_perm(alg, neg));
    prof.homology = alg.add_homology(u.homology, u2.homology);
    return prof;
}

/// Monomial q_{neg} p_{pos reversed} hbar^{g-1} e^A of a profile, as a word.
inline weyl::Word profile_word(const weyl::WeylAlgebra& alg, const GluedProfile& prof) {
    weyl::Word w;
    for (const auto& id : prof.neg) {
        w.push_back(alg.q(id));
    }
    for (auto it = prof.pos.rbegin(); it != prof.pos.rend(); ++it) {
        w.push_back(alg.p(*it));
    }
    return w;
}

/// A side with a repeated odd orbit: the corresponding monomial is zero.
inline bool profile_vanishes(const weyl::WeylAlgebra& alg, const GluedProfile& prof) {
    for (const auto* side : {&prof.pos, &prof.neg}) {
        for (std::size_t i = 0; i + 1 < side->size(); ++i) {
            if ((*side)[i] == (*side)[i + 1] && alg.grading(alg.rank_of((*side)[i])) == 1) {
                return true;
            }
        }
    }
    return false;
}

struct Options {
    Convention convention = Convention::ht;
    weyl::HPrefactor prefactor = weyl::HPrefactor::none;
    /// Divide each contribution by the multiplicities of the glued orbits;
    /// required as soon as some glued orbit has multiplicity > 1.
    bool multiplicity_weighting = false;
};

struct Contribution {
    std::size_t upper = 0;  // index of u
    std::size_t lower = 0;  // index of u'
    GluingMap theta;
    GluedProfile profile;
    int eps_reorder_u = 1;     // move unglued negative ends of u to the back
    int eps_reorder_v = 1;     // unglued positive ends of u' to the front, glued ones in gluing order
    int eps_boundary = 1;      // gconst * dconst * (-1)^{ind Tu}
    int eps_sort = 1;          // sort the ends of the glued curve
    Rational weight;           // weights of u and u' (times inverse multiplicities if enabled)
    Rational value;            // product of all of the above
};

inline Contribution contribution(const Dataset& ds, const weyl::WeylAlgebra& alg, std::size_t upper,
                                 std::size_t lower, const GluingMap& theta, const Options& opt) {
    const CurveRecord& u = ds.curves.at(upper);
    const CurveRecord& v = ds.curves.at(lower);
    detail::check_gluing(u, v, theta);
    Contribution c;
    c.upper = upper;
    c.lower = lower;
    c.theta = theta;
    c.profile = glued_profile(alg, u, v, theta);
    const std::size_t tau = theta.pairs.size();

    std::vector<std::size_t> perm_u;
    std::set<std::size_t> dom;
    std::map<std::size_t, std::size_t> theta_map;
    for (const auto& [i, j] : theta.pairs) {
        perm_u.push_back(i);
        dom.insert(i);
        theta_map[i] = j;
    }
    for (std::size_t i = 0; i < u.neg.size(); ++i) {
        if (!dom.count(i)) {
            perm_u.push_back(i);
        }
    }
    std::set<std::size_t> img;
    for (const auto& [i, j] : theta.pairs) {
        img.insert(j);
    }
    std::vector<std::size_t> perm_v;
    for (std::size_t j = 0; j < v.pos.size(); ++j) {
        if (!img.count(j)) {
            perm_v.push_back(j);
        }
    }
    for (const auto& [i, j] : theta.pairs) {
        perm_v.push_back(j);
    }
    const auto gu_neg = detail::gradings(alg, u.neg);
    const auto gv_pos = detail::gradings(alg, v.pos);
    c.eps_reorder_u = reorder_sign(gu_neg, perm_u);
    c.eps_reorder_v = reorder_sign(gv_pos, perm_v);

    CRTupleShape tu = ds.shape(u);
    tu.neg = detail::permuted(gu_neg, perm_u);
    CRTupleShape tv = ds.shape(v);
    tv.pos = detail::permuted(gv_pos, perm_v);
    c.eps_boundary = boundary_sign(tu, tv, tau, opt.convention);

    auto [pos, neg] = detail::raw_glued_ends(u, v, theta);
    c.eps_sort = reorder_sign(detail::gradings(alg, pos), detail::sorting_perm(alg, pos)) *
                 reorder_sign(detail::gradings(alg, neg), detail::sorting_perm(alg, neg));

    c.weight = weyl::record_weight(alg, u, opt.prefactor) * weyl::record_weight(alg, v, opt.prefactor);
    for (const auto& [i, j] : theta.pairs) {
        const int m = alg.multiplicity(alg.rank_of(u.neg[i]));
        if (m > 1) {
            if (!opt.multiplicity_weighting) {
                throw std::invalid_argument("gluing along orbit '" + u.neg[i] +
                                            "' of multiplicity > 1 needs the multiplicity weighting mode");
            }
            c.weight /= m;
        }
    }
    c.value = c.weight * (c.eps_reorder_u * c.eps_reorder_v * c.eps_boundary * c.eps_sort);
    return c;
}

/// Every triple (u, u', theta) of the dataset, u and u' ranging over ordered
/// pairs of records (a record may be paired with itself).
inline std::vector<Contribution> all_contributions(const Dataset& ds, const weyl::WeylAlgebra& alg,
                                                   const Options& opt) {
    std::vector<Contribution> out;
    for (std::size_t i = 0; i < ds.curves.size(); ++i) {
        for (std::size_t j = 0; j < ds.curves.size(); ++j) {
            for (const auto& theta : enumerate_gluings(ds.curves[i], ds.curves[j])) {
                out.push_back(contribution(ds, alg, i, j, theta, opt));
            }
        }
    }
    return out;
}

/// Sum of boundary orientations over the triples gluing to `prof`.
inline Rational geometric_coefficient(const Dataset& ds, const weyl::WeylAlgebra& alg, const GluedProfile& prof,
                                      const Options& opt) {
    Rational total = 0;
    for (const auto& c : all_contributions(ds, alg, opt)) {
        if (c.profile == prof) {
            total += c.value;
        }
    }
    return total;
}

struct ProfileReport {
    GluedProfile profile;
    Rational algebraic;
    Rational geometric;
    bool vanishing = false;  // repeated odd orbit: both sides are zero
    bool explained = true;   // false for a term of H.H that no gluing produces
    bool ok = true;
    std::vector<Contribution> triples;
};

struct ClaimReport {
    std::vector<ProfileReport> profiles;
    bool all_ok() const {
        return std::all_of(profiles.begin(), profiles.end(), [](const ProfileReport& p) { return p.ok; });
    }
};

inline ClaimReport claim_check(const Dataset& ds, const Options& opt = {}) {
    const weyl::WeylAlgebra alg = weyl::WeylAlgebra::from_dataset(ds);
    const weyl::WeylElement hh = weyl::h_square(alg, ds, opt.prefactor);

    std::map<GluedProfile, ProfileReport> by_profile;
    for (auto& c : all_contributions(ds, alg, opt)) {
        auto& rep = by_profile[c.profile];
        rep.profile = c.profile;
        rep.geometric += c.value;
        rep.triples.push_back(std::move(c));
    }
    ClaimReport report;
    std::set<weyl::Key> explained;
    for (auto& [prof, rep] : by_profile) {
        if (profile_vanishes(alg, prof)) {
            rep.vanishing = true;
            rep.algebraic = 0;
            rep.geometric = 0;
            rep.ok = true;
        } else {
            const auto word = profile_word(alg, prof);
            rep.algebraic = alg.coefficient_of(hh, word, prof.hbar(), prof.homology);
            explained.insert(alg.normal_order(word, 1, prof.hbar(), prof.homology).terms().begin()->first);
            rep.ok = rep.algebraic == -rep.geometric;
        }
        report.profiles.push_back(std::move(rep));
    }
    for (const auto& [key, coeff] : hh.terms()) {
        if (explained.count(key)) {
            continue;
        }
        ProfileReport rep;
        rep.profile.genus = key.hbar + 1;
        for (int o : key.p) {
            rep.profile.pos.push_back(alg.orbit(o).id);
        }
        for (int o : key.q) {
            rep.profile.neg.push_back(alg.orbit(o).id);
        }
        rep.profile.homology = key.homology;
        rep.algebraic = alg.coefficient_of(hh, profile_word(alg, rep.profile), rep.profile.hbar(), key.homology);
        rep.geometric = 0;
        rep.explained = false;
        rep.ok = false;
        report.profiles.push_back(std::move(rep));
    }
    return report;
}

inline nlohmann::json profile_to_json(const GluedProfile& p) {
    return {{"genus", p.genus}, {"pos", p.pos}, {"neg", p.neg}, {"A", p.homology}};
}

inline nlohmann::json report_to_json(const ClaimReport& report, bool with_triples = false) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : report.profiles) {
        nlohmann::json j{{"profile", profile_to_json(p.profile)},
                         {"algebraic", to_fraction_string(p.algebraic)},
                         {"geometric", to_fraction_string(p.geometric)},
                         {"ok", p.ok}};
        if (p.vanishing) {
            j["vanishing"] = true;
        }
        if (!p.explained) {
            j["unexplained"] = true;
        }
        if (with_triples || !p.ok) {
            nlohmann::json triples = nlohmann::json::array();
            for (const auto& c : p.triples) {
                nlohmann::json pairs = nlohmann::json::array();
                for (const auto& [i, j2] : c.theta.pairs) {
                    pairs.push_back({i, j2});
                }
                triples.push_back({{"upper", c.upper},
                                   {"lower", c.lower},
                                   {"theta", pairs},
                                   {"eps_reorder_u", c.eps_reorder_u},
                                   {"eps_reorder_v", c.eps_reorder_v},
                                   {"eps_boundary", c.eps_boundary},
                                   {"eps_sort", c.eps_sort},
                                   {"weight", to_fraction_string(c.weight)},
                                   {"value", to_fraction_string(c.value)}});
            }
            j["triples"] = std::move(triples);
        }
        out.push_back(std::move(j));
    }
    return out;
}

} // namespace sftorient::boundary

#endif // SFTORIENT_BOUNDARY_HPP
