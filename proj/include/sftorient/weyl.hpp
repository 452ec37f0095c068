#ifndef SFTORIENT_WEYL_HPP
#define SFTORIENT_WEYL_HPP

// The Weyl super-algebra over Q[hbar^{+-1}, e^A]: q's and p's are graded
// commutative except [p_g, q_g] = p_g q_g - (-1)^{|g|} q_g p_g = hbar / m(g).
//
// Normal form: all q's before all p's, each word ascending in the orbit order.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sftorient/dataset.hpp"
#include "sftorient/rational.hpp"
#include "sftorient/signs.hpp"

namespace sftorient::weyl {

enum class Kind : std::uint8_t { q, p };

struct Generator {
    Kind kind;
    int orbit;  // rank in the orbit order

    friend bool operator==(const Generator&, const Generator&) = default;
};

using Word = std::vector<Generator>;

struct Key {
    std::vector<int> q;
    std::vector<int> p;
    int hbar = 0;
    std::vector<long> homology;

    friend auto operator<=>(const Key&, const Key&) = default;
};

class WeylElement {
public:
    using Terms = std::map<Key, Rational>;

    WeylElement() = default;

    void add(const Key& key, const Rational& c) {
        if (c.is_zero()) {
            return;
        }
        auto [it, inserted] = terms_.try_emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) {
                terms_.erase(it);
            }
        }
    }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coefficient(const Key& key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    WeylElement& operator+=(const WeylElement& o) {
        for (const auto& [k, c] : o.terms_) {
            add(k, c);
        }
        return *this;
    }
    WeylElement& operator-=(const WeylElement& o) {
        for (const auto& [k, c] : o.terms_) {
            add(k, -c);
        }
        return *this;
    }
    WeylElement& operator*=(const Rational& s) {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_) {
            c *= s;
        }
        return *this;
    }

    friend WeylElement operator+(WeylElement a, const WeylElement& b) { return a += b; }
    friend WeylElement operator-(WeylElement a, const WeylElement& b) { return a -= b; }
    friend WeylElement operator*(WeylElement a, const Rational& s) { return a *= s; }
    friend WeylElement operator*(const Rational& s, WeylElement a) { return a *= s; }
    friend WeylElement operator-(WeylElement a) { return a *= Rational(-1); }
    friend bool operator==(const WeylElement&, const WeylElement&) = default;

private:
    Terms terms_;
};

class WeylAlgebra {
public:
    WeylAlgebra(std::vector<OrbitLabel> orbits, int h2_rank) : h2_rank_(h2_rank) {
        decl_ = orbits;
        std::stable_sort(orbits.begin(), orbits.end(),
                         [](const OrbitLabel& a, const OrbitLabel& b) { return a.sort_key < b.sort_key; });
        for (std::size_t i = 0; i + 1 < orbits.size(); ++i) {
            if (orbits[i].sort_key == orbits[i + 1].sort_key) {
                throw std::invalid_argument("orbit order: duplicate sort_key");
            }
        }
        orbits_ = std::move(orbits);
        for (std::size_t i = 0; i < orbits_.size(); ++i) {
            if (!rank_.emplace(orbits_[i].id, static_cast<int>(i)).second) {
                throw std::invalid_argument("orbit order: duplicate id '" + orbits_[i].id + "'");
            }
        }
    }

    static WeylAlgebra from_dataset(const Dataset& ds) { return WeylAlgebra(ds.orbits, ds.h2_rank); }

    std::size_t orbit_count() const { return orbits_.size(); }
    int h2_rank() const { return h2_rank_; }
    const OrbitLabel& orbit(int rank) const { return orbits_.at(static_cast<std::size_t>(rank)); }
    int grading(int rank) const { return orbits_[static_cast<std::size_t>(rank)].grading; }
    int multiplicity(int rank) const { return orbits_[static_cast<std::size_t>(rank)].multiplicity; }
    /// Orbits in the order they were declared.
    const std::vector<OrbitLabel>& declared() const { return decl_; }

    int rank_of(const std::string& id) const {
        auto it = rank_.find(id);
        if (it == rank_.end()) {
            throw std::invalid_argument("unknown orbit id '" + id + "'");
        }
        return it->second;
    }

    Generator q(const std::string& id) const { return {Kind::q, rank_of(id)}; }
    Generator p(const std::string& id) const { return {Kind::p, rank_of(id)}; }

    std::vector<long> zero_homology() const { return std::vector<long>(static_cast<std::size_t>(h2_rank_), 0); }

    WeylElement scalar(const Rational& c, int hbar = 0, std::vector<long> homology = {}) const {
        if (homology.empty()) {
            homology = zero_homology();
        }
        check_homology(homology);
        WeylElement e;
        e.add(Key{{}, {}, hbar, std::move(homology)}, c);
        return e;
    }

    WeylElement one() const { return scalar(1); }

    /// coeff * w_1 ... w_k * hbar^h * e^A brought to normal form.
    WeylElement normal_order(const Word& word, const Rational& coeff = 1, int hbar = 0,
                             std::vector<long> homology = {}) const {
        WeylElement e = scalar(coeff, hbar, std::move(homology));
        for (const auto& g : word) {
            e = mul_generator(e, g);
        }
        return e;
    }

    WeylElement generator(Generator g) const { return normal_order({g}); }

    /// f * g for a single generator g.
    WeylElement mul_generator(const WeylElement& f, Generator g) const {
        check_orbit(g.orbit);
        WeylElement out;
        const int dg = grading(g.orbit);
        for (const auto& [key, c] : f.terms()) {
            if (g.kind == Kind::p) {
                if (auto placed = insert_sorted(key.p, g.orbit)) {
                    Key k = key;
                    k.p = std::move(placed->first);
                    out.add(k, c * placed->second);
                }
                continue;
            }
            // Move q_g leftwards through the p-word, contracting where orbits agree.
            int sign = 1;
            for (std::size_t j = key.p.size(); j-- > 0;) {
                const int pj = key.p[j];
                if (pj == g.orbit) {
                    Key k = key;
                    k.p.erase(k.p.begin() + static_cast<std::ptrdiff_t>(j));
                    k.hbar += 1;
                    out.add(k, c * sign / Rational(multiplicity(pj)));
                }
                if (grading(pj) * dg % 2 == 1) {
                    sign = -sign;
                }
            }
            if (auto placed = insert_sorted(key.q, g.orbit)) {
                Key k = key;
                k.q = std::move(placed->first);
                out.add(k, c * sign * placed->second);
            }
        }
        return out;
    }

    WeylElement mul(const WeylElement& f, const WeylElement& g) const {
        WeylElement result;
        for (const auto& [k2, c2] : g.terms()) {
            WeylElement x;
            for (const auto& [k1, c1] : f.terms()) {
                Key k = k1;
                k.hbar += k2.hbar;
                k.homology = add_homology(k1.homology, k2.homology);
                x.add(k, c1 * c2);
            }
            for (int o : k2.q) {
                x = mul_generator(x, {Kind::q, o});
            }
            for (int o : k2.p) {
                x = mul_generator(x, {Kind::p, o});
            }
            result += x;
        }
        return result;
    }

    int grade(const Key& k) const {
        int s = 0;
        for (int o : k.q) {
            s += grading(o);
        }
        for (int o : k.p) {
            s += grading(o);
        }
        return s % 2;
    }

    /// Common grade of all terms; 0 for the zero element, nullopt when mixed.
    std::optional<int> homogeneous_grade(const WeylElement& f) const {
        std::optional<int> g;
        for (const auto& [k, c] : f.terms()) {
            const int d = grade(k);
            if (g && *g != d) {
                return std::nullopt;
            }
            g = d;
        }
        return g.value_or(0);
    }

    /// Split into the even and odd parts.
    std::pair<WeylElement, WeylElement> split_by_grade(const WeylElement& f) const {
        WeylElement even;
        WeylElement odd;
        for (const auto& [k, c] : f.terms()) {
            (grade(k) == 0 ? even : odd).add(k, c);
        }
        return {even, odd};
    }

    /// f g - (-1)^{|f||g|} g f for homogeneous f, g.
    WeylElement super_commutator(const WeylElement& f, const WeylElement& g) const {
        const auto df = homogeneous_grade(f);
        const auto dg = homogeneous_grade(g);
        if (!df || !dg) {
            throw std::invalid_argument("super_commutator: arguments must be homogeneous");
        }
        WeylElement out = mul(f, g);
        const WeylElement back = mul(g, f);
        if (*df * *dg == 1) {
            out += back;
        } else {
            out -= back;
        }
        return out;
    }

    /// Coefficient of the monomial written as `word` (q's then p's in any
    /// order, e.g. the p-descending form q_{g-} p_{g+ reversed}).
    Rational coefficient_of(const WeylElement& f, const Word& word, int hbar = 0,
                            std::vector<long> homology = {}) const {
        const WeylElement m = normal_order(word, 1, hbar, std::move(homology));
        if (m.is_zero()) {
            return 0;
        }
        if (m.size() != 1) {
            throw std::invalid_argument("coefficient_of: word is not a reordering of a single normal monomial");
        }
        const auto& [key, sign] = *m.terms().begin();
        return f.coefficient(key) * sign;
    }

    /// Rescale every generator of orbit o by eps[o] (indexed by rank).
    WeylElement capping_change(const std::vector<int>& eps, const WeylElement& f) const {
        if (eps.size() != orbit_count()) {
            throw std::invalid_argument("capping_change: need one sign per orbit");
        }
        WeylElement out;
        for (const auto& [k, c] : f.terms()) {
            int s = 1;
            for (int o : k.q) {
                s *= eps[static_cast<std::size_t>(o)];
            }
            for (int o : k.p) {
                s *= eps[static_cast<std::size_t>(o)];
            }
            out.add(k, c * s);
        }
        return out;
    }

    bool is_normal(const Key& k) const {
        auto sorted_ok = [&](const std::vector<int>& w) {
            for (std::size_t i = 0; i + 1 < w.size(); ++i) {
                if (w[i] > w[i + 1] || (w[i] == w[i + 1] && grading(w[i]) == 1)) {
                    return false;
                }
            }
            return true;
        };
        return sorted_ok(k.q) && sorted_ok(k.p) && static_cast<int>(k.homology.size()) == h2_rank_;
    }

    /// One term per line; p-words printed descending (the dagger order) with the
    /// sign adjusted accordingly when `dagger` is set.
    std::string to_text(const WeylElement& f, bool dagger = true) const {
        if (f.is_zero()) {
            return "0\n";
        }
        std::ostringstream os;
        for (const auto& [k, c] : f.terms()) {
            Rational coeff = c;
            std::vector<int> p = k.p;
            if (dagger) {
                std::vector<int> gr;
                for (int o : p) {
                    gr.push_back(grading(o));
                }
                coeff *= pairwise_sign(gr);
                std::reverse(p.begin(), p.end());
            }
            os << (coeff > 0 ? "+" : "") << to_compact_string(coeff);
            for (int o : k.q) {
                os << " q" << orbit(o).id;
            }
            for (int o : p) {
                os << " p" << orbit(o).id;
            }
            if (k.hbar != 0) {
                os << " hbar^" << k.hbar;
            }
            if (std::any_of(k.homology.begin(), k.homology.end(), [](long a) { return a != 0; })) {
                os << " e^(";
                for (std::size_t i = 0; i < k.homology.size(); ++i) {
                    os << (i ? "," : "") << k.homology[i];
                }
                os << ")";
            }
            os << "\n";
        }
        return os.str();
    }

    nlohmann::json to_json(const WeylElement& f) const {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& [k, c] : f.terms()) {
            std::vector<std::string> q;
            std::vector<std::string> p;
            for (int o : k.q) {
                q.push_back(orbit(o).id);
            }
            for (int o : k.p) {
                p.push_back(orbit(o).id);
            }
            out.push_back({{"q", q}, {"p", p}, {"hbar", k.hbar}, {"A", k.homology}, {"coeff", to_fraction_string(c)}});
        }
        return out;
    }

    std::vector<long> add_homology(const std::vector<long>& a, const std::vector<long>& b) const {
        check_homology(a);
        check_homology(b);
        std::vector<long> s(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            s[i] = a[i] + b[i];
        }
        return s;
    }

private:
    void check_orbit(int o) const {
        if (o < 0 || static_cast<std::size_t>(o) >= orbits_.size()) {
            throw std::out_of_range("generator refers to an unknown orbit");
        }
    }

    void check_homology(const std::vector<long>& a) const {
        if (static_cast<int>(a.size()) != h2_rank_) {
            throw std::invalid_argument("homology vector length differs from h2_rank");
        }
    }

    /// Appends o to the sorted word w and moves it into place; nullopt when an
    /// odd generator would repeat.
    std::optional<std::pair<std::vector<int>, int>> insert_sorted(const std::vector<int>& w, int o) const {
        const int d = grading(o);
        if (d == 1 && std::binary_search(w.begin(), w.end(), o)) {
            return std::nullopt;
        }
        const auto pos = std::upper_bound(w.begin(), w.end(), o);
        int sign = 1;
        if (d == 1) {
            for (auto it = pos; it != w.end(); ++it) {
                if (grading(*it) == 1) {
                    sign = -sign;
                }
            }
        }
        std::vector<int> out(w.begin(), pos);
        out.push_back(o);
        out.insert(out.end(), pos, w.end());
        return std::make_pair(std::move(out), sign);
    }

    int h2_rank_;
    std::vector<OrbitLabel> orbits_;
    std::vector<OrbitLabel> decl_;
    std::map<std::string, int> rank_;
};

// ---------------------------------------------------------------------------
// Literal adjacent-pair rewriting, kept separate from the fast product so the
// two can be checked against each other.

enum class Strategy { leftmost, rightmost, random };

inline WeylElement normal_order_rewrite(const WeylAlgebra& alg, const Word& word, const Rational& coeff, int hbar,
                                        std::vector<long> homology, Strategy strategy,
                                        std::mt19937_64* rng = nullptr) {
    if (strategy == Strategy::random && rng == nullptr) {
        throw std::invalid_argument("normal_order_rewrite: random strategy needs a generator");
    }
    if (homology.empty()) {
        homology = alg.zero_homology();
    }
    struct Pending {
        Word w;
        Rational c;
        int h;
    };
    std::vector<Pending> stack{{word, coeff, hbar}};
    WeylElement out;
    auto odd = [&](const Generator& g) { return alg.grading(g.orbit) == 1; };
    while (!stack.empty()) {
        Pending t = std::move(stack.back());
        stack.pop_back();
        if (t.c.is_zero()) {
            continue;
        }
        std::vector<std::size_t> bad;
        for (std::size_t i = 0; i + 1 < t.w.size(); ++i) {
            const auto& a = t.w[i];
            const auto& b = t.w[i + 1];
            const bool pq = a.kind == Kind::p && b.kind == Kind::q;
            const bool unsorted = a.kind == b.kind && a.orbit > b.orbit;
            const bool odd_square = a == b && odd(a);
            if (pq || unsorted || odd_square) {
                bad.push_back(i);
            }
        }
        if (bad.empty()) {
            Key k;
            for (const auto& g : t.w) {
                (g.kind == Kind::q ? k.q : k.p).push_back(g.orbit);
            }
            k.hbar = t.h;
            k.homology = homology;
            out.add(k, t.c);
            continue;
        }
        std::size_t i = 0;
        switch (strategy) {
        case Strategy::leftmost:
            i = bad.front();
            break;
        case Strategy::rightmost:
            i = bad.back();
            break;
        case Strategy::random:
            i = bad[std::uniform_int_distribution<std::size_t>(0, bad.size() - 1)(*rng)];
            break;
        }
        const Generator a = t.w[i];
        const Generator b = t.w[i + 1];
        if (a == b && odd(a)) {
            continue;
        }
        const int sign = (odd(a) && odd(b)) ? -1 : 1;
        if (a.kind == Kind::p && b.kind == Kind::q && a.orbit == b.orbit) {
            Word contracted = t.w;
            contracted.erase(contracted.begin() + static_cast<std::ptrdiff_t>(i),
                             contracted.begin() + static_cast<std::ptrdiff_t>(i + 2));
            stack.push_back({std::move(contracted), t.c / Rational(alg.multiplicity(a.orbit)), t.h + 1});
        }
        std::swap(t.w[i], t.w[i + 1]);
        stack.push_back({std::move(t.w), t.c * sign, t.h});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Potential, differentials, capping change

enum class HPrefactor { none, inv_mneg };

inline HPrefactor parse_prefactor(const std::string& s) {
    if (s == "none") {
        return HPrefactor::none;
    }
    if (s == "inv-mneg") {
        return HPrefactor::inv_mneg;
    }
    throw std::invalid_argument("unknown --h-prefactor '" + s + "' (expected none or inv-mneg)");
}

inline Rational inverse_multiplicity(const WeylAlgebra& alg, const std::vector<std::string>& ids) {
    Rational m = 1;
    for (const auto& id : ids) {
        m *= alg.orbit(alg.rank_of(id)).multiplicity;
    }
    return 1 / m;
}

/// Coefficient a curve record contributes to H.
inline Rational record_weight(const WeylAlgebra& alg, const CurveRecord& rec, HPrefactor pre) {
    return pre == HPrefactor::inv_mneg ? rec.count * inverse_multiplicity(alg, rec.neg) : rec.count;
}

/// The word q_{g-} p_{g+ reversed}.
inline Word record_word(const WeylAlgebra& alg, const CurveRecord& rec) {
    Word w;
    for (const auto& id : rec.neg) {
        w.push_back(alg.q(id));
    }
    for (auto it = rec.pos.rbegin(); it != rec.pos.rend(); ++it) {
        w.push_back(alg.p(*it));
    }
    return w;
}

inline WeylElement record_monomial(const WeylAlgebra& alg, const CurveRecord& rec, HPrefactor pre) {
    return alg.normal_order(record_word(alg, rec), record_weight(alg, rec, pre), rec.genus - 1, rec.homology);
}

inline WeylElement build_hamiltonian(const WeylAlgebra& alg, const Dataset& ds, HPrefactor pre = HPrefactor::none) {
    WeylElement h;
    for (std::size_t i = 0; i < ds.curves.size(); ++i) {
        const auto& rec = ds.curves[i];
        if (rec.rigid && !validate_rigid(ds.shape(rec))) {
            throw InputError(ds.source + ": curve " + std::to_string(i) + ": total grading is even");
        }
        h += record_monomial(alg, rec, pre);
    }
    return h;
}

inline WeylElement h_square(const WeylAlgebra& alg, const Dataset& ds, HPrefactor pre = HPrefactor::none) {
    const WeylElement h = build_hamiltonian(alg, ds, pre);
    return alg.mul(h, h);
}

/// D f = [H, f], applied to the homogeneous parts of f separately.
inline WeylElement differential_D(const WeylAlgebra& alg, const WeylElement& h, const WeylElement& f) {
    const auto [even, odd] = alg.split_by_grade(f);
    return alg.super_commutator(h, even) + alg.super_commutator(h, odd);
}

/// Terms of H in genus 0 with hbar^{-1}, exactly one p and any number of q's.
inline WeylElement genus0_p_linear(const WeylElement& f, int hbar = -1) {
    WeylElement out;
    for (const auto& [k, c] : f.terms()) {
        if (k.hbar == hbar && k.p.size() == 1) {
            out.add(k, c);
        }
    }
    return out;
}

enum class WordOrder { ascending, reversed };

/// Contact-homology differential of one generator, as an element in the
/// q-variables (q_g standing for the orbit g).
inline WeylElement contact_d(const WeylAlgebra& alg, const Dataset& ds, const std::string& plus,
                             WordOrder order = WordOrder::ascending) {
    WeylElement out;
    for (const auto& rec : ds.curves) {
        if (rec.genus != 0 || rec.pos.size() != 1 || rec.pos.front() != plus) {
            continue;
        }
        Word w;
        for (const auto& id : rec.neg) {
            w.push_back(alg.q(id));
        }
        if (order == WordOrder::reversed) {
            std::reverse(w.begin(), w.end());
        }
        out += alg.normal_order(w, rec.count * inverse_multiplicity(alg, rec.neg), 0, rec.homology);
    }
    return out;
}

/// Extend contact_d to q-polynomials as an odd derivation.
inline WeylElement contact_d_apply(const WeylAlgebra& alg, const Dataset& ds, const WeylElement& f,
                                   WordOrder order = WordOrder::ascending) {
    std::vector<WeylElement> images(alg.orbit_count());
    for (std::size_t o = 0; o < alg.orbit_count(); ++o) {
        images[o] = contact_d(alg, ds, alg.orbit(static_cast<int>(o)).id, order);
    }
    WeylElement out;
    for (const auto& [k, c] : f.terms()) {
        if (!k.p.empty()) {
            throw std::invalid_argument("contact_d: argument must be a polynomial in the q-variables");
        }
        int prefix_grade = 0;
        for (std::size_t i = 0; i < k.q.size(); ++i) {
            WeylElement left = alg.scalar(c * (prefix_grade % 2 == 0 ? 1 : -1), k.hbar, k.homology);
            for (std::size_t j = 0; j < i; ++j) {
                left = alg.mul_generator(left, {Kind::q, k.q[j]});
            }
            WeylElement term = alg.mul(left, images[static_cast<std::size_t>(k.q[i])]);
            for (std::size_t j = i + 1; j < k.q.size(); ++j) {
                term = alg.mul_generator(term, {Kind::q, k.q[j]});
            }
            out += term;
            prefix_grade += alg.grading(k.q[i]);
        }
    }
    return out;
}

/// Capping signs given per orbit id.
inline std::vector<int> eps_by_rank(const WeylAlgebra& alg, const std::map<std::string, int>& eps) {
    std::vector<int> out(alg.orbit_count(), 1);
    for (const auto& [id, s] : eps) {
        if (s != 1 && s != -1) {
            throw std::invalid_argument("capping sign for '" + id + "' must be +1 or -1");
        }
        out[static_cast<std::size_t>(alg.rank_of(id))] = s;
    }
    return out;
}

} // namespace sftorient::weyl

#endif // SFTORIENT_WEYL_HPP
