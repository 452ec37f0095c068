#ifndef SFTORIENT_SIGNS_HPP
#define SFTORIENT_SIGNS_HPP

// Orientation signs for disjoint union, gluing and reordering of ends under
// the two conventions ht and bm, taken as axioms.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sftorient/tuples.hpp"

namespace sftorient {

enum class Convention { ht, bm };

inline Convention parse_convention(std::string_view s) {
    if (s == "ht") {
        return Convention::ht;
    }
    if (s == "bm") {
        return Convention::bm;
    }
    throw std::invalid_argument("unknown convention '" + std::string(s) + "' (expected ht or bm)");
}

inline std::string to_string(Convention c) { return c == Convention::ht ? "ht" : "bm"; }

inline int parity_sign(long exponent) { return mod2(exponent) == 0 ? 1 : -1; }

/// (-1)^{sum_{a<b} x_a x_b}
inline int pairwise_sign(const std::vector<int>& gradings, std::size_t begin = 0,
                         std::size_t end = static_cast<std::size_t>(-1)) {
    end = std::min(end, gradings.size());
    long odd = 0;
    for (std::size_t i = begin; i < end; ++i) {
        odd += mod2(gradings[i]);
    }
    return parity_sign(odd * (odd - 1) / 2);
}

inline long grading_sum(const std::vector<int>& g, std::size_t begin, std::size_t end) {
    long s = 0;
    for (std::size_t i = begin; i < end && i < g.size(); ++i) {
        s += mod2(g[i]);
    }
    return s;
}

inline int disjoint_sign(const CRTupleShape& t, const CRTupleShape& t2, Convention c) {
    const int rhs = c == Convention::ht ? ind(t2) : ind_pm(t2, Side::positive);
    return parity_sign(static_cast<long>(ind_pm(t, Side::negative)) * rhs);
}

inline int gluing_sign(const CRTupleShape& t, const CRTupleShape& t2, Convention c) {
    if (t.neg.size() != t2.pos.size()) {
        throw std::invalid_argument("gluing_sign: number of glued ends differs");
    }
    for (std::size_t i = 0; i < t.neg.size(); ++i) {
        if (mod2(t.neg[i]) != mod2(t2.pos[i])) {
            throw std::invalid_argument("gluing_sign: gradings of glued ends do not match");
        }
    }
    return c == Convention::ht ? 1 : pairwise_sign(t.neg);
}

/// Sign for exchanging ends i and i+1 (0-based) on one side.
inline int swap_ends_sign(const CRTupleShape& t, std::size_t i, Side side) {
    const auto& g = side == Side::positive ? t.pos : t.neg;
    if (i + 1 >= g.size()) {
        throw std::out_of_range("swap_ends_sign: position " + std::to_string(i) + " has no right neighbour");
    }
    return parity_sign(static_cast<long>(mod2(g[i])) * mod2(g[i + 1]));
}

/// Koszul sign of the reordered word new[i] = old[perm[i]].
inline int reorder_sign(const std::vector<int>& gradings, const std::vector<std::size_t>& perm) {
    if (perm.size() != gradings.size()) {
        throw std::invalid_argument("reorder_sign: permutation length differs from the word");
    }
    std::vector<bool> seen(perm.size(), false);
    for (auto p : perm) {
        if (p >= perm.size() || seen[p]) {
            throw std::invalid_argument("reorder_sign: not a permutation");
        }
        seen[p] = true;
    }
    long inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t j = i + 1; j < perm.size(); ++j) {
            if (perm[i] > perm[j] && mod2(gradings[perm[i]]) == 1 && mod2(gradings[perm[j]]) == 1) {
                ++inversions;
            }
        }
    }
    return parity_sign(inversions);
}

struct GlueConstants {
    int gconst = 1;
    int dconst = 1;
};

/// Tu on top, Tv below; the first tau negative ends of Tu are glued to the
/// last tau positive ends of Tv.
inline GlueConstants partial_glue_signs(const CRTupleShape& tu, const CRTupleShape& tv, std::size_t tau,
                                        Convention c) {
    const std::size_t kp_v = tv.pos.size();
    if (tau == 0 || tau > tu.neg.size() || tau > kp_v) {
        throw std::invalid_argument("partial_glue_signs: tau out of range");
    }
    for (std::size_t i = 0; i < tau; ++i) {
        if (mod2(tu.neg[i]) != mod2(tv.pos[kp_v - tau + i])) {
            throw std::invalid_argument("partial_glue_signs: glued ends have different gradings");
        }
    }
    GlueConstants out;
    if (c == Convention::ht) {
        out.dconst = parity_sign(grading_sum(tv.pos, 0, kp_v - tau) * ind(tu));
        return out;
    }
    out.gconst = pairwise_sign(tu.neg, 0, tau);
    const std::size_t km = tu.neg.size();
    const long exponent = (pairwise_sign(tv.pos, 0, tau) == 1 ? 0 : 1) +
                          grading_sum(tv.pos, 0, tau) * grading_sum(tu.pos, 0, tu.pos.size()) +
                          (pairwise_sign(tu.neg, tau, km) == 1 ? 0 : 1) +
                          grading_sum(tv.neg, 0, tv.neg.size()) * grading_sum(tu.neg, tau, km);
    out.dconst = parity_sign(exponent);
    return out;
}

inline int boundary_sign(const CRTupleShape& tu, const CRTupleShape& tv, std::size_t tau, Convention c) {
    const auto k = partial_glue_signs(tu, tv, tau, c);
    return k.gconst * k.dconst * parity_sign(ind(tu));
}

} // namespace sftorient

#endif // SFTORIENT_SIGNS_HPP
