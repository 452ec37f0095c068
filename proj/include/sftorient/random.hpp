#ifndef SFTORIENT_RANDOM_HPP
#define SFTORIENT_RANDOM_HPP

// Seeded generators for property sweeps.

#include <algorithm>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "sftorient/dataset.hpp"
#include "sftorient/weyl.hpp"

namespace sftorient::random {

inline int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct DatasetShape {
    int max_orbits = 5;
    int max_curves = 6;
    int max_genus = 1;
    int max_pos = 3;
    int max_neg = 3;
    int max_count = 3;
    int h2_rank = 1;
};

/// Orbits "o0".."ok" with random gradings (o0 odd, so rigid curves exist), m = 1;
/// curves with odd total grading, no odd orbit repeated on a side, counts in
/// +-[1, max_count].
inline Dataset random_dataset(std::mt19937_64& rng, const DatasetShape& shape = {}) {
    Dataset ds;
    ds.n = uniform(rng, 2, 4);
    ds.h2_rank = shape.h2_rank;
    ds.source = "<random>";
    const int orbits = uniform(rng, 2, shape.max_orbits);
    for (int i = 0; i < orbits; ++i) {
        ds.orbits.push_back({"o" + std::to_string(i), i == 0 ? 1 : uniform(rng, 0, 1), std::nullopt, 1, i});
    }
    const int curves = uniform(rng, 1, shape.max_curves);
    while (static_cast<int>(ds.curves.size()) < curves) {
        CurveRecord c;
        c.genus = uniform(rng, 0, shape.max_genus);
        const int kp = uniform(rng, 1, shape.max_pos);
        const int km = uniform(rng, 0, shape.max_neg);
        for (int i = 0; i < kp; ++i) {
            c.pos.push_back(ds.orbits[static_cast<std::size_t>(uniform(rng, 0, orbits - 1))].id);
        }
        for (int i = 0; i < km; ++i) {
            c.neg.push_back(ds.orbits[static_cast<std::size_t>(uniform(rng, 0, orbits - 1))].id);
        }
        for (int i = 0; i < ds.h2_rank; ++i) {
            c.homology.push_back(uniform(rng, 0, 1));
        }
        const int magnitude = uniform(rng, 1, shape.max_count);
        c.count = uniform(rng, 0, 1) ? magnitude : -magnitude;
        auto repeats_odd = [&](const std::vector<std::string>& side) {
            for (std::size_t a = 0; a < side.size(); ++a) {
                for (std::size_t b = a + 1; b < side.size(); ++b) {
                    if (side[a] == side[b] && ds.orbit(side[a]).grading == 1) {
                        return true;
                    }
                }
            }
            return false;
        };
        if (repeats_odd(c.pos) || repeats_odd(c.neg) || !validate_rigid(ds.shape(c))) {
            continue;
        }
        ds.curves.push_back(std::move(c));
    }
    return ds;
}

/// Random interleaved word of q's and p's.
inline weyl::Word random_word(const weyl::WeylAlgebra& alg, std::mt19937_64& rng, int max_len) {
    weyl::Word w;
    const int len = uniform(rng, 0, max_len);
    for (int i = 0; i < len; ++i) {
        w.push_back({uniform(rng, 0, 1) ? weyl::Kind::q : weyl::Kind::p,
                     uniform(rng, 0, static_cast<int>(alg.orbit_count()) - 1)});
    }
    return w;
}

inline std::vector<long> random_homology(const weyl::WeylAlgebra& alg, std::mt19937_64& rng) {
    std::vector<long> a;
    for (int i = 0; i < alg.h2_rank(); ++i) {
        a.push_back(uniform(rng, -1, 1));
    }
    return a;
}

inline Rational random_coefficient(std::mt19937_64& rng) {
    int num = uniform(rng, -5, 5);
    if (num == 0) {
        num = 1;
    }
    return Rational(num, uniform(rng, 1, 3));
}

/// Sum of a few normal-ordered random words; when `grade` is 0 or 1 only
/// terms of that grade are kept.
inline weyl::WeylElement random_element(const weyl::WeylAlgebra& alg, std::mt19937_64& rng, int max_terms,
                                        int max_len, int grade = -1) {
    weyl::WeylElement f;
    const int terms = uniform(rng, 1, max_terms);
    for (int t = 0; t < terms; ++t) {
        const auto w = random_word(alg, rng, max_len);
        f += alg.normal_order(w, random_coefficient(rng), uniform(rng, -1, 1), random_homology(alg, rng));
    }
    if (grade == 0 || grade == 1) {
        auto [even, odd] = alg.split_by_grade(f);
        return grade == 0 ? even : odd;
    }
    return f;
}

inline weyl::WeylAlgebra random_algebra(std::mt19937_64& rng, int orbits, int max_multiplicity = 2,
                                        int h2_rank = 1) {
    std::vector<OrbitLabel> labels;
    std::vector<int> keys(static_cast<std::size_t>(orbits));
    for (int i = 0; i < orbits; ++i) {
        keys[static_cast<std::size_t>(i)] = i;
    }
    std::shuffle(keys.begin(), keys.end(), rng);
    for (int i = 0; i < orbits; ++i) {
        labels.push_back({"g" + std::to_string(i), uniform(rng, 0, 1), std::nullopt, uniform(rng, 1, max_multiplicity),
                          keys[static_cast<std::size_t>(i)]});
    }
    return weyl::WeylAlgebra(labels, h2_rank);
}

} // namespace sftorient::random

#endif // SFTORIENT_RANDOM_HPP
