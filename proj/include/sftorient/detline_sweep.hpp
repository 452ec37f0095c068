#ifndef SFTORIENT_DETLINE_SWEEP_HPP
#define SFTORIENT_DETLINE_SWEEP_HPP

// Randomized checks of the determinant-line identifications on small operators.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sftorient/detline.hpp"

namespace sftorient::detline {

struct SweepCounter {
    std::string name;
    int passed = 0;
    int failed = 0;

    bool ok() const { return failed == 0 && passed > 0; }
};

struct SweepResult {
    SweepCounter swap{"disjoint-union swap sign"};
    SweepCounter reduction_choice{"det_iso_finite choice independence"};
    SweepCounter reduction_subspace{"det_iso_finite independence of F"};
    SweepCounter stabilize_choice{"stabilize_iso basis independence"};
    SweepCounter stabilize_order{"stabilize_iso order of psi1, psi2"};

    std::vector<const SweepCounter*> all() const {
        return {&swap, &reduction_choice, &reduction_subspace, &stabilize_choice, &stabilize_order};
    }
    bool ok() const {
        for (const auto* c : all()) {
            if (!c->ok()) {
                return false;
            }
        }
        return true;
    }
};

namespace sweep_detail {

inline std::size_t dim(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline void tally(SweepCounter& c, bool ok) { ++(ok ? c.passed : c.failed); }

/// Random element of det(M): kernel and cokernel bases mixed and sheared,
/// scalar of either sign.
inline DetLineElement random_element(const RationalMatrix& m, std::mt19937_64& rng) {
    DetLineElement e = canonical_element(m);
    e.kernel_wedge = mix(e.kernel_wedge, rng);
    const auto im = image_basis(m);
    std::vector<Vector> reps;
    for (const auto& c : mix(e.coker_dual_wedge, rng)) {
        reps.push_back(add(c, random_combination(im, m.rows(), rng)));
    }
    e.coker_dual_wedge = std::move(reps);
    int s = std::uniform_int_distribution<int>(-3, 3)(rng);
    e.scalar = s == 0 ? 1 : s;
    return e;
}

/// Subspace F with im(M) + F = target: a cokernel complement plus random vectors.
inline std::vector<Vector> random_transverse(const RationalMatrix& m, std::mt19937_64& rng) {
    std::vector<Vector> f = mix(coker_basis(m), rng);
    const std::size_t extra = dim(rng, 0, 2);
    for (std::size_t i = 0; i < extra; ++i) {
        Vector v(m.rows());
        for (auto& x : v) {
            x = std::uniform_int_distribution<int>(-2, 2)(rng);
        }
        f.push_back(std::move(v));
    }
    std::vector<Vector> sheared;
    const auto im = image_basis(m);
    for (const auto& v : f) {
        sheared.push_back(add(v, random_combination(im, m.rows(), rng)));
    }
    return sheared;
}

inline bool surjective_sum(const RationalMatrix& a, const RationalMatrix& b) {
    return rank(a.hconcat(b)) == a.rows();
}

/// phi stabilized by psi1 then psi2; kernel in U (+) V1 (+) V2.
struct TwoStep {
    DetLineElement element;  // kernel + duals of V2 (second step)
    std::vector<Vector> first_duals;  // V1 basis from the first step
    Rational scalar;
};

inline TwoStep stabilize_twice(const RationalMatrix& phi, const RationalMatrix& psi1, const RationalMatrix& psi2,
                               const DetLineElement& x) {
    const DetLineElement y = stabilize_iso(phi, psi1).apply(x);
    const RationalMatrix phi1 = phi.hconcat(psi1);
    // phi (+) psi1 is onto, so its determinant line is just the kernel wedge.
    const DetLineElement z = stabilize_iso(phi1, psi2).apply({y.kernel_wedge, {}, y.scalar});
    return {z, y.coker_dual_wedge, z.scalar};
}

} // namespace sweep_detail

inline SweepResult run_detline_sweep(std::uint64_t seed, int count = 200, std::size_t max_dim = 5) {
    using namespace sweep_detail;
    std::mt19937_64 rng(seed);
    SweepResult result;
    for (int it = 0; it < count; ++it) {
        // Disjoint union: v u v2 = (-1)^{ind ind2} v2 u v.
        {
            const RationalMatrix l = random_matrix(dim(rng, 0, max_dim), dim(rng, 0, max_dim), rng);
            const RationalMatrix l2 = random_matrix(dim(rng, 0, max_dim), dim(rng, 0, max_dim), rng);
            tally(result.swap, swap_disjoint_check(l, random_element(l, rng), l2, random_element(l2, rng)));
        }
        // Reduction to a finite-dimensional complement.
        {
            const RationalMatrix m = random_matrix(dim(rng, 1, max_dim), dim(rng, 1, max_dim), rng);
            const DetLineElement x = random_element(m, rng);
            const auto f1 = random_transverse(m, rng);
            const auto f2 = random_transverse(m, rng);
            const DetLineElement a = det_iso_finite(m, f1).apply(x);
            const DetLineElement b = det_iso_finite(m, f1, random_reduction_choice(m, f1, rng)).apply(x);
            tally(result.reduction_choice, relative_scalar(a, b) > 0);

            std::vector<Vector> f12 = f1;
            f12.insert(f12.end(), f2.begin(), f2.end());
            const DetLineElement b2 = det_iso_finite(m, f2, random_reduction_choice(m, f2, rng)).apply(x);
            const DetLineElement wa = widen_reduction(m, f1, f12, b);
            const DetLineElement wb = widen_reduction(m, f2, f12, b2);
            tally(result.reduction_subspace, relative_scalar(wa, wb) > 0);
        }
        // Stabilization: basis independence and two orders of psi1 (+) psi2.
        {
            const std::size_t w = dim(rng, 1, max_dim);
            const RationalMatrix phi = random_matrix(w, dim(rng, 0, max_dim), rng);
            RationalMatrix psi1;
            RationalMatrix psi2;
            do {
                psi1 = random_matrix(w, dim(rng, 1, max_dim), rng);
            } while (!surjective_sum(phi, psi1));
            do {
                psi2 = random_matrix(w, dim(rng, 1, max_dim), rng);
            } while (!surjective_sum(phi, psi2));
            const DetLineElement x = random_element(phi, rng);

            const DetLineElement s1 = stabilize_iso(phi, psi1).apply(x);
            const DetLineElement s2 =
                stabilize_iso(phi, psi1, random_stabilization_choice(phi, psi1, rng)).apply(x);
            tally(result.stabilize_choice, relative_scalar(s1, s2) > 0);

            const TwoStep ab = stabilize_twice(phi, psi1, psi2, x);
            const TwoStep ba = stabilize_twice(phi, psi2, psi1, x);
            // Reorder U (+) V2 (+) V1 coordinates of `ba` as U (+) V1 (+) V2.
            const std::size_t nu = phi.cols();
            const std::size_t n1 = psi1.cols();
            const std::size_t n2 = psi2.cols();
            std::vector<Vector> kernel;
            for (const auto& v : ba.element.kernel_wedge) {
                Vector z(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(nu));
                z.insert(z.end(), v.begin() + static_cast<std::ptrdiff_t>(nu + n2), v.end());
                z.insert(z.end(), v.begin() + static_cast<std::ptrdiff_t>(nu),
                         v.begin() + static_cast<std::ptrdiff_t>(nu + n2));
                kernel.push_back(std::move(z));
            }
            // Both sides land in top(V^*) for V = V1 (+) V2: concatenate the
            // dual lists of the two steps in V1 (+) V2 coordinates.
            const std::size_t nv = n1 + n2;
            std::vector<Vector> duals_ab;
            for (const auto& v : ab.first_duals) {
                duals_ab.push_back(embed(v, 0, nv));
            }
            for (const auto& v : ab.element.coker_dual_wedge) {
                duals_ab.push_back(embed(v, n1, nv));
            }
            std::vector<Vector> duals_ba;
            for (const auto& v : ba.first_duals) {
                duals_ba.push_back(embed(v, n1, nv));
            }
            for (const auto& v : ba.element.coker_dual_wedge) {
                duals_ba.push_back(embed(v, 0, nv));
            }
            const Rational k = wedge_ratio(ab.element.kernel_wedge, kernel);
            const Rational d = wedge_ratio(duals_ab, duals_ba);
            const Rational rel = (ba.scalar / ab.scalar) * k / d;
            tally(result.stabilize_order, rel > 0);
        }
    }
    return result;
}

} // namespace sftorient::detline

#endif // SFTORIENT_DETLINE_SWEEP_HPP
