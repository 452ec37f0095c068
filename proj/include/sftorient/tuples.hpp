#ifndef SFTORIENT_TUPLES_HPP
#define SFTORIENT_TUPLES_HPP

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sftorient {

inline int mod2(long x) { return static_cast<int>(((x % 2) + 2) % 2); }

struct OrbitLabel {
    std::string id;
    int grading = 0;
    std::optional<int> mu_cz;
    int multiplicity = 1;
    int sort_key = 0;
};

/// Punctures carry only their Z2 gradings |S_i^+| and |S_i^-|.
struct CRTupleShape {
    std::vector<int> pos;
    std::vector<int> neg;
    int genus = 0;
    int c1 = 0;
    int n = 2;
};

enum class Side { positive, negative };

inline int ind_pm(const CRTupleShape& t, Side side) {
    const auto& g = side == Side::positive ? t.pos : t.neg;
    return mod2(std::accumulate(g.begin(), g.end(), 0L));
}

inline int ind(const CRTupleShape& t) { return mod2(ind_pm(t, Side::positive) + ind_pm(t, Side::negative)); }

/// The cylinder with one positive and one negative end asymptotic to the same loop.
inline CRTupleShape trivial_tuple(int grading, int n) { return {{grading}, {grading}, 0, 0, n}; }

namespace detail {

inline void require_lengths(const CRTupleShape& t, const std::vector<long>& mu_pos, const std::vector<long>& mu_neg) {
    if (mu_pos.size() != t.pos.size() || mu_neg.size() != t.neg.size()) {
        throw std::invalid_argument("index: number of Conley-Zehnder indices does not match the punctures");
    }
}

} // namespace detail

/// sum mu+ - sum mu- - (n-1)(k- + k+) + 2 c1 + n (2 - 2g)
inline long fredholm_index(const CRTupleShape& t, const std::vector<long>& mu_pos, const std::vector<long>& mu_neg) {
    detail::require_lengths(t, mu_pos, mu_neg);
    const long k = static_cast<long>(t.pos.size() + t.neg.size());
    return std::accumulate(mu_pos.begin(), mu_pos.end(), 0L) - std::accumulate(mu_neg.begin(), mu_neg.end(), 0L) -
           (t.n - 1L) * k + 2L * t.c1 + t.n * (2L - 2L * t.genus);
}

/// sum mu+ - sum mu- + 2 c1 + (n-3)(2 - 2g - k- - k+)
inline long virtual_dimension(const CRTupleShape& t, const std::vector<long>& mu_pos,
                              const std::vector<long>& mu_neg) {
    detail::require_lengths(t, mu_pos, mu_neg);
    const long k = static_cast<long>(t.pos.size() + t.neg.size());
    return std::accumulate(mu_pos.begin(), mu_pos.end(), 0L) - std::accumulate(mu_neg.begin(), mu_neg.end(), 0L) +
           2L * t.c1 + (t.n - 3L) * (2L - 2L * t.genus - k);
}

/// Rigid curves have odd total grading.
inline bool validate_rigid(const CRTupleShape& t) { return ind(t) == 1; }

/// Grading of an orbit from its Conley-Zehnder index in ambient half-dimension n.
inline int grading_from_mu(long mu, int n) { return mod2(mu + n - 1); }

} // namespace sftorient

#endif // SFTORIENT_TUPLES_HPP
