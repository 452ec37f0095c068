#ifndef SFTORIENT_DETLINE_HPP
#define SFTORIENT_DETLINE_HPP

// Determinant lines of finite-dimensional linear maps over Q.
//
// A DetLineElement stores  scalar * k_1 ^ ... ^ k_n  (x)  c_m^* ^ ... ^ c_1^*
// where c_1..c_m are representatives of a basis of the cokernel (or of
// whatever target space the element lives in) and the c_i^* form the dual
// basis.  Two elements of the same line are compared by the exact ratio of
// their wedges; an orientation is the sign of that ratio.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sftorient/rational.hpp"

namespace sftorient::detline {

using Vector = std::vector<Rational>;

class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) {
                throw std::invalid_argument("RationalMatrix: ragged row list");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static RationalMatrix from_rows(const std::vector<Vector>& rows, std::size_t cols) {
        RationalMatrix m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) {
                throw std::invalid_argument("RationalMatrix: ragged row list");
            }
            for (std::size_t j = 0; j < cols; ++j) {
                m(i, j) = rows[i][j];
            }
        }
        return m;
    }

    static RationalMatrix from_columns(std::span<const Vector> columns, std::size_t rows) {
        RationalMatrix m(rows, columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j].size() != rows) {
                throw std::invalid_argument("RationalMatrix: column of wrong length");
            }
            for (std::size_t i = 0; i < rows; ++i) {
                m(i, j) = columns[j][i];
            }
        }
        return m;
    }

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1;
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Vector column(std::size_t c) const {
        Vector v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            v[i] = (*this)(i, c);
        }
        return v;
    }

    Vector apply(const Vector& x) const {
        if (x.size() != cols_) {
            throw std::invalid_argument("RationalMatrix::apply: dimension mismatch");
        }
        Vector y(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!x[j].is_zero()) {
                    y[i] += (*this)(i, j) * x[j];
                }
            }
        }
        return y;
    }

    /// [this | rhs]
    RationalMatrix hconcat(const RationalMatrix& rhs) const {
        if (rhs.rows_ != rows_) {
            throw std::invalid_argument("RationalMatrix::hconcat: row mismatch");
        }
        RationalMatrix m(rows_, cols_ + rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                m(i, j) = (*this)(i, j);
            }
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                m(i, cols_ + j) = rhs(i, j);
            }
        }
        return m;
    }

    RationalMatrix negated() const {
        RationalMatrix m = *this;
        for (auto& x : m.data_) {
            x = -x;
        }
        return m;
    }

    static RationalMatrix block_diagonal(const RationalMatrix& a, const RationalMatrix& b) {
        RationalMatrix m(a.rows_ + b.rows_, a.cols_ + b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t j = 0; j < a.cols_; ++j) {
                m(i, j) = a(i, j);
            }
        }
        for (std::size_t i = 0; i < b.rows_; ++i) {
            for (std::size_t j = 0; j < b.cols_; ++j) {
                m(a.rows_ + i, a.cols_ + j) = b(i, j);
            }
        }
        return m;
    }

    friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

struct Echelon {
    RationalMatrix reduced;
    std::vector<std::size_t> pivots;
};

/// Reduced row echelon form.  Pivot rule: scan columns left to right, take the
/// first row (smallest index among the unreduced rows) with a nonzero entry.
inline Echelon row_reduce(RationalMatrix m) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t pivot = row;
        while (pivot < m.rows() && m(pivot, col).is_zero()) {
            ++pivot;
        }
        if (pivot == m.rows()) {
            continue;
        }
        if (pivot != row) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(row, j), m(pivot, j));
            }
        }
        const Rational inv = 1 / m(row, col);
        for (std::size_t j = col; j < m.cols(); ++j) {
            m(row, j) *= inv;
        }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col).is_zero()) {
                continue;
            }
            const Rational factor = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j) {
                m(i, j) -= factor * m(row, j);
            }
        }
        pivots.push_back(col);
        ++row;
    }
    return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const RationalMatrix& m) { return row_reduce(m).pivots.size(); }

inline Rational determinant(RationalMatrix m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("determinant: matrix not square");
    }
    const std::size_t n = m.rows();
    Rational det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m(pivot, col).is_zero()) {
            ++pivot;
        }
        if (pivot == n) {
            return 0;
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(col, j), m(pivot, j));
            }
            det = -det;
        }
        det *= m(col, col);
        for (std::size_t i = col + 1; i < n; ++i) {
            if (m(i, col).is_zero()) {
                continue;
            }
            const Rational factor = m(i, col) / m(col, col);
            for (std::size_t j = col; j < n; ++j) {
                m(i, j) -= factor * m(col, j);
            }
        }
    }
    return det;
}

/// Basis of ker M: one vector per free column, with that coordinate equal to 1.
inline std::vector<Vector> kernel_basis(const RationalMatrix& m) {
    const Echelon e = row_reduce(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots) {
        is_pivot[p] = true;
    }
    std::vector<Vector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) {
            continue;
        }
        Vector v(m.cols());
        v[free] = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) {
            v[e.pivots[r]] = -e.reduced(r, free);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Pivot columns of M.
inline std::vector<Vector> image_basis(const RationalMatrix& m) {
    std::vector<Vector> basis;
    for (auto p : row_reduce(m).pivots) {
        basis.push_back(m.column(p));
    }
    return basis;
}

/// Greedily extends `basis` with vectors from `candidates` that are independent
/// of everything taken so far.  Returns only the added vectors.
inline std::vector<Vector> extend_basis(std::span<const Vector> basis, std::span<const Vector> candidates,
                                        std::size_t dim) {
    std::vector<Vector> all(basis.begin(), basis.end());
    std::size_t current = rank(RationalMatrix::from_columns(all, dim));
    std::vector<Vector> added;
    for (const auto& c : candidates) {
        all.push_back(c);
        const std::size_t r = rank(RationalMatrix::from_columns(all, dim));
        if (r > current) {
            current = r;
            added.push_back(c);
        } else {
            all.pop_back();
        }
    }
    return added;
}

inline std::vector<Vector> standard_basis(std::size_t dim) {
    std::vector<Vector> e;
    for (std::size_t i = 0; i < dim; ++i) {
        Vector v(dim);
        v[i] = 1;
        e.push_back(std::move(v));
    }
    return e;
}

/// Standard basis vectors whose classes form a basis of target / im M.
inline std::vector<Vector> coker_basis(const RationalMatrix& m) {
    const auto image = image_basis(m);
    const auto std_basis = standard_basis(m.rows());
    return extend_basis(image, std_basis, m.rows());
}

/// Some x with A x = b, free variables set to zero.
inline std::optional<Vector> solve(const RationalMatrix& a, const Vector& b) {
    if (b.size() != a.rows()) {
        throw std::invalid_argument("solve: dimension mismatch");
    }
    RationalMatrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            aug(i, j) = a(i, j);
        }
        aug(i, a.cols()) = b[i];
    }
    const Echelon e = row_reduce(aug);
    if (!e.pivots.empty() && e.pivots.back() == a.cols()) {
        return std::nullopt;
    }
    Vector x(a.cols());
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
        x[e.pivots[r]] = e.reduced(r, a.cols());
    }
    return x;
}

inline bool independent(std::span<const Vector> vs, std::size_t dim) {
    return rank(RationalMatrix::from_columns(vs, dim)) == vs.size();
}

inline bool in_span(std::span<const Vector> basis, const Vector& v, std::size_t dim) {
    return solve(RationalMatrix::from_columns(basis, dim), v).has_value();
}

/// Basis of { x : M x in span(F) }.
inline std::vector<Vector> preimage_basis(const RationalMatrix& m, std::span<const Vector> f) {
    // Solutions (x, y) of M x - F y = 0, projected to x.
    const RationalMatrix joint = m.hconcat(RationalMatrix::from_columns(f, m.rows()).negated());
    std::vector<Vector> xs;
    for (const auto& sol : kernel_basis(joint)) {
        xs.emplace_back(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(m.cols()));
    }
    return extend_basis({}, xs, m.cols());
}

/// det D where `to` = `from` * D modulo span(`modulo`).  `from` together with
/// `modulo` must be independent and `to` must lie in their span.
inline Rational wedge_ratio(std::span<const Vector> from, std::span<const Vector> to,
                            std::span<const Vector> modulo = {}) {
    if (from.size() != to.size()) {
        throw std::invalid_argument("wedge_ratio: wedges of different degree");
    }
    if (from.empty()) {
        return 1;
    }
    const std::size_t dim = from.front().size();
    std::vector<Vector> frame(modulo.begin(), modulo.end());
    frame.insert(frame.end(), from.begin(), from.end());
    const RationalMatrix frame_m = RationalMatrix::from_columns(frame, dim);
    if (rank(frame_m) != frame.size()) {
        throw std::invalid_argument("wedge_ratio: reference vectors are dependent");
    }
    RationalMatrix d(from.size(), to.size());
    for (std::size_t j = 0; j < to.size(); ++j) {
        auto coords = solve(frame_m, to[j]);
        if (!coords) {
            throw std::invalid_argument("wedge_ratio: vector outside the reference span");
        }
        for (std::size_t i = 0; i < from.size(); ++i) {
            d(i, j) = (*coords)[modulo.size() + i];
        }
    }
    return determinant(std::move(d));
}

struct DetLineElement {
    std::vector<Vector> kernel_wedge;
    /// Representatives c_1..c_m; the element carries c_m^* ^ ... ^ c_1^*.
    std::vector<Vector> coker_dual_wedge;
    Rational scalar{1};
};

enum class Orientation : int { negative = -1, positive = 1 };

inline int to_int(Orientation o) { return static_cast<int>(o); }

/// The exact lambda with other = lambda * reference.  `coker_modulo` spans the
/// subspace the dual-wedge representatives are taken modulo (im of the map for
/// a determinant line, empty for a plain top exterior power).
inline Rational relative_scalar(const DetLineElement& reference, const DetLineElement& other,
                                std::span<const Vector> coker_modulo = {}) {
    if (reference.scalar.is_zero() || other.scalar.is_zero()) {
        throw std::invalid_argument("relative_scalar: zero element has no orientation");
    }
    const Rational k = wedge_ratio(reference.kernel_wedge, other.kernel_wedge);
    const Rational c = wedge_ratio(reference.coker_dual_wedge, other.coker_dual_wedge, coker_modulo);
    if (k.is_zero() || c.is_zero()) {
        throw std::invalid_argument("relative_scalar: degenerate wedge");
    }
    return other.scalar * k / (reference.scalar * c);
}

inline Orientation relative_orientation(const DetLineElement& reference, const DetLineElement& other,
                                        std::span<const Vector> coker_modulo = {}) {
    return relative_scalar(reference, other, coker_modulo) > 0 ? Orientation::positive : Orientation::negative;
}

/// Index of the finite model: dim ker - dim coker = cols - rows.
inline long fredholm_index(const RationalMatrix& m) {
    return static_cast<long>(m.cols()) - static_cast<long>(m.rows());
}

/// kernel_basis (x) coker_basis with scalar 1.
inline DetLineElement canonical_element(const RationalMatrix& m) {
    return {kernel_basis(m), coker_basis(m), Rational(1)};
}

// ---------------------------------------------------------------------------
// det(phi) ~ top(phi^{-1}(F)) (x) top(F^*)

struct ReductionChoice {
    std::vector<Vector> kernel;      // e_1..e_n, basis of ker phi
    std::vector<Vector> complement;  // h_1..h_m, ker phi (+) H = phi^{-1}(F)
    std::vector<Vector> extra;       // v_1..v_l, {v, phi(h)} basis of F
};

inline void require_transverse(const RationalMatrix& m, std::span<const Vector> f) {
    if (rank(m.hconcat(RationalMatrix::from_columns(f, m.rows()))) != m.rows()) {
        throw std::invalid_argument("det_iso_finite: im(M) + span(F) is not the whole target");
    }
}

inline ReductionChoice default_reduction_choice(const RationalMatrix& m, std::span<const Vector> f) {
    require_transverse(m, f);
    ReductionChoice c;
    c.kernel = kernel_basis(m);
    c.complement = extend_basis(c.kernel, preimage_basis(m, f), m.cols());
    std::vector<Vector> images;
    for (const auto& h : c.complement) {
        images.push_back(m.apply(h));
    }
    c.extra = extend_basis(images, extend_basis({}, f, m.rows()), m.rows());
    return c;
}

class FiniteReduction {
public:
    FiniteReduction(RationalMatrix m, std::vector<Vector> f, ReductionChoice choice)
        : m_(std::move(m)), f_(std::move(f)), choice_(std::move(choice)) {
        validate();
    }

    const RationalMatrix& map() const { return m_; }
    const ReductionChoice& choice() const { return choice_; }

    /// Image of x in top(phi^{-1}F) (x) top(F^*).  The output's dual wedge lists
    /// v_1..v_l, phi(h_1)..phi(h_m), i.e. it carries phi(h_m)^*..phi(h_1)^* v_l^*..v_1^*.
    DetLineElement apply(const DetLineElement& x) const {
        const DetLineElement reference{choice_.kernel, choice_.extra, Rational(1)};
        const Rational lambda = relative_scalar(reference, x, image_basis(m_));
        DetLineElement out;
        out.kernel_wedge = choice_.kernel;
        out.kernel_wedge.insert(out.kernel_wedge.end(), choice_.complement.begin(), choice_.complement.end());
        out.coker_dual_wedge = choice_.extra;
        for (const auto& h : choice_.complement) {
            out.coker_dual_wedge.push_back(m_.apply(h));
        }
        out.scalar = lambda;
        return out;
    }

private:
    void validate() const {
        require_transverse(m_, f_);
        const std::size_t n = m_.cols();
        const std::size_t w = m_.rows();
        const auto ker = kernel_basis(m_);
        const auto pre = preimage_basis(m_, f_);
        const auto fb = extend_basis({}, f_, w);
        if (choice_.kernel.size() != ker.size() || !independent(choice_.kernel, n)) {
            throw std::invalid_argument("det_iso_finite: kernel choice is not a basis of ker M");
        }
        for (const auto& e : choice_.kernel) {
            if (!in_span(ker, e, n)) {
                throw std::invalid_argument("det_iso_finite: kernel choice leaves ker M");
            }
        }
        std::vector<Vector> kh = choice_.kernel;
        kh.insert(kh.end(), choice_.complement.begin(), choice_.complement.end());
        if (kh.size() != pre.size() || !independent(kh, n)) {
            throw std::invalid_argument("det_iso_finite: complement choice does not complete ker M in M^{-1}(F)");
        }
        for (const auto& h : choice_.complement) {
            if (!in_span(pre, h, n)) {
                throw std::invalid_argument("det_iso_finite: complement vector leaves M^{-1}(F)");
            }
        }
        std::vector<Vector> fv = choice_.extra;
        for (const auto& h : choice_.complement) {
            fv.push_back(m_.apply(h));
        }
        if (fv.size() != fb.size() || !independent(fv, w)) {
            throw std::invalid_argument("det_iso_finite: {v, M h} is not a basis of F");
        }
        for (const auto& v : choice_.extra) {
            if (!in_span(fb, v, w)) {
                throw std::invalid_argument("det_iso_finite: extra vector leaves F");
            }
        }
    }

    RationalMatrix m_;
    std::vector<Vector> f_;
    ReductionChoice choice_;
};

inline FiniteReduction det_iso_finite(const RationalMatrix& m, std::span<const Vector> f,
                                      std::optional<ReductionChoice> choice = std::nullopt) {
    std::vector<Vector> fv(f.begin(), f.end());
    if (!choice) {
        choice = default_reduction_choice(m, fv);
    }
    return FiniteReduction(m, std::move(fv), std::move(*choice));
}

/// For F inside G (both transverse to im M): the identification
/// top(M^{-1}F) (x) top(F^*)  ~  top(M^{-1}G) (x) top(G^*)
/// obtained by appending a complement h' of M^{-1}F in M^{-1}G to the wedge and
/// M h' to the dual list.  `y` must live in the F-space.
inline DetLineElement widen_reduction(const RationalMatrix& m, std::span<const Vector> f,
                                      std::span<const Vector> g, const DetLineElement& y) {
    require_transverse(m, f);
    const std::size_t w = m.rows();
    const auto fb = extend_basis({}, f, w);
    const auto gb = extend_basis({}, g, w);
    for (const auto& v : fb) {
        if (!in_span(gb, v, w)) {
            throw std::invalid_argument("widen_reduction: F is not contained in G");
        }
    }
    const auto pf = preimage_basis(m, f);
    const auto pg = preimage_basis(m, g);
    const DetLineElement reference{pf, fb, Rational(1)};
    const Rational lambda = relative_scalar(reference, y);
    const auto hp = extend_basis(pf, pg, m.cols());
    DetLineElement out{pf, fb, lambda};
    for (const auto& h : hp) {
        out.kernel_wedge.push_back(h);
        out.coker_dual_wedge.push_back(m.apply(h));
    }
    return out;
}

// ---------------------------------------------------------------------------
// det(phi) ~ det(phi (+) psi) (x) top(V^*)   for phi (+) psi surjective

struct StabilizationChoice {
    std::vector<Vector> kernel_phi;  // u_{k+1}..u_{k+l}
    std::vector<Vector> pair_u;      // u_1..u_k,   basis of H
    std::vector<Vector> pair_v;      // v_{m+1}..v_{m+k}, psi(v_{m+i}) = phi(u_i)
    std::vector<Vector> kernel_psi;  // v_{m+k+1}..v_{m+k+n}
    std::vector<Vector> g;           // v_1..v_m
};

inline void require_surjective_sum(const RationalMatrix& phi, const RationalMatrix& psi) {
    if (phi.rows() != psi.rows()) {
        throw std::invalid_argument("stabilize_iso: phi and psi have different targets");
    }
    if (rank(phi.hconcat(psi)) != phi.rows()) {
        throw std::invalid_argument("stabilize_iso: phi (+) psi is not surjective");
    }
}

inline StabilizationChoice default_stabilization_choice(const RationalMatrix& phi, const RationalMatrix& psi) {
    require_surjective_sum(phi, psi);
    const std::size_t nu = phi.cols();
    const std::size_t nv = psi.cols();
    StabilizationChoice c;
    c.kernel_phi = kernel_basis(phi);
    c.kernel_psi = kernel_basis(psi);
    // Pairs (x, y) with phi x = psi y; complete ker phi x ker psi inside them.
    std::vector<Vector> trivial;
    for (const auto& k : c.kernel_phi) {
        Vector z(nu + nv);
        std::copy(k.begin(), k.end(), z.begin());
        trivial.push_back(std::move(z));
    }
    for (const auto& k : c.kernel_psi) {
        Vector z(nu + nv);
        std::copy(k.begin(), k.end(), z.begin() + static_cast<std::ptrdiff_t>(nu));
        trivial.push_back(std::move(z));
    }
    const auto pairs = kernel_basis(phi.hconcat(psi.negated()));
    for (const auto& p : extend_basis(trivial, pairs, nu + nv)) {
        c.pair_u.emplace_back(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(nu));
        c.pair_v.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(nu), p.end());
    }
    std::vector<Vector> fk = c.pair_v;
    fk.insert(fk.end(), c.kernel_psi.begin(), c.kernel_psi.end());
    c.g = extend_basis(fk, standard_basis(nv), nv);
    return c;
}

class Stabilization {
public:
    Stabilization(RationalMatrix phi, RationalMatrix psi, StabilizationChoice choice)
        : phi_(std::move(phi)), psi_(std::move(psi)), choice_(std::move(choice)) {
        validate();
    }

    const StabilizationChoice& choice() const { return choice_; }

    /// kernel wedge lives in U (+) V; dual wedge lists v_1..v_{m+k+n} in V.
    DetLineElement apply(const DetLineElement& x) const {
        std::vector<Vector> psi_g;
        for (const auto& v : choice_.g) {
            psi_g.push_back(psi_.apply(v));
        }
        const DetLineElement reference{choice_.kernel_phi, psi_g, Rational(1)};
        const Rational lambda = relative_scalar(reference, x, image_basis(phi_));

        const std::size_t nu = phi_.cols();
        const std::size_t nv = psi_.cols();
        auto join = [&](const Vector* u, const Vector* v, bool negate_v) {
            Vector z(nu + nv);
            if (u) {
                std::copy(u->begin(), u->end(), z.begin());
            }
            if (v) {
                for (std::size_t i = 0; i < nv; ++i) {
                    z[nu + i] = negate_v ? -(*v)[i] : (*v)[i];
                }
            }
            return z;
        };
        DetLineElement out;
        for (const auto& u : choice_.kernel_phi) {
            out.kernel_wedge.push_back(join(&u, nullptr, false));
        }
        for (std::size_t i = 0; i < choice_.pair_u.size(); ++i) {
            out.kernel_wedge.push_back(join(&choice_.pair_u[i], &choice_.pair_v[i], true));
        }
        for (const auto& v : choice_.kernel_psi) {
            out.kernel_wedge.push_back(join(nullptr, &v, false));
        }
        out.coker_dual_wedge = choice_.g;
        out.coker_dual_wedge.insert(out.coker_dual_wedge.end(), choice_.pair_v.begin(), choice_.pair_v.end());
        out.coker_dual_wedge.insert(out.coker_dual_wedge.end(), choice_.kernel_psi.begin(),
                                    choice_.kernel_psi.end());
        out.scalar = lambda;
        return out;
    }

private:
    void validate() const {
        require_surjective_sum(phi_, psi_);
        const std::size_t nu = phi_.cols();
        const std::size_t nv = psi_.cols();
        const auto kphi = kernel_basis(phi_);
        const auto kpsi = kernel_basis(psi_);
        auto spans_kernel = [](const std::vector<Vector>& chosen, const std::vector<Vector>& ker, std::size_t dim) {
            if (chosen.size() != ker.size() || !independent(chosen, dim)) {
                return false;
            }
            return std::all_of(chosen.begin(), chosen.end(), [&](const Vector& v) { return in_span(ker, v, dim); });
        };
        if (!spans_kernel(choice_.kernel_phi, kphi, nu) || !spans_kernel(choice_.kernel_psi, kpsi, nv)) {
            throw std::invalid_argument("stabilize_iso: kernel choice is not a kernel basis");
        }
        if (choice_.pair_u.size() != choice_.pair_v.size()) {
            throw std::invalid_argument("stabilize_iso: unpaired H/F vectors");
        }
        for (std::size_t i = 0; i < choice_.pair_u.size(); ++i) {
            if (phi_.apply(choice_.pair_u[i]) != psi_.apply(choice_.pair_v[i])) {
                throw std::invalid_argument("stabilize_iso: psi(v_{m+i}) != phi(u_i)");
            }
        }
        std::vector<Vector> images;
        for (const auto& u : choice_.pair_u) {
            images.push_back(phi_.apply(u));
        }
        // phi(u_i) must be a basis of I = im phi  cap  im psi.
        const std::size_t dim_i = rank(phi_) + rank(psi_) - phi_.rows();
        if (images.size() != dim_i || !independent(images, phi_.rows())) {
            throw std::invalid_argument("stabilize_iso: phi(H) is not a basis of im phi cap im psi");
        }
        std::vector<Vector> all_v = choice_.g;
        all_v.insert(all_v.end(), choice_.pair_v.begin(), choice_.pair_v.end());
        all_v.insert(all_v.end(), choice_.kernel_psi.begin(), choice_.kernel_psi.end());
        if (all_v.size() != nv || !independent(all_v, nv)) {
            throw std::invalid_argument("stabilize_iso: G + F + ker psi is not a basis of V");
        }
    }

    RationalMatrix phi_;
    RationalMatrix psi_;
    StabilizationChoice choice_;
};

inline Stabilization stabilize_iso(const RationalMatrix& phi, const RationalMatrix& psi,
                                   std::optional<StabilizationChoice> choice = std::nullopt) {
    if (!choice) {
        choice = default_stabilization_choice(phi, psi);
    }
    return Stabilization(phi, psi, std::move(*choice));
}

// ---------------------------------------------------------------------------
// Disjoint union

struct DisjointUnion {
    int sign = 1;                 // (-1)^{ind L2 * dim coker L}
    RationalMatrix combined;      // L (+) L2, block diagonal
    DetLineElement element;       // v u v2 in det(L (+) L2), sign included in scalar
};

inline Vector embed(const Vector& x, std::size_t offset, std::size_t dim) {
    Vector z(dim);
    std::copy(x.begin(), x.end(), z.begin() + static_cast<std::ptrdiff_t>(offset));
    return z;
}

inline DisjointUnion disjoint_union_detline(const RationalMatrix& l, const DetLineElement& v,
                                            const RationalMatrix& l2, const DetLineElement& v2) {
    const std::size_t dom = l.cols() + l2.cols();
    const std::size_t tgt = l.rows() + l2.rows();
    const long coker_dim = static_cast<long>(l.rows()) - static_cast<long>(rank(l));
    DisjointUnion out;
    out.sign = ((fredholm_index(l2) * coker_dim) % 2 == 0) ? 1 : -1;
    out.combined = RationalMatrix::block_diagonal(l, l2);
    for (const auto& e : v.kernel_wedge) {
        out.element.kernel_wedge.push_back(embed(e, 0, dom));
    }
    for (const auto& e : v2.kernel_wedge) {
        out.element.kernel_wedge.push_back(embed(e, l.cols(), dom));
    }
    // Listing f_1..f_m, f'_1..f'_m' carries f'_m'^* .. f'_1^* f_m^* .. f_1^*.
    for (const auto& f : v.coker_dual_wedge) {
        out.element.coker_dual_wedge.push_back(embed(f, 0, tgt));
    }
    for (const auto& f : v2.coker_dual_wedge) {
        out.element.coker_dual_wedge.push_back(embed(f, l.rows(), tgt));
    }
    out.element.scalar = out.sign * v.scalar * v2.scalar;
    return out;
}

inline DisjointUnion disjoint_union_detline(const RationalMatrix& l, const RationalMatrix& l2) {
    return disjoint_union_detline(l, canonical_element(l), l2, canonical_element(l2));
}

/// Relative sign between v u v2 and the image of v2 u v under the swap
/// identification det(L2 (+) L) = det(L (+) L2).
inline int swap_disjoint_sign(const RationalMatrix& l, const DetLineElement& v, const RationalMatrix& l2,
                              const DetLineElement& v2) {
    const DisjointUnion forward = disjoint_union_detline(l, v, l2, v2);
    const DisjointUnion backward = disjoint_union_detline(l2, v2, l, v);
    auto swap_halves = [](const Vector& x, std::size_t first) {
        // (x2, x1) with |x2| = first  ->  (x1, x2)
        Vector z;
        z.reserve(x.size());
        z.insert(z.end(), x.begin() + static_cast<std::ptrdiff_t>(first), x.end());
        z.insert(z.end(), x.begin(), x.begin() + static_cast<std::ptrdiff_t>(first));
        return z;
    };
    DetLineElement mapped;
    for (const auto& e : backward.element.kernel_wedge) {
        mapped.kernel_wedge.push_back(swap_halves(e, l2.cols()));
    }
    for (const auto& f : backward.element.coker_dual_wedge) {
        mapped.coker_dual_wedge.push_back(swap_halves(f, l2.rows()));
    }
    mapped.scalar = backward.element.scalar;
    return sign_of(relative_scalar(forward.element, mapped, image_basis(forward.combined)));
}

/// v u v2 = (-1)^{ind L * ind L2} v2 u v, checked by explicit wedge comparison.
inline bool swap_disjoint_check(const RationalMatrix& l, const DetLineElement& v, const RationalMatrix& l2,
                                const DetLineElement& v2) {
    const long prod = fredholm_index(l) * fredholm_index(l2);
    const int expected = (prod % 2 == 0) ? 1 : -1;
    return swap_disjoint_sign(l, v, l2, v2) == expected;
}

inline bool swap_disjoint_check(const RationalMatrix& l, const RationalMatrix& l2) {
    return swap_disjoint_check(l, canonical_element(l), l2, canonical_element(l2));
}

// ---------------------------------------------------------------------------
// Random instances for property sweeps

/// Small-integer matrix; with probability 1/3 the rank is cut down by making a
/// row a combination of the others.
inline RationalMatrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> entry(-3, 3);
    RationalMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(i, j) = entry(rng);
        }
    }
    if (rows >= 2 && std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
        const std::size_t dst = std::uniform_int_distribution<std::size_t>(0, rows - 1)(rng);
        for (std::size_t j = 0; j < cols; ++j) {
            m(dst, j) = 0;
            for (std::size_t i = 0; i < rows; ++i) {
                if (i != dst) {
                    m(dst, j) += Rational(entry(rng) % 2) * m(i, j);
                }
            }
        }
    }
    return m;
}

inline RationalMatrix random_invertible(std::size_t n, std::mt19937_64& rng) {
    for (;;) {
        RationalMatrix m(n, n);
        std::uniform_int_distribution<int> entry(-2, 2);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                m(i, j) = entry(rng);
            }
        }
        if (!determinant(m).is_zero()) {
            return m;
        }
    }
}

/// Columns of `basis` recombined by a random invertible matrix.
inline std::vector<Vector> mix(const std::vector<Vector>& basis, std::mt19937_64& rng) {
    if (basis.empty()) {
        return {};
    }
    const RationalMatrix t = random_invertible(basis.size(), rng);
    std::vector<Vector> out;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        Vector v(basis.front().size());
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (std::size_t r = 0; r < v.size(); ++r) {
                v[r] += t(i, j) * basis[i][r];
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

inline Vector random_combination(const std::vector<Vector>& basis, std::size_t dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coeff(-2, 2);
    Vector v(dim);
    for (const auto& b : basis) {
        const int c = coeff(rng);
        for (std::size_t r = 0; r < dim; ++r) {
            v[r] += c * b[r];
        }
    }
    return v;
}

inline Vector add(Vector a, const Vector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += b[i];
    }
    return a;
}

/// A different valid choice for det_iso_finite: mixed bases, the complement
/// sheared by kernel vectors, the extra vectors sheared by M(H).
inline ReductionChoice random_reduction_choice(const RationalMatrix& m, std::span<const Vector> f,
                                               std::mt19937_64& rng) {
    ReductionChoice base = default_reduction_choice(m, f);
    ReductionChoice c;
    c.kernel = mix(base.kernel, rng);
    for (const auto& h : mix(base.complement, rng)) {
        c.complement.push_back(add(h, random_combination(base.kernel, m.cols(), rng)));
    }
    std::vector<Vector> images;
    for (const auto& h : c.complement) {
        images.push_back(m.apply(h));
    }
    for (const auto& v : mix(base.extra, rng)) {
        c.extra.push_back(add(v, random_combination(images, m.rows(), rng)));
    }
    return c;
}

inline StabilizationChoice random_stabilization_choice(const RationalMatrix& phi, const RationalMatrix& psi,
                                                       std::mt19937_64& rng) {
    StabilizationChoice base = default_stabilization_choice(phi, psi);
    StabilizationChoice c;
    c.kernel_phi = mix(base.kernel_phi, rng);
    c.kernel_psi = mix(base.kernel_psi, rng);
    if (!base.pair_u.empty()) {
        const RationalMatrix t = random_invertible(base.pair_u.size(), rng);
        for (std::size_t j = 0; j < base.pair_u.size(); ++j) {
            Vector u(phi.cols());
            Vector v(psi.cols());
            for (std::size_t i = 0; i < base.pair_u.size(); ++i) {
                for (std::size_t r = 0; r < u.size(); ++r) {
                    u[r] += t(i, j) * base.pair_u[i][r];
                }
                for (std::size_t r = 0; r < v.size(); ++r) {
                    v[r] += t(i, j) * base.pair_v[i][r];
                }
            }
            c.pair_u.push_back(add(u, random_combination(base.kernel_phi, phi.cols(), rng)));
            c.pair_v.push_back(add(v, random_combination(base.kernel_psi, psi.cols(), rng)));
        }
    }
    std::vector<Vector> fk = c.pair_v;
    fk.insert(fk.end(), c.kernel_psi.begin(), c.kernel_psi.end());
    for (const auto& g : mix(base.g, rng)) {
        c.g.push_back(add(g, random_combination(fk, psi.cols(), rng)));
    }
    return c;
}

} // namespace sftorient::detline

#endif // SFTORIENT_DETLINE_HPP
