#ifndef SFTORIENT_CZINDEX_HPP
#define SFTORIENT_CZINDEX_HPP

// Loops of symmetric matrices S(t), the symplectic path B' = J0 S B, the
// Conley-Zehnder index by crossing enumeration (half-signature at t = 0) and
// the spectral gap of A = J0 d/dt + S in a truncated Fourier basis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sftorient::cz {

using Matrix = Eigen::MatrixXd;

inline Matrix standard_j(int dim) {
    if (dim <= 0 || dim % 2 != 0) {
        throw std::invalid_argument("loop dimension must be a positive even integer");
    }
    Matrix j = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; b += 2) {
        j(b, b + 1) = -1.0;
        j(b + 1, b) = 1.0;
    }
    return j;
}

/// S(t) = sum_k C_k cos(2 pi k t) + sum_{k >= 1} S_k sin(2 pi k t), all terms
/// symmetrized on construction.
class SymmetricLoop {
public:
    SymmetricLoop(int dim, std::vector<Matrix> cos_terms, std::vector<Matrix> sin_terms)
        : dim_(dim), cos_(std::move(cos_terms)), sin_(std::move(sin_terms)) {
        standard_j(dim);
        if (cos_.empty()) {
            cos_.push_back(Matrix::Zero(dim, dim));
        }
        if (sin_.size() < cos_.size()) {
            sin_.resize(cos_.size(), Matrix::Zero(dim, dim));
        }
        if (cos_.size() < sin_.size()) {
            cos_.resize(sin_.size(), Matrix::Zero(dim, dim));
        }
        sin_[0].setZero();
        for (auto* list : {&cos_, &sin_}) {
            for (auto& m : *list) {
                if (m.rows() != dim || m.cols() != dim) {
                    throw std::invalid_argument("loop coefficient has the wrong shape");
                }
                m = 0.5 * (m + m.transpose()).eval();
            }
        }
    }

    static SymmetricLoop constant(const Matrix& s) {
        return SymmetricLoop(static_cast<int>(s.rows()), {s}, {});
    }

    static SymmetricLoop scalar(int dim, double a) { return constant(a * Matrix::Identity(dim, dim)); }

    /// Trigonometric interpolation of samples at t_j = j / N.
    static SymmetricLoop from_samples(const std::vector<Matrix>& samples) {
        if (samples.empty()) {
            throw std::invalid_argument("sampled loop has no samples");
        }
        const int dim = static_cast<int>(samples.front().rows());
        const std::size_t n = samples.size();
        const std::size_t kmax = n / 2;
        std::vector<Matrix> c(kmax + 1, Matrix::Zero(dim, dim));
        std::vector<Matrix> s(kmax + 1, Matrix::Zero(dim, dim));
        for (std::size_t j = 0; j < n; ++j) {
            if (samples[j].rows() != dim || samples[j].cols() != dim) {
                throw std::invalid_argument("sampled loop has matrices of different shapes");
            }
            const double t = static_cast<double>(j) / static_cast<double>(n);
            for (std::size_t k = 0; k <= kmax; ++k) {
                const double w = 2.0 * std::numbers::pi * static_cast<double>(k) * t;
                const bool nyquist = (n % 2 == 0 && k == kmax);
                const double scale = (k == 0 || nyquist) ? 1.0 / static_cast<double>(n) : 2.0 / static_cast<double>(n);
                c[k] += scale * std::cos(w) * samples[j];
                if (!nyquist) {
                    s[k] += scale * std::sin(w) * samples[j];
                }
            }
        }
        return SymmetricLoop(dim, std::move(c), std::move(s));
    }

    int dim() const { return dim_; }
    std::size_t max_mode() const { return cos_.size() - 1; }
    const Matrix& cos_coefficient(std::size_t k) const { return cos_.at(k); }
    const Matrix& sin_coefficient(std::size_t k) const { return sin_.at(k); }

    /// Upper bound for sup_t |S(t)| (sum of Frobenius norms of the coefficients).
    double norm_bound() const {
        double total = 0.0;
        for (std::size_t k = 0; k < cos_.size(); ++k) {
            total += cos_[k].norm() + sin_[k].norm();
        }
        return total;
    }

    Matrix operator()(double t) const {
        Matrix out = cos_[0];
        for (std::size_t k = 1; k < cos_.size(); ++k) {
            const double w = 2.0 * std::numbers::pi * static_cast<double>(k) * t;
            out += std::cos(w) * cos_[k] + std::sin(w) * sin_[k];
        }
        return out;
    }

private:
    int dim_;
    std::vector<Matrix> cos_;
    std::vector<Matrix> sin_;
};

struct PathSample {
    double t;
    Matrix b;
};

struct SymplecticPath {
    std::vector<PathSample> samples;
    double step = 0.0;

    const Matrix& endpoint() const { return samples.back().b; }
};

inline constexpr std::size_t default_steps = 256;
inline constexpr int default_modes = 128;

namespace detail {

inline Matrix rk4_step(const SymmetricLoop& s, const Matrix& j0, double t, const Matrix& b, double h) {
    auto f = [&](double tt, const Matrix& x) -> Matrix { return j0 * (s(tt) * x); };
    const Matrix k1 = f(t, b);
    const Matrix k2 = f(t + 0.5 * h, b + 0.5 * h * k1);
    const Matrix k3 = f(t + 0.5 * h, b + 0.5 * h * k2);
    const Matrix k4 = f(t + h, b + h * k3);
    return b + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// B(t1) from B(t0) using steps no longer than max_h.
inline Matrix propagate(const SymmetricLoop& s, double t0, const Matrix& b0, double t1, double max_h) {
    const Matrix j0 = standard_j(s.dim());
    const double span = t1 - t0;
    if (span <= 0.0) {
        return b0;
    }
    const int steps = std::max(1, static_cast<int>(std::ceil(span / max_h - 1e-12)));
    const double h = span / steps;
    Matrix b = b0;
    for (int i = 0; i < steps; ++i) {
        b = rk4_step(s, j0, t0 + i * h, b, h);
    }
    return b;
}

/// Internal RK4 step length keeping h |S| <= 0.01.
inline double max_substep(const SymmetricLoop& s) {
    const double bound = s.norm_bound();
    return bound > 0.0 ? 0.01 / bound : 1.0;
}

inline double spectral_norm(const Matrix& m) {
    return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

inline double sigma_min(const Matrix& m) {
    const auto sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
    return sv(sv.size() - 1);
}

} // namespace detail

inline SymplecticPath solve_symplectic_path(const SymmetricLoop& s, std::size_t n = default_steps) {
    if (n < 16) {
        throw std::invalid_argument("solve_symplectic_path: need at least 16 steps");
    }
    standard_j(s.dim());
    SymplecticPath path;
    path.step = 1.0 / static_cast<double>(n);
    path.samples.reserve(n + 1);
    Matrix b = Matrix::Identity(s.dim(), s.dim());
    path.samples.push_back({0.0, b});
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * path.step;
        b = detail::propagate(s, t, b, t + path.step, std::min(path.step, detail::max_substep(s)));
        path.samples.push_back({static_cast<double>(i + 1) * path.step, b});
    }
    return path;
}

/// max over samples of the entrywise max of |B^T J0 B - J0|.
inline double symplectic_defect(const SymplecticPath& path) {
    const Matrix j0 = standard_j(static_cast<int>(path.samples.front().b.rows()));
    double worst = 0.0;
    for (const auto& [t, b] : path.samples) {
        worst = std::max(worst, (b.transpose() * j0 * b - j0).cwiseAbs().maxCoeff());
    }
    return worst;
}

inline bool is_admissible(const SymmetricLoop& s, std::size_t n = default_steps) {
    const Matrix b1 = solve_symplectic_path(s, n).endpoint();
    const Matrix shifted = b1 - Matrix::Identity(s.dim(), s.dim());
    return std::abs(shifted.determinant()) > 1e-9 * detail::spectral_norm(b1);
}

struct Crossing {
    double t;
    int signature;
    int kernel_dim;
};

namespace detail {

inline int signature(const Matrix& symmetric, double tol, double t) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (symmetric + symmetric.transpose()));
    int sig = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double ev = es.eigenvalues()(i);
        if (std::abs(ev) <= tol) {
            throw std::runtime_error("conley_zehnder: degenerate crossing at t = " + std::to_string(t));
        }
        sig += ev > 0 ? 1 : -1;
    }
    return sig;
}

inline Crossing crossing_at(const SymmetricLoop& s, double t, const Matrix& b) {
    const int dim = s.dim();
    const Eigen::JacobiSVD<Matrix> svd(b - Matrix::Identity(dim, dim), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    std::vector<int> kernel_cols;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) < 1e-7) {
            kernel_cols.push_back(i);
        }
    }
    if (kernel_cols.empty()) {
        throw std::runtime_error("conley_zehnder: crossing lost during refinement at t = " + std::to_string(t));
    }
    Matrix k(dim, static_cast<int>(kernel_cols.size()));
    for (std::size_t c = 0; c < kernel_cols.size(); ++c) {
        k.col(static_cast<int>(c)) = svd.matrixV().col(kernel_cols[c]);
    }
    const Matrix form = k.transpose() * s(t) * k;
    const double scale = std::max(1.0, s(t).cwiseAbs().maxCoeff());
    return {t, signature(form, 1e-7 * scale, t), static_cast<int>(kernel_cols.size())};
}

} // namespace detail

/// Interior crossings of {B(t)} with the identity, located from sign changes of
/// det(B - Id) (bisection) and from local minima of the smallest singular value
/// of B - Id (golden section), the latter catching even-dimensional kernels
/// where the determinant touches zero without changing sign.
inline std::vector<Crossing> find_crossings(const SymmetricLoop& s, const SymplecticPath& path) {
    const int dim = s.dim();
    const Matrix id = Matrix::Identity(dim, dim);
    const double h = path.step;
    const double sub = std::min(h / 8.0, detail::max_substep(s));
    auto b_at = [&](double t) {
        const std::size_t i = std::min(path.samples.size() - 2, static_cast<std::size_t>(std::floor(t / h)));
        return detail::propagate(s, path.samples[i].t, path.samples[i].b, t, sub);
    };
    auto det_at = [&](double t) { return (b_at(t) - id).determinant(); };
    auto smin_at = [&](double t) { return detail::sigma_min(b_at(t) - id); };

    const std::size_t n = path.samples.size() - 1;
    std::vector<double> dets(n + 1);
    std::vector<double> smins(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        dets[i] = (path.samples[i].b - id).determinant();
        smins[i] = detail::sigma_min(path.samples[i].b - id);
    }

    std::vector<double> times;
    for (std::size_t i = 1; i < n; ++i) {
        if ((dets[i] > 0) != (dets[i + 1] > 0)) {
            double lo = path.samples[i].t;
            double hi = path.samples[i + 1].t;
            const bool lo_positive = dets[i] > 0;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                if ((det_at(mid) > 0) == lo_positive) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            times.push_back(0.5 * (lo + hi));
        }
    }
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t i = 1; i < n; ++i) {
        if (!(smins[i] <= smins[i - 1] && smins[i] <= smins[i + 1])) {
            continue;
        }
        double a = path.samples[i - 1].t;
        double b = path.samples[i + 1].t;
        double x1 = b - phi * (b - a);
        double x2 = a + phi * (b - a);
        double f1 = smin_at(x1);
        double f2 = smin_at(x2);
        while (b - a > 1e-10) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = smin_at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = smin_at(x2);
            }
        }
        const double t = 0.5 * (a + b);
        if (smin_at(t) < 1e-6) {
            times.push_back(t);
        }
    }
    std::sort(times.begin(), times.end());
    std::vector<Crossing> crossings;
    double last = -1.0;
    for (double t : times) {
        if (t - last < 1e-7) {
            continue;
        }
        last = t;
        crossings.push_back(detail::crossing_at(s, t, b_at(t)));
    }
    return crossings;
}

inline int conley_zehnder(const SymmetricLoop& s, std::size_t n = default_steps) {
    if (!is_admissible(s, n)) {
        throw std::invalid_argument("conley_zehnder: loop is not admissible");
    }
    const SymplecticPath path = solve_symplectic_path(s, n);
    const double scale = std::max(1.0, s(0.0).cwiseAbs().maxCoeff());
    const int start = detail::signature(s(0.0), 1e-7 * scale, 0.0);
    int total = start;  // twice the index so far
    for (const auto& c : find_crossings(s, path)) {
        total += 2 * c.signature;
    }
    if (total % 2 != 0) {
        throw std::runtime_error("conley_zehnder: odd half-signature at t = 0");
    }
    return total / 2;
}

/// Eigenvalues of J0 d/dt + S restricted to modes |k| <= modes, ascending.
inline Eigen::VectorXd asymptotic_spectrum(const SymmetricLoop& s, int modes = default_modes) {
    using Complex = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    if (modes < 1) {
        throw std::invalid_argument("spectral_gap: need at least one Fourier mode");
    }
    const int dim = s.dim();
    const int blocks = 2 * modes + 1;
    const Matrix j0 = standard_j(dim);
    CMatrix a = CMatrix::Zero(blocks * dim, blocks * dim);
    auto s_hat = [&](int d) -> CMatrix {
        const std::size_t k = static_cast<std::size_t>(std::abs(d));
        if (k > s.max_mode()) {
            return CMatrix::Zero(dim, dim);
        }
        if (k == 0) {
            return s.cos_coefficient(0).cast<Complex>();
        }
        const Complex sign(0.0, d > 0 ? -1.0 : 1.0);
        return 0.5 * (s.cos_coefficient(k).cast<Complex>() + sign * s.sin_coefficient(k).cast<Complex>());
    };
    for (int bk = 0; bk < blocks; ++bk) {
        const int k = bk - modes;
        for (int bl = 0; bl < blocks; ++bl) {
            const int l = bl - modes;
            CMatrix block = s_hat(k - l);
            if (k == l) {
                block += Complex(0.0, 2.0 * std::numbers::pi * k) * j0.cast<Complex>();
            }
            a.block(bk * dim, bl * dim, dim, dim) = block;
        }
    }
    return Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

inline double spectral_gap(const SymmetricLoop& s, int modes = default_modes) {
    if (!is_admissible(s)) {
        throw std::invalid_argument("spectral_gap: loop is not admissible (0 in the spectrum)");
    }
    const Eigen::VectorXd ev = asymptotic_spectrum(s, modes);
    std::optional<double> neg;
    std::optional<double> pos;
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0) {
            neg = ev(i);
        } else if (ev(i) > 0 && !pos) {
            pos = ev(i);
        }
    }
    if (!neg || !pos) {
        throw std::runtime_error("spectral_gap: truncation has no eigenvalue on one side of 0");
    }
    return std::min(-*neg, *pos);
}

/// |S| = mu_CZ(S) + n - 1 mod 2.
inline int loop_grading(const SymmetricLoop& s, int n) {
    const int mu = conley_zehnder(s);
    return ((mu + n - 1) % 2 + 2) % 2;
}

inline double max_weight(const std::vector<SymmetricLoop>& loops, int modes = default_modes) {
    if (loops.empty()) {
        throw std::invalid_argument("max_weight: empty list of loops");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : loops) {
        best = std::min(best, spectral_gap(s, modes));
    }
    return best;
}

} // namespace sftorient::cz

#endif // SFTORIENT_CZINDEX_HPP
