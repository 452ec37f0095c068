#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sftorient/czindex.hpp"

using namespace sftorient::cz;

namespace {

constexpr double pi = std::numbers::pi;

// exp(theta J0) = cos(theta) I + sin(theta) J0 since J0^2 = -I.
Matrix rotation(double theta) {
    return std::cos(theta) * Matrix::Identity(2, 2) + std::sin(theta) * standard_j(2);
}

int rotation_mu(double a) { return 2 * static_cast<int>(std::floor(a / (2 * pi))) + 1; }

double dist_to_2pi_z(double a) {
    const double r = std::fmod(std::fabs(a), 2 * pi);
    return std::min(r, 2 * pi - r);
}

SymmetricLoop wobbling_scalar(double a, double c) {
    return SymmetricLoop(2, {a * Matrix::Identity(2, 2), c * Matrix::Identity(2, 2)}, {});
}

} // namespace

TEST(StandardJ, RejectsOddDimension) {
    EXPECT_THROW(standard_j(3), std::invalid_argument);
    EXPECT_THROW(standard_j(0), std::invalid_argument);
    const Matrix j = standard_j(4);
    EXPECT_TRUE((j * j).isApprox(-Matrix::Identity(4, 4)));
}

TEST(SymmetricLoop, SymmetrizesTerms) {
    Matrix m(2, 2);
    m << 1, 2, 0, 3;
    const auto s = SymmetricLoop::constant(m);
    EXPECT_TRUE(s(0.3).isApprox(s(0.3).transpose()));
    EXPECT_DOUBLE_EQ(s(0.0)(0, 1), 1.0);
}

TEST(SymmetricLoop, FromSamplesReproducesTrigonometricLoop) {
    Matrix c1(2, 2);
    c1 << 1, 0.5, 0.5, -2;
    Matrix s2(2, 2);
    s2 << 0, 1, 1, 0;
    const SymmetricLoop loop(2, {Matrix::Identity(2, 2), c1, Matrix::Zero(2, 2)}, {Matrix::Zero(2, 2), Matrix::Zero(2, 2), s2});
    std::vector<Matrix> samples;
    for (int j = 0; j < 16; ++j) {
        samples.push_back(loop(j / 16.0));
    }
    const auto back = SymmetricLoop::from_samples(samples);
    for (double t : {0.0, 0.13, 0.5, 0.77}) {
        EXPECT_LT((back(t) - loop(t)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(SolveSymplecticPath, ZeroLoopIsConstant) {
    const auto path = solve_symplectic_path(SymmetricLoop::scalar(2, 0.0));
    for (const auto& [t, b] : path.samples) {
        EXPECT_TRUE(b.isApprox(Matrix::Identity(2, 2)));
    }
}

TEST(SolveSymplecticPath, RotationClosedForm) {
    for (double a : {0.7, pi, 5.0, -2.0}) {
        const auto path = solve_symplectic_path(SymmetricLoop::scalar(2, a), 256);
        for (const auto& [t, b] : path.samples) {
            EXPECT_LT((b - rotation(a * t)).cwiseAbs().maxCoeff(), 1e-8) << "a=" << a << " t=" << t;
        }
        EXPECT_LT(symplectic_defect(path), 1e-8);
        EXPECT_NEAR(path.samples[64].t, 0.25, 1e-15);
        EXPECT_NEAR(path.endpoint()(1, 0), std::sin(a), 1e-8);
    }
}

TEST(SolveSymplecticPath, RejectsCoarseGrid) {
    EXPECT_THROW(solve_symplectic_path(SymmetricLoop::scalar(2, 1.0), 8), std::invalid_argument);
}

TEST(IsAdmissible, Examples) {
    EXPECT_FALSE(is_admissible(SymmetricLoop::scalar(2, 0.0)));
    EXPECT_TRUE(is_admissible(SymmetricLoop::scalar(2, pi)));
    EXPECT_FALSE(is_admissible(SymmetricLoop::scalar(2, 2 * pi)));
}

TEST(ConleyZehnder, ScalarGrid) {
    for (double a = -7.0; a <= 20.0; a += 0.37) {
        if (dist_to_2pi_z(a) < 1e-3) {
            continue;
        }
        EXPECT_EQ(conley_zehnder(SymmetricLoop::scalar(2, a)), rotation_mu(a)) << "a=" << a;
    }
    EXPECT_EQ(conley_zehnder(SymmetricLoop::scalar(2, -pi / 2)), -1);
    EXPECT_EQ(conley_zehnder(SymmetricLoop::scalar(2, 3 * pi)), 3);
}

TEST(ConleyZehnder, RejectsDegenerate) {
    EXPECT_THROW(conley_zehnder(SymmetricLoop::scalar(2, 2 * pi)), std::invalid_argument);
}

// A non-monotone rotation path is homotopic rel endpoints to the linear one.
TEST(ConleyZehnder, WobblingRotation) {
    for (double a : {pi, 4.0, 9.0, -1.0}) {
        EXPECT_EQ(conley_zehnder(wobbling_scalar(a, 8.0)), rotation_mu(a)) << "a=" << a;
    }
}

TEST(ConleyZehnder, AdditiveOnBlockSums) {
    for (double a : {1.0, 7.5}) {
        for (double b : {-2.0, 3.0, 14.0}) {
            Matrix s = Matrix::Zero(4, 4);
            s.topLeftCorner(2, 2) = a * Matrix::Identity(2, 2);
            s.bottomRightCorner(2, 2) = b * Matrix::Identity(2, 2);
            EXPECT_EQ(conley_zehnder(SymmetricLoop::constant(s)), rotation_mu(a) + rotation_mu(b));
        }
    }
}

TEST(ConleyZehnder, ResolutionDoublingIsStable) {
    for (double a : {pi / 2, 5.0, 3 * pi + 0.1}) {
        const auto s = wobbling_scalar(a, 3.0);
        EXPECT_EQ(conley_zehnder(s, 256), conley_zehnder(s, 512));
    }
}

TEST(SpectralGap, ScalarGrid) {
    for (double a = -7.0; a <= 20.0; a += 0.61) {
        if (dist_to_2pi_z(a) < 1e-3) {
            continue;
        }
        EXPECT_NEAR(spectral_gap(SymmetricLoop::scalar(2, a)), dist_to_2pi_z(a), 1e-6) << "a=" << a;
    }
}

TEST(SpectralGap, Examples) {
    EXPECT_NEAR(spectral_gap(SymmetricLoop::scalar(2, pi / 2)), pi / 2, 1e-6);
    EXPECT_NEAR(spectral_gap(SymmetricLoop::scalar(2, 5.0)), 2 * pi - 5.0, 1e-6);
    EXPECT_THROW(spectral_gap(SymmetricLoop::scalar(2, 2 * pi)), std::invalid_argument);
}

// Gauge transform by the rotation exp(-J0 F(t)) conjugates f(t) I to its mean.
TEST(SpectralGap, WobblingScalarHasMeanSpectrum) {
    for (double a : {1.0, 4.0}) {
        const auto s = wobbling_scalar(a, 1.5);
        EXPECT_NEAR(spectral_gap(s, 128), dist_to_2pi_z(a), 1e-6);
        EXPECT_LT(std::fabs(spectral_gap(s, 128) - spectral_gap(s, 256)), 1e-8);
    }
}

TEST(LoopGrading, Examples) {
    EXPECT_EQ(loop_grading(SymmetricLoop::scalar(2, pi), 2), 0);
    EXPECT_EQ(loop_grading(SymmetricLoop::scalar(2, 3 * pi), 2), 0);
    EXPECT_EQ(loop_grading(SymmetricLoop::scalar(2, pi), 3), 1);
}

TEST(MaxWeight, Examples) {
    EXPECT_NEAR(max_weight({SymmetricLoop::scalar(2, pi / 2)}), pi / 2, 1e-6);
    EXPECT_NEAR(max_weight({SymmetricLoop::scalar(2, pi / 2), SymmetricLoop::scalar(2, 5.0)}), 2 * pi - 5.0, 1e-6);
    EXPECT_THROW(max_weight({}), std::invalid_argument);
}
