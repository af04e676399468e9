#include "symplectic/group_kernel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace symplectic;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

Eigen::MatrixXd random_symmetric(int n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = g(rng);
    return 0.5 * (b + b.transpose());
}

Eigen::MatrixXd random_invertible(int n, std::mt19937& rng) {
    std::normal_distribution<double> g(0.0, 0.4);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) += g(rng);
    if (rng() % 2) a.row(0) *= -1.0;  // exercise negative determinants too
    return a;
}

MpWord random_word(int n, int len, std::mt19937& rng) {
    MpWord w(n);
    for (int k = 0; k < len; ++k) {
        switch (rng() % 3) {
            case 0: w = w * MpWord::gl(random_invertible(n, rng)); break;
            case 1: w = w * MpWord::quad(random_symmetric(n, rng)); break;
            default: w = w * MpWord::fourier(n); break;
        }
    }
    return w;
}

SiegelPoint random_siegel(int n, std::mt19937& rng) {
    Eigen::MatrixXd re = random_symmetric(n, rng);
    Eigen::MatrixXd m = random_invertible(n, rng);
    Eigen::MatrixXd im = m * m.transpose() + 0.2 * Eigen::MatrixXd::Identity(n, n);
    return re.cast<cplx>() + I * im.cast<cplx>();
}

PhaseVector random_phase(int n, std::mt19937& rng) {
    std::normal_distribution<double> g;
    PhaseVector v(2 * n);
    for (auto& x : v) x = g(rng);
    return v;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(HeisMul, CenterAdds) {
    const auto z = heis_mul({PhaseVector::Zero(2), 0.3}, {PhaseVector::Zero(2), 1.1});
    EXPECT_TRUE(z.v.isZero());
    EXPECT_DOUBLE_EQ(z.t, 1.4);
}

TEST(HeisMul, TwistByOmega) {
    PhaseVector a(2), b(2);
    a << 1, 0;
    b << 0, 1;
    const auto z = heis_mul({a, 0}, {b, 0});
    EXPECT_EQ(z.v, a + b);
    EXPECT_DOUBLE_EQ(z.t, 0.5);
}

TEST(HeisMul, InverseAndAssociativity) {
    std::mt19937 rng(2);
    HeisenbergElement x{random_phase(2, rng), 0.7}, y{random_phase(2, rng), -0.2},
        z{random_phase(2, rng), 1.3};
    const auto e = heis_mul(x, heis_inverse(x));
    EXPECT_LT(e.v.norm(), 1e-15);
    EXPECT_NEAR(e.t, 0.0, 1e-15);
    const auto l = heis_mul(heis_mul(x, y), z), r = heis_mul(x, heis_mul(y, z));
    EXPECT_LT((l.v - r.v).norm(), 1e-12);
    EXPECT_NEAR(l.t, r.t, 1e-12);
}

TEST(HeisMul, DimensionMismatchThrows) {
    EXPECT_THROW(heis_mul({PhaseVector::Zero(2), 0}, {PhaseVector::Zero(4), 0}), std::invalid_argument);
}

TEST(MpWord, GLRootMustSquareToDeterminant) {
    const Eigen::MatrixXd a = 2.0 * Eigen::MatrixXd::Identity(1, 1);
    EXPECT_NO_THROW(MpWord::gl(a, std::sqrt(2.0)));
    EXPECT_NO_THROW(MpWord::gl(a, -std::sqrt(2.0)));
    EXPECT_THROW(MpWord::gl(a, 1.0), std::invalid_argument);
    EXPECT_THROW(MpWord::gl(Eigen::MatrixXd::Zero(2, 2)), std::invalid_argument);
}

TEST(MpToSp, Examples) {
    EXPECT_TRUE(mp_to_sp(MpWord(3)).isIdentity());
    for (int n = 1; n <= 3; ++n) EXPECT_TRUE(mp_to_sp(MpWord::fourier(n).power(4)).isIdentity(1e-15));
    Eigen::MatrixXd expected(2, 2);
    expected << 2, 0, 0, 0.5;
    EXPECT_TRUE(mp_to_sp(MpWord::gl(2.0 * Eigen::MatrixXd::Identity(1, 1))).isApprox(expected));
}

TEST(MpToSp, ProductsAreSymplecticAndMultiplicative) {
    std::mt19937 rng(9);
    for (int n = 1; n <= 3; ++n) {
        const auto w1 = random_word(n, 5, rng), w2 = random_word(n, 4, rng);
        EXPECT_TRUE(is_symplectic(mp_to_sp(w1), 1e-9));
        EXPECT_TRUE((mp_to_sp(w1 * w2)).isApprox(mp_to_sp(w1) * mp_to_sp(w2), 1e-12));
        EXPECT_TRUE((mp_to_sp(w1) * mp_to_sp(w1.inverse())).isIdentity(1e-9));
    }
}

TEST(SiegelAct, IdentityAndFixedPoint) {
    std::mt19937 rng(4);
    const auto t = random_siegel(2, rng);
    EXPECT_LT(max_abs(siegel_act(Eigen::MatrixXd::Identity(4, 4), t) - t), 1e-14);
    Eigen::MatrixXd s(2, 2);
    s << 0, -1, 1, 0;
    const SiegelPoint ii = I * Eigen::MatrixXcd::Identity(1, 1);
    EXPECT_LT(max_abs(siegel_act(s, ii) - ii), 1e-15);
}

TEST(SiegelAct, BlockDiagonalCongruence) {
    std::mt19937 rng(6);
    const Eigen::MatrixXd a = random_invertible(2, rng);
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(4, 4);
    s.topLeftCorner(2, 2) = a;
    s.bottomRightCorner(2, 2) = a.transpose().inverse();
    const auto t = random_siegel(2, rng);
    const Eigen::MatrixXcd ai = a.inverse().cast<cplx>();
    EXPECT_LT(max_abs(siegel_act(s, t) - ai.transpose() * t * ai), 1e-12);
}

TEST(SiegelAct, IsLeftActionAndPreservesSiegelSpace) {
    std::mt19937 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 3;
        const auto s1 = siegel_matrix(random_word(n, 3, rng));
        const auto s2 = siegel_matrix(random_word(n, 3, rng));
        const auto t = random_siegel(n, rng);
        const auto lhs = siegel_act(s1 * s2, t);
        const auto rhs = siegel_act(s1, siegel_act(s2, t));
        EXPECT_LT(max_abs(lhs - rhs), 1e-9 * (1.0 + max_abs(lhs)));
        EXPECT_NO_THROW(validate_siegel(lhs, 0.0));
    }
}

TEST(SiegelAct, SingularDenominatorThrows) {
    // A = 0, B = I at T = 0-ish is excluded by the Siegel condition, so use a
    // non-symplectic S to force a singular denominator.
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2, 2);
    EXPECT_THROW(siegel_act(s, I * Eigen::MatrixXcd::Identity(1, 1)), std::domain_error);
}

TEST(SiegelMatrix, LettersAndConjugationFormula) {
    const int n = 2;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd sf = siegel_matrix(MpWord::fourier(n));
    EXPECT_TRUE(sf.topLeftCorner(n, n).isZero());
    EXPECT_TRUE(sf.topRightCorner(n, n).isApprox(2 * kPi * id));
    EXPECT_TRUE(sf.bottomLeftCorner(n, n).isApprox(-id / (2 * kPi)));
    std::mt19937 rng(8);
    const Eigen::MatrixXd b = random_symmetric(n, rng);
    const Eigen::MatrixXd sq = siegel_matrix(MpWord::quad(b));
    EXPECT_TRUE(sq.bottomLeftCorner(n, n).isApprox(b / (2 * kPi)));
    EXPECT_TRUE(sq.topRightCorner(n, n).isZero());
}

TEST(MpCocycle, EmptyAndGL) {
    std::mt19937 rng(1);
    const auto t = random_siegel(2, rng);
    EXPECT_EQ(mp_cocycle(MpWord(2), t), cplx(1.0));
    const Eigen::MatrixXd a = random_invertible(2, rng);
    const cplx r = -std::sqrt(cplx(a.determinant()));
    EXPECT_LT(std::abs(mp_cocycle(MpWord::gl(a, r), t) - r), 1e-15);
}

TEST(MpCocycle, FourierMatchesGaussianTransform) {
    // L(F) exp(-pi y^2) = (i / 2pi)^{1/2} int exp(ixy - pi y^2) dy; compare the
    // trapezoid value at x = 0 against c f_{T'}(0) = c.
    const int m = 4000;
    const double lim = 8.0, h = 2 * lim / m;
    double integral = 0.0;
    for (int k = 0; k <= m; ++k) {
        const double y = -lim + k * h;
        integral += (k == 0 || k == m ? 0.5 : 1.0) * std::exp(-kPi * y * y) * h;
    }
    const cplx oracle = std::sqrt(I / (2 * kPi)) * integral;
    const SiegelPoint ii = I * Eigen::MatrixXcd::Identity(1, 1);
    EXPECT_LT(std::abs(mp_cocycle(MpWord::fourier(1), ii) - oracle), 1e-12);
    const auto img = siegel_act(siegel_matrix(MpWord::fourier(1)), ii);
    EXPECT_LT(std::abs(img(0, 0) - I / (4 * kPi * kPi)), 1e-14);
}

TEST(MpCocycle, FourierFourthPowerIsSign) {
    std::mt19937 rng(3);
    for (int n = 1; n <= 4; ++n) {
        const auto t = random_siegel(n, rng);
        const double sign = n % 2 ? -1.0 : 1.0;
        EXPECT_LT(std::abs(mp_cocycle(MpWord::fourier(n).power(4), t) - sign), 1e-10);
        EXPECT_LT(std::abs(mp_cocycle(MpWord::fourier(n) * MpWord::fourier(n).inverse(), t) - 1.0), 1e-10);
    }
}

TEST(MpCocycle, SquareInvertsDenominatorDeterminant) {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + trial % 3;
        const auto w = random_word(n, 6, rng);
        const auto t = random_siegel(n, rng);
        const Eigen::MatrixXd s = siegel_matrix(w);
        const Eigen::MatrixXcd den =
            -s.topRightCorner(n, n).cast<cplx>() * t + s.topLeftCorner(n, n).cast<cplx>();
        const cplx c = mp_cocycle(w, t);
        EXPECT_LT(std::abs(c * c * den.determinant() - 1.0), 1e-9);
    }
}

TEST(MpCocycle, ComposesAlongOrbit) {
    std::mt19937 rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 2;
        const auto w1 = random_word(n, 3, rng), w2 = random_word(n, 3, rng);
        const auto t = random_siegel(n, rng);
        const auto t2 = siegel_act(siegel_matrix(w2), t);
        const cplx lhs = mp_cocycle(w1 * w2, t);
        const cplx rhs = mp_cocycle(w1, t2) * mp_cocycle(w2, t);
        EXPECT_LT(std::abs(lhs - rhs), 1e-9 * std::abs(lhs));
    }
}

TEST(GMul, TrivialMetaplecticPartReducesToHeisenberg) {
    std::mt19937 rng(5);
    const GElement x{random_phase(2, rng), 0.4, MpWord(2)}, y{random_phase(2, rng), -1.0, MpWord(2)};
    const auto z = g_mul(x, y);
    const auto hz = heis_mul({x.h, x.t}, {y.h, y.t});
    EXPECT_LT((z.h - hz.v).norm(), 1e-14);
    EXPECT_NEAR(z.t, hz.t, 1e-14);
}

TEST(GMul, InverseAndAssociativity) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 3;
        const GElement x{random_phase(n, rng), 0.3, random_word(n, 3, rng)};
        const GElement y{random_phase(n, rng), -0.8, random_word(n, 3, rng)};
        const GElement z{random_phase(n, rng), 1.9, random_word(n, 3, rng)};
        const auto e = g_mul(x, g_inverse(x));
        EXPECT_LT(e.h.norm(), 1e-10);
        EXPECT_NEAR(e.t, 0.0, 1e-10);
        EXPECT_TRUE(mp_to_sp(e.g).isIdentity(1e-9));
        const auto l = g_mul(g_mul(x, y), z), r = g_mul(x, g_mul(y, z));
        EXPECT_LT((l.h - r.h).norm(), 1e-10);
        EXPECT_NEAR(l.t, r.t, 1e-10);
        EXPECT_TRUE(mp_to_sp(l.g).isApprox(mp_to_sp(r.g), 1e-10));
    }
}

TEST(GMul, DimensionMismatchThrows) {
    EXPECT_THROW(g_mul({PhaseVector::Zero(2), 0, MpWord(1)}, {PhaseVector::Zero(4), 0, MpWord(2)}),
                 std::invalid_argument);
}
