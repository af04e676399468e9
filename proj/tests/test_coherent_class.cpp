#include "symplectic/coherent_class.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace symplectic;

namespace {

const cplx I(0.0, 1.0);

Eigen::MatrixXd random_symmetric(int n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = g(rng);
    return 0.5 * (b + b.transpose());
}

PhaseVector random_phase(int n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    PhaseVector v(2 * n);
    for (auto& x : v) x = g(rng);
    return v;
}

SiegelPoint random_siegel(int n, std::mt19937& rng) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + random_symmetric(n, rng, 0.3);
    return random_symmetric(n, rng, 0.6).cast<cplx>() +
           I * (m * m.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n)).cast<cplx>();
}

SiegelPoint identity_point(int n) { return I * Eigen::MatrixXcd::Identity(n, n); }

MpWord random_word(int n, int len, std::mt19937& rng, double scale = 0.4) {
    MpWord w(n);
    for (int k = 0; k < len; ++k) {
        switch (rng() % 3) {
            case 0: {
                Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + random_symmetric(n, rng, scale);
                if (rng() % 2) a.row(0) *= -1.0;
                w = w * MpWord::gl(a);
                break;
            }
            case 1: w = w * MpWord::quad(random_symmetric(n, rng, scale)); break;
            default: w = w * MpWord::fourier(n); break;
        }
    }
    return w;
}

// |<a, b>| / (|a| |b|)
double normalized_overlap(const GaussianState& a, const GaussianState& b) {
    return std::abs(gaussian_inner(a, b)) / (gaussian_norm(a) * gaussian_norm(b));
}

// sigma(u) psi / psi at z by central differences of the closed form
cplx pointwise_ratio(const Eigen::VectorXcd& u, const GaussianState& s, const Eigen::VectorXd& z) {
    const int n = s.dim();
    const double dz = 1e-5;
    cplx value = 0.0;
    const cplx psi = gaussian_eval(s, z);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd zp = z, zm = z;
        zp(j) += dz;
        zm(j) -= dz;
        const cplx d = (gaussian_eval(s, zp) - gaussian_eval(s, zm)) / (2.0 * dz);
        value += u(j) * I * z(j) * psi + u(n + j) * d;
    }
    return value / psi;
}

Eigen::MatrixXcd power(const Eigen::MatrixXcd& m, int p) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
    for (int k = 0; k < p; ++k) out = out * m;
    return out;
}

}  // namespace

TEST(CoherentState, EigenvaluesMatchClosedFormForRandomDisplacements) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 3;
        CoherentPoint p{random_phase(n, rng), trial % 2 ? random_siegel(n, rng) : identity_point(n)};
        for (Channel ch : {Channel::A, Channel::B}) {
            const Eigen::VectorXcd got = annihilation_eigenvalues(p, ch, 1e-10);
            EXPECT_LT((got - predicted_eigenvalues(p, ch)).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(CoherentState, IdentityPointExamples) {
    CoherentPoint p{PhaseVector::Zero(2), identity_point(1)};
    EXPECT_LT(std::abs(annihilation_eigenvalue(p, 0, Channel::A)), 1e-14);
    p.h << 1.0, 0.0;
    EXPECT_LT(std::abs(annihilation_eigenvalue(p, 0, Channel::A) - I), 1e-12);
    EXPECT_LT(std::abs(annihilation_eigenvalue(p, 0, Channel::B) + 1.0), 1e-12);
    p.h << 0.0, 2.5;
    EXPECT_LT(std::abs(annihilation_eigenvalue(p, 0, Channel::A) - 2.5), 1e-12);
}

TEST(CoherentState, PointwiseOperatorIsConstantMultiple) {
    std::mt19937 rng(12);
    std::normal_distribution<double> g(0.0, 0.7);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 1 + trial % 2;
        CoherentPoint p{random_phase(n, rng), random_siegel(n, rng)};
        const GaussianState s = coherent_state(p);
        const Eigen::VectorXcd lam = predicted_eigenvalues(p, Channel::A);
        for (int j = 0; j < n; ++j) {
            const Eigen::VectorXcd u = annihilator(p.T, j, Channel::A);
            for (int k = 0; k < 4; ++k) {
                Eigen::VectorXd z(n);
                for (auto& x : z) x = g(rng);
                EXPECT_LT(std::abs(pointwise_ratio(u, s, z) - lam(j)), 1e-6);
            }
        }
    }
}

TEST(CoherentState, NonAnnihilatorIsRejected) {
    CoherentPoint p{PhaseVector::Zero(2), identity_point(1)};
    Eigen::VectorXcd u(2);
    u << 1.0, 0.0;
    const EigenvalueReport r = operator_on_gaussian(u, coherent_state(p));
    EXPECT_GT(r.residual, 0.1);
}

TEST(CoherentState, ComplexStructureFromSiegel) {
    std::mt19937 rng(13);
    for (int n = 1; n <= 3; ++n) {
        EXPECT_LT((complex_structure_from_siegel(identity_point(n)) - standard_complex_structure(n)).norm(), 1e-14);
        const SiegelPoint T = random_siegel(n, rng);
        const Eigen::MatrixXd J = complex_structure_from_siegel(T);
        EXPECT_LT((J * J + Eigen::MatrixXd::Identity(2 * n, 2 * n)).norm(), 1e-10);
        EXPECT_TRUE(is_symplectic(J, 1e-10));
        // v - iJv lies in the span of the annihilators: its first block fixes it
        for (int c = 0; c < 2 * n; ++c) {
            const Eigen::VectorXcd v =
                Eigen::VectorXd::Unit(2 * n, c).cast<cplx>() - I * J.col(c).cast<cplx>();
            const Eigen::VectorXcd a = v.head(n);
            EXPECT_LT((v.tail(n) - T * a).norm(), 1e-10);
        }
    }
}

TEST(CoherentState, ReciprocityPoint) {
    std::mt19937 rng(14);
    std::uniform_real_distribution<double> pos(0.2, 2.0);
    for (int n = 1; n <= 3; ++n) {
        PhaseVector h = random_phase(n, rng);
        for (int j = 0; j < n; ++j) h(j) = pos(rng);
        const CoherentPoint p{h, identity_point(n)};
        const CoherentPoint r = reciprocal_point(h);
        for (Channel ch : {Channel::A, Channel::B})
            EXPECT_LT((annihilation_eigenvalues(p, ch) - annihilation_eigenvalues(r, ch)).cwiseAbs().maxCoeff(),
                      1e-10);
        EXPECT_TRUE(equivalent_irreducible(p, r, AlgebraTag::Doubled));
    }
    PhaseVector bad(2);
    bad << -1.0, 0.0;
    EXPECT_THROW(reciprocal_point(bad), std::domain_error);
}

TEST(CoherentOrbit, StateTransformsWithPoint) {
    std::mt19937 rng(15);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + trial % 2;
        const CoherentPoint p{random_phase(n, rng), random_siegel(n, rng)};
        const GElement g{random_phase(n, rng, 0.7), 0.4, random_word(n, 3, rng)};
        const CoherentPoint q = g_orbit_act(g, p);
        validate_siegel(q.T, 1e-9);
        const double ov = normalized_overlap(g_state_act(g, coherent_state(p)), coherent_state(q));
        EXPECT_NEAR(ov, 1.0, 1e-8);
    }
}

TEST(CoherentOrbit, IsRightAction) {
    std::mt19937 rng(16);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 2;
        const CoherentPoint p{random_phase(n, rng), random_siegel(n, rng)};
        const GElement g1{random_phase(n, rng), 0.1, random_word(n, 2, rng)};
        const GElement g2{random_phase(n, rng), -0.3, random_word(n, 2, rng)};
        const CoherentPoint lhs = g_orbit_act(g_mul(g1, g2), p);
        const CoherentPoint rhs = g_orbit_act(g2, g_orbit_act(g1, p));
        EXPECT_LT((lhs.h - rhs.h).norm(), 1e-9);
        EXPECT_LT((lhs.T - rhs.T).norm(), 1e-9);
    }
}

TEST(CoherentOrbit, TransitivityWitness) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 3;
        const CoherentPoint p0{random_phase(n, rng), random_siegel(n, rng)};
        const CoherentPoint p1{random_phase(n, rng), random_siegel(n, rng)};
        const CoherentPoint got = g_orbit_act(transitivity_witness(p0, p1), p0);
        EXPECT_LT((got.h - p1.h).norm(), 1e-9);
        EXPECT_LT((got.T - p1.T).norm(), 1e-9);
    }
}

TEST(CoherentOrbit, NormalizingWordMovesVacuum) {
    std::mt19937 rng(18);
    for (int n = 1; n <= 3; ++n) {
        const SiegelPoint T = random_siegel(n, rng);
        const CoherentPoint vac{PhaseVector::Zero(2 * n), identity_point(n)};
        const CoherentPoint target{PhaseVector::Zero(2 * n), T};
        const GaussianState moved = mp_act_gaussian(normalizing_word(T), coherent_state(vac));
        EXPECT_NEAR(normalized_overlap(moved, coherent_state(target)), 1.0, 1e-10);
    }
}

TEST(CoherentOrbit, UnitaryWordsFixIdentityPoint) {
    std::mt19937 rng(19);
    for (int n = 1; n <= 3; ++n) {
        const Eigen::MatrixXd O =
            Eigen::HouseholderQR<Eigen::MatrixXd>(random_symmetric(n, rng) + Eigen::MatrixXd::Identity(n, n) * 0.1)
                .householderQ();
        for (const MpWord& w : {MpWord::gl(O), MpWord::fourier(n), MpWord::fourier(n) * MpWord::gl(O)}) {
            const GElement g{PhaseVector::Zero(2 * n), 0.0, w};
            const CoherentPoint q = g_orbit_act(g, {PhaseVector::Zero(2 * n), identity_point(n)});
            EXPECT_LT((q.T - identity_point(n)).norm(), 1e-12);
        }
    }
}

TEST(Equivalence, Examples) {
    std::mt19937 rng(20);
    const CoherentPoint base{PhaseVector::Zero(2), identity_point(1)};
    EXPECT_TRUE(equivalent_irreducible(base, base));
    EXPECT_TRUE(equivalent_irreducible(base, {PhaseVector::Zero(2), random_siegel(1, rng)}));
    PhaseVector h(2);
    h << 1.0, 0.0;
    EXPECT_FALSE(equivalent_irreducible(base, {h, identity_point(1)}));
    EXPECT_FALSE(equivalent_irreducible(base, {h, identity_point(1)}, AlgebraTag::Doubled));
    for (int n = 1; n <= 3; ++n) {
        const CoherentPoint p{random_phase(n, rng), random_siegel(n, rng)};
        EXPECT_TRUE(equivalent_irreducible(p, p));
    }
}

TEST(Equivalence, TrivialCharacterIffNormalizedDisplacementVanishes) {
    std::mt19937 rng(21);
    for (int n = 1; n <= 3; ++n) {
        const SiegelPoint T = random_siegel(n, rng);
        const CoherentPoint zero{PhaseVector::Zero(2 * n), identity_point(n)};
        const CoherentPoint p{random_phase(n, rng), T};
        EXPECT_GT(normalized_displacement(p).norm(), 1e-3);
        EXPECT_FALSE(equivalent_irreducible(p, zero));
        const CoherentPoint q{PhaseVector::Zero(2 * n), T};
        EXPECT_LT(normalized_displacement(q).norm(), 1e-14);
        EXPECT_TRUE(equivalent_irreducible(q, zero));
    }
}

TEST(ChainSets, CountsAgainstBruteForce) {
    for (auto [n, N] : std::vector<std::pair<int, int>>{{1, 0}, {1, 3}, {1, 5}, {2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {2, 4}}) {
        const auto basis = fock_basis(n, N);
        const int m = static_cast<int>(basis->size());
        std::vector<ChainSet> brute;
        for (long mask = 0; mask < (1L << m); ++mask) {
            ChainSet K{n, N, {}};
            for (int i = 0; i < m; ++i)
                if (mask & (1L << i)) K.members.insert(basis->index(i));
            if (is_chain_incident(K)) brute.push_back(K);
        }
        const auto got = enumerate_chain_sets(n, N);
        ASSERT_EQ(got.size(), brute.size()) << n << " " << N;
        for (const auto& K : got) EXPECT_TRUE(is_chain_incident(K));
        for (size_t i = 1; i < got.size(); ++i) EXPECT_LT(got[i - 1].members, got[i].members);
        if (n == 1) EXPECT_EQ(got.size(), static_cast<size_t>(N + 1));
    }
    EXPECT_EQ(enumerate_chain_sets(2, 1).size(), 4u);
    EXPECT_EQ(enumerate_chain_sets(3, 0).size(), 1u);
    EXPECT_THROW(enumerate_chain_sets(2, 6), std::length_error);
}

TEST(ChainSets, SingularSupport) {
    ChainSet K{2, 2, {{0, 0}, {0, 1}, {0, 2}}};
    EXPECT_EQ(singular_support(K), (std::set<int>{1}));
    K.members.insert({1, 0});
    EXPECT_EQ(singular_support(K), (std::set<int>{0, 1}));
    EXPECT_TRUE(singular_support({3, 0, {{0, 0, 0}}}).empty());
    EXPECT_FALSE(is_chain_incident({2, 2, {{0, 0}, {0, 2}}}));
}

TEST(Lowering, MatchesFockOperator) {
    std::mt19937 rng(22);
    for (int n = 1; n <= 2; ++n) {
        const auto sets = enumerate_chain_sets(n, 2);
        const ChainSet K = sets.back();
        const MpWord g = MpWord::gl(Eigen::MatrixXd::Identity(n, n) + random_symmetric(n, rng, 0.1)) *
                         MpWord::quad(random_symmetric(n, rng, 0.1));
        const IndecomposablePoint p{random_phase(n, rng, 0.3), g, K};
        const Eigen::MatrixXd S = mp_to_sp(g);
        FockOptions opt;
        opt.out_cutoff = 30;
        opt.pad = 30;
        std::vector<MultiIndex> order(K.members.begin(), K.members.end());
        std::vector<FockVector> states;
        for (const auto& k : order)
            states.push_back(pi_act_fock(p.h, 0.0, mp_act_fock(g, FockVector::basis_vector(k, 30), opt), opt));
        for (int j = 0; j < n; ++j) {
            for (Channel ch : {Channel::A, Channel::B}) {
                const Eigen::MatrixXcd L = lowering_matrix(p, j, ch);
                const Eigen::VectorXcd u = S.cast<cplx>() * annihilator(identity_point(n), j, ch);
                for (size_t c = 0; c < order.size(); ++c) {
                    const FockVector lhs = sigma_fock_complex(u, states[c]).with_cutoff(20);
                    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(lhs.c.size());
                    for (size_t r = 0; r < order.size(); ++r)
                        rhs += L(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                               states[r].with_cutoff(20).c;
                    EXPECT_LT((lhs.c - rhs).norm(), 1e-7);
                }
            }
        }
    }
}

TEST(Lowering, ClosedFormAtIdentity) {
    PhaseVector h(2);
    h << 0.5, -1.0;
    const IndecomposablePoint p{h, MpWord(1), ChainSet{1, 3, {{0}, {1}, {2}, {3}}}};
    const Eigen::MatrixXcd L = lowering_matrix(p, 0, Channel::A);
    const cplx lam = -1.0 + 0.5 * I;
    for (int k = 0; k < 4; ++k) EXPECT_LT(std::abs(L(k, k) - lam), 1e-14);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(L(k - 1, k).real(), std::sqrt(2.0 * k), 1e-14);
    const Eigen::MatrixXcd LB = lowering_matrix(p, 0, Channel::B);
    EXPECT_LT(std::abs(LB(1, 2) - I * std::sqrt(4.0)), 1e-14);
    EXPECT_LT(std::abs(LB(0, 0) - I * lam), 1e-14);
}

TEST(Lowering, NilpotentPartHasOneBlockPerChain) {
    for (int n = 1; n <= 2; ++n) {
        for (const ChainSet& K : enumerate_chain_sets(n, 3)) {
            const IndecomposablePoint p{PhaseVector::Constant(2 * n, 0.4), MpWord(n), K};
            for (int j = 0; j < n; ++j) {
                const Eigen::MatrixXcd L = lowering_matrix(p, j, Channel::A);
                const Eigen::MatrixXcd N = L - L(0, 0) * Eigen::MatrixXcd::Identity(L.rows(), L.cols());
                // chain lengths along e_j: one chain per member with k_j = 0
                std::vector<int> lengths;
                for (const auto& k : K.members) {
                    if (k[static_cast<size_t>(j)] != 0) continue;
                    int len = 0;
                    MultiIndex m = k;
                    while (K.members.count(m)) {
                        ++len;
                        ++m[static_cast<size_t>(j)];
                    }
                    lengths.push_back(len);
                }
                for (int pw = 0; pw <= 4; ++pw) {
                    int expected = 0;
                    for (int len : lengths) expected += std::max(len - pw, 0);
                    Eigen::FullPivLU<Eigen::MatrixXcd> lu(power(N, pw));
                    lu.setThreshold(1e-10);
                    EXPECT_EQ(lu.rank(), expected);
                }
            }
        }
    }
}

TEST(Lowering, RejectsSetsNotClosedUnderLowering) {
    const IndecomposablePoint p{PhaseVector::Zero(2), MpWord(1), ChainSet{1, 2, {{0}, {2}}}};
    EXPECT_THROW(lowering_matrix(p, 0, Channel::A), std::domain_error);
    EXPECT_THROW(lowering_matrix(p, 1, Channel::A), std::out_of_range);
}
