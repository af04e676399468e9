// Coherent states f_{h,T}, their annihilation eigenvalues, the G-orbit on
// coherent points, and chain-incident index sets for the lowering modules.
#pragma once

#include "symplectic/rep_engine.hpp"

#include <set>
#include <vector>

namespace symplectic {

struct CoherentPoint {
    PhaseVector h;
    SiegelPoint T;
};

// pi(h, 0) applied to the Gaussian exp(-(i/2) z^T T^{-1} z), i.e. Q = -T^{-1}.
// Its annihilators are sigma(a_j + sum_i T_ji b_i), j = 1..n.
GaussianState coherent_state(const CoherentPoint& p);

// Eigenvalue labels.  Channel A has eigenvalue (h2 + T h1)_j, channel B has
// i (h2 + T h1)_j.  Both operators annihilate f_{0,T}.
enum class Channel { A, B };

// The complex phase vector u with sigma(u) the channel operator for index j.
Eigen::VectorXcd annihilator(const SiegelPoint& T, int j, Channel channel);

// Real complex structure J_T with span{v - i J_T v} = span of the annihilators.
// J_{iI} = standard_complex_structure(n).
Eigen::MatrixXd complex_structure_from_siegel(const SiegelPoint& T);

struct EigenvalueReport {
    cplx eigenvalue;
    // L^2 size of the non-constant part of the prefactor, relative to the state
    double residual;
};

// sigma(u) psi = i ((u_a + Q u_b).z + u_b.b) psi for a Gaussian psi.  The
// eigenvalue is the prefactor at the mean position; residual measures how far the
// prefactor is from constant.
EigenvalueReport operator_on_gaussian(const Eigen::VectorXcd& u, const GaussianState& s);

// Throws std::logic_error when the prefactor is not constant to tol.
cplx annihilation_eigenvalue(const CoherentPoint& p, int j, Channel channel, double tol = 1e-10);
Eigen::VectorXcd annihilation_eigenvalues(const CoherentPoint& p, Channel channel, double tol = 1e-10);

// Closed forms (h2 + T h1) and i (h2 + T h1).
Eigen::VectorXcd predicted_eigenvalues(const CoherentPoint& p, Channel channel);

// For h1 > 0 componentwise: T_h = diag(h2) + i diag(h1) with h~ = (1, ..., 1; 0, ..., 0).
CoherentPoint reciprocal_point(const PhaseVector& h);

// Right action of G on coherent points: (h0, T).(h, t, w) = (h + R(w^{-1}) h0, T')
// where R = heisenberg_action and L(w^{-1}) f_{0,T} is proportional to f_{0,T'}.
CoherentPoint g_orbit_act(const GElement& g, const CoherentPoint& p);

// The state-level counterpart pi(h, t) L(w^{-1}) psi.
GaussianState g_state_act(const GElement& g, const GaussianState& psi);

// w_T = Quad(-U) GL(V^{1/2}) with -T^{-1} = U + iV, so L(w_T) f_{0,iI} is proportional to f_{0,T}.
MpWord normalizing_word(const SiegelPoint& T);

// Displacement after moving T to iI along the orbit: R(w_T)^{-1} h.
PhaseVector normalized_displacement(const CoherentPoint& p);

// An element g with p0.g = p1.
GElement transitivity_witness(const CoherentPoint& p0, const CoherentPoint& p1);

// Generated by the A-channel operators only, or by both channels.
enum class AlgebraTag { Polynomial, Doubled };

// One-dimensional representations are equivalent iff their characters agree,
// i.e. the joint eigenvalue vectors coincide.
bool equivalent_irreducible(const CoherentPoint& p, const CoherentPoint& q, AlgebraTag tag = AlgebraTag::Polynomial,
                            double tol = 1e-9);

// ------------------------------------------------------------------ chain-incident sets

using MultiIndex = std::vector<int>;

struct ChainSet {
    int n = 1;
    int N = 0;
    std::set<MultiIndex> members;
};

// every k in the set has all k - e_i (k_i > 0) in the set, and 0 is a member
bool is_chain_incident(const ChainSet& K);

// All chain-incident subsets of {k : |k| <= N}, sorted canonically.  Requires
// at most 24 candidate indices.
std::vector<ChainSet> enumerate_chain_sets(int n, int N);

// Axes i (zero based) with some member having k_i >= 1.
std::set<int> singular_support(const ChainSet& K);

struct IndecomposablePoint {
    PhaseVector h;
    MpWord g;
    ChainSet K;
};

// Matrix of the channel operator sigma(S u_j), S = mp_to_sp(g), u_j the iI
// annihilator, on the span of pi(h) L(g) h_k for k in K (ordered as in K.members).
// Column k holds the eigenvalue on the diagonal and the lowering coefficient
// sqrt(2 k_j) (channel A) or i sqrt(2 k_j) (channel B) in row k - e_j.
Eigen::MatrixXcd lowering_matrix(const IndecomposablePoint& p, int j, Channel channel);

}  // namespace symplectic
