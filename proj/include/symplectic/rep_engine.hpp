// Schroedinger and metaplectic representations on two models: closed-form
// Gaussians and a truncated Hermite (Fock) basis.
//
// Operator conventions on L^2(R^n):
//   sigma(a_j) = i x_j,  sigma(b_j) = d/dx_j,   [sigma(v), sigma(w)] = -i omega0(v, w)
//   pi((x, y), t) f(z) = exp(i (t + x.z - x.y / 2)) f(z - y) = e^{it} exp(sigma(x, -y))
//   L_*(q) = -i sigma(q) for q in the quadratic subalgebra, so that
//   L(word for exp(M)) = exp(L_*(ad^{-1} M)).
#pragma once

#include "symplectic/group_kernel.hpp"

#include <Eigen/Sparse>

#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace symplectic {

// psi(z) = amplitude * exp(i (z^T Q z / 2 + b^T z)), Im Q positive definite.
struct GaussianState {
    cplx amplitude{1.0, 0.0};
    Eigen::MatrixXcd Q;
    Eigen::VectorXcd b;

    int dim() const { return static_cast<int>(Q.rows()); }
};

// f_T(x) = exp(pi i x^T T x): amplitude 1, Q = 2 pi T, b = 0.
GaussianState gaussian_from_siegel(const SiegelPoint& T);

GaussianState pi_act_gaussian(const PhaseVector& h, double t, const GaussianState& s);
GaussianState mp_act_gaussian(const MpWord& w, const GaussianState& s);
GaussianState mp_act_gaussian(const MpLetter& l, const GaussianState& s);

cplx gaussian_eval(const GaussianState& s, const Eigen::VectorXd& z);
double gaussian_norm(const GaussianState& s);
// <s1, s2> = int conj(s1) s2
cplx gaussian_inner(const GaussianState& s1, const GaussianState& s2);

// Multi-indices k with |k| <= N, ordered by level and lexicographically
// within a level, so the basis for a smaller cutoff is a prefix.
class FockBasis {
public:
    using Index = std::vector<int>;

    FockBasis(int n, int N);

    int n() const { return n_; }
    int cutoff() const { return N_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(indices_.size()); }
    const Index& index(Eigen::Index i) const { return indices_[static_cast<size_t>(i)]; }
    // -1 when |k| > N or k has a negative entry
    Eigen::Index position(const Index& k) const;
    int level(Eigen::Index i) const { return levels_[static_cast<size_t>(i)]; }
    // number of basis vectors with |k| <= m
    Eigen::Index prefix_size(int m) const;

private:
    int n_, N_;
    std::vector<Index> indices_;
    std::vector<int> levels_;
    std::map<Index, Eigen::Index> lookup_;
};

// Shared, cached basis (thread safe).
std::shared_ptr<const FockBasis> fock_basis(int n, int N);

struct FockVector {
    int n = 1;
    int N = 0;
    Eigen::VectorXcd c;

    static FockVector zero(int n, int N);
    static FockVector basis_vector(const FockBasis::Index& k, int N);

    cplx coeff(const FockBasis::Index& k) const;
    // embed into or truncate to a new cutoff
    FockVector with_cutoff(int cutoff) const;
    double norm() const { return c.norm(); }
    // coefficient norm restricted to levels |k| <= m
    double block_norm(int m) const;
};

using FockMatrix = Eigen::SparseMatrix<cplx>;

// Exact matrix elements <h_k, x_j h_l> (rows: cutoff N_out, cols: cutoff N_in).
FockMatrix position_matrix(int n, int j, int N_in, int N_out);
FockMatrix derivative_matrix(int n, int j, int N_in, int N_out);
// sigma(v) for complex v = (a-part, b-part).
FockMatrix sigma_matrix(const Eigen::VectorXcd& v, int N_in, int N_out);

// Raises the cutoff by one; exact.
FockVector sigma_fock(const PhaseVector& v, const FockVector& f);
// complex combinations such as v - i J0 v
FockVector sigma_fock_complex(const Eigen::VectorXcd& v, const FockVector& f);

// Exact matrix elements of L_*(q) for a symmetric quadratic
// q = sum aa a a + sum bb b b + sum ab (a b + b a)/2.
FockMatrix lstar_matrix(const SymmetricQuadratic& q, int n, int N_in, int N_out);
FockMatrix lstar_matrix(const SymmetricQuadratic& q, int n, int N);

// exp(G) v by scaled Taylor steps; G square.
Eigen::VectorXcd expm_apply(const FockMatrix& G, const Eigen::VectorXcd& v);

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FockOptions {
    // extra levels carried while applying exponentials
    int pad = 24;
    // result cutoff; negative means the input cutoff
    int out_cutoff = -1;
    // relative coefficient mass allowed in the top four padded levels
    double tail_tol = 1e-6;
};

FockVector mp_act_fock(const MpWord& w, const FockVector& f, const FockOptions& opt = {});
FockVector pi_act_fock(const PhaseVector& h, double t, const FockVector& f, const FockOptions& opt = {});

// Orthonormal Hermite functions.
double hermite_1d(int k, double x);
double hermite_eval(const FockBasis::Index& k, const Eigen::VectorXd& x);
// all h_0..h_kmax at x
Eigen::VectorXd hermite_table(int kmax, double x);

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
// Gauss-Hermite rule for weight exp(-x^2) (Golub-Welsch).
QuadratureRule gauss_hermite(int m);
// Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int m);

// Coefficients <h_k, psi> for |k| <= N, by the ladder recursion
// (I - iQ) a psi = (I + iQ) a^dagger psi + i sqrt(2) b psi.
FockVector project_gaussian(const GaussianState& s, int N);

// H0 = -(1/2) sum (x_j^2 - d^2/dx_j^2): eigenvalue -(|k| + n/2) on h_k.
FockVector oscillator_apply(const FockVector& f);
// sum (x_j^2 - d^2/dx_j^2): eigenvalue mu_k = 2|k| + n.  Equals -2 H0.
FockVector oscillator_level_apply(const FockVector& f);
// number of k with |k| = level in dimension n, counted from the basis
long long oscillator_multiplicity(int n, int level);

// Quantized quadratic Hamiltonian H(z) = <z, Qm z> (Qm complex symmetric 2n x 2n).
// Built from q = sp_to_weyl(A^T), A = J0 grad^2 H = 2 J0 Qm, with a and b exchanged,
// and returned as the operator 𝓗 = i L_*(swapped q).  Then -i 𝓗 generates the
// metaplectic flow whose Heisenberg action is exp(tA).
FockMatrix quantize_quadratic(const Eigen::MatrixXcd& Qm, int N_in, int N_out);

// Operator part of the Lie derivative along the linear field X(z) = M z on a
// constant section of the trivial spinor bundle:
// (i/2) sum_j (sigma(M a_j) sigma(b_j) - sigma(M b_j) sigma(a_j)).
FockMatrix lie_derivative_matrix(const Eigen::MatrixXd& M, int N_in, int N_out);
// Cutoff raised by two; exact.
FockVector lie_derivative_flat(const Eigen::MatrixXd& M, const FockVector& f);

// Exchange a and b in a symmetric quadratic.
SymmetricQuadratic swap_ab(const SymmetricQuadratic& q);

}  // namespace symplectic
