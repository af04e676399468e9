// Heisenberg group, metaplectic generator words, the semidirect product G,
// and the Sp(2n) action on the Siegel upper half space.
#pragma once

#include "symplectic/weyl_core.hpp"

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <variant>
#include <vector>

namespace symplectic {

using cplx = std::complex<double>;
using SiegelPoint = Eigen::MatrixXcd;

struct HeisenbergElement {
    PhaseVector v;
    double t = 0.0;
};

// (v, t)(w, s) = (v + w, t + s + omega0(v, w) / 2)
HeisenbergElement heis_mul(const HeisenbergElement& x, const HeisenbergElement& y);
HeisenbergElement heis_inverse(const HeisenbergElement& x);

// f(x) -> r f(A^T x) with r^2 = det A
struct GLLetter {
    Eigen::MatrixXd A;
    cplx r;
};
// f(x) -> exp(-(i/2) <Bx, x>) f(x), B symmetric
struct QuadLetter {
    Eigen::MatrixXd B;
};
// f(x) -> (i / 2pi)^{n/2} int exp(i <x, y>) f(y) dy, with i^{1/2} = exp(i pi / 4)
struct FourierLetter {};

using MpLetter = std::variant<GLLetter, QuadLetter, FourierLetter>;

// A metaplectic element written as a word in generator letters.  The word
// g_1 g_2 ... g_m acts as L(g_1) L(g_2) ... L(g_m).
class MpWord {
public:
    explicit MpWord(int n);

    static MpWord gl(const Eigen::MatrixXd& A, cplx r);
    // GL letter with the principal root of det A
    static MpWord gl(const Eigen::MatrixXd& A);
    static MpWord quad(const Eigen::MatrixXd& B);
    static MpWord fourier(int n);

    int dim() const { return n_; }
    const std::vector<MpLetter>& letters() const { return letters_; }
    bool empty() const { return letters_.empty(); }

    MpWord operator*(const MpWord& o) const;
    MpWord inverse() const;
    MpWord power(int k) const;

private:
    int n_;
    std::vector<MpLetter> letters_;
    void push(const MpLetter& l);
};

// Projection to Sp(2n): GL -> diag(A, A^{-T}), Quad -> (I, B; 0, I), Fourier -> (0, -I; I, 0).
Eigen::MatrixXd mp_to_sp(const MpWord& w);
Eigen::MatrixXd letter_to_sp(const MpLetter& l, int n);

// A word projecting to the symplectic matrix S, built from the block LDU
// factorization (F Quad(-C A^{-1}) F^{-1}) GL(A) Quad(A^{-1} B) with principal
// roots, after a Fourier shift when A is singular.  Continuous at S = I.
MpWord mp_word_from_sp(const Eigen::MatrixXd& S);

// Action on Heisenberg coordinates h = (x, y): L(w) pi(h) L(w)^{-1} = pi(heisenberg_action(w) h).
// Equals P mp_to_sp(w) P with P = diag(I, -I).
Eigen::MatrixXd heisenberg_action(const MpWord& w);

// Symplectic matrix S with L(w) f_T proportional to f_{siegel_act(S, T)},
// where f_T(x) = exp(pi i <x, T x>).  Equals D heisenberg_action(w)^{-T} D^{-1}, D = diag(2 pi I, I).
Eigen::MatrixXd siegel_matrix(const MpWord& w);

// T -> (D T - C)(-B T + A)^{-1} for S = (A, B; C, D).  Throws std::domain_error on a
// singular denominator or if the image leaves the Siegel space.
SiegelPoint siegel_act(const Eigen::MatrixXd& S, const SiegelPoint& T);

// The standard left Moebius matrix S^{-T} realizing the same map by (aT + b)(cT + d)^{-1}.
Eigen::MatrixXd to_left_mobius(const Eigen::MatrixXd& S);

// Throws std::invalid_argument unless T = T^T and Im T is positive definite.
void validate_siegel(const SiegelPoint& T, double tol = 1e-12);

// Letter action on the quadratic part of exp(i (x^T Q x / 2 + b^T x)):
// returns the new Q and the multiplicative factor on the amplitude that does not
// depend on b.  Fourier uses the principal branch of det(-iQ)^{-1/2} eigenvalue-wise.
std::pair<Eigen::MatrixXcd, cplx> letter_on_quadratic(const MpLetter& l, const Eigen::MatrixXcd& Q);

// c(w, T) with L(w) f_T = c f_{w(T)}, accumulated letter by letter.  With
// S = siegel_matrix(w) one has c^2 det(-B T + A) = 1.
cplx mp_cocycle(const MpWord& w, const SiegelPoint& T);

// Semidirect product element (h, t, g).
struct GElement {
    PhaseVector h;
    double t = 0.0;
    MpWord g;
};

// (h1, t1, g1)(h2, t2, g2) = (h2 + R2^{-1} h1, t1 + t2 + omega0(R2^{-1} h1, h2) / 2, g1 g2)
// with R2 = heisenberg_action(g2).
GElement g_mul(const GElement& x, const GElement& y);
GElement g_inverse(const GElement& x);

// prod_k sqrt(lambda_k) over eigenvalues of M, principal branch per eigenvalue.
cplx sqrt_det_principal(const Eigen::MatrixXcd& M);

}  // namespace symplectic
