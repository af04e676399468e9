#include "symplectic/group_kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace symplectic {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_phase(const PhaseVector& v, Eigen::Index dim2) {
    if (v.size() != dim2) throw std::invalid_argument("phase vector dimension mismatch");
}

Eigen::MatrixXd sign_flip(int n) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    p.bottomRightCorner(n, n) *= -1.0;
    return p;
}

}  // namespace

HeisenbergElement heis_mul(const HeisenbergElement& x, const HeisenbergElement& y) {
    require_phase(y.v, x.v.size());
    return {x.v + y.v, x.t + y.t + 0.5 * omega0(x.v, y.v)};
}

HeisenbergElement heis_inverse(const HeisenbergElement& x) { return {-x.v, -x.t}; }

MpWord::MpWord(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("metaplectic word dimension must be positive");
}

void MpWord::push(const MpLetter& l) { letters_.push_back(l); }

MpWord MpWord::gl(const Eigen::MatrixXd& A, cplx r) {
    if (A.rows() != A.cols() || A.rows() == 0) throw std::invalid_argument("GL letter: A not square");
    const double det = A.determinant();
    if (std::abs(det) < 1e-14) throw std::invalid_argument("GL letter: singular A");
    if (std::abs(r * r - det) >= 1e-10) throw std::invalid_argument("GL letter: r^2 != det A");
    MpWord w(static_cast<int>(A.rows()));
    w.push(GLLetter{A, r});
    return w;
}

MpWord MpWord::gl(const Eigen::MatrixXd& A) {
    return gl(A, std::sqrt(cplx(A.determinant(), 0.0)));
}

MpWord MpWord::quad(const Eigen::MatrixXd& B) {
    if (B.rows() != B.cols() || B.rows() == 0) throw std::invalid_argument("Quad letter: B not square");
    if ((B - B.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("Quad letter: B not symmetric");
    MpWord w(static_cast<int>(B.rows()));
    w.push(QuadLetter{0.5 * (B + B.transpose())});
    return w;
}

MpWord MpWord::fourier(int n) {
    MpWord w(n);
    w.push(FourierLetter{});
    return w;
}

MpWord MpWord::operator*(const MpWord& o) const {
    if (n_ != o.n_) throw std::invalid_argument("word dimension mismatch");
    MpWord out = *this;
    for (const auto& l : o.letters_) out.push(l);
    return out;
}

MpWord MpWord::inverse() const {
    MpWord out(n_);
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
        if (const auto* g = std::get_if<GLLetter>(&*it)) {
            out.push(GLLetter{g->A.inverse(), 1.0 / g->r});
        } else if (const auto* q = std::get_if<QuadLetter>(&*it)) {
            out.push(QuadLetter{-q->B});
        } else {
            // F^4 = (-1)^n, so F^{-1} = (-1)^n F^3
            for (int k = 0; k < 3; ++k) out.push(FourierLetter{});
            out.push(GLLetter{Eigen::MatrixXd::Identity(n_, n_), n_ % 2 ? -1.0 : 1.0});
        }
    }
    return out;
}

MpWord MpWord::power(int k) const {
    if (k < 0) return inverse().power(-k);
    MpWord out(n_);
    for (int i = 0; i < k; ++i) out = out * *this;
    return out;
}

Eigen::MatrixXd letter_to_sp(const MpLetter& l, int n) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    if (const auto* g = std::get_if<GLLetter>(&l)) {
        s.topLeftCorner(n, n) = g->A;
        s.bottomRightCorner(n, n) = g->A.transpose().inverse();
    } else if (const auto* q = std::get_if<QuadLetter>(&l)) {
        s.topRightCorner(n, n) = q->B;
    } else {
        s.setZero();
        s.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
        s.bottomLeftCorner(n, n).setIdentity();
    }
    return s;
}

Eigen::MatrixXd mp_to_sp(const MpWord& w) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2 * w.dim(), 2 * w.dim());
    for (const auto& l : w.letters()) s = s * letter_to_sp(l, w.dim());
    return s;
}

MpWord mp_word_from_sp(const Eigen::MatrixXd& S) {
    if (S.rows() != S.cols() || S.rows() % 2 != 0 || S.rows() == 0)
        throw std::invalid_argument("mp_word_from_sp: shape");
    if (!is_symplectic(S, 1e-8 * (1.0 + S.cwiseAbs().maxCoeff() * S.cwiseAbs().maxCoeff())))
        throw std::invalid_argument("mp_word_from_sp: matrix is not symplectic");
    const int n = static_cast<int>(S.rows() / 2);
    const auto ldu = [n](const Eigen::MatrixXd& s) {
        const Eigen::MatrixXd a = s.topLeftCorner(n, n), b = s.topRightCorner(n, n),
                              c = s.bottomLeftCorner(n, n);
        if (std::abs(a.determinant()) < 1e-12) throw std::domain_error("mp_word_from_sp: no LDU factorization");
        const Eigen::MatrixXd ai = a.inverse();
        const Eigen::MatrixXd lower = c * ai, upper = ai * b;
        const MpWord f = MpWord::fourier(n);
        return f * MpWord::quad(-0.5 * (lower + lower.transpose())) * f.inverse() * MpWord::gl(a) *
               MpWord::quad(0.5 * (upper + upper.transpose()));
    };
    const double scale = std::pow(S.cwiseAbs().maxCoeff(), n);
    if (std::abs(S.topLeftCorner(n, n).determinant()) > 1e-8 * (1.0 + scale)) return ldu(S);
    // S = F (F^{-1} S); the top-left block of F^{-1} S is C
    const MpWord f = MpWord::fourier(n);
    const Eigen::MatrixXd rest = letter_to_sp(FourierLetter{}, n).inverse() * S;
    if (std::abs(rest.topLeftCorner(n, n).determinant()) > 1e-8 * (1.0 + scale)) return f * ldu(rest);
    // A and C both singular: shift by a quadratic letter first
    const Eigen::MatrixXd shifted = letter_to_sp(QuadLetter{Eigen::MatrixXd::Identity(n, n)}, n).inverse() * rest;
    return f * MpWord::quad(Eigen::MatrixXd::Identity(n, n)) * ldu(shifted);
}

Eigen::MatrixXd heisenberg_action(const MpWord& w) {
    const Eigen::MatrixXd p = sign_flip(w.dim());
    return p * mp_to_sp(w) * p;
}

Eigen::MatrixXd siegel_matrix(const MpWord& w) {
    const int n = w.dim();
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    d.topLeftCorner(n, n) *= kTwoPi;
    const Eigen::MatrixXd rh = heisenberg_action(w);
    return d * rh.transpose().inverse() * d.inverse();
}

void validate_siegel(const SiegelPoint& T, double tol) {
    if (T.rows() != T.cols() || T.rows() == 0) throw std::invalid_argument("Siegel point not square");
    if ((T - T.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + T.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("Siegel point not symmetric");
    const Eigen::MatrixXd im = 0.5 * (T.imag() + T.imag().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im);
    if (es.eigenvalues().minCoeff() <= tol)
        throw std::invalid_argument("Siegel point: imaginary part not positive definite");
}

SiegelPoint siegel_act(const Eigen::MatrixXd& S, const SiegelPoint& T) {
    const Eigen::Index n = T.rows();
    if (S.rows() != 2 * n || S.cols() != 2 * n) throw std::invalid_argument("siegel_act: shape mismatch");
    const Eigen::MatrixXcd A = S.topLeftCorner(n, n).cast<cplx>();
    const Eigen::MatrixXcd B = S.topRightCorner(n, n).cast<cplx>();
    const Eigen::MatrixXcd C = S.bottomLeftCorner(n, n).cast<cplx>();
    const Eigen::MatrixXcd D = S.bottomRightCorner(n, n).cast<cplx>();
    const Eigen::MatrixXcd den = -B * T + A;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(den);
    if (!lu.isInvertible() || std::abs(den.determinant()) < 1e-300)
        throw std::domain_error("siegel_act: singular orbit (-BT + A not invertible)");
    // X den = num  <=>  den^T X^T = num^T
    const Eigen::MatrixXcd num = D * T - C;
    Eigen::MatrixXcd out = den.transpose().fullPivLu().solve(num.transpose()).transpose();
    if ((out - out.transpose()).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + out.cwiseAbs().maxCoeff()))
        throw std::domain_error("siegel_act: image not symmetric (S not symplectic?)");
    out = (0.5 * (out + out.transpose())).eval();
    validate_siegel(out, 0.0);
    return out;
}

Eigen::MatrixXd to_left_mobius(const Eigen::MatrixXd& S) { return S.transpose().inverse(); }

cplx sqrt_det_principal(const Eigen::MatrixXcd& M) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    cplx out = 1.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) out *= std::sqrt(es.eigenvalues()(k));
    return out;
}

std::pair<Eigen::MatrixXcd, cplx> letter_on_quadratic(const MpLetter& l, const Eigen::MatrixXcd& Q) {
    const Eigen::Index n = Q.rows();
    if (const auto* g = std::get_if<GLLetter>(&l)) {
        const Eigen::MatrixXcd A = g->A.cast<cplx>();
        return {A * Q * A.transpose(), g->r};
    }
    if (const auto* q = std::get_if<QuadLetter>(&l)) {
        return {Q - q->B.cast<cplx>(), 1.0};
    }
    const cplx i(0.0, 1.0);
    const Eigen::MatrixXcd M = -i * Q;
    const cplx root_i = std::polar(1.0, std::numbers::pi / 4.0);
    cplx factor = std::pow(root_i, static_cast<double>(n)) / sqrt_det_principal(M);
    Eigen::MatrixXcd Qn = -Q.inverse();
    Qn = (0.5 * (Qn + Qn.transpose())).eval();
    return {Qn, factor};
}

cplx mp_cocycle(const MpWord& w, const SiegelPoint& T) {
    validate_siegel(T);
    if (T.rows() != w.dim()) throw std::invalid_argument("mp_cocycle: dimension mismatch");
    Eigen::MatrixXcd Q = kTwoPi * T;
    cplx c = 1.0;
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
        auto [Qn, f] = letter_on_quadratic(*it, Q);
        Q = Qn;
        c *= f;
    }
    return c;
}

GElement g_mul(const GElement& x, const GElement& y) {
    require_phase(y.h, x.h.size());
    const Eigen::MatrixXd r2 = heisenberg_action(y.g);
    const PhaseVector moved = r2.lu().solve(x.h);
    return {y.h + moved, x.t + y.t + 0.5 * omega0(moved, y.h), x.g * y.g};
}

GElement g_inverse(const GElement& x) {
    const Eigen::MatrixXd r = heisenberg_action(x.g);
    return {-(r * x.h), -x.t, x.g.inverse()};
}

}  // namespace symplectic
