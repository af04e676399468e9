#include "symplectic/coherent_class.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace symplectic {

namespace {

const cplx I_UNIT{0.0, 1.0};

int half_dim(const SiegelPoint& T) { return static_cast<int>(T.rows()); }

void check_point(const CoherentPoint& p) {
    validate_siegel(p.T, 1e-10);
    if (p.h.size() != 2 * p.T.rows()) throw std::invalid_argument("coherent point: dimension mismatch");
}

// omega0 extended bilinearly to complex vectors
cplx omega_complex(const Eigen::VectorXcd& v, const Eigen::VectorXcd& w) {
    const Eigen::Index n = v.size() / 2;
    return (v.head(n).transpose() * w.tail(n))(0) - (v.tail(n).transpose() * w.head(n))(0);
}

Eigen::MatrixXcd siegel_inverse(const SiegelPoint& T) { return T.fullPivLu().inverse(); }

Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& V) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (V + V.transpose()));
    return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

GaussianState coherent_state(const CoherentPoint& p) {
    check_point(p);
    const int n = half_dim(p.T);
    GaussianState s;
    s.Q = -siegel_inverse(p.T);
    s.Q = 0.5 * (s.Q + s.Q.transpose()).eval();
    s.b = Eigen::VectorXcd::Zero(n);
    return pi_act_gaussian(p.h, 0.0, s);
}

Eigen::VectorXcd annihilator(const SiegelPoint& T, int j, Channel channel) {
    const int n = half_dim(T);
    if (j < 0 || j >= n) throw std::out_of_range("annihilator: index out of range");
    Eigen::VectorXcd u(2 * n);
    u.head(n) = Eigen::VectorXcd::Unit(n, j);
    u.tail(n) = T.col(j);
    return channel == Channel::A ? (-I_UNIT * u).eval() : u;
}

Eigen::MatrixXd complex_structure_from_siegel(const SiegelPoint& T) {
    validate_siegel(T, 1e-10);
    const int n = half_dim(T);
    const Eigen::MatrixXd U = T.real();
    const Eigen::MatrixXd V = T.imag();
    const Eigen::MatrixXd Vinv = V.llt().solve(Eigen::MatrixXd::Identity(n, n));
    // v = (p, q) real; v - iJv = (c, Tc) with c = p + i s, s = V^{-1}(U p - q)
    Eigen::MatrixXd J(2 * n, 2 * n);
    const Eigen::MatrixXd s_p = Vinv * U;
    const Eigen::MatrixXd s_q = -Vinv;
    J.topLeftCorner(n, n) = -s_p;
    J.topRightCorner(n, n) = -s_q;
    J.bottomLeftCorner(n, n) = -(V + U * s_p);
    J.bottomRightCorner(n, n) = -(U * s_q);
    return J;
}

EigenvalueReport operator_on_gaussian(const Eigen::VectorXcd& u, const GaussianState& s) {
    const int n = s.dim();
    if (u.size() != 2 * n) throw std::invalid_argument("operator_on_gaussian: dimension mismatch");
    const Eigen::VectorXcd ua = u.head(n);
    const Eigen::VectorXcd ub = u.tail(n);
    const Eigen::VectorXcd w = ua + s.Q * ub;
    const Eigen::MatrixXd P = s.Q.imag();
    Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() != Eigen::Success) throw std::domain_error("operator_on_gaussian: Im Q not positive definite");
    const Eigen::VectorXd mean = -llt.solve(s.b.imag());
    const cplx constant = (ub.transpose() * s.b)(0);
    EigenvalueReport r;
    r.eigenvalue = I_UNIT * ((w.transpose() * mean.cast<cplx>())(0) + constant);
    // |psi|^2 has covariance P^{-1} / 2
    const Eigen::MatrixXcd cov = 0.5 * llt.solve(Eigen::MatrixXd::Identity(n, n)).cast<cplx>();
    r.residual = std::sqrt(std::max(0.0, (w.adjoint() * cov * w)(0).real()));
    return r;
}

cplx annihilation_eigenvalue(const CoherentPoint& p, int j, Channel channel, double tol) {
    const GaussianState s = coherent_state(p);
    const EigenvalueReport r = operator_on_gaussian(annihilator(p.T, j, channel), s);
    if (r.residual > tol) throw std::logic_error("annihilation_eigenvalue: prefactor is not constant");
    return r.eigenvalue;
}

Eigen::VectorXcd annihilation_eigenvalues(const CoherentPoint& p, Channel channel, double tol) {
    const int n = half_dim(p.T);
    Eigen::VectorXcd out(n);
    for (int j = 0; j < n; ++j) out(j) = annihilation_eigenvalue(p, j, channel, tol);
    return out;
}

Eigen::VectorXcd predicted_eigenvalues(const CoherentPoint& p, Channel channel) {
    const int n = half_dim(p.T);
    const Eigen::VectorXcd lam = p.h.tail(n).cast<cplx>() + p.T * p.h.head(n).cast<cplx>();
    return channel == Channel::A ? lam : (I_UNIT * lam).eval();
}

CoherentPoint reciprocal_point(const PhaseVector& h) {
    const Eigen::Index n = h.size() / 2;
    if (h.size() != 2 * n || n == 0) throw std::invalid_argument("reciprocal_point: odd length");
    if ((h.head(n).array() <= 0.0).any()) throw std::domain_error("reciprocal_point: needs h1 > 0");
    CoherentPoint p;
    p.h = PhaseVector::Zero(2 * n);
    p.h.head(n).setOnes();
    p.T = h.tail(n).cast<cplx>().asDiagonal();
    p.T.diagonal() += I_UNIT * h.head(n).cast<cplx>();
    return p;
}

GaussianState g_state_act(const GElement& g, const GaussianState& psi) {
    return pi_act_gaussian(g.h, g.t, mp_act_gaussian(g.g.inverse(), psi));
}

CoherentPoint g_orbit_act(const GElement& g, const CoherentPoint& p) {
    check_point(p);
    const int n = half_dim(p.T);
    if (g.g.dim() != n || g.h.size() != 2 * n) throw std::invalid_argument("g_orbit_act: dimension mismatch");
    const MpWord winv = g.g.inverse();
    GaussianState base;
    base.Q = -siegel_inverse(p.T);
    base.b = Eigen::VectorXcd::Zero(n);
    const GaussianState moved = mp_act_gaussian(winv, base);
    CoherentPoint out;
    out.h = g.h + heisenberg_action(winv) * p.h;
    out.T = -siegel_inverse(moved.Q);
    out.T = 0.5 * (out.T + out.T.transpose()).eval();
    return out;
}

MpWord normalizing_word(const SiegelPoint& T) {
    validate_siegel(T, 1e-10);
    const Eigen::MatrixXcd Q = -siegel_inverse(T);
    const Eigen::MatrixXd U = 0.5 * (Q.real() + Q.real().transpose());
    const Eigen::MatrixXd V = 0.5 * (Q.imag() + Q.imag().transpose());
    return MpWord::quad(-U) * MpWord::gl(sym_sqrt(V));
}

PhaseVector normalized_displacement(const CoherentPoint& p) {
    check_point(p);
    return heisenberg_action(normalizing_word(p.T)).fullPivLu().solve(p.h);
}

GElement transitivity_witness(const CoherentPoint& p0, const CoherentPoint& p1) {
    check_point(p0);
    check_point(p1);
    if (p0.T.rows() != p1.T.rows()) throw std::invalid_argument("transitivity_witness: dimension mismatch");
    const MpWord w = normalizing_word(p0.T) * normalizing_word(p1.T).inverse();
    return GElement{p1.h - heisenberg_action(w.inverse()) * p0.h, 0.0, w};
}

bool equivalent_irreducible(const CoherentPoint& p, const CoherentPoint& q, AlgebraTag tag, double tol) {
    if (p.T.rows() != q.T.rows()) return false;
    const Eigen::VectorXcd dA = annihilation_eigenvalues(p, Channel::A) - annihilation_eigenvalues(q, Channel::A);
    if (dA.cwiseAbs().maxCoeff() > tol) return false;
    if (tag == AlgebraTag::Doubled) {
        const Eigen::VectorXcd dB =
            annihilation_eigenvalues(p, Channel::B) - annihilation_eigenvalues(q, Channel::B);
        if (dB.cwiseAbs().maxCoeff() > tol) return false;
    }
    return true;
}

// ------------------------------------------------------------------ chain-incident sets

bool is_chain_incident(const ChainSet& K) {
    if (!K.members.count(MultiIndex(static_cast<size_t>(K.n), 0))) return false;
    for (const auto& k : K.members) {
        if (static_cast<int>(k.size()) != K.n) return false;
        int level = 0;
        for (int v : k) {
            if (v < 0) return false;
            level += v;
        }
        if (level > K.N) return false;
        for (int i = 0; i < K.n; ++i) {
            if (k[static_cast<size_t>(i)] == 0) continue;
            MultiIndex below = k;
            --below[static_cast<size_t>(i)];
            if (!K.members.count(below)) return false;
        }
    }
    return true;
}

std::vector<ChainSet> enumerate_chain_sets(int n, int N) {
    if (n < 1 || N < 0) throw std::invalid_argument("enumerate_chain_sets: bad dimension or cutoff");
    const auto basis = fock_basis(n, N);
    if (basis->size() > 24) throw std::length_error("enumerate_chain_sets: more than 24 candidate indices");
    // Level order lists every predecessor before its successors, so each
    // candidate can be decided once its predecessors are known.
    std::vector<MultiIndex> cand;
    for (Eigen::Index i = 0; i < basis->size(); ++i) cand.push_back(basis->index(i));
    std::vector<ChainSet> out;
    ChainSet cur{n, N, {cand.front()}};
    std::function<void(size_t)> rec = [&](size_t i) {
        if (i == cand.size()) {
            out.push_back(cur);
            return;
        }
        rec(i + 1);
        const MultiIndex& k = cand[i];
        for (int a = 0; a < n; ++a) {
            if (k[static_cast<size_t>(a)] == 0) continue;
            MultiIndex below = k;
            --below[static_cast<size_t>(a)];
            if (!cur.members.count(below)) return;
        }
        cur.members.insert(k);
        rec(i + 1);
        cur.members.erase(k);
    };
    rec(1);
    std::sort(out.begin(), out.end(),
              [](const ChainSet& x, const ChainSet& y) { return x.members < y.members; });
    return out;
}

std::set<int> singular_support(const ChainSet& K) {
    std::set<int> out;
    for (const auto& k : K.members)
        for (int i = 0; i < static_cast<int>(k.size()); ++i)
            if (k[static_cast<size_t>(i)] >= 1) out.insert(i);
    return out;
}

Eigen::MatrixXcd lowering_matrix(const IndecomposablePoint& p, int j, Channel channel) {
    const int n = p.K.n;
    if (p.g.dim() != n || p.h.size() != 2 * n) throw std::invalid_argument("lowering_matrix: dimension mismatch");
    if (j < 0 || j >= n) throw std::out_of_range("lowering_matrix: direction out of range");
    if (p.K.members.empty()) throw std::invalid_argument("lowering_matrix: empty index set");
    std::vector<MultiIndex> order(p.K.members.begin(), p.K.members.end());
    std::map<MultiIndex, Eigen::Index> where;
    for (size_t i = 0; i < order.size(); ++i) where[order[i]] = static_cast<Eigen::Index>(i);

    const SiegelPoint iI = I_UNIT * Eigen::MatrixXcd::Identity(n, n);
    const Eigen::VectorXcd u = mp_to_sp(p.g).cast<cplx>() * annihilator(iI, j, channel);
    Eigen::VectorXcd ph = p.h.cast<cplx>();
    ph.tail(n) *= -1.0;
    const cplx lambda = I_UNIT * omega_complex(ph, u);
    const cplx step = channel == Channel::A ? cplx(1.0, 0.0) : I_UNIT;

    const Eigen::Index m = static_cast<Eigen::Index>(order.size());
    Eigen::MatrixXcd L = lambda * Eigen::MatrixXcd::Identity(m, m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const MultiIndex& k = order[static_cast<size_t>(c)];
        const int kj = k[static_cast<size_t>(j)];
        if (kj == 0) continue;
        MultiIndex below = k;
        --below[static_cast<size_t>(j)];
        auto it = where.find(below);
        if (it == where.end()) throw std::domain_error("lowering_matrix: index set not closed under lowering");
        L(it->second, c) = step * std::sqrt(2.0 * kj);
    }
    return L;
}

}  // namespace symplectic
