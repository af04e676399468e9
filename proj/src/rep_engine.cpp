#include "symplectic/rep_engine.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>

namespace symplectic {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
    if (got != want) throw std::invalid_argument(what);
}

Eigen::MatrixXcd symmetrize(const Eigen::MatrixXcd& m) { return 0.5 * (m + m.transpose()); }

void check_positive(const GaussianState& s) {
    const Eigen::MatrixXd im = 0.5 * (s.Q.imag() + s.Q.imag().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::logic_error("Gaussian state lost positivity of Im Q");
}

// int exp(-z^T M z / 2 + J^T z) dz for complex symmetric M with Re M > 0
cplx gaussian_integral(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& J) {
    const Eigen::Index n = M.rows();
    const Eigen::VectorXcd mj = M.fullPivLu().solve(J);
    const cplx quad = 0.5 * (J.transpose() * mj)(0, 0);
    return std::pow(2.0 * kPi, 0.5 * static_cast<double>(n)) / sqrt_det_principal(M) * std::exp(quad);
}

}  // namespace

GaussianState gaussian_from_siegel(const SiegelPoint& T) {
    validate_siegel(T);
    const auto n = T.rows();
    return {1.0, 2.0 * kPi * T, Eigen::VectorXcd::Zero(n)};
}

GaussianState pi_act_gaussian(const PhaseVector& h, double t, const GaussianState& s) {
    const int n = s.dim();
    require_dim(h.size(), 2 * n, "pi_act_gaussian: dimension mismatch");
    const Eigen::VectorXcd x = h.head(n).cast<cplx>(), y = h.tail(n).cast<cplx>();
    GaussianState out;
    out.Q = s.Q;
    out.b = s.b - s.Q * y + x;
    const cplx phase = t - 0.5 * (x.transpose() * y)(0, 0) + 0.5 * (y.transpose() * s.Q * y)(0, 0) -
                       (s.b.transpose() * y)(0, 0);
    out.amplitude = s.amplitude * std::exp(kI * phase);
    return out;
}

GaussianState mp_act_gaussian(const MpLetter& l, const GaussianState& s) {
    const int n = s.dim();
    GaussianState out;
    if (const auto* g = std::get_if<GLLetter>(&l)) {
        require_dim(g->A.rows(), n, "mp_act_gaussian: dimension mismatch");
        const Eigen::MatrixXcd A = g->A.cast<cplx>();
        out = {s.amplitude * g->r, symmetrize(A * s.Q * A.transpose()), A * s.b};
    } else if (const auto* q = std::get_if<QuadLetter>(&l)) {
        require_dim(q->B.rows(), n, "mp_act_gaussian: dimension mismatch");
        out = {s.amplitude, s.Q - q->B.cast<cplx>(), s.b};
    } else {
        auto [Qn, factor] = letter_on_quadratic(l, s.Q);
        const Eigen::VectorXcd bn = Qn * s.b;  // -Q^{-1} b
        const cplx phase = 0.5 * (s.b.transpose() * bn)(0, 0);
        out = {s.amplitude * factor * std::exp(kI * phase), Qn, bn};
    }
    check_positive(out);
    return out;
}

GaussianState mp_act_gaussian(const MpWord& w, const GaussianState& s) {
    require_dim(w.dim(), s.dim(), "mp_act_gaussian: dimension mismatch");
    GaussianState out = s;
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) out = mp_act_gaussian(*it, out);
    return out;
}

cplx gaussian_eval(const GaussianState& s, const Eigen::VectorXd& z) {
    require_dim(z.size(), s.dim(), "gaussian_eval: dimension mismatch");
    const Eigen::VectorXcd zc = z.cast<cplx>();
    const cplx e = 0.5 * (zc.transpose() * s.Q * zc)(0, 0) + (s.b.transpose() * zc)(0, 0);
    return s.amplitude * std::exp(kI * e);
}

double gaussian_norm(const GaussianState& s) {
    const Eigen::MatrixXd p = 0.5 * (s.Q.imag() + s.Q.imag().transpose());
    const Eigen::VectorXd ib = s.b.imag();
    const Eigen::LLT<Eigen::MatrixXd> llt(p);
    if (llt.info() != Eigen::Success) throw std::logic_error("gaussian_norm: Im Q not positive definite");
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double expo = ib.dot(llt.solve(ib));
    const double n = static_cast<double>(s.dim());
    const double sq = std::norm(s.amplitude) * std::pow(kPi, 0.5 * n) * std::exp(-0.5 * logdet + expo);
    return std::sqrt(sq);
}

cplx gaussian_inner(const GaussianState& s1, const GaussianState& s2) {
    require_dim(s1.dim(), s2.dim(), "gaussian_inner: dimension mismatch");
    const Eigen::MatrixXcd M = -kI * (s2.Q - s1.Q.conjugate());
    const Eigen::VectorXcd J = kI * (s2.b - s1.b.conjugate());
    return std::conj(s1.amplitude) * s2.amplitude * gaussian_integral(symmetrize(M), J);
}

// ---------------------------------------------------------------- Fock basis

FockBasis::FockBasis(int n, int N) : n_(n), N_(N) {
    if (n < 1 || N < 0) throw std::invalid_argument("FockBasis: bad dimension or cutoff");
    for (int m = 0; m <= N; ++m) {
        // lexicographically descending compositions of m into n parts
        Index k(static_cast<size_t>(n), 0);
        std::vector<Index> level;
        const std::function<void(int, int)> rec = [&](int pos, int left) {
            if (pos == n - 1) {
                k[static_cast<size_t>(pos)] = left;
                level.push_back(k);
                return;
            }
            for (int v = left; v >= 0; --v) {
                k[static_cast<size_t>(pos)] = v;
                rec(pos + 1, left - v);
            }
        };
        rec(0, m);
        for (auto& idx : level) {
            lookup_[idx] = static_cast<Eigen::Index>(indices_.size());
            indices_.push_back(idx);
            levels_.push_back(m);
        }
    }
}

Eigen::Index FockBasis::position(const Index& k) const {
    auto it = lookup_.find(k);
    return it == lookup_.end() ? -1 : it->second;
}

Eigen::Index FockBasis::prefix_size(int m) const {
    if (m < 0) return 0;
    if (m >= N_) return size();
    // number of multi-indices with |k| <= m is C(m + n, n)
    double c = 1.0;
    for (int i = 1; i <= n_; ++i) c = c * (m + i) / i;
    return static_cast<Eigen::Index>(std::llround(c));
}

std::shared_ptr<const FockBasis> fock_basis(int n, int N) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const FockBasis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, N}];
    if (!slot) slot = std::make_shared<const FockBasis>(n, N);
    return slot;
}

FockVector FockVector::zero(int n, int N) {
    return {n, N, Eigen::VectorXcd::Zero(fock_basis(n, N)->size())};
}

FockVector FockVector::basis_vector(const FockBasis::Index& k, int N) {
    const int n = static_cast<int>(k.size());
    FockVector f = zero(n, N);
    const auto pos = fock_basis(n, N)->position(k);
    if (pos < 0) throw std::invalid_argument("basis_vector: index outside cutoff");
    f.c(pos) = 1.0;
    return f;
}

cplx FockVector::coeff(const FockBasis::Index& k) const {
    const auto pos = fock_basis(n, N)->position(k);
    return pos < 0 ? cplx(0.0) : c(pos);
}

FockVector FockVector::with_cutoff(int cutoff) const {
    FockVector out = zero(n, cutoff);
    const auto m = std::min(out.c.size(), c.size());
    out.c.head(m) = c.head(m);
    return out;
}

double FockVector::block_norm(int m) const {
    return c.head(fock_basis(n, N)->prefix_size(m)).norm();
}

// ---------------------------------------------------------------- operators

namespace {

// sign = +1: position x; sign = -1: derivative d/dx
FockMatrix ladder_matrix(int n, int j, int N_in, int N_out, double sign) {
    if (j < 0 || j >= n) throw std::invalid_argument("axis index out of range");
    const auto in = fock_basis(n, N_in), out = fock_basis(n, N_out);
    std::vector<Eigen::Triplet<cplx>> trip;
    for (Eigen::Index c = 0; c < in->size(); ++c) {
        FockBasis::Index k = in->index(c);
        const int kj = k[static_cast<size_t>(j)];
        k[static_cast<size_t>(j)] = kj + 1;
        if (auto r = out->position(k); r >= 0) trip.emplace_back(r, c, sign * std::sqrt((kj + 1) / 2.0));
        if (kj > 0) {
            k[static_cast<size_t>(j)] = kj - 1;
            if (auto r = out->position(k); r >= 0) trip.emplace_back(r, c, std::sqrt(kj / 2.0));
        }
    }
    FockMatrix m(out->size(), in->size());
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

int dim_of_vector(Eigen::Index len) {
    if (len % 2 != 0 || len == 0) throw std::invalid_argument("phase vector must have even length");
    return static_cast<int>(len / 2);
}

void check_tail(const Eigen::VectorXcd& v, int n, int M, double tol, const char* where) {
    const auto basis = fock_basis(n, M);
    const Eigen::Index inner = basis->prefix_size(M - 4);
    const double total = v.norm();
    const double tail = v.tail(v.size() - inner).norm();
    if (total > 0.0 && tail > tol * total)
        throw TruncationError(std::string(where) + ": coefficient mass reached the padded cutoff");
}

// log of a rotation matrix (det = +1) as a real skew matrix
Eigen::MatrixXd rotation_log(const Eigen::MatrixXd& O) {
    const Eigen::Index n = O.rows();
    Eigen::RealSchur<Eigen::MatrixXd> rs(O);
    const Eigen::MatrixXd& T = rs.matrixT();
    const Eigen::MatrixXd& U = rs.matrixU();
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    std::vector<Eigen::Index> minus_one;
    for (Eigen::Index i = 0; i < n;) {
        if (i + 1 < n && std::abs(T(i + 1, i)) > 1e-14) {
            const Eigen::Matrix2d b = T.block<2, 2>(i, i);
            const double c = 0.5 * (b(0, 0) + b(1, 1)), s = 0.5 * (b(1, 0) - b(0, 1));
            const double theta = std::atan2(s, c);
            L(i, i + 1) = -theta;
            L(i + 1, i) = theta;
            i += 2;
        } else {
            if (T(i, i) < 0.0) minus_one.push_back(i);
            i += 1;
        }
    }
    if (minus_one.size() % 2 != 0) throw std::logic_error("rotation_log: determinant is not +1");
    for (size_t p = 0; p < minus_one.size(); p += 2) {
        L(minus_one[p], minus_one[p + 1]) = -kPi;
        L(minus_one[p + 1], minus_one[p]) = kPi;
    }
    Eigen::MatrixXd out = U * L * U.transpose();
    return 0.5 * (out - out.transpose());
}

Eigen::VectorXcd apply_gl_letter(const GLLetter& g, const Eigen::VectorXcd& v, int n, int M) {
    const Eigen::MatrixXd& A = g.A;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXd W = svd.matrixU(), V = svd.matrixV();
    Eigen::MatrixXd U = W * V.transpose();
    const Eigen::MatrixXd S = V * svd.singularValues().array().log().matrix().asDiagonal() * V.transpose();
    const bool reflect = U.determinant() < 0.0;
    if (reflect) U.col(0) *= -1.0;  // U = O' R with R = diag(-1, 1, ...)
    SymmetricQuadratic gen{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), 0.5 * (S + S.transpose())};
    Eigen::VectorXcd out = expm_apply(lstar_matrix(gen, n, M), v);
    cplx root = std::exp(0.5 * S.trace());
    if (reflect) {
        const auto basis = fock_basis(n, M);
        for (Eigen::Index i = 0; i < basis->size(); ++i)
            out(i) *= (basis->index(i)[0] % 2 ? -1.0 : 1.0) * kI;
        root *= kI;
    }
    gen.ab = rotation_log(U);
    if (gen.ab.cwiseAbs().maxCoeff() > 0.0) out = expm_apply(lstar_matrix(gen, n, M), out);
    if (std::abs(g.r - root) > std::abs(g.r + root)) out = -out;
    return out;
}

}  // namespace

FockMatrix position_matrix(int n, int j, int N_in, int N_out) { return ladder_matrix(n, j, N_in, N_out, 1.0); }

FockMatrix derivative_matrix(int n, int j, int N_in, int N_out) {
    return ladder_matrix(n, j, N_in, N_out, -1.0);
}

FockMatrix sigma_matrix(const Eigen::VectorXcd& v, int N_in, int N_out) {
    const int n = dim_of_vector(v.size());
    FockMatrix m(fock_basis(n, N_out)->size(), fock_basis(n, N_in)->size());
    for (int j = 0; j < n; ++j) {
        if (v(j) != cplx(0.0)) m += (kI * v(j)) * position_matrix(n, j, N_in, N_out);
        if (v(n + j) != cplx(0.0)) m += v(n + j) * derivative_matrix(n, j, N_in, N_out);
    }
    return m;
}

FockVector sigma_fock_complex(const Eigen::VectorXcd& v, const FockVector& f) {
    require_dim(v.size(), 2 * f.n, "sigma_fock: dimension mismatch");
    return {f.n, f.N + 1, sigma_matrix(v, f.N, f.N + 1) * f.c};
}

FockVector sigma_fock(const PhaseVector& v, const FockVector& f) {
    return sigma_fock_complex(v.cast<cplx>(), f);
}

FockMatrix lstar_matrix(const SymmetricQuadratic& q, int n, int N_in, int N_out) {
    const int mid = std::max(N_in, N_out) + 1;
    std::vector<FockMatrix> xl, xr, dl, dr;
    for (int j = 0; j < n; ++j) {
        xl.push_back(position_matrix(n, j, mid, N_out));
        dl.push_back(derivative_matrix(n, j, mid, N_out));
        xr.push_back(position_matrix(n, j, N_in, mid));
        dr.push_back(derivative_matrix(n, j, N_in, mid));
    }
    FockMatrix m(fock_basis(n, N_out)->size(), fock_basis(n, N_in)->size());
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (q.aa(j, k) != 0.0) m += FockMatrix((kI * q.aa(j, k)) * (xl[j] * xr[k]));
            if (q.bb(j, k) != 0.0) m += FockMatrix((-kI * q.bb(j, k)) * (dl[j] * dr[k]));
            if (q.ab(j, k) != 0.0) m += FockMatrix((0.5 * q.ab(j, k)) * (xl[j] * dr[k] + dl[k] * xr[j]));
        }
    return m;
}

FockMatrix lstar_matrix(const SymmetricQuadratic& q, int n, int N) { return lstar_matrix(q, n, N, N); }

Eigen::VectorXcd expm_apply(const FockMatrix& G, const Eigen::VectorXcd& v) {
    double norm1 = 0.0;
    for (int c = 0; c < G.outerSize(); ++c) {
        double col = 0.0;
        for (FockMatrix::InnerIterator it(G, c); it; ++it) col += std::abs(it.value());
        norm1 = std::max(norm1, col);
    }
    const int steps = std::max(1, static_cast<int>(std::ceil(norm1 / 0.5)));
    Eigen::VectorXcd acc = v;
    for (int s = 0; s < steps; ++s) {
        Eigen::VectorXcd term = acc, sum = acc;
        for (int k = 1; k < 200; ++k) {
            term = (G * term) / (static_cast<double>(steps) * k);
            sum += term;
            if (term.norm() <= 1e-17 * sum.norm()) break;
        }
        acc = sum;
    }
    return acc;
}

FockVector mp_act_fock(const MpWord& w, const FockVector& f, const FockOptions& opt) {
    require_dim(w.dim(), f.n, "mp_act_fock: dimension mismatch");
    const int n = f.n;
    const int out_cut = opt.out_cutoff < 0 ? f.N : opt.out_cutoff;
    const int M = std::max(f.N, out_cut) + opt.pad;
    Eigen::VectorXcd v = f.with_cutoff(M).c;
    const auto basis = fock_basis(n, M);
    const auto& ls = w.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) {
        if (const auto* g = std::get_if<GLLetter>(&*it)) {
            v = apply_gl_letter(*g, v, n, M);
        } else if (const auto* q = std::get_if<QuadLetter>(&*it)) {
            const SymmetricQuadratic gen{-0.5 * q->B, Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
            v = expm_apply(lstar_matrix(gen, n, M), v);
        } else {
            const cplx base = std::polar(1.0, kPi * n / 4.0);
            for (Eigen::Index i = 0; i < basis->size(); ++i)
                v(i) *= base * std::pow(kI, basis->level(i) % 4);
        }
        check_tail(v, n, M, opt.tail_tol, "mp_act_fock");
    }
    return FockVector{n, M, v}.with_cutoff(out_cut);
}

FockVector pi_act_fock(const PhaseVector& h, double t, const FockVector& f, const FockOptions& opt) {
    const int n = f.n;
    require_dim(h.size(), 2 * n, "pi_act_fock: dimension mismatch");
    const int out_cut = opt.out_cutoff < 0 ? f.N : opt.out_cutoff;
    const int M = std::max(f.N, out_cut) + opt.pad;
    Eigen::VectorXcd gen(2 * n);
    gen.head(n) = h.head(n).cast<cplx>();
    gen.tail(n) = -h.tail(n).cast<cplx>();
    Eigen::VectorXcd v = expm_apply(sigma_matrix(gen, M, M), f.with_cutoff(M).c) * std::exp(kI * t);
    check_tail(v, n, M, opt.tail_tol, "pi_act_fock");
    return FockVector{n, M, v}.with_cutoff(out_cut);
}

// ---------------------------------------------------------------- Hermite functions

Eigen::VectorXd hermite_table(int kmax, double x) {
    Eigen::VectorXd h(std::max(kmax, 0) + 1);
    h(0) = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    if (kmax >= 1) h(1) = std::sqrt(2.0) * x * h(0);
    for (int k = 1; k < kmax; ++k)
        h(k + 1) = std::sqrt(2.0 / (k + 1)) * x * h(k) - std::sqrt(static_cast<double>(k) / (k + 1)) * h(k - 1);
    return h;
}

double hermite_1d(int k, double x) {
    if (k < 0) return 0.0;
    return hermite_table(k, x)(k);
}

double hermite_eval(const FockBasis::Index& k, const Eigen::VectorXd& x) {
    require_dim(x.size(), static_cast<Eigen::Index>(k.size()), "hermite_eval: dimension mismatch");
    double v = 1.0;
    for (size_t j = 0; j < k.size(); ++j) v *= hermite_1d(k[j], x(static_cast<Eigen::Index>(j)));
    return v;
}

namespace {

QuadratureRule golub_welsch(const Eigen::VectorXd& offdiag, double mu0) {
    const Eigen::Index m = offdiag.size() + 1;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index k = 0; k + 1 < m; ++k) J(k, k + 1) = J(k + 1, k) = offdiag(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadratureRule r{es.eigenvalues(), Eigen::VectorXd(m)};
    for (Eigen::Index k = 0; k < m; ++k) r.weights(k) = mu0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
    return r;
}

}  // namespace

QuadratureRule gauss_hermite(int m) {
    if (m < 1) throw std::invalid_argument("gauss_hermite: need at least one node");
    Eigen::VectorXd off(m - 1);
    for (int k = 1; k < m; ++k) off(k - 1) = std::sqrt(k / 2.0);
    QuadratureRule r = golub_welsch(off, std::sqrt(kPi));
    // Christoffel weights from the Hermite functions: eigenvector weights lose
    // relative accuracy in the tails
    for (Eigen::Index i = 0; i < r.nodes.size(); ++i) {
        const double x = r.nodes(i);
        r.weights(i) = std::exp(-x * x) / hermite_table(m - 1, x).squaredNorm();
    }
    return r;
}

QuadratureRule gauss_legendre(int m) {
    if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    Eigen::VectorXd off(m - 1);
    for (int k = 1; k < m; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(off, 2.0);
}

FockVector project_gaussian(const GaussianState& s, int N) {
    const int n = s.dim();
    const auto basis = fock_basis(n, N);
    FockVector f = FockVector::zero(n, N);
    const GaussianState h0{std::pow(kPi, -0.25 * n), kI * Eigen::MatrixXcd::Identity(n, n), Eigen::VectorXcd::Zero(n)};
    f.c(0) = gaussian_inner(h0, s);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lhs(id - kI * s.Q);
    const Eigen::MatrixXcd rhs_mat = id + kI * s.Q;
    const Eigen::Index inner = basis->prefix_size(N - 1);
    for (Eigen::Index i = 0; i < inner; ++i) {
        FockBasis::Index k = basis->index(i);
        Eigen::VectorXcd lowered(n);
        for (int l = 0; l < n; ++l) {
            if (k[static_cast<size_t>(l)] == 0) {
                lowered(l) = 0.0;
                continue;
            }
            k[static_cast<size_t>(l)] -= 1;
            lowered(l) = std::sqrt(static_cast<double>(k[static_cast<size_t>(l)] + 1)) * f.c(basis->position(k));
            k[static_cast<size_t>(l)] += 1;
        }
        const Eigen::VectorXcd u = lhs.solve(rhs_mat * lowered + kI * std::sqrt(2.0) * s.b * f.c(i));
        for (int l = 0; l < n; ++l) {
            k[static_cast<size_t>(l)] += 1;
            f.c(basis->position(k)) = u(l) / std::sqrt(static_cast<double>(k[static_cast<size_t>(l)]));
            k[static_cast<size_t>(l)] -= 1;
        }
    }
    return f;
}

// ---------------------------------------------------------------- oscillator

FockVector oscillator_apply(const FockVector& f) {
    const auto basis = fock_basis(f.n, f.N);
    FockVector out = f;
    for (Eigen::Index i = 0; i < basis->size(); ++i) out.c(i) *= -(basis->level(i) + 0.5 * f.n);
    return out;
}

FockVector oscillator_level_apply(const FockVector& f) {
    const auto basis = fock_basis(f.n, f.N);
    FockVector out = f;
    for (Eigen::Index i = 0; i < basis->size(); ++i) out.c(i) *= static_cast<double>(2 * basis->level(i) + f.n);
    return out;
}

long long oscillator_multiplicity(int n, int level) {
    const auto basis = fock_basis(n, level);
    return static_cast<long long>(basis->size() - basis->prefix_size(level - 1));
}

SymmetricQuadratic swap_ab(const SymmetricQuadratic& q) { return {q.bb, q.aa, q.ab.transpose()}; }

FockMatrix quantize_quadratic(const Eigen::MatrixXcd& Qm, int N_in, int N_out) {
    if (Qm.rows() != Qm.cols() || Qm.rows() % 2 != 0) throw std::invalid_argument("quantize_quadratic: shape");
    if ((Qm - Qm.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("quantize_quadratic: Hamiltonian matrix not symmetric");
    const int n = static_cast<int>(Qm.rows() / 2);
    const Eigen::MatrixXd J = standard_complex_structure(n);
    const auto part = [&](const Eigen::MatrixXd& sym) {
        const Eigen::MatrixXd A = 2.0 * J * sym;
        return lstar_matrix(swap_ab(symmetric_coefficients(sp_to_weyl(Eigen::MatrixXd(A.transpose())))), n, N_in,
                            N_out);
    };
    const Eigen::MatrixXd re = 0.5 * (Qm.real() + Qm.real().transpose());
    const Eigen::MatrixXd im = 0.5 * (Qm.imag() + Qm.imag().transpose());
    FockMatrix out = kI * part(re);
    if (im.cwiseAbs().maxCoeff() > 0.0) out += FockMatrix(-1.0 * part(im));
    return out;
}

FockMatrix lie_derivative_matrix(const Eigen::MatrixXd& M, int N_in, int N_out) {
    if (M.rows() != M.cols() || M.rows() % 2 != 0) throw std::invalid_argument("lie_derivative: shape");
    const int n = static_cast<int>(M.rows() / 2);
    const int mid = std::max(N_in, N_out) + 1;
    FockMatrix out(fock_basis(n, N_out)->size(), fock_basis(n, N_in)->size());
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(2 * n), f = Eigen::VectorXcd::Zero(2 * n);
        e(j) = 1.0;
        f(n + j) = 1.0;
        const Eigen::VectorXcd me = (M * e.real()).cast<cplx>(), mf = (M * f.real()).cast<cplx>();
        out += FockMatrix(sigma_matrix(me, mid, N_out) * sigma_matrix(f, N_in, mid) -
                          sigma_matrix(mf, mid, N_out) * sigma_matrix(e, N_in, mid));
    }
    return (0.5 * kI) * out;
}

FockVector lie_derivative_flat(const Eigen::MatrixXd& M, const FockVector& f) {
    require_dim(M.rows(), 2 * f.n, "lie_derivative_flat: dimension mismatch");
    return {f.n, f.N + 2, lie_derivative_matrix(M, f.N, f.N + 2) * f.c};
}

}  // namespace symplectic
