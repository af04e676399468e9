#include "symplectic/weyl_core.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace symplectic {

namespace {

Rational binomial(int m, int r) {
    Rational out(1);
    for (int i = 0; i < r; ++i) out = out * (m - i) / (i + 1);
    return out;
}

Rational falling(int l, int r) {
    Rational out(1);
    for (int i = 0; i < r; ++i) out *= (l - i);
    return out;
}

// (-i)^r
ExactComplex minus_i_pow(int r) {
    switch (r % 4) {
        case 0: return ExactComplex(1);
        case 1: return ExactComplex(Rational(0), Rational(-1));
        case 2: return ExactComplex(-1);
        default: return ExactComplex(Rational(0), Rational(1));
    }
}

void check_dim(int a, int b) {
    if (a != b) throw std::invalid_argument("Weyl elements of different dimension");
}

WeylElement::Monomial zero_monomial(int n) {
    return {std::vector<int>(n, 0), std::vector<int>(n, 0)};
}

// Product of two normal-ordered monomials, accumulated into out.
void multiply_monomials(const WeylElement::Monomial& x, const WeylElement::Monomial& y,
                        const ExactComplex& coeff, WeylElement& out) {
    const int n = static_cast<int>(x.first.size());
    // b^{q1} a^{p2} per axis: sum_r C(q1, r) (p2)_r (-i)^r a^{p2-r} b^{q1-r}
    std::vector<int> r(n, 0);
    std::vector<int> rmax(n);
    for (int j = 0; j < n; ++j) rmax[j] = std::min(x.second[j], y.first[j]);
    while (true) {
        ExactComplex c = coeff;
        int total = 0;
        for (int j = 0; j < n; ++j) {
            c = c * ExactComplex(binomial(x.second[j], r[j]) * falling(y.first[j], r[j]));
            total += r[j];
        }
        c = c * minus_i_pow(total);
        WeylElement::Monomial m = zero_monomial(n);
        for (int j = 0; j < n; ++j) {
            m.first[j] = x.first[j] + y.first[j] - r[j];
            m.second[j] = x.second[j] - r[j] + y.second[j];
        }
        out.add_term(m, c);
        int j = 0;
        while (j < n && r[j] == rmax[j]) r[j++] = 0;
        if (j == n) break;
        ++r[j];
    }
}

}  // namespace

std::complex<double> ExactComplex::to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
}

std::string ExactComplex::to_string() const {
    std::ostringstream os;
    if (im == 0) {
        os << re;
    } else if (re == 0) {
        os << im << "i";
    } else {
        os << "(" << re << (im < 0 ? "-" : "+") << abs(im) << "i)";
    }
    return os.str();
}

Rational exact_rational(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite coordinate");
    if (x == 0.0) return Rational(0);
    int e = 0;
    double m = std::frexp(x, &e);  // x = m 2^e, 0.5 <= |m| < 1
    auto mant = static_cast<long long>(std::ldexp(m, 53));
    e -= 53;
    Rational out(mant);
    if (e > 0) {
        out *= boost::multiprecision::pow(boost::multiprecision::cpp_int(2), e);
    } else if (e < 0) {
        out /= boost::multiprecision::pow(boost::multiprecision::cpp_int(2), -e);
    }
    return out;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
    if (cols != o.rows) throw std::invalid_argument("matrix shape mismatch");
    RationalMatrix out(rows, o.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const Rational& a = (*this)(i, k);
            if (a == 0) continue;
            for (int j = 0; j < o.cols; ++j) out(i, j) += a * o(k, j);
        }
    return out;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& o) const {
    if (rows != o.rows || cols != o.cols) throw std::invalid_argument("matrix shape mismatch");
    RationalMatrix out(rows, cols);
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = data[i] - o.data[i];
    return out;
}

RationalMatrix RationalMatrix::scaled(const Rational& s) const {
    RationalMatrix out = *this;
    for (auto& v : out.data) v *= s;
    return out;
}

Eigen::MatrixXd RationalMatrix::to_double() const {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = static_cast<double>((*this)(i, j));
    return m;
}

RationalMatrix RationalMatrix::from_double(const Eigen::MatrixXd& m) {
    RationalMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out(i, j) = exact_rational(m(i, j));
    return out;
}

double omega0(const PhaseVector& v, const PhaseVector& w) {
    if (v.size() != w.size() || v.size() % 2 != 0)
        throw std::invalid_argument("omega0: dimension mismatch");
    const Eigen::Index n = v.size() / 2;
    return v.head(n).dot(w.tail(n)) - v.tail(n).dot(w.head(n));
}

Eigen::MatrixXd standard_complex_structure(int n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n).setIdentity();
    j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return j;
}

bool is_symplectic(const Eigen::MatrixXd& s, double tol) {
    if (s.rows() != s.cols() || s.rows() % 2 != 0) return false;
    const Eigen::MatrixXd j = standard_complex_structure(static_cast<int>(s.rows() / 2));
    return (s.transpose() * j * s - j).cwiseAbs().maxCoeff() <= tol;
}

bool is_sp_algebra(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0) return false;
    const Eigen::MatrixXd j = standard_complex_structure(static_cast<int>(m.rows() / 2));
    return (m.transpose() * j + j * m).cwiseAbs().maxCoeff() <= tol;
}

WeylElement::WeylElement(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Weyl algebra dimension must be positive");
}

WeylElement WeylElement::scalar(int n, const ExactComplex& c) {
    WeylElement w(n);
    w.add_term(zero_monomial(n), c);
    return w;
}

WeylElement WeylElement::gen_a(int n, int j) {
    WeylElement w(n);
    Monomial m = zero_monomial(n);
    m.first.at(j) = 1;
    w.add_term(m, ExactComplex(1));
    return w;
}

WeylElement WeylElement::gen_b(int n, int j) {
    WeylElement w(n);
    Monomial m = zero_monomial(n);
    m.second.at(j) = 1;
    w.add_term(m, ExactComplex(1));
    return w;
}

WeylElement WeylElement::linear(const PhaseVector& v) {
    if (v.size() % 2 != 0 || v.size() == 0) throw std::invalid_argument("odd phase vector");
    const int n = static_cast<int>(v.size() / 2);
    WeylElement w(n);
    for (int j = 0; j < n; ++j) {
        w.add_term(gen_a(n, j).terms().begin()->first, ExactComplex(exact_rational(v(j))));
        w.add_term(gen_b(n, j).terms().begin()->first, ExactComplex(exact_rational(v(n + j))));
    }
    return w;
}

void WeylElement::add_term(const Monomial& m, const ExactComplex& c) {
    if (static_cast<int>(m.first.size()) != n_ || static_cast<int>(m.second.size()) != n_)
        throw std::invalid_argument("monomial dimension mismatch");
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

ExactComplex WeylElement::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? ExactComplex() : it->second;
}

int WeylElement::degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) {
        int s = 0;
        for (int e : m.first) s += e;
        for (int e : m.second) s += e;
        d = std::max(d, s);
    }
    return d;
}

WeylElement WeylElement::operator+(const WeylElement& o) const {
    check_dim(n_, o.n_);
    WeylElement out = *this;
    for (const auto& [m, c] : o.terms_) out.add_term(m, c);
    return out;
}

WeylElement WeylElement::operator-(const WeylElement& o) const {
    check_dim(n_, o.n_);
    WeylElement out = *this;
    for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
    return out;
}

WeylElement WeylElement::operator*(const ExactComplex& s) const {
    WeylElement out(n_);
    for (const auto& [m, c] : terms_) out.add_term(m, c * s);
    return out;
}

std::string WeylElement::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << c.to_string();
        for (int j = 0; j < n_; ++j)
            for (int e = 0; e < m.first[j]; ++e) os << "*a" << j + 1;
        for (int j = 0; j < n_; ++j)
            for (int e = 0; e < m.second[j]; ++e) os << "*b" << j + 1;
    }
    return os.str();
}

WeylElement weyl_mul(const WeylElement& x, const WeylElement& y) {
    check_dim(x.dim(), y.dim());
    WeylElement out(x.dim());
    for (const auto& [mx, cx] : x.terms())
        for (const auto& [my, cy] : y.terms()) multiply_monomials(mx, my, cx * cy, out);
    return out;
}

WeylElement weyl_commutator(const WeylElement& x, const WeylElement& y) {
    return weyl_mul(x, y) - weyl_mul(y, x);
}

namespace {

RationalMatrix unit_sym(int n, int j, int k) {
    RationalMatrix b(n, n);
    b(j, k) += 1;
    b(k, j) += 1;
    return b;
}

void check_index(int n, int j, int k) {
    if (j < 0 || k < 0 || j >= n || k >= n) throw std::out_of_range("basis index");
}

}  // namespace

RationalMatrix sp_basis_x(int n, int j, int k) {
    check_index(n, j, k);
    RationalMatrix m(2 * n, 2 * n);
    m(j, k) = 1;
    m(n + k, n + j) = -1;
    return m;
}

RationalMatrix sp_basis_y(int n, int j, int k) {
    check_index(n, j, k);
    RationalMatrix m(2 * n, 2 * n);
    const RationalMatrix b = unit_sym(n, j, k);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, n + c) = b(r, c);
    return m;
}

RationalMatrix sp_basis_z(int n, int j, int k) {
    check_index(n, j, k);
    RationalMatrix m(2 * n, 2 * n);
    const RationalMatrix b = unit_sym(n, j, k);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(n + r, c) = b(r, c);
    return m;
}

namespace {

// Validates that q is a symmetric quadratic element; returns its degree-2 part
// split into aa, bb and the normal-ordered a_j b_k coefficients.
struct QuadParts {
    std::vector<std::vector<ExactComplex>> aa, bb, ab;
};

QuadParts split_quadratic(const WeylElement& q) {
    const int n = q.dim();
    QuadParts p;
    p.aa.assign(n, std::vector<ExactComplex>(n));
    p.bb.assign(n, std::vector<ExactComplex>(n));
    p.ab.assign(n, std::vector<ExactComplex>(n));
    ExactComplex constant;
    for (const auto& [m, c] : q.terms()) {
        std::vector<int> ai, bi;
        for (int j = 0; j < n; ++j) {
            for (int e = 0; e < m.first[j]; ++e) ai.push_back(j);
            for (int e = 0; e < m.second[j]; ++e) bi.push_back(j);
        }
        const size_t deg = ai.size() + bi.size();
        if (deg == 0) {
            constant = c;
        } else if (deg != 2) {
            throw std::invalid_argument("ad_to_sp: element is not quadratic");
        } else if (ai.size() == 2) {
            p.aa[ai[0]][ai[1]] = c;
        } else if (bi.size() == 2) {
            p.bb[bi[0]][bi[1]] = c;
        } else {
            p.ab[ai[0]][bi[0]] = c;
        }
    }
    // Symmetric elements: (a_j b_k + b_k a_j)/2 = a_j b_k - (i/2) delta_jk.
    ExactComplex expected;
    for (int j = 0; j < n; ++j) expected += p.ab[j][j];
    expected = expected * ExactComplex(Rational(0), Rational(-1, 2));
    if (constant != expected)
        throw std::invalid_argument("ad_to_sp: element is not in the quadratic subalgebra");
    return p;
}

}  // namespace

RationalMatrix ad_to_sp_exact(const WeylElement& q) {
    const int n = q.dim();
    split_quadratic(q);
    RationalMatrix out(2 * n, 2 * n);
    const ExactComplex i = ExactComplex::imag_unit();
    for (int col = 0; col < 2 * n; ++col) {
        const WeylElement v = col < n ? WeylElement::gen_a(n, col) : WeylElement::gen_b(n, col - n);
        const WeylElement image = weyl_commutator(q, v) * i;
        for (const auto& [m, c] : image.terms()) {
            int row = -1;
            int deg = 0;
            for (int j = 0; j < n; ++j) {
                deg += m.first[j] + m.second[j];
                if (m.first[j] == 1) row = j;
                if (m.second[j] == 1) row = n + j;
            }
            if (deg != 1 || c.im != 0)
                throw std::logic_error("ad_to_sp: image is not a real linear element");
            out(row, col) = c.re;
        }
    }
    return out;
}

Eigen::MatrixXd ad_to_sp(const WeylElement& q) { return ad_to_sp_exact(q).to_double(); }

WeylElement sp_to_weyl(const RationalMatrix& m) {
    if (m.rows != m.cols || m.rows % 2 != 0 || m.rows == 0)
        throw std::invalid_argument("sp_to_weyl: matrix must be 2n x 2n");
    const int n = m.rows / 2;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (m(n + j, n + k) != -m(k, j) || m(j, n + k) != m(k, n + j) || m(n + j, k) != m(n + k, j))
                throw std::invalid_argument("sp_to_weyl: matrix is not in sp(2n)");
        }
    WeylElement q(n);
    const Rational half(1, 2);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const WeylElement aj = WeylElement::gen_a(n, j), ak = WeylElement::gen_a(n, k);
            const WeylElement bj = WeylElement::gen_b(n, j), bk = WeylElement::gen_b(n, k);
            if (m(j, k) != 0) {
                const WeylElement sym = weyl_mul(aj, bk) + weyl_mul(bk, aj);
                q = q + sym * ExactComplex(m(j, k) * half);
            }
            if (m(j, n + k) != 0) q = q + weyl_mul(aj, ak) * ExactComplex(-m(j, n + k) * half);
            if (m(n + j, k) != 0) q = q + weyl_mul(bj, bk) * ExactComplex(m(n + j, k) * half);
        }
    return q;
}

WeylElement sp_to_weyl(const Eigen::MatrixXd& m) { return sp_to_weyl(RationalMatrix::from_double(m)); }

SymmetricQuadratic symmetric_coefficients(const WeylElement& q) {
    const RationalMatrix m = ad_to_sp_exact(q);
    const int n = q.dim();
    SymmetricQuadratic s;
    const Eigen::MatrixXd md = m.to_double();
    s.ab = md.topLeftCorner(n, n);
    s.aa = -0.5 * md.topRightCorner(n, n);
    s.bb = 0.5 * md.bottomLeftCorner(n, n);
    return s;
}

WeylElement harmonic_element(int n) {
    WeylElement h(n);
    for (int j = 0; j < n; ++j) {
        const WeylElement a = WeylElement::gen_a(n, j), b = WeylElement::gen_b(n, j);
        h = h + (weyl_mul(a, a) + weyl_mul(b, b)) * ExactComplex(Rational(1, 2));
    }
    return h;
}

}  // namespace symplectic
