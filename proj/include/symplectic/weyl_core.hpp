// Symbolic symplectic Clifford (Weyl) algebra over R^{2n}.
//
// Elements are kept in normal order: every a-generator sits to the left of
// every b-generator.  Coefficients are exact Gaussian rationals.  The
// reordering rule is b_j a_k = a_k b_j - i delta_jk, so [a_j, b_k] = i delta_jk.
#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace symplectic {

using Rational = boost::multiprecision::cpp_rational;
using PhaseVector = Eigen::VectorXd;  // (a-part x, b-part y), length 2n

// Exact complex number with rational real and imaginary parts.
struct ExactComplex {
    Rational re{0};
    Rational im{0};

    ExactComplex() = default;
    ExactComplex(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}
    ExactComplex(int r) : re(r) {}

    static ExactComplex imag_unit() { return ExactComplex(Rational(0), Rational(1)); }

    bool is_zero() const { return re == 0 && im == 0; }
    std::complex<double> to_complex() const;
    std::string to_string() const;

    ExactComplex operator+(const ExactComplex& o) const { return {re + o.re, im + o.im}; }
    ExactComplex operator-(const ExactComplex& o) const { return {re - o.re, im - o.im}; }
    ExactComplex operator-() const { return {-re, -im}; }
    ExactComplex operator*(const ExactComplex& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    ExactComplex& operator+=(const ExactComplex& o) { re += o.re; im += o.im; return *this; }
    bool operator==(const ExactComplex& o) const { return re == o.re && im == o.im; }
    bool operator!=(const ExactComplex& o) const { return !(*this == o); }
};

// Exact conversion of a finite double (every double is a dyadic rational).
Rational exact_rational(double x);

// Dense matrix of exact rationals, row-major.
struct RationalMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<Rational> data;

    RationalMatrix() = default;
    RationalMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, Rational(0)) {}

    Rational& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    const Rational& operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
    bool operator==(const RationalMatrix& o) const {
        return rows == o.rows && cols == o.cols && data == o.data;
    }
    RationalMatrix operator*(const RationalMatrix& o) const;
    RationalMatrix operator-(const RationalMatrix& o) const;
    RationalMatrix scaled(const Rational& s) const;
    Eigen::MatrixXd to_double() const;
    static RationalMatrix from_double(const Eigen::MatrixXd& m);
};

// omega0(v, w) = sum_j (v_a,j w_b,j - v_b,j w_a,j).
double omega0(const PhaseVector& v, const PhaseVector& w);

// J0 = (0, I; -I, 0) in dimension 2n.
Eigen::MatrixXd standard_complex_structure(int n);

bool is_symplectic(const Eigen::MatrixXd& s, double tol = 1e-12);
bool is_sp_algebra(const Eigen::MatrixXd& m, double tol = 1e-12);

class WeylElement {
public:
    // (exponents of a_1..a_n, exponents of b_1..b_n)
    using Monomial = std::pair<std::vector<int>, std::vector<int>>;
    using TermMap = std::map<Monomial, ExactComplex>;

    explicit WeylElement(int n);

    static WeylElement scalar(int n, const ExactComplex& c);
    static WeylElement gen_a(int n, int j);
    static WeylElement gen_b(int n, int j);
    // sum_j x_j a_j + y_j b_j with exact conversion of the coordinates
    static WeylElement linear(const PhaseVector& v);

    int dim() const { return n_; }
    const TermMap& terms() const { return terms_; }
    void add_term(const Monomial& m, const ExactComplex& c);
    ExactComplex coefficient(const Monomial& m) const;

    bool is_zero() const { return terms_.empty(); }
    // Largest total degree among stored terms; -1 for zero.
    int degree() const;

    WeylElement operator+(const WeylElement& o) const;
    WeylElement operator-(const WeylElement& o) const;
    WeylElement operator*(const ExactComplex& c) const;
    bool operator==(const WeylElement& o) const { return n_ == o.n_ && terms_ == o.terms_; }
    bool operator!=(const WeylElement& o) const { return !(*this == o); }

    std::string to_string() const;

private:
    int n_;
    TermMap terms_;
};

WeylElement weyl_mul(const WeylElement& x, const WeylElement& y);
WeylElement weyl_commutator(const WeylElement& x, const WeylElement& y);

// Basis of sp(2n, R): X_jk = diag(B_jk, -B_kj), Y_jk = (0, B_jk+B_kj; 0, 0),
// Z_jk = (0, 0; B_jk+B_kj, 0).  Indices are zero based.
RationalMatrix sp_basis_x(int n, int j, int k);
RationalMatrix sp_basis_y(int n, int j, int k);
RationalMatrix sp_basis_z(int n, int j, int k);

// Matrix of v -> i [q, v] on R^{2n}.  The factor i makes the image real and
// reproduces ad(a_j a_k) = -Y_jk, ad(b_j b_k) = Z_jk, ad(a_j b_k + b_k a_j) = 2 X_jk.
// Throws std::invalid_argument unless q lies in the quadratic subalgebra.
RationalMatrix ad_to_sp_exact(const WeylElement& q);
Eigen::MatrixXd ad_to_sp(const WeylElement& q);

// Inverse of ad_to_sp.  Throws std::invalid_argument if m is not in sp(2n).
WeylElement sp_to_weyl(const RationalMatrix& m);
WeylElement sp_to_weyl(const Eigen::MatrixXd& m);

// Coefficients of q in the symmetric quadratic basis:
// q = sum aa_jk a_j a_k + sum bb_jk b_j b_k + sum ab_jk (a_j b_k + b_k a_j)/2,
// with aa and bb symmetric.  Used to quantize elements of the subalgebra.
struct SymmetricQuadratic {
    Eigen::MatrixXd aa;
    Eigen::MatrixXd bb;
    Eigen::MatrixXd ab;
};
SymmetricQuadratic symmetric_coefficients(const WeylElement& q);

// The harmonic element (1/2) sum_j (a_j^2 + b_j^2).
WeylElement harmonic_element(int n);

}  // namespace symplectic
