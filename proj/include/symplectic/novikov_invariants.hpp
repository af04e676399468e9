// Novikov ring arithmetic with certified truncation, filtered complexes over it,
// chain levels, spectral invariants and Betti/torsion counts.
//
// A series sum_i n_i t^{g_i} has finitely many terms above any level; it is
// stored down to a cutoff, below which nothing is known.  Exponents decrease
// towards -infinity, so the leading term is the one with the largest exponent.
#pragma once

#include "symplectic/weyl_core.hpp"

#include "json.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symplectic {

// Exponents closer than this are merged.
inline constexpr double kExponentTol = 1e-12;

class WindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NovikovSeries {
public:
    struct Term {
        double exponent;
        Rational coeff;
    };

    // the zero series, exact
    NovikovSeries() = default;
    explicit NovikovSeries(std::vector<Term> terms, double cutoff = -std::numeric_limits<double>::infinity());
    static NovikovSeries monomial(double exponent, Rational coeff = 1);
    static NovikovSeries one() { return monomial(0.0); }

    const std::vector<Term>& terms() const { return terms_; }
    // terms below this exponent are unknown; -inf for exact finite sums
    double cutoff() const { return cutoff_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_exact() const { return cutoff_ == -std::numeric_limits<double>::infinity(); }
    const Term& leading() const;
    double valuation() const;  // leading exponent, -inf for zero
    bool integral() const;
    // invertible over integer coefficients: leading coefficient +-1 and integral
    bool is_unit() const;

    // drops terms below c and lowers precision to c
    NovikovSeries truncated(double c) const;
    NovikovSeries shifted(double gamma) const;

    NovikovSeries operator-() const;
    friend NovikovSeries operator+(const NovikovSeries& a, const NovikovSeries& b);
    friend NovikovSeries operator-(const NovikovSeries& a, const NovikovSeries& b);
    friend NovikovSeries operator*(const NovikovSeries& a, const NovikovSeries& b);

    // Inverse computed down to exponent window (geometric series after the
    // leading term).  Throws std::domain_error for zero.
    NovikovSeries inverse(double window) const;

    // equal on the common certified window
    bool agrees_with(const NovikovSeries& other) const;

    std::string to_string() const;

private:
    void normalize();
    std::vector<Term> terms_;
    double cutoff_ = -std::numeric_limits<double>::infinity();
};

NovikovSeries nov_add(const NovikovSeries& a, const NovikovSeries& b);
NovikovSeries nov_mul(const NovikovSeries& a, const NovikovSeries& b);

// Real periods <xi, gamma_j> over a basis of H_1.
struct CohomologyClassXi {
    std::vector<double> periods;
    bool integral() const;
};

// t^{<xi, loop>}
NovikovSeries monodromy(const CohomologyClassXi& xi, const std::vector<long>& loop);

struct Generator {
    std::string name;
    double level = 0.0;
};

// boundary[d] maps degree d to degree d - 1, stored as rows (degree d - 1)
// by columns (degree d); boundary[0] is empty.
struct FilteredComplex {
    std::vector<std::vector<Generator>> degrees;
    std::vector<std::vector<std::vector<NovikovSeries>>> boundary;
    double cutoff = -50.0;

    int top_degree() const { return static_cast<int>(degrees.size()) - 1; }
    int rank(int degree) const;
    // fills boundary with zero matrices of the right shapes
    void resize_boundaries();
    // d o d vanishes on the certified window
    bool boundary_squares_to_zero() const;
};

struct Chain {
    int degree = 0;
    std::vector<NovikovSeries> coeffs;  // one per generator
};

Chain basis_chain(const FilteredComplex& C, int degree, int gen, double exponent = 0.0);
Chain apply_boundary(const FilteredComplex& C, const Chain& c);
Chain shift_chain(const Chain& c, double gamma);
Chain add_chains(const Chain& a, const Chain& b);

// max over generators of level + leading exponent; -inf for the zero chain
double chain_level(const FilteredComplex& C, const Chain& c);

struct RhoResult {
    double value = -std::numeric_limits<double>::infinity();
    // generator and exponent where the minimal level is attained
    int generator = -1;
    double exponent = 0.0;
    Chain representative;
};

// inf over a + boundary(b) of chain_level, by elimination against a reduced
// basis of the image with distinct leading generators.  Throws
// std::invalid_argument when a is not a cycle and WindowError when the
// reduction runs below the cutoff.
RhoResult spectral_rho(const FilteredComplex& C, const Chain& a);

// rank over the Novikov field of boundary[d]
int boundary_rank(const FilteredComplex& C, int degree);

struct BettiTorsion {
    std::vector<int> b;
    std::vector<int> q;
    bool certified_by_window = false;  // recomputed on a coarser window with the same answer
};

// Ranks over the Novikov field; torsion counts from the block left after
// eliminating unit pivots.  Throws WindowError when a coarser window disagrees.
BettiTorsion betti_torsion(const FilteredComplex& C);

// sum b_i + 2 sum_{i >= 1} q_i + q_0 for lists of length 2n + 1
long fixed_point_bound(const std::vector<long>& b, const std::vector<long>& q);

// {degrees: [{gens: [{name, level}]}], boundaries: [{from, to, terms: [[g, n], ...]}], cutoff}
nlohmann::json to_json(const FilteredComplex& C);
FilteredComplex complex_from_json(const nlohmann::json& j);

}  // namespace symplectic
