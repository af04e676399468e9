// Riemann theta series, lattice pairings of Gaussian states with the integer
// delta comb, and continuous argument lifts along paths.
#pragma once

#include "symplectic/rep_engine.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace symplectic {

// theta(z, Omega) = sum_k exp(pi i k.Omega k + 2 pi i k.z + i lambda)
struct ThetaInput {
    Eigen::VectorXcd z;
    SiegelPoint Omega;
    double lambda = 0.0;
};

struct ThetaResult {
    cplx value;
    // rigorous bound on the omitted terms |k|_inf > radius
    double tail_bound = 0.0;
    int radius = 0;
    // sum of |terms|; rounding error is a small multiple of eps times this
    double magnitude = 0.0;
};

struct ThetaGradResult {
    Eigen::VectorXcd value;
    double tail_bound = 0.0;
    int radius = 0;
};

class LatticeBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Largest number of lattice points a single sum may visit.
inline constexpr long long kLatticeBudget = 20'000'000;

// Smallest cube radius R whose tail bound is below tol, for exponents
// -pi mu |k|^2 + slope |k| with mu = lambda_min(Im Omega).  Returns the bound too.
std::pair<int, double> theta_radius(int n, double mu, double slope, double tol);

ThetaResult theta_eval(const ThetaInput& in, double tol = 1e-12);
ThetaGradResult theta_grad(const ThetaInput& in, double tol = 1e-12);

// sum over k in Z^n of psi(k) = amplitude * theta(b / 2pi, Q / 2pi).
ThetaResult pair_with_eZ(const GaussianState& s, double tol = 1e-12);

// One branch of a generating function: a state and its phase.
struct BranchState {
    GaussianState psi;
    double lambda = 0.0;
};

// sum_i exp(i lambda_i) pair_with_eZ(psi_i).
cplx generating_sum(const std::vector<BranchState>& branches, double tol = 1e-12);

struct PhasePath {
    std::vector<double> t;
    std::vector<cplx> values;
};

struct PhaseLift {
    std::vector<double> argument;  // continuous branch of arg along the path
    double increment = 0.0;        // last minus first
    // increment / 2 pi rounded, meaningful for closed paths
    long winding = 0;
};

class PhaseLiftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unwraps the argument.  Rejects samples with |value| <= guard and jumps of at least max_jump.
PhaseLift phase_lift(const PhasePath& path, double guard = 1e-10, double max_jump = 0.75 * 3.141592653589793);

// Samples f on [t0, t1], bisecting intervals until consecutive argument jumps
// are below pi/8, then lifts.
PhaseLift phase_lift(const std::function<cplx(double)>& f, double t0, double t1, int initial_samples = 64,
                     double guard = 1e-10);

}  // namespace symplectic
