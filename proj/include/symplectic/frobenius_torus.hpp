// Semisimple Frobenius structures over the flat torus T^n = (R / 2 pi Z)^n
// built from closed one-forms (branches of a Lagrangian section of T*T^n).
//
// Branch i carries the coherent state with displacement h = (0, p_i(x)) at
// T = iI.  A tangent vector X acts through sigma(v - i J0 v), v = (0, X),
// with eigenvalue p_i(x).X.
//
// Euler field, spectrum and scaling checks treat the base itself as the flat
// Kaehler torus (n = 2m) with complex structure J0 and omega(v, w) = (J0 v).w.
#pragma once

#include "symplectic/theta_engine.hpp"

#include "json.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace symplectic {

// alpha = df + sum_j eta_j dtheta_j with f = sum_m c_m exp(i m.theta) real.
struct TorusSection {
    int n = 1;
    std::map<std::vector<int>, cplx> fourier;
    Eigen::VectorXd eta;

    explicit TorusSection(int dim = 1) : n(dim), eta(Eigen::VectorXd::Zero(dim)) {}

    // adds c at m and conj(c) at -m
    void add_mode(const std::vector<int>& m, cplx c);
    // throws unless c_{-m} = conj(c_m), m != 0 and sizes match
    void validate(double tol = 1e-12) const;

    double f(const Eigen::VectorXd& theta) const;
    Eigen::VectorXd covector(const Eigen::VectorXd& theta) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& theta) const;
    // f + eta.theta, evaluated on the cover (theta not reduced mod 2 pi)
    double primitive(const Eigen::VectorXd& theta) const;
};

struct BranchedLagrangian {
    int n = 1;
    std::vector<TorusSection> branches;
};

// Uniform grid with shape[j] points along axis j, theta_j = 2 pi idx_j / shape[j].
struct TorusGrid {
    std::vector<int> shape;

    int dim() const { return static_cast<int>(shape.size()); }
    long size() const;
    double spacing(int axis) const;
    std::vector<int> multi_index(long flat) const;
    long flat_index(const std::vector<int>& idx) const;  // wraps periodically
    Eigen::VectorXd point(long flat) const;
};

struct CausticReport {
    // grid points where two branch covectors are closer than the gap
    std::vector<long> locus;
    double min_separation = 0.0;
};

class CausticError : public std::runtime_error {
public:
    CausticError(const std::string& what, CausticReport r) : std::runtime_error(what), report(std::move(r)) {}
    CausticReport report;
};

struct FrobeniusConfig {
    TorusGrid grid;
    double caustic_gap = 1e-3;
    // keep building through collisions and only report them
    bool allow_singular = false;
};

struct FrobeniusStructure {
    int n = 1;
    TorusGrid grid;
    BranchedLagrangian source;
    // [branch][grid point]
    std::vector<std::vector<Eigen::VectorXd>> covector;
    std::vector<std::vector<double>> primitive;
    SiegelPoint T;
    Eigen::MatrixXd J;
    double caustic_gap = 1e-3;
    CausticReport caustics;

    int branch_count() const { return static_cast<int>(covector.size()); }
};

CausticReport detect_caustics(const BranchedLagrangian& L, const TorusGrid& grid, double gap);

// Throws CausticError on collisions unless config.allow_singular.
FrobeniusStructure build_frobenius(const BranchedLagrangian& L, const FrobeniusConfig& config);

// Coherent state of branch i over a grid point (fiber dimension n).
GaussianState branch_state(const FrobeniusStructure& F, int branch, long point);

struct MultiplyResult {
    cplx eigenvalue;
    double residual = 0.0;
};

// sigma(v - iJv), v = (0, X), applied to the branch state.  Throws std::logic_error
// when the residual exceeds tol.
MultiplyResult frobenius_multiply(const FrobeniusStructure& F, const Eigen::VectorXd& X, int branch, long point,
                                  double tol = 1e-8);

// Real trigonometric interpolant of samples on a torus grid.
class TrigInterpolant {
public:
    TrigInterpolant() = default;
    TrigInterpolant(const TorusGrid& grid, const std::vector<double>& samples);

    double operator()(const Eigen::VectorXd& theta) const;
    double mean() const;

private:
    TorusGrid grid_;
    std::vector<cplx> coeffs_;  // DFT / size, in grid index order
};

struct RecoveredForm {
    std::vector<Eigen::VectorXd> samples;  // per grid point
    std::vector<TrigInterpolant> components;

    Eigen::VectorXd operator()(const Eigen::VectorXd& theta) const;
};

struct SpectralCover {
    std::vector<RecoveredForm> branches;
    // smallest eigenvalue gap met while matching across the grid
    double ambiguity_radius = 0.0;
    // max over plaquettes and branches of |circulation| / area
    double max_plaquette_circulation = 0.0;
    // [branch] loop integral along each axis divided by 2 pi
    std::vector<Eigen::VectorXd> periods;
};

// Eigenvalues of Omega(d/dtheta_j) on every branch line, matched across the grid
// by nearest-neighbour continuation from a sorted start.
SpectralCover spectral_cover(const FrobeniusStructure& F);

// Sup distance between recovered and source covectors on the grid, minimised
// over a global relabelling of the branches.
double round_trip_error(const FrobeniusStructure& F, const SpectralCover& cover);

// Theta(x) = sum_i exp(i u_i(x)) pair_with_eZ(psi_i(x)), fiber coordinate 0.
cplx generating_function(const FrobeniusStructure& F, const Eigen::VectorXd& theta, double tol = 1e-12);

// ------------------------------------------------------------------ Euler field and spectrum

struct EulerSample {
    Eigen::VectorXd field;
    bool critical = false;
};

// E_i = u_i (du_i)^#, (du)^# = -J0 grad u / |grad u|^2, with u_i the branch
// primitive plus offset.  Zero and flagged where grad u vanishes.
EulerSample euler_field(const FrobeniusStructure& F, int branch, const Eigen::VectorXd& theta, double offset = 0.0);

class HypothesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpectrumReport {
    std::vector<cplx> w;               // mean over the grid, per branch
    std::vector<double> spread;        // max |w(x) - mean|
    std::vector<double> kernel_residual;
    double hypothesis_residual = 0.0;
};

// w_i = du_i(J0 grad_Y E_i), Y = (du_i o J)^#, by central differences with step
// step_scale * grid spacing.  Requires n = 2 * branch count, orthonormal pairing
// (du_i)^#(du_j o J) = delta_ij and vanishing Poisson brackets (else HypothesisError).
SpectrumReport compute_spectrum(const FrobeniusStructure& F, double step_scale = 1.0, double hyp_tol = 1e-8,
                                double offset = 0.0);

struct TransportResult {
    cplx holonomy;
    cplx closed_form;
    double deviation = 0.0;
};

// Parallel transport of a branch line for d + z Omega along the polygon through
// the vertices (Heun steps), compared with exp(-z (u(end) - u(start))).
TransportResult dubrovin_transport(const FrobeniusStructure& F, int branch, cplx z,
                                   const std::vector<Eigen::VectorXd>& vertices, int steps_per_edge);

struct ScalingReport {
    std::vector<double> d;      // E.<phi, phi> - 2 Re <L_E phi, phi> per grid point
    std::vector<double> model;  // fitted 2 Re(c1 Tr|alpha|^2 + c2 Tr alpha^2 + c3)
    double residual = 0.0;
};

// Per-point scaling defect for branch i in the Fock model (cutoff fock_cutoff).
std::vector<double> scaling_defect(const FrobeniusStructure& F, int branch, int fock_cutoff = 30);
// Real least-squares weights on (|g|^2, Re Tr alpha^2, Im Tr alpha^2, 1).
Eigen::Vector4d calibrate_scaling(const FrobeniusStructure& F, int branch, int fock_cutoff = 30);
ScalingReport scaling_check(const FrobeniusStructure& F, int branch, const Eigen::Vector4d& weights,
                            int fock_cutoff = 30);

// ------------------------------------------------------------------ JSON

// {n, branches: [{fourier: [[[m...], re, im], ...], eta: [...]}], grid: {shape, spacing}}
nlohmann::json to_json(const BranchedLagrangian& L, const TorusGrid& grid);
std::pair<BranchedLagrangian, TorusGrid> lagrangian_from_json(const nlohmann::json& j);

}  // namespace symplectic
