// End-to-end experiments on T*T^n: Hamiltonian flows, time-one fixed points,
// the transported zero section as a torus section, and the three-way
// coincidence check in the graph case.
#pragma once

#include "symplectic/frobenius_torus.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace symplectic {

// coef * cos(theta_freq.theta + phase) * prod p_j^{p_power_j} * t^{t_power}
struct HamiltonianTerm {
    double coef = 0.0;
    std::vector<int> theta_freq;
    std::vector<int> p_power;
    int t_power = 0;
    double phase = 0.0;
};

// H = chi(|p|) sum(terms) + (1 - chi(|p|)) |p|^2, chi = 1 below blend_radius and
// 0 beyond twice of it.  blend_radius <= 0 switches blending off.
struct HamiltonianSpec {
    int n = 1;
    std::vector<HamiltonianTerm> terms;
    double blend_radius = 0.0;

    void validate() const;
    double value(const Eigen::VectorXd& x, double t) const;
    // (dH/dtheta, dH/dp)
    Eigen::VectorXd gradient(const Eigen::VectorXd& x, double t) const;
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x, double t) const;
    // X_H = (dH/dp, -dH/dtheta)
    Eigen::VectorXd vector_field(const Eigen::VectorXd& x, double t) const;
    Eigen::MatrixXd field_jacobian(const Eigen::VectorXd& x, double t) const;
    bool autonomous() const;
};

HamiltonianSpec hamiltonian_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HamiltonianSpec& H);

// p^2 / 2 + eps cos(theta) on T*T^1
HamiltonianSpec pendulum(double eps);

class StepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> x;
    // derivative of the final point with respect to the initial one
    Eigen::MatrixXd jacobian;
};

// Implicit midpoint rule with steps of size at most max_step.  Theta is kept
// on the cover (not reduced).  Throws StepError when the implicit equation
// does not converge.
Trajectory integrate_flow(const HamiltonianSpec& H, const Eigen::VectorXd& x0, double t0, double t1,
                          double max_step = 5e-3, bool keep_path = false);

struct TimeOneMap {
    Eigen::VectorXd image;
    Eigen::MatrixXd jacobian;
};
TimeOneMap time_one_map(const HamiltonianSpec& H, const Eigen::VectorXd& x0, double max_step = 5e-3);

struct FixedPointRecord {
    Eigen::VectorXd location;  // theta reduced to [0, 2 pi)
    double residual = 0.0;
    double nondegeneracy = 0.0;  // det(dPhi - I)
    Eigen::VectorXd seed;
};

struct FixedPointConfig {
    double p_window = 1.0;
    int theta_seeds = 24;
    int p_seeds = 5;
    double newton_tol = 1e-12;
    int newton_iterations = 40;
    double degeneracy_tol = 1e-8;
    double dedup_distance = 1e-6;
    double max_step = 5e-3;
};

struct FixedPointSearch {
    std::vector<FixedPointRecord> points;
    std::vector<Eigen::VectorXd> unresolved_seeds;
};

class DegenerateFixedPointError : public std::runtime_error {
public:
    DegenerateFixedPointError(const std::string& what, FixedPointRecord r)
        : std::runtime_error(what), record(std::move(r)) {}
    FixedPointRecord record;
};

// Newton on Phi_1(x) - x (theta part wrapped) from a seed grid over
// [0, 2 pi)^n x [-p_window, p_window]^n.  Throws DegenerateFixedPointError on
// a fixed point with |det(dPhi - I)| below degeneracy_tol.
FixedPointSearch find_fixed_points(const HamiltonianSpec& H, const FixedPointConfig& config = {});

struct FlowFitConfig {
    int samples = 128;
    int modes = 16;
    double max_step = 5e-3;
};

struct FlowLagrangian {
    BranchedLagrangian lagrangian;
    double fit_residual = 0.0;  // sup over samples of |fitted alpha - p|
    double period = 0.0;        // loop integral of the fitted form / 2 pi
};

class GraphError : public std::runtime_error {
public:
    GraphError(const std::string& what, int branches) : std::runtime_error(what), branch_count(branches) {}
    int branch_count;
};

// Time-one image of the zero section of T*T^1 fitted as a torus section.
// Throws GraphError (with the number of sheets) when the image is not a graph.
FlowLagrangian lagrangian_from_flow(const HamiltonianSpec& H, const FlowFitConfig& config = {});

struct CoincidenceConfig {
    double tolerance = 1e-4;
    FixedPointConfig fixed;
    FlowFitConfig fit;
    int frobenius_grid = 64;
    int scan_points = 256;
};

struct CoincidenceReport {
    std::vector<double> section_zeros;    // theta values, p = 0
    std::vector<Eigen::VectorXd> fixed_points;
    std::vector<double> phase_critical;  // theta values, p = 0
    double d_section_fixed = 0.0;
    double d_section_phase = 0.0;
    double d_fixed_phase = 0.0;
    long winding = 0;
    double fit_residual = 0.0;
    double boundary_margin = 0.0;  // p_window minus the largest |p| found
    bool counts_equal = false;
    bool passed = false;
    std::string diagnostic;
};

// Three detectors on T*T^1: zeros of the recovered eigenform, time-one fixed
// points with p in the window, and critical points of the lifted phase of the
// generating function.  Hausdorff distances use the flat metric with theta mod 2 pi.
CoincidenceReport coincidence_report(const HamiltonianSpec& H, const CoincidenceConfig& config = {});

// Hausdorff distance between point sets in T^n x R^n (theta wrapped); +inf
// when exactly one set is empty.
double torus_hausdorff(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b, int n);

// Small random potential perturbation of p^2/2 on T*T^1: eps times modes 1 and 2.
HamiltonianSpec random_small_hamiltonian(unsigned seed, double eps = 0.1);

struct RunConfig {
    unsigned seed = 1;
    int hamiltonians = 5;
    double eps = 0.1;
    CoincidenceConfig coincidence;
};

// schema 1: config, per-Hamiltonian point sets and distances, overall pass
nlohmann::json run_coincidence_suite(const RunConfig& config);
nlohmann::json to_json(const CoincidenceReport& r);

}  // namespace symplectic
