#include "symplectic/harness_cli.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace symplectic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double d) { return d - kTwoPi * std::round(d / kTwoPi); }

double reduce_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

double int_pow(double x, int k) {
    if (k < 0) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

struct Jet {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

// value, gradient and Hessian of one term in (theta, p)
Jet term_jet(const HamiltonianTerm& term, int n, const Eigen::VectorXd& x, double t) {
    Jet j;
    j.grad = Eigen::VectorXd::Zero(2 * n);
    j.hess = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    double angle = term.phase;
    for (int a = 0; a < n; ++a) angle += term.theta_freq[static_cast<size_t>(a)] * x(a);
    const double c = std::cos(angle), s = std::sin(angle);
    const double tt = term.coef * int_pow(t, term.t_power);

    // monomial in p and its derivatives
    const Eigen::VectorXd p = x.tail(n);
    auto mono = [&](int skip_a, int skip_b) {
        double r = 1.0;
        for (int q = 0; q < n; ++q) {
            int k = term.p_power[static_cast<size_t>(q)];
            double fac = 1.0;
            for (int d : {skip_a, skip_b})
                if (d == q) {
                    fac *= k;
                    --k;
                }
            if (fac == 0.0) return 0.0;
            r *= fac * int_pow(p(q), k);
        }
        return r;
    };
    const double P = mono(-1, -1);
    j.value = tt * c * P;
    for (int a = 0; a < n; ++a) {
        const double ma = term.theta_freq[static_cast<size_t>(a)];
        j.grad(a) = -tt * ma * s * P;
        j.grad(n + a) = tt * c * mono(a, -1);
        for (int b = 0; b < n; ++b) {
            const double mb = term.theta_freq[static_cast<size_t>(b)];
            j.hess(a, b) = -tt * ma * mb * c * P;
            j.hess(a, n + b) = -tt * ma * s * mono(b, -1);
            j.hess(n + b, a) = j.hess(a, n + b);
            j.hess(n + a, n + b) = tt * c * mono(a, b);
        }
    }
    return j;
}

Jet full_jet(const HamiltonianSpec& H, const Eigen::VectorXd& x, double t) {
    const int n = H.n;
    Jet A;
    A.grad = Eigen::VectorXd::Zero(2 * n);
    A.hess = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (const auto& term : H.terms) {
        const Jet j = term_jet(term, n, x, t);
        A.value += j.value;
        A.grad += j.grad;
        A.hess += j.hess;
    }
    const double R = H.blend_radius;
    const Eigen::VectorXd p = x.tail(n);
    const double s = p.norm();
    if (R <= 0.0 || s <= R) return A;

    // H = Q + chi (A - Q), Q = |p|^2
    Jet Q;
    Q.value = p.squaredNorm();
    Q.grad = Eigen::VectorXd::Zero(2 * n);
    Q.grad.tail(n) = 2.0 * p;
    Q.hess = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Q.hess.bottomRightCorner(n, n) = 2.0 * Eigen::MatrixXd::Identity(n, n);
    if (s >= 2.0 * R) return Q;

    const double u = (s - R) / R;
    const double S = 1.0 - (10 * u * u * u - 15 * u * u * u * u + 6 * u * u * u * u * u);
    const double dS = -(30 * u * u - 60 * u * u * u + 30 * u * u * u * u);
    const double ddS = -(60 * u - 180 * u * u + 120 * u * u * u);
    Eigen::VectorXd gchi = Eigen::VectorXd::Zero(2 * n);
    gchi.tail(n) = dS / R * p / s;
    Eigen::MatrixXd hchi = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    hchi.bottomRightCorner(n, n) = ddS / (R * R) * p * p.transpose() / (s * s) +
                                   dS / R * (Eigen::MatrixXd::Identity(n, n) / s - p * p.transpose() / (s * s * s));
    const double dv = A.value - Q.value;
    const Eigen::VectorXd dg = A.grad - Q.grad;
    const Eigen::MatrixXd dh = A.hess - Q.hess;
    Jet out;
    out.value = Q.value + S * dv;
    out.grad = Q.grad + S * dg + dv * gchi;
    out.hess = Q.hess + S * dh + gchi * dg.transpose() + dg * gchi.transpose() + dv * hchi;
    return out;
}

}  // namespace

// ------------------------------------------------------------------ Hamiltonians

void HamiltonianSpec::validate() const {
    if (n < 1) throw std::invalid_argument("HamiltonianSpec: n must be positive");
    for (const auto& t : terms) {
        if (static_cast<int>(t.theta_freq.size()) != n || static_cast<int>(t.p_power.size()) != n)
            throw std::invalid_argument("HamiltonianSpec: term vectors must have length n");
        if (std::any_of(t.p_power.begin(), t.p_power.end(), [](int k) { return k < 0; }) || t.t_power < 0)
            throw std::invalid_argument("HamiltonianSpec: powers must be non-negative");
        if (!std::isfinite(t.coef) || !std::isfinite(t.phase)) throw std::invalid_argument("HamiltonianSpec: non-finite term");
    }
}

double HamiltonianSpec::value(const Eigen::VectorXd& x, double t) const { return full_jet(*this, x, t).value; }
Eigen::VectorXd HamiltonianSpec::gradient(const Eigen::VectorXd& x, double t) const { return full_jet(*this, x, t).grad; }
Eigen::MatrixXd HamiltonianSpec::hessian(const Eigen::VectorXd& x, double t) const { return full_jet(*this, x, t).hess; }

Eigen::VectorXd HamiltonianSpec::vector_field(const Eigen::VectorXd& x, double t) const {
    const Eigen::VectorXd g = gradient(x, t);
    Eigen::VectorXd v(2 * n);
    v.head(n) = g.tail(n);
    v.tail(n) = -g.head(n);
    return v;
}

Eigen::MatrixXd HamiltonianSpec::field_jacobian(const Eigen::VectorXd& x, double t) const {
    const Eigen::MatrixXd h = hessian(x, t);
    Eigen::MatrixXd d(2 * n, 2 * n);
    d.topRows(n) = h.bottomRows(n);
    d.bottomRows(n) = -h.topRows(n);
    return d;
}

bool HamiltonianSpec::autonomous() const {
    return std::all_of(terms.begin(), terms.end(), [](const HamiltonianTerm& t) { return t.t_power == 0 || t.coef == 0.0; });
}

HamiltonianSpec hamiltonian_from_json(const nlohmann::json& j) {
    HamiltonianSpec H;
    H.n = j.at("n").get<int>();
    H.blend_radius = j.value("blend_radius", 0.0);
    for (const auto& jt : j.at("terms")) {
        HamiltonianTerm t;
        t.coef = jt.at("coef").get<double>();
        t.theta_freq = jt.at("theta_freq").get<std::vector<int>>();
        t.p_power = jt.at("p_power").get<std::vector<int>>();
        t.t_power = jt.value("t_power", 0);
        t.phase = jt.value("phase", 0.0);
        H.terms.push_back(std::move(t));
    }
    H.validate();
    return H;
}

nlohmann::json to_json(const HamiltonianSpec& H) {
    nlohmann::json j;
    j["n"] = H.n;
    j["blend_radius"] = H.blend_radius;
    j["terms"] = nlohmann::json::array();
    for (const auto& t : H.terms)
        j["terms"].push_back({{"coef", t.coef},
                              {"theta_freq", t.theta_freq},
                              {"p_power", t.p_power},
                              {"t_power", t.t_power},
                              {"phase", t.phase}});
    return j;
}

HamiltonianSpec pendulum(double eps) {
    HamiltonianSpec H;
    H.n = 1;
    H.terms = {{0.5, {0}, {2}, 0, 0.0}, {eps, {1}, {0}, 0, 0.0}};
    return H;
}

// ------------------------------------------------------------------ flow

Trajectory integrate_flow(const HamiltonianSpec& H, const Eigen::VectorXd& x0, double t0, double t1, double max_step,
                          bool keep_path) {
    const int dim = 2 * H.n;
    if (x0.size() != dim) throw std::invalid_argument("integrate_flow: state dimension mismatch");
    if (!(max_step > 0.0)) throw std::invalid_argument("integrate_flow: step must be positive");
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / max_step - 1e-12)));
    const double h = (t1 - t0) / steps;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);

    Trajectory out;
    out.jacobian = I;
    Eigen::VectorXd x = x0;
    double t = t0;
    if (keep_path) {
        out.t.push_back(t);
        out.x.push_back(x);
    }
    for (int k = 0; k < steps; ++k) {
        const double tm = t + 0.5 * h;
        if (std::abs(h) * H.field_jacobian(x, tm).norm() > 2.0)
            throw StepError("integrate_flow: step exceeds the stability bound of the implicit solve");
        Eigen::VectorXd y = x + h * H.vector_field(x, tm);
        bool converged = false;
        Eigen::MatrixXd DX;
        for (int it = 0; it < 50; ++it) {
            const Eigen::VectorXd m = 0.5 * (x + y);
            DX = H.field_jacobian(m, tm);
            const Eigen::VectorXd F = y - x - h * H.vector_field(m, tm);
            const Eigen::VectorXd delta = (I - 0.5 * h * DX).partialPivLu().solve(F);
            y -= delta;
            if (delta.norm() <= 1e-15 * (1.0 + y.norm())) {
                converged = true;
                break;
            }
        }
        if (!converged) throw StepError("integrate_flow: implicit midpoint equation did not converge");
        DX = H.field_jacobian(0.5 * (x + y), tm);
        out.jacobian = (I - 0.5 * h * DX).partialPivLu().solve((I + 0.5 * h * DX) * out.jacobian);
        x = y;
        t = t0 + (k + 1) * h;
        if (keep_path) {
            out.t.push_back(t);
            out.x.push_back(x);
        }
    }
    if (!keep_path) {
        out.t = {t};
        out.x = {x};
    }
    return out;
}

TimeOneMap time_one_map(const HamiltonianSpec& H, const Eigen::VectorXd& x0, double max_step) {
    const Trajectory tr = integrate_flow(H, x0, 0.0, 1.0, max_step);
    return {tr.x.back(), tr.jacobian};
}

// ------------------------------------------------------------------ fixed points

double torus_hausdorff(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b, int n) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    auto dist = [n](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        double s = 0.0;
        for (int j = 0; j < u.size(); ++j) {
            const double d = j < n ? wrap_angle(u(j) - v(j)) : u(j) - v(j);
            s += d * d;
        }
        return std::sqrt(s);
    };
    auto directed = [&](const std::vector<Eigen::VectorXd>& from, const std::vector<Eigen::VectorXd>& to) {
        double worst = 0.0;
        for (const auto& u : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& v : to) best = std::min(best, dist(u, v));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

FixedPointSearch find_fixed_points(const HamiltonianSpec& H, const FixedPointConfig& config) {
    H.validate();
    const int n = H.n;
    const int dim = 2 * n;
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);

    // seed grid, theta-major
    std::vector<Eigen::VectorXd> seeds;
    std::vector<int> idx(static_cast<size_t>(dim), 0);
    while (true) {
        Eigen::VectorXd s(dim);
        for (int j = 0; j < n; ++j) s(j) = kTwoPi * idx[static_cast<size_t>(j)] / config.theta_seeds;
        for (int j = 0; j < n; ++j)
            s(n + j) = config.p_seeds == 1 ? 0.0
                                           : -config.p_window + 2.0 * config.p_window * idx[static_cast<size_t>(n + j)] /
                                                                    (config.p_seeds - 1);
        seeds.push_back(s);
        int j = dim - 1;
        for (; j >= 0; --j) {
            const int lim = j < n ? config.theta_seeds : config.p_seeds;
            if (++idx[static_cast<size_t>(j)] < lim) break;
            idx[static_cast<size_t>(j)] = 0;
        }
        if (j < 0) break;
    }

    FixedPointSearch out;
    for (const auto& seed : seeds) {
        Eigen::VectorXd x = seed;
        bool done = false;
        TimeOneMap phi;
        Eigen::VectorXd G(dim);
        for (int it = 0; it <= config.newton_iterations; ++it) {
            phi = time_one_map(H, x, config.max_step);
            G = phi.image - x;
            for (int j = 0; j < n; ++j) G(j) = wrap_angle(G(j));
            if (G.norm() < config.newton_tol) {
                done = true;
                break;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(phi.jacobian - I);
            if (!lu.isInvertible()) break;
            Eigen::VectorXd step = lu.solve(G);
            // damp wild steps so Newton stays near its seed basin
            const double cap = 0.5;
            if (step.norm() > cap) step *= cap / step.norm();
            x -= step;
            if (!x.allFinite() || x.tail(n).cwiseAbs().maxCoeff() > 4.0 * config.p_window + 1.0) break;
        }
        if (!done) {
            out.unresolved_seeds.push_back(seed);
            continue;
        }
        FixedPointRecord rec;
        rec.location = x;
        for (int j = 0; j < n; ++j) rec.location(j) = reduce_angle(x(j));
        rec.residual = G.norm();
        rec.nondegeneracy = (phi.jacobian - I).determinant();
        rec.seed = seed;
        if (std::abs(rec.nondegeneracy) < config.degeneracy_tol)
            throw DegenerateFixedPointError("find_fixed_points: degenerate fixed point, det(dPhi - I) = " +
                                                std::to_string(rec.nondegeneracy),
                                            rec);
        if (rec.location.tail(n).cwiseAbs().maxCoeff() > config.p_window) continue;
        const bool duplicate = std::any_of(out.points.begin(), out.points.end(), [&](const FixedPointRecord& r) {
            return torus_hausdorff({r.location}, {rec.location}, n) < config.dedup_distance;
        });
        if (!duplicate) out.points.push_back(rec);
    }
    std::sort(out.points.begin(), out.points.end(), [](const FixedPointRecord& a, const FixedPointRecord& b) {
        return std::lexicographical_compare(a.location.data(), a.location.data() + a.location.size(), b.location.data(),
                                            b.location.data() + b.location.size());
    });
    return out;
}

// ------------------------------------------------------------------ transported zero section

FlowLagrangian lagrangian_from_flow(const HamiltonianSpec& H, const FlowFitConfig& config) {
    H.validate();
    if (H.n != 1) throw std::invalid_argument("lagrangian_from_flow: only T*T^1 is supported");
    const int N = config.samples;
    const int M = config.modes;
    if (N < 2 * M + 2) throw std::invalid_argument("lagrangian_from_flow: too few samples for the mode count");

    std::vector<double> theta(static_cast<size_t>(N)), p(static_cast<size_t>(N));
    for (int i = 0; i < N; ++i) {
        const Eigen::Vector2d x0(kTwoPi * i / N, 0.0);
        const Eigen::VectorXd x1 = time_one_map(H, x0, config.max_step).image;
        theta[static_cast<size_t>(i)] = x1(0);
        p[static_cast<size_t>(i)] = x1(1);
    }
    // graph test: the base projection must advance monotonically once around
    bool graph = true;
    for (int i = 0; i < N; ++i) {
        const double next = i + 1 < N ? theta[static_cast<size_t>(i) + 1] : theta[0] + kTwoPi;
        if (!(next > theta[static_cast<size_t>(i)])) graph = false;
    }
    if (!graph) {
        int sheets = 0;
        for (int q = 0; q < 64; ++q) {
            const double target = kTwoPi * (q + 0.5) / 64;
            int count = 0;
            for (int i = 0; i < N; ++i) {
                const double a = theta[static_cast<size_t>(i)] - target;
                const double b = (i + 1 < N ? theta[static_cast<size_t>(i) + 1] : theta[0] + kTwoPi) - target;
                // crossings of target + 2 pi k between consecutive samples
                count += static_cast<int>(std::abs(std::floor(b / kTwoPi) - std::floor(a / kTwoPi)));
            }
            sheets = std::max(sheets, count);
        }
        throw GraphError("lagrangian_from_flow: time-one image of the zero section is not a graph", sheets);
    }

    // alpha = sum_m -2m (x_m sin m theta + y_m cos m theta) + eta
    Eigen::MatrixXd A(N, 2 * M + 1);
    Eigen::VectorXd rhs(N);
    for (int i = 0; i < N; ++i) {
        const double th = theta[static_cast<size_t>(i)];
        for (int m = 1; m <= M; ++m) {
            A(i, 2 * (m - 1)) = -2.0 * m * std::sin(m * th);
            A(i, 2 * (m - 1) + 1) = -2.0 * m * std::cos(m * th);
        }
        A(i, 2 * M) = 1.0;
        rhs(i) = p[static_cast<size_t>(i)];
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
    FlowLagrangian out;
    out.fit_residual = (A * sol - rhs).cwiseAbs().maxCoeff();
    TorusSection s(1);
    for (int m = 1; m <= M; ++m) {
        const cplx c(sol(2 * (m - 1)), sol(2 * (m - 1) + 1));
        if (c != cplx(0.0, 0.0)) s.add_mode({m}, c);
    }
    s.eta(0) = sol(2 * M);
    out.period = sol(2 * M);
    out.lagrangian.n = 1;
    out.lagrangian.branches = {s};
    return out;
}

// ------------------------------------------------------------------ coincidence

namespace {

// roots of f on [0, 2 pi) from sign changes on a uniform scan, refined by bisection
template <class Fn>
std::vector<double> periodic_roots(const Fn& f, int scan) {
    std::vector<double> xs(static_cast<size_t>(scan)), vs(static_cast<size_t>(scan));
    for (int i = 0; i < scan; ++i) {
        xs[static_cast<size_t>(i)] = kTwoPi * i / scan;
        vs[static_cast<size_t>(i)] = f(xs[static_cast<size_t>(i)]);
    }
    std::vector<double> roots;
    for (int i = 0; i < scan; ++i) {
        double a = xs[static_cast<size_t>(i)], fa = vs[static_cast<size_t>(i)];
        double b = i + 1 < scan ? xs[static_cast<size_t>(i) + 1] : kTwoPi;
        const double fb = i + 1 < scan ? vs[static_cast<size_t>(i) + 1] : vs[0];
        if (fa == 0.0) {
            roots.push_back(a);
            continue;
        }
        if ((fa < 0.0) == (fb < 0.0) || fb == 0.0) continue;
        for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = f(m);
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push_back(reduce_angle(0.5 * (a + b)));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<Eigen::VectorXd> on_zero_section(const std::vector<double>& thetas) {
    std::vector<Eigen::VectorXd> pts;
    for (double t : thetas) pts.push_back(Eigen::Vector2d(t, 0.0));
    return pts;
}

}  // namespace

CoincidenceReport coincidence_report(const HamiltonianSpec& H, const CoincidenceConfig& config) {
    if (H.n != 1) throw std::invalid_argument("coincidence_report: only T*T^1 is supported");
    CoincidenceReport r;

    // (ii) first: the nondegeneracy guard rejects H = 0 before anything else
    const FixedPointSearch fixed = find_fixed_points(H, config.fixed);
    double pmax = 0.0;
    for (const auto& rec : fixed.points) {
        r.fixed_points.push_back(rec.location);
        pmax = std::max(pmax, std::abs(rec.location(1)));
    }
    r.boundary_margin = config.fixed.p_window - pmax;

    // (i) zeros of the eigenform recovered from the Frobenius structure
    const FlowLagrangian fit = lagrangian_from_flow(H, config.fit);
    r.fit_residual = fit.fit_residual;
    FrobeniusConfig fc;
    fc.grid.shape = {config.frobenius_grid};
    const FrobeniusStructure F = build_frobenius(fit.lagrangian, fc);
    const SpectralCover cover = spectral_cover(F);
    const TrigInterpolant& alpha = cover.branches[0].components[0];
    r.section_zeros = periodic_roots([&](double t) { return alpha(Eigen::VectorXd::Constant(1, t)); }, config.scan_points);

    // (iii) critical points of the lifted phase of the generating function
    auto theta_at = [&](double t) { return generating_function(F, Eigen::VectorXd::Constant(1, t)); };
    r.winding = phase_lift(theta_at, 0.0, kTwoPi, config.scan_points).winding;
    const double h = 1e-4;
    r.phase_critical = periodic_roots(
        [&](double t) { return std::arg(theta_at(t + h) / theta_at(t - h)) / (2.0 * h); }, config.scan_points);

    const auto zeros = on_zero_section(r.section_zeros);
    const auto crit = on_zero_section(r.phase_critical);
    r.d_section_fixed = torus_hausdorff(zeros, r.fixed_points, 1);
    r.d_section_phase = torus_hausdorff(zeros, crit, 1);
    r.d_fixed_phase = torus_hausdorff(r.fixed_points, crit, 1);
    r.counts_equal = zeros.size() == r.fixed_points.size() && zeros.size() == crit.size();

    if (!r.counts_equal)
        r.diagnostic = "point counts differ: section " + std::to_string(zeros.size()) + ", fixed " +
                       std::to_string(r.fixed_points.size()) + ", phase " + std::to_string(crit.size());
    else if (r.d_section_fixed > config.tolerance)
        r.diagnostic = "section zeros and fixed points differ by " + std::to_string(r.d_section_fixed);
    else if (r.d_section_phase > config.tolerance)
        r.diagnostic = "section zeros and phase critical points differ by " + std::to_string(r.d_section_phase);
    else if (r.d_fixed_phase > config.tolerance)
        r.diagnostic = "fixed points and phase critical points differ by " + std::to_string(r.d_fixed_phase);
    else if (!fixed.unresolved_seeds.empty() && r.fixed_points.empty())
        r.diagnostic = "no fixed point resolved";
    r.passed = r.diagnostic.empty();
    return r;
}

HamiltonianSpec random_small_hamiltonian(unsigned seed, double eps) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    HamiltonianSpec H;
    H.n = 1;
    H.terms.push_back({0.5, {0}, {2}, 0, 0.0});
    for (int m = 1; m <= 2; ++m) {
        const double a = u(rng), b = u(rng);
        H.terms.push_back({eps * a, {m}, {0}, 0, 0.0});
        H.terms.push_back({eps * b, {m}, {0}, 0, -0.5 * kPi});  // sin
    }
    return H;
}

nlohmann::json to_json(const CoincidenceReport& r) {
    nlohmann::json j;
    j["section_zeros"] = r.section_zeros;
    nlohmann::json fp = nlohmann::json::array();
    for (const auto& x : r.fixed_points) fp.push_back(std::vector<double>(x.data(), x.data() + x.size()));
    j["fixed_points"] = fp;
    j["phase_critical"] = r.phase_critical;
    j["distances"] = {{"section_fixed", r.d_section_fixed},
                      {"section_phase", r.d_section_phase},
                      {"fixed_phase", r.d_fixed_phase}};
    j["counts_equal"] = r.counts_equal;
    j["winding"] = r.winding;
    j["fit_residual"] = r.fit_residual;
    j["boundary_margin"] = r.boundary_margin;
    j["passed"] = r.passed;
    j["diagnostic"] = r.diagnostic;
    return j;
}

nlohmann::json run_coincidence_suite(const RunConfig& config) {
    nlohmann::json j;
    j["schema"] = 1;
    j["label"] = "graph-case analogue on T*T^1";
    j["config"] = {{"seed", config.seed},
                   {"hamiltonians", config.hamiltonians},
                   {"eps", config.eps},
                   {"tolerance", config.coincidence.tolerance},
                   {"p_window", config.coincidence.fixed.p_window},
                   {"max_step", config.coincidence.fixed.max_step},
                   {"fit_samples", config.coincidence.fit.samples},
                   {"fit_modes", config.coincidence.fit.modes},
                   {"frobenius_grid", config.coincidence.frobenius_grid}};
    j["runs"] = nlohmann::json::array();
    bool all = true;
    for (int i = 0; i < config.hamiltonians; ++i) {
        const unsigned s = config.seed * 7919u + static_cast<unsigned>(i);
        const HamiltonianSpec H = random_small_hamiltonian(s, config.eps);
        nlohmann::json run;
        run["seed"] = s;
        run["hamiltonian"] = to_json(H);
        try {
            const CoincidenceReport r = coincidence_report(H, config.coincidence);
            run["report"] = to_json(r);
            all = all && r.passed;
        } catch (const std::exception& e) {
            run["error"] = e.what();
            all = false;
        }
        j["runs"].push_back(run);
    }
    j["passed"] = all;
    return j;
}

}  // namespace symplectic
