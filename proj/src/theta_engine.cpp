#include "symplectic/theta_engine.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace symplectic {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I_UNIT{0.0, 1.0};

// Neumaier compensated sum of complex terms, real and imaginary parts separately.
struct CompensatedSum {
    double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

    static void add(double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    void add(cplx x) {
        add(re, cre, x.real());
        add(im, cim, x.imag());
    }
    cplx value() const { return {re + cre, im + cim}; }
};

double shell_count(int n, int r) {
    if (r == 0) return 1.0;
    return std::pow(2.0 * r + 1.0, n) - std::pow(2.0 * r - 1.0, n);
}

// Bound on sum over |k|_inf > R of |k|_2^p exp(-pi mu |k|^2 + slope |k|), valid for R past the peak.
double tail_sum(int n, double mu, double slope, int R, int p) {
    double sum = 0.0;
    const double rn = std::sqrt(static_cast<double>(n));
    for (int r = R + 1;; ++r) {
        auto term = [&](int s) {
            return shell_count(n, s) * std::pow(rn * s, p) * std::exp(-kPi * mu * s * s + slope * s);
        };
        const double t = term(r);
        const double next = term(r + 1);
        sum += t;
        const double q = t > 0.0 ? next / t : 0.0;
        if (q < 0.5 && next <= 1e-3 * sum) return sum + next / (1.0 - q);
        if (t == 0.0) return sum;
        if (r > R + 100000) throw LatticeBudgetError("theta tail bound does not converge");
    }
}

double min_imag_eigenvalue(const SiegelPoint& Omega) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Omega.imag() + Omega.imag().transpose()));
    return es.eigenvalues().minCoeff();
}

// Visits every k with |k|_inf <= R and hands the term plus its shell to f.
template <class F>
void for_each_lattice_point(int n, int R, F&& f) {
    std::vector<int> k(static_cast<size_t>(n), -R);
    Eigen::VectorXd kv(n);
    while (true) {
        int shell = 0;
        for (int j = 0; j < n; ++j) {
            kv(j) = k[static_cast<size_t>(j)];
            shell = std::max(shell, std::abs(k[static_cast<size_t>(j)]));
        }
        f(kv, shell);
        int j = n - 1;
        while (j >= 0 && k[static_cast<size_t>(j)] == R) {
            k[static_cast<size_t>(j)] = -R;
            --j;
        }
        if (j < 0) break;
        ++k[static_cast<size_t>(j)];
    }
}

struct Setup {
    int n;
    int R;
    double bound;
};

std::pair<int, double> radius_for(int n, double mu, double slope, double tol, int power) {
    if (mu <= 0.0) throw std::domain_error("theta: needs positive imaginary part");
    int R = static_cast<int>(std::ceil(slope / (2.0 * kPi * mu)));
    while (true) {
        if (std::pow(2.0 * R + 1.0, n) > static_cast<double>(kLatticeBudget))
            throw LatticeBudgetError("theta: tolerance unreachable within lattice budget");
        const double bound = std::pow(2.0 * kPi, power) * tail_sum(n, mu, slope, R, power);
        if (bound < tol) return {R, bound};
        ++R;
    }
}

Setup prepare(const ThetaInput& in, double tol, int power) {
    if (!(tol > 0.0)) throw std::invalid_argument("theta: tol must be positive");
    const int n = static_cast<int>(in.Omega.rows());
    if (in.z.size() != n) throw std::invalid_argument("theta: dimension mismatch");
    validate_siegel(in.Omega, 1e-10);
    const auto [R, bound] =
        radius_for(n, min_imag_eigenvalue(in.Omega), 2.0 * kPi * in.z.imag().norm(), tol, power);
    return {n, R, bound};
}

cplx summand(const ThetaInput& in, const Eigen::VectorXd& k) {
    const Eigen::VectorXcd kc = k.cast<cplx>();
    const cplx quad = (kc.transpose() * in.Omega * kc)(0);
    const cplx lin = (kc.transpose() * in.z)(0);
    return std::exp(I_UNIT * (kPi * quad + 2.0 * kPi * lin + in.lambda));
}

}  // namespace

std::pair<int, double> theta_radius(int n, double mu, double slope, double tol) {
    return radius_for(n, mu, slope, tol, 0);
}

ThetaResult theta_eval(const ThetaInput& in, double tol) {
    const Setup st = prepare(in, tol, 0);
    std::vector<CompensatedSum> shells(static_cast<size_t>(st.R) + 1);
    double magnitude = 0.0;
    for_each_lattice_point(st.n, st.R, [&](const Eigen::VectorXd& k, int shell) {
        const cplx t = summand(in, k);
        magnitude += std::abs(t);
        shells[static_cast<size_t>(shell)].add(t);
    });
    // outermost shells first, the small terms
    CompensatedSum total;
    for (int r = st.R; r >= 0; --r) total.add(shells[static_cast<size_t>(r)].value());
    return {total.value(), st.bound, st.R, magnitude};
}

ThetaGradResult theta_grad(const ThetaInput& in, double tol) {
    const Setup st = prepare(in, tol, 1);
    std::vector<std::vector<CompensatedSum>> shells(static_cast<size_t>(st.n),
                                                    std::vector<CompensatedSum>(static_cast<size_t>(st.R) + 1));
    for_each_lattice_point(st.n, st.R, [&](const Eigen::VectorXd& k, int shell) {
        const cplx t = summand(in, k);
        for (int j = 0; j < st.n; ++j)
            if (k(j) != 0.0) shells[static_cast<size_t>(j)][static_cast<size_t>(shell)].add(2.0 * kPi * I_UNIT * k(j) * t);
    });
    ThetaGradResult out;
    out.value = Eigen::VectorXcd(st.n);
    for (int j = 0; j < st.n; ++j) {
        CompensatedSum total;
        for (int r = st.R; r >= 0; --r) total.add(shells[static_cast<size_t>(j)][static_cast<size_t>(r)].value());
        out.value(j) = total.value();
    }
    out.tail_bound = st.bound;
    out.radius = st.R;
    return out;
}

ThetaResult pair_with_eZ(const GaussianState& s, double tol) {
    const double scale = std::abs(s.amplitude);
    if (scale == 0.0) return {cplx(0.0, 0.0), 0.0, 0, 0.0};
    ThetaInput in;
    in.z = s.b / (2.0 * kPi);
    in.Omega = s.Q / (2.0 * kPi);
    in.Omega = 0.5 * (in.Omega + in.Omega.transpose()).eval();
    in.lambda = 0.0;
    ThetaResult r = theta_eval(in, tol / scale);
    r.value *= s.amplitude;
    r.tail_bound *= scale;
    r.magnitude *= scale;
    return r;
}

cplx generating_sum(const std::vector<BranchState>& branches, double tol) {
    cplx total = 0.0;
    for (const auto& b : branches) total += std::exp(I_UNIT * b.lambda) * pair_with_eZ(b.psi, tol).value;
    return total;
}

PhaseLift phase_lift(const PhasePath& path, double guard, double max_jump) {
    if (path.values.empty()) throw std::invalid_argument("phase_lift: empty path");
    if (path.t.size() != path.values.size()) throw std::invalid_argument("phase_lift: sample count mismatch");
    PhaseLift out;
    out.argument.reserve(path.values.size());
    double prev = 0.0;
    for (size_t i = 0; i < path.values.size(); ++i) {
        const cplx v = path.values[i];
        if (std::abs(v) <= guard) throw PhaseLiftError("phase_lift: value too close to zero on the path");
        if (i == 0) {
            prev = std::arg(v);
        } else {
            const double jump = std::arg(v / path.values[i - 1]);
            if (std::abs(jump) >= max_jump) throw PhaseLiftError("phase_lift: sampling too coarse");
            prev += jump;
        }
        out.argument.push_back(prev);
    }
    out.increment = out.argument.back() - out.argument.front();
    out.winding = std::lround(out.increment / (2.0 * kPi));
    return out;
}

PhaseLift phase_lift(const std::function<cplx(double)>& f, double t0, double t1, int initial_samples, double guard) {
    if (initial_samples < 2) throw std::invalid_argument("phase_lift: need at least two samples");
    PhasePath path;
    for (int i = 0; i < initial_samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (initial_samples - 1);
        path.t.push_back(t);
        path.values.push_back(f(t));
    }
    for (int round = 0; round < 30; ++round) {
        PhasePath refined;
        bool changed = false;
        for (size_t i = 0; i < path.t.size(); ++i) {
            if (i > 0) {
                const cplx a = path.values[i - 1], b = path.values[i];
                const bool small = std::abs(a) <= guard || std::abs(b) <= guard;
                if (!small && std::abs(std::arg(b / a)) > kPi / 8.0) {
                    const double tm = 0.5 * (path.t[i - 1] + path.t[i]);
                    refined.t.push_back(tm);
                    refined.values.push_back(f(tm));
                    changed = true;
                }
            }
            refined.t.push_back(path.t[i]);
            refined.values.push_back(path.values[i]);
        }
        path = std::move(refined);
        if (!changed) break;
    }
    return phase_lift(path, guard);
}

}  // namespace symplectic
