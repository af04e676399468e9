#include "symplectic/frobenius_torus.hpp"

#include "symplectic/coherent_class.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace symplectic {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I_UNIT{0.0, 1.0};

cplx mode_phase(const std::vector<int>& m, const Eigen::VectorXd& theta) {
    double s = 0.0;
    for (size_t j = 0; j < m.size(); ++j) s += m[j] * theta(static_cast<Eigen::Index>(j));
    return std::exp(I_UNIT * s);
}

void check_branch(const FrobeniusStructure& F, int branch) {
    if (branch < 0 || branch >= F.branch_count()) throw std::out_of_range("frobenius: branch out of range");
}

void check_point(const FrobeniusStructure& F, long point) {
    if (point < 0 || point >= F.grid.size()) throw std::out_of_range("frobenius: grid point out of range");
}

Eigen::MatrixXd kaehler_j(int n) {
    if (n % 2 != 0) throw std::invalid_argument("frobenius: the base needs even dimension for a Kaehler structure");
    return standard_complex_structure(n / 2);
}

CoherentPoint point_for(const Eigen::VectorXd& p) {
    const Eigen::Index n = p.size();
    CoherentPoint c;
    c.h = PhaseVector::Zero(2 * n);
    c.h.tail(n) = p;
    c.T = I_UNIT * Eigen::MatrixXcd::Identity(n, n);
    return c;
}

// Gauss-Legendre line integral of a covector field along a straight segment.
template <class Field>
double segment_integral(const Field& alpha, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                        const QuadratureRule& rule) {
    const Eigen::VectorXd d = b - a;
    double s = 0.0;
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
        const double t = 0.5 * (rule.nodes(q) + 1.0);
        s += 0.5 * rule.weights(q) * alpha(a + t * d).dot(d);
    }
    return s;
}

}  // namespace

// ------------------------------------------------------------------ sections and grids

void TorusSection::add_mode(const std::vector<int>& m, cplx c) {
    if (static_cast<int>(m.size()) != n) throw std::invalid_argument("add_mode: wrong frequency length");
    if (std::all_of(m.begin(), m.end(), [](int v) { return v == 0; }))
        throw std::invalid_argument("add_mode: zero frequency");
    std::vector<int> neg(m);
    for (auto& v : neg) v = -v;
    fourier[m] += c;
    fourier[neg] += std::conj(c);
}

void TorusSection::validate(double tol) const {
    if (eta.size() != n) throw std::invalid_argument("TorusSection: eta length mismatch");
    for (const auto& [m, c] : fourier) {
        if (static_cast<int>(m.size()) != n) throw std::invalid_argument("TorusSection: frequency length mismatch");
        if (std::all_of(m.begin(), m.end(), [](int v) { return v == 0; }))
            throw std::invalid_argument("TorusSection: zero frequency is not allowed");
        std::vector<int> neg(m);
        for (auto& v : neg) v = -v;
        auto it = fourier.find(neg);
        const cplx partner = it == fourier.end() ? cplx(0.0, 0.0) : it->second;
        if (std::abs(partner - std::conj(c)) > tol) throw std::invalid_argument("TorusSection: coefficients not Hermitian");
    }
}

double TorusSection::f(const Eigen::VectorXd& theta) const {
    cplx s = 0.0;
    for (const auto& [m, c] : fourier) s += c * mode_phase(m, theta);
    return s.real();
}

Eigen::VectorXd TorusSection::covector(const Eigen::VectorXd& theta) const {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(n);
    for (const auto& [m, c] : fourier) {
        const cplx t = I_UNIT * c * mode_phase(m, theta);
        for (int j = 0; j < n; ++j) g(j) += static_cast<double>(m[static_cast<size_t>(j)]) * t;
    }
    return g.real() + eta;
}

Eigen::MatrixXd TorusSection::hessian(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [m, c] : fourier) {
        const cplx t = -c * mode_phase(m, theta);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                h(a, b) += static_cast<double>(m[static_cast<size_t>(a)] * m[static_cast<size_t>(b)]) * t;
    }
    return h.real();
}

double TorusSection::primitive(const Eigen::VectorXd& theta) const { return f(theta) + eta.dot(theta); }

long TorusGrid::size() const {
    long s = 1;
    for (int g : shape) s *= g;
    return s;
}

double TorusGrid::spacing(int axis) const { return 2.0 * kPi / shape[static_cast<size_t>(axis)]; }

std::vector<int> TorusGrid::multi_index(long flat) const {
    std::vector<int> idx(shape.size());
    for (int j = dim() - 1; j >= 0; --j) {
        idx[static_cast<size_t>(j)] = static_cast<int>(flat % shape[static_cast<size_t>(j)]);
        flat /= shape[static_cast<size_t>(j)];
    }
    return idx;
}

long TorusGrid::flat_index(const std::vector<int>& idx) const {
    long flat = 0;
    for (int j = 0; j < dim(); ++j) {
        const int g = shape[static_cast<size_t>(j)];
        flat = flat * g + ((idx[static_cast<size_t>(j)] % g) + g) % g;
    }
    return flat;
}

Eigen::VectorXd TorusGrid::point(long flat) const {
    const auto idx = multi_index(flat);
    Eigen::VectorXd x(dim());
    for (int j = 0; j < dim(); ++j) x(j) = spacing(j) * idx[static_cast<size_t>(j)];
    return x;
}

// ------------------------------------------------------------------ construction

CausticReport detect_caustics(const BranchedLagrangian& L, const TorusGrid& grid, double gap) {
    CausticReport r;
    r.min_separation = std::numeric_limits<double>::infinity();
    const size_t k = L.branches.size();
    for (long pt = 0; pt < grid.size(); ++pt) {
        const Eigen::VectorXd x = grid.point(pt);
        std::vector<Eigen::VectorXd> cov;
        for (const auto& b : L.branches) cov.push_back(b.covector(x));
        double here = std::numeric_limits<double>::infinity();
        for (size_t a = 0; a < k; ++a)
            for (size_t b = a + 1; b < k; ++b) here = std::min(here, (cov[a] - cov[b]).norm());
        r.min_separation = std::min(r.min_separation, here);
        if (here < gap) r.locus.push_back(pt);
    }
    return r;
}

FrobeniusStructure build_frobenius(const BranchedLagrangian& L, const FrobeniusConfig& config) {
    if (L.branches.empty()) throw std::invalid_argument("build_frobenius: no branches");
    if (config.grid.dim() != L.n) throw std::invalid_argument("build_frobenius: grid dimension mismatch");
    for (int g : config.grid.shape)
        if (g < 2) throw std::invalid_argument("build_frobenius: grid needs at least two points per axis");
    for (const auto& b : L.branches) {
        if (b.n != L.n) throw std::invalid_argument("build_frobenius: branch dimension mismatch");
        b.validate();
    }
    FrobeniusStructure F;
    F.n = L.n;
    F.grid = config.grid;
    F.source = L;
    F.T = I_UNIT * Eigen::MatrixXcd::Identity(L.n, L.n);
    F.J = standard_complex_structure(L.n);
    F.caustic_gap = config.caustic_gap;
    F.caustics = detect_caustics(L, config.grid, config.caustic_gap);
    if (!F.caustics.locus.empty() && !config.allow_singular)
        throw CausticError("build_frobenius: branches collide on the grid", F.caustics);
    for (const auto& b : L.branches) {
        std::vector<Eigen::VectorXd> cov;
        std::vector<double> prim;
        for (long pt = 0; pt < F.grid.size(); ++pt) {
            const Eigen::VectorXd x = F.grid.point(pt);
            cov.push_back(b.covector(x));
            prim.push_back(b.primitive(x));
        }
        F.covector.push_back(std::move(cov));
        F.primitive.push_back(std::move(prim));
    }
    return F;
}

GaussianState branch_state(const FrobeniusStructure& F, int branch, long point) {
    check_branch(F, branch);
    check_point(F, point);
    CoherentPoint c = point_for(F.covector[static_cast<size_t>(branch)][static_cast<size_t>(point)]);
    c.T = F.T;
    return coherent_state(c);
}

MultiplyResult frobenius_multiply(const FrobeniusStructure& F, const Eigen::VectorXd& X, int branch, long point,
                                  double tol) {
    if (X.size() != F.n) throw std::invalid_argument("frobenius_multiply: tangent vector dimension mismatch");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * F.n);
    v.tail(F.n) = X;
    const Eigen::VectorXcd u = v.cast<cplx>() - I_UNIT * (F.J * v).cast<cplx>();
    const EigenvalueReport r = operator_on_gaussian(u, branch_state(F, branch, point));
    if (r.residual > tol) throw std::logic_error("frobenius_multiply: state is not an eigenvector");
    return {r.eigenvalue, r.residual};
}

// ------------------------------------------------------------------ spectral cover

TrigInterpolant::TrigInterpolant(const TorusGrid& grid, const std::vector<double>& samples) : grid_(grid) {
    if (static_cast<long>(samples.size()) != grid.size()) throw std::invalid_argument("TrigInterpolant: sample count");
    coeffs_.assign(samples.begin(), samples.end());
    Eigen::FFT<double> fft;
    // one-dimensional transforms along each axis
    const long total = grid.size();
    long stride = 1;
    for (int axis = grid.dim() - 1; axis >= 0; --axis) {
        const int g = grid.shape[static_cast<size_t>(axis)];
        const long block = stride * g;
        std::vector<cplx> line(static_cast<size_t>(g)), out;
        for (long base = 0; base < total; base += block) {
            for (long off = 0; off < stride; ++off) {
                for (int k = 0; k < g; ++k) line[static_cast<size_t>(k)] = coeffs_[static_cast<size_t>(base + off + k * stride)];
                fft.fwd(out, line);
                for (int k = 0; k < g; ++k) coeffs_[static_cast<size_t>(base + off + k * stride)] = out[static_cast<size_t>(k)];
            }
        }
        stride = block;
    }
    for (auto& c : coeffs_) c /= static_cast<double>(total);
}

double TrigInterpolant::operator()(const Eigen::VectorXd& theta) const {
    const int n = grid_.dim();
    // per-axis factors, the Nyquist frequency folded into a cosine
    std::vector<std::vector<cplx>> factor(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const int g = grid_.shape[static_cast<size_t>(j)];
        auto& fj = factor[static_cast<size_t>(j)];
        fj.resize(static_cast<size_t>(g));
        for (int k = 0; k < g; ++k) {
            if (2 * k == g) {
                fj[static_cast<size_t>(k)] = std::cos(0.5 * g * theta(j));
            } else {
                const int m = 2 * k < g ? k : k - g;
                fj[static_cast<size_t>(k)] = std::exp(I_UNIT * (m * theta(j)));
            }
        }
    }
    cplx s = 0.0;
    for (long flat = 0; flat < grid_.size(); ++flat) {
        const auto idx = grid_.multi_index(flat);
        cplx t = coeffs_[static_cast<size_t>(flat)];
        for (int j = 0; j < n; ++j) t *= factor[static_cast<size_t>(j)][static_cast<size_t>(idx[static_cast<size_t>(j)])];
        s += t;
    }
    return s.real();
}

double TrigInterpolant::mean() const { return coeffs_.empty() ? 0.0 : coeffs_.front().real(); }

Eigen::VectorXd RecoveredForm::operator()(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(components.size()));
    for (size_t j = 0; j < components.size(); ++j) v(static_cast<Eigen::Index>(j)) = components[j](theta);
    return v;
}

SpectralCover spectral_cover(const FrobeniusStructure& F) {
    const int k = F.branch_count();
    const int n = F.n;
    const long P = F.grid.size();
    if (k > 8) throw std::invalid_argument("spectral_cover: at most eight branches");

    // unordered eigen-covectors per point
    std::vector<std::vector<Eigen::VectorXd>> found(static_cast<size_t>(P));
    for (long pt = 0; pt < P; ++pt) {
        auto& here = found[static_cast<size_t>(pt)];
        for (int b = 0; b < k; ++b) {
            Eigen::VectorXd c(n);
            for (int j = 0; j < n; ++j) c(j) = frobenius_multiply(F, Eigen::VectorXd::Unit(n, j), b, pt).eigenvalue.real();
            here.push_back(c);
        }
        std::sort(here.begin(), here.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
            return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
        });
    }

    SpectralCover out;
    out.ambiguity_radius = std::numeric_limits<double>::infinity();
    std::vector<std::vector<Eigen::VectorXd>> matched(static_cast<size_t>(k), std::vector<Eigen::VectorXd>(static_cast<size_t>(P)));
    for (long pt = 0; pt < P; ++pt) {
        const auto& here = found[static_cast<size_t>(pt)];
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b)
                out.ambiguity_radius = std::min(out.ambiguity_radius, 0.5 * (here[static_cast<size_t>(a)] - here[static_cast<size_t>(b)]).norm());
        std::vector<int> perm(static_cast<size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        if (pt > 0) {
            // neighbour already visited: decrement the last nonzero index
            auto idx = F.grid.multi_index(pt);
            int axis = F.grid.dim() - 1;
            while (idx[static_cast<size_t>(axis)] == 0) --axis;
            --idx[static_cast<size_t>(axis)];
            const long prev = F.grid.flat_index(idx);
            double best = std::numeric_limits<double>::infinity();
            std::vector<int> trial = perm;
            do {
                double cost = 0.0;
                for (int b = 0; b < k; ++b)
                    cost += (here[static_cast<size_t>(trial[static_cast<size_t>(b)])] - matched[static_cast<size_t>(b)][static_cast<size_t>(prev)]).norm();
                if (cost < best) {
                    best = cost;
                    perm = trial;
                }
            } while (std::next_permutation(trial.begin(), trial.end()));
        }
        for (int b = 0; b < k; ++b) matched[static_cast<size_t>(b)][static_cast<size_t>(pt)] = here[static_cast<size_t>(perm[static_cast<size_t>(b)])];
    }

    const QuadratureRule edge = gauss_legendre(8);
    const QuadratureRule loop = gauss_legendre(64);
    for (int b = 0; b < k; ++b) {
        RecoveredForm form;
        form.samples = matched[static_cast<size_t>(b)];
        for (int j = 0; j < n; ++j) {
            std::vector<double> comp(static_cast<size_t>(P));
            for (long pt = 0; pt < P; ++pt) comp[static_cast<size_t>(pt)] = form.samples[static_cast<size_t>(pt)](j);
            form.components.emplace_back(F.grid, comp);
        }
        // plaquette circulations
        for (long pt = 0; pt < P; ++pt) {
            const Eigen::VectorXd x = F.grid.point(pt);
            for (int a = 0; a < n; ++a)
                for (int c = a + 1; c < n; ++c) {
                    const Eigen::VectorXd ea = F.grid.spacing(a) * Eigen::VectorXd::Unit(n, a);
                    const Eigen::VectorXd ec = F.grid.spacing(c) * Eigen::VectorXd::Unit(n, c);
                    const double circ = segment_integral(form, x, x + ea, edge) +
                                        segment_integral(form, x + ea, x + ea + ec, edge) +
                                        segment_integral(form, x + ea + ec, x + ec, edge) +
                                        segment_integral(form, x + ec, x, edge);
                    out.max_plaquette_circulation =
                        std::max(out.max_plaquette_circulation, std::abs(circ) / (F.grid.spacing(a) * F.grid.spacing(c)));
                }
        }
        Eigen::VectorXd per(n);
        for (int j = 0; j < n; ++j)
            per(j) = segment_integral(form, Eigen::VectorXd::Zero(n), 2.0 * kPi * Eigen::VectorXd::Unit(n, j), loop) /
                     (2.0 * kPi);
        out.periods.push_back(per);
        out.branches.push_back(std::move(form));
    }
    return out;
}

double round_trip_error(const FrobeniusStructure& F, const SpectralCover& cover) {
    const int k = F.branch_count();
    if (static_cast<int>(cover.branches.size()) != k) return std::numeric_limits<double>::infinity();
    std::vector<int> perm(static_cast<size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double err = 0.0;
        for (int b = 0; b < k; ++b)
            for (long pt = 0; pt < F.grid.size(); ++pt)
                err = std::max(err, (cover.branches[static_cast<size_t>(perm[static_cast<size_t>(b)])].samples[static_cast<size_t>(pt)] -
                                     F.covector[static_cast<size_t>(b)][static_cast<size_t>(pt)])
                                        .cwiseAbs()
                                        .maxCoeff());
        best = std::min(best, err);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

cplx generating_function(const FrobeniusStructure& F, const Eigen::VectorXd& theta, double tol) {
    if (theta.size() != F.n) throw std::invalid_argument("generating_function: point dimension mismatch");
    std::vector<BranchState> branches;
    std::vector<Eigen::VectorXd> cov;
    for (const auto& b : F.source.branches) {
        cov.push_back(b.covector(theta));
        CoherentPoint c = point_for(cov.back());
        c.T = F.T;
        branches.push_back({coherent_state(c), b.primitive(theta)});
    }
    for (size_t a = 0; a < cov.size(); ++a)
        for (size_t b = a + 1; b < cov.size(); ++b)
            if ((cov[a] - cov[b]).norm() < F.caustic_gap)
                throw CausticError("generating_function: branches collide at the point", {});
    return generating_sum(branches, tol);
}

// ------------------------------------------------------------------ Euler field and spectrum

EulerSample euler_field(const FrobeniusStructure& F, int branch, const Eigen::VectorXd& theta, double offset) {
    check_branch(F, branch);
    const Eigen::MatrixXd J = kaehler_j(F.n);
    const auto& sec = F.source.branches[static_cast<size_t>(branch)];
    const Eigen::VectorXd g = sec.covector(theta);
    EulerSample s;
    const double g2 = g.squaredNorm();
    if (g2 < 1e-24) {
        s.field = Eigen::VectorXd::Zero(F.n);
        s.critical = true;
        return s;
    }
    s.field = (sec.primitive(theta) + offset) * (-J * g) / g2;
    return s;
}

SpectrumReport compute_spectrum(const FrobeniusStructure& F, double step_scale, double hyp_tol, double offset) {
    const int k = F.branch_count();
    const int n = F.n;
    if (n != 2 * k) throw HypothesisError("compute_spectrum: needs as many branches as half the base dimension");
    const Eigen::MatrixXd J = kaehler_j(n);
    double h = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) h = std::min(h, F.grid.spacing(j));
    h *= step_scale;

    SpectrumReport rep;
    std::vector<std::vector<double>> wx(static_cast<size_t>(k));
    rep.kernel_residual.assign(static_cast<size_t>(k), 0.0);
    for (long pt = 0; pt < F.grid.size(); ++pt) {
        const Eigen::VectorXd x = F.grid.point(pt);
        std::vector<Eigen::VectorXd> g;
        for (int i = 0; i < k; ++i) g.push_back(F.source.branches[static_cast<size_t>(i)].covector(x));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                const double g2 = g[static_cast<size_t>(i)].squaredNorm();
                if (g2 < 1e-24) continue;
                const double pairing = g[static_cast<size_t>(j)].dot(g[static_cast<size_t>(i)]) / g2;
                const double bracket = g[static_cast<size_t>(i)].dot(J * g[static_cast<size_t>(j)]);
                rep.hypothesis_residual = std::max(
                    {rep.hypothesis_residual, std::abs(pairing - (i == j ? 1.0 : 0.0)), std::abs(bracket)});
            }
        if (rep.hypothesis_residual > hyp_tol)
            throw HypothesisError("compute_spectrum: pairing or Poisson-commutation hypothesis fails, residual " +
                                  std::to_string(rep.hypothesis_residual));
        for (int i = 0; i < k; ++i) {
            const Eigen::VectorXd& gi = g[static_cast<size_t>(i)];
            const double g2 = gi.squaredNorm();
            if (g2 < 1e-24) {
                wx[static_cast<size_t>(i)].push_back(0.0);
                continue;
            }
            auto dE = [&](const Eigen::VectorXd& dir) {
                return ((euler_field(F, i, x + h * dir, offset).field - euler_field(F, i, x - h * dir, offset).field) /
                        (2.0 * h))
                    .eval();
            };
            const Eigen::VectorXd Y = -gi / g2;
            wx[static_cast<size_t>(i)].push_back(gi.dot(J * dE(Y)));
            // directions orthogonal to the complex line through Y
            Eigen::MatrixXd span(n, 2);
            span.col(0) = Y.normalized();
            span.col(1) = (J * Y).normalized();
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(span);
            const Eigen::MatrixXd Qfull = qr.householderQ();
            for (int c = 2; c < n; ++c)
                rep.kernel_residual[static_cast<size_t>(i)] =
                    std::max(rep.kernel_residual[static_cast<size_t>(i)], dE(Qfull.col(c)).norm());
        }
    }
    for (int i = 0; i < k; ++i) {
        const auto& v = wx[static_cast<size_t>(i)];
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double spread = 0.0;
        for (double w : v) spread = std::max(spread, std::abs(w - mean));
        rep.w.emplace_back(mean, 0.0);
        rep.spread.push_back(spread);
    }
    return rep;
}

TransportResult dubrovin_transport(const FrobeniusStructure& F, int branch, cplx z,
                                   const std::vector<Eigen::VectorXd>& vertices, int steps_per_edge) {
    check_branch(F, branch);
    if (vertices.size() < 2) throw std::invalid_argument("dubrovin_transport: need at least two vertices");
    if (steps_per_edge < 1) throw std::invalid_argument("dubrovin_transport: step count must be positive");
    const auto& sec = F.source.branches[static_cast<size_t>(branch)];
    cplx phi = 1.0;
    for (size_t e = 0; e + 1 < vertices.size(); ++e) {
        const Eigen::VectorXd a = vertices[e], d = vertices[e + 1] - vertices[e];
        const double dt = 1.0 / steps_per_edge;
        auto rate = [&](double t) { return -z * sec.covector(a + t * d).dot(d); };
        for (int s = 0; s < steps_per_edge; ++s) {
            const double t = s * dt;
            const cplx k1 = rate(t) * phi;
            const cplx k2 = rate(t + dt) * (phi + dt * k1);
            phi += 0.5 * dt * (k1 + k2);
        }
    }
    TransportResult r;
    r.holonomy = phi;
    r.closed_form = std::exp(-z * (sec.primitive(vertices.back()) - sec.primitive(vertices.front())));
    r.deviation = std::abs(r.holonomy - r.closed_form);
    return r;
}

// ------------------------------------------------------------------ scaling

namespace {

FockVector fiber_state(const Eigen::VectorXd& g, int N) {
    const Eigen::Index m = g.size() / 2;
    CoherentPoint c;
    c.h = PhaseVector(2 * m);
    c.h.head(m) = -g.head(m);
    c.h.tail(m) = g.tail(m);
    c.T = I_UNIT * Eigen::MatrixXcd::Identity(m, m);
    return project_gaussian(coherent_state(c), N);
}

Eigen::Vector4d scaling_features(const Eigen::VectorXd& g) {
    const Eigen::Index m = g.size() / 2;
    const Eigen::VectorXcd a = g.head(m).cast<cplx>() + I_UNIT * g.tail(m).cast<cplx>();
    const cplx tr2 = (a.transpose() * a)(0);
    return {g.squaredNorm(), tr2.real(), tr2.imag(), 1.0};
}

}  // namespace

std::vector<double> scaling_defect(const FrobeniusStructure& F, int branch, int fock_cutoff) {
    check_branch(F, branch);
    const int n = F.n;
    kaehler_j(n);
    const auto& sec = F.source.branches[static_cast<size_t>(branch)];
    const double eps = 1e-5;
    std::vector<double> out;
    for (long pt = 0; pt < F.grid.size(); ++pt) {
        const Eigen::VectorXd x = F.grid.point(pt);
        const EulerSample E = euler_field(F, branch, x);
        if (E.critical || E.field.norm() == 0.0) {
            out.push_back(0.0);
            continue;
        }
        const FockVector phi = fiber_state(sec.covector(x), fock_cutoff);
        const FockVector plus = fiber_state(sec.covector(x + eps * E.field), fock_cutoff);
        const FockVector minus = fiber_state(sec.covector(x - eps * E.field), fock_cutoff);
        const Eigen::VectorXcd dphi = (plus.c - minus.c) / (2.0 * eps);
        const double dnorm = (plus.c.squaredNorm() - minus.c.squaredNorm()) / (2.0 * eps);
        Eigen::MatrixXd DE(n, n);
        for (int c = 0; c < n; ++c)
            DE.col(c) = (euler_field(F, branch, x + eps * Eigen::VectorXd::Unit(n, c)).field -
                         euler_field(F, branch, x - eps * Eigen::VectorXd::Unit(n, c)).field) /
                        (2.0 * eps);
        const Eigen::VectorXcd lie = dphi + lie_derivative_flat(DE, phi).with_cutoff(fock_cutoff).c;
        out.push_back(dnorm - 2.0 * phi.c.dot(lie).real());
    }
    return out;
}

Eigen::Vector4d calibrate_scaling(const FrobeniusStructure& F, int branch, int fock_cutoff) {
    const std::vector<double> d = scaling_defect(F, branch, fock_cutoff);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(d.size()), 4);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(d.size()));
    const auto& sec = F.source.branches[static_cast<size_t>(branch)];
    for (long pt = 0; pt < F.grid.size(); ++pt) {
        A.row(pt) = scaling_features(sec.covector(F.grid.point(pt))).transpose();
        rhs(pt) = d[static_cast<size_t>(pt)];
    }
    return A.completeOrthogonalDecomposition().solve(rhs);
}

ScalingReport scaling_check(const FrobeniusStructure& F, int branch, const Eigen::Vector4d& weights, int fock_cutoff) {
    ScalingReport r;
    r.d = scaling_defect(F, branch, fock_cutoff);
    const auto& sec = F.source.branches[static_cast<size_t>(branch)];
    for (long pt = 0; pt < F.grid.size(); ++pt) {
        r.model.push_back(weights.dot(scaling_features(sec.covector(F.grid.point(pt)))));
        r.residual = std::max(r.residual, std::abs(r.model.back() - r.d[static_cast<size_t>(pt)]));
    }
    return r;
}

// ------------------------------------------------------------------ JSON

nlohmann::json to_json(const BranchedLagrangian& L, const TorusGrid& grid) {
    nlohmann::json j;
    j["n"] = L.n;
    j["branches"] = nlohmann::json::array();
    for (const auto& b : L.branches) {
        nlohmann::json jb;
        jb["fourier"] = nlohmann::json::array();
        for (const auto& [m, c] : b.fourier) jb["fourier"].push_back({m, c.real(), c.imag()});
        jb["eta"] = std::vector<double>(b.eta.data(), b.eta.data() + b.eta.size());
        j["branches"].push_back(jb);
    }
    std::vector<double> spacing;
    for (int a = 0; a < grid.dim(); ++a) spacing.push_back(grid.spacing(a));
    j["grid"] = {{"shape", grid.shape}, {"spacing", spacing}};
    return j;
}

std::pair<BranchedLagrangian, TorusGrid> lagrangian_from_json(const nlohmann::json& j) {
    BranchedLagrangian L;
    L.n = j.at("n").get<int>();
    if (L.n < 1) throw std::invalid_argument("lagrangian_from_json: n must be positive");
    for (const auto& jb : j.at("branches")) {
        TorusSection s(L.n);
        for (const auto& term : jb.at("fourier")) {
            const auto m = term.at(0).get<std::vector<int>>();
            s.fourier[m] += cplx(term.at(1).get<double>(), term.at(2).get<double>());
        }
        const auto eta = jb.at("eta").get<std::vector<double>>();
        if (static_cast<int>(eta.size()) != L.n) throw std::invalid_argument("lagrangian_from_json: eta length");
        s.eta = Eigen::Map<const Eigen::VectorXd>(eta.data(), L.n);
        s.validate(1e-12);
        L.branches.push_back(std::move(s));
    }
    TorusGrid grid;
    grid.shape = j.at("grid").at("shape").get<std::vector<int>>();
    if (grid.dim() != L.n) throw std::invalid_argument("lagrangian_from_json: grid dimension mismatch");
    if (j.at("grid").contains("spacing")) {
        const auto sp = j.at("grid").at("spacing").get<std::vector<double>>();
        for (int a = 0; a < grid.dim(); ++a)
            if (std::abs(sp.at(static_cast<size_t>(a)) - grid.spacing(a)) > 1e-12)
                throw std::invalid_argument("lagrangian_from_json: spacing must equal 2 pi / shape");
    }
    return {L, grid};
}

}  // namespace symplectic
