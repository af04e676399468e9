#include "cli.hpp"

#include "symplectic/coherent_class.hpp"
#include "symplectic/frobenius_torus.hpp"
#include "symplectic/harness_cli.hpp"
#include "symplectic/novikov_invariants.hpp"
#include "symplectic/theta_engine.hpp"
#include "symplectic/weyl_core.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

namespace symplectic::cli {

using nlohmann::json;

void RunReport::check(std::string id, bool passed, double metric, double threshold, std::string detail) {
    checks.push_back({std::move(id), passed, metric, threshold, std::move(detail)});
}

bool RunReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string RunReport::first_failure() const {
    for (const auto& c : checks)
        if (!c.passed) return c.id;
    return {};
}

namespace {

// JSON has no infinities; keep them readable instead of null
json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

}  // namespace

json RunReport::to_json() const {
    json cs = json::array();
    for (const auto& c : checks) {
        json e = {{"id", c.id}, {"passed", c.passed}, {"metric", number(c.metric)}, {"threshold", number(c.threshold)}};
        if (!c.detail.empty()) e["detail"] = c.detail;
        cs.push_back(e);
    }
    json j = {{"schema", 1}, {"command", command}, {"config", config}, {"checks", cs}, {"results", results},
              {"passed", passed()}};
    if (!passed()) j["first_failure"] = first_failure();
    return j;
}

namespace {

const cplx kI(0.0, 1.0);

// Raised for malformed input; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    bool json_out = false;
    unsigned seed = 1;
    std::optional<double> tol;
    std::optional<int> grid;

    double tol_or(double fallback) const { return tol.value_or(fallback); }
    json to_json() const {
        json j = {{"seed", seed}};
        j["tol"] = tol ? json(*tol) : json(nullptr);
        j["grid"] = grid ? json(*grid) : json(nullptr);
        return j;
    }
};

std::string format_double(double x, int digits = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string format_cplx(cplx z, int digits = 10) {
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= 1e-14 * scale) return format_double(z.real(), digits);
    std::string s = format_double(z.real(), digits);
    s += z.imag() < 0 ? "-" : "+";
    return s + format_double(std::abs(z.imag()), digits) + "i";
}

double parse_real(const std::string& s) {
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
}

// Accepts "1.5", "i", "-2i", "0.3+1.2i", "1e-3-4.5e-1i".
cplx parse_complex(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
    if (s.empty()) throw UsageError("empty complex number");
    if (s.back() != 'i') return parse_real(s);
    s.pop_back();
    size_t split = std::string::npos;
    for (size_t k = s.size(); k-- > 1;)
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    const std::string re = split == std::string::npos ? "" : s.substr(0, split);
    std::string im = split == std::string::npos ? s : s.substr(split);
    double imv = 0.0;
    if (im.empty() || im == "+") imv = 1.0;
    else if (im == "-") imv = -1.0;
    else imv = parse_real(im);
    return {re.empty() ? 0.0 : parse_real(re), imv};
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<long> parse_long_list(const std::string& s) {
    std::vector<long> out;
    for (const auto& t : split_list(s)) {
        const double v = parse_real(t);
        if (v != std::floor(v)) throw UsageError("not an integer: '" + t + "'");
        out.push_back(static_cast<long>(v));
    }
    return out;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("invalid JSON in '" + path + "': " + e.what());
    }
}

TorusGrid uniform_grid(int n, int points) {
    TorusGrid g;
    g.shape.assign(static_cast<size_t>(n), points);
    return g;
}

// ------------------------------------------------------------------ random inputs for verify

Eigen::MatrixXd random_symmetric(int n, std::mt19937& rng, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = g(rng);
    return 0.5 * (b + b.transpose());
}

PhaseVector random_phase(int n, std::mt19937& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    PhaseVector v(2 * n);
    for (auto& x : v) x = g(rng);
    return v;
}

MpWord random_word(int n, int len, std::mt19937& rng, double scale = 0.4) {
    MpWord w(n);
    for (int k = 0; k < len; ++k) {
        switch (rng() % 3) {
            case 0: {
                Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + random_symmetric(n, rng, scale);
                if (rng() % 2) a.row(0) *= -1.0;
                w = w * MpWord::gl(a);
                break;
            }
            case 1: w = w * MpWord::quad(random_symmetric(n, rng, scale)); break;
            default: w = w * MpWord::fourier(n); break;
        }
    }
    return w;
}

GaussianState random_gaussian(int n, std::mt19937& rng) {
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) + random_symmetric(n, rng, 0.3);
    GaussianState s;
    s.Q = random_symmetric(n, rng, 0.5).cast<cplx>() +
          kI * (m * m.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n)).cast<cplx>();
    std::normal_distribution<double> g(0.0, 0.5);
    s.b = Eigen::VectorXcd(n);
    for (int j = 0; j < n; ++j) s.b(j) = cplx(g(rng), g(rng));
    s.amplitude = cplx(0.8, -0.3);
    return s;
}

FockVector random_fock(int n, int N, std::mt19937& rng) {
    FockVector f = FockVector::zero(n, N);
    std::normal_distribution<double> g;
    for (auto& c : f.c) c = cplx(g(rng), g(rng));
    f.c /= f.norm();
    return f;
}

double gaussian_distance(const GaussianState& a, const GaussianState& b) {
    return std::max({std::abs(a.amplitude - b.amplitude), (a.Q - b.Q).cwiseAbs().maxCoeff(),
                     (a.b - b.b).cwiseAbs().maxCoeff()});
}

SiegelPoint identity_point(int n) { return kI * Eigen::MatrixXcd::Identity(n, n); }

// ------------------------------------------------------------------ verify suites

void verify_algebra(RunReport& r, const Globals&) {
    for (int n = 1; n <= 4; ++n) {
        int mismatches = 0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const auto aj = WeylElement::gen_a(n, j), ak = WeylElement::gen_a(n, k);
                const auto bj = WeylElement::gen_b(n, j), bk = WeylElement::gen_b(n, k);
                mismatches += !(ad_to_sp_exact(weyl_mul(aj, ak)) == sp_basis_y(n, j, k).scaled(-1));
                mismatches += !(ad_to_sp_exact(weyl_mul(bj, bk)) == sp_basis_z(n, j, k));
                mismatches += !(ad_to_sp_exact(weyl_mul(aj, bk) + weyl_mul(bk, aj)) == sp_basis_x(n, j, k).scaled(2));
            }
        r.check("lie-table-n" + std::to_string(n), mismatches == 0, mismatches, 0, "exact rational entries");
    }
    int bad = 0;
    const int n = 3;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const auto expected = WeylElement::scalar(n, j == k ? ExactComplex::imag_unit() : ExactComplex(0));
            bad += !(weyl_commutator(WeylElement::gen_a(n, j), WeylElement::gen_b(n, k)) == expected);
            bad += !weyl_commutator(WeylElement::gen_a(n, j), WeylElement::gen_a(n, k)).is_zero();
            bad += !weyl_commutator(WeylElement::gen_b(n, j), WeylElement::gen_b(n, k)).is_zero();
        }
    r.check("canonical-commutators", bad == 0, bad, 0);
}

void verify_rep(RunReport& r, const Globals& g) {
    std::mt19937 rng(g.seed);
    const int N = g.grid.value_or(16);
    if (N < 4) throw UsageError("--grid (Fock cutoff) must be at least 4");

    double comm = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 2;
        const PhaseVector v = random_phase(n, rng), w = random_phase(n, rng);
        const FockVector f = random_fock(n, N, rng);
        const auto vw = sigma_fock(v, sigma_fock(w, f)), wv = sigma_fock(w, sigma_fock(v, f));
        const Eigen::Index block = fock_basis(n, N)->prefix_size(N - 2);
        const Eigen::VectorXcd c = (vw.c - wv.c).head(block) + kI * omega0(v, w) * f.c.head(block);
        comm = std::max(comm, c.norm());
    }
    r.check("fock-commutator", comm < g.tol_or(1e-10), comm, g.tol_or(1e-10), "50 random pairs, |k| <= N-2");

    double gauss = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const GaussianState s = random_gaussian(n, rng);
        for (const MpWord& w : {MpWord::gl(Eigen::MatrixXd::Identity(n, n) + random_symmetric(n, rng, 0.3)),
                                MpWord::quad(random_symmetric(n, rng, 1.0)), MpWord::fourier(n)}) {
            const Eigen::MatrixXd rho = heisenberg_action(w);
            for (int e = 0; e < 2 * n; ++e) {
                const PhaseVector h = PhaseVector::Unit(2 * n, e);
                gauss = std::max(gauss, gaussian_distance(mp_act_gaussian(w, pi_act_gaussian(h, 0.0, s)),
                                                          pi_act_gaussian(rho * h, 0.0, mp_act_gaussian(w, s))));
            }
        }
    }
    r.check("intertwining-gaussian", gauss < 1e-12, gauss, 1e-12);

    double fock = 0.0;
    for (int n = 1; n <= 2; ++n) {
        const FockVector f = random_fock(n, N, rng);
        for (const MpWord& w : {MpWord::gl(Eigen::MatrixXd::Identity(n, n) + random_symmetric(n, rng, 0.2)),
                                MpWord::quad(random_symmetric(n, rng, 0.3)), MpWord::fourier(n)}) {
            const Eigen::MatrixXd rho = heisenberg_action(w);
            for (int e = 0; e < 2 * n; ++e) {
                const PhaseVector h = 0.5 * PhaseVector::Unit(2 * n, e);
                const FockOptions wide{40, N + 20, 1e-3}, back{40, N, 1e-3};
                const auto lhs = mp_act_fock(w, pi_act_fock(h, 0.0, f, wide), back);
                const auto rhs = pi_act_fock(rho * h, 0.0, mp_act_fock(w, f, wide), back);
                fock = std::max(fock, (lhs.c - rhs.c).head(fock_basis(n, N)->prefix_size(N - 3)).norm());
            }
        }
    }
    r.check("intertwining-fock", fock < 1e-7, fock, 1e-7, "|k| <= N-3");

    long bad_levels = 0, bad_mult = 0;
    for (int n = 1; n <= 4; ++n) {
        const auto basis = fock_basis(n, 6);
        const FockVector ones{n, 6, Eigen::VectorXcd::Ones(basis->size())};
        const auto mu = oscillator_level_apply(ones);
        for (Eigen::Index i = 0; i < basis->size(); ++i) bad_levels += mu.c(i) != cplx(2.0 * basis->level(i) + n);
        for (int k = 0; k <= 6; ++k) {
            long long binom = 1;
            for (int i = 1; i <= k; ++i) binom = binom * (n + i - 1) / i;
            bad_mult += oscillator_multiplicity(n, k) != binom;
        }
    }
    r.check("oscillator-levels", bad_levels == 0, static_cast<double>(bad_levels), 0, "2k + n, n <= 4, k <= 6");
    r.check("oscillator-multiplicity", bad_mult == 0, static_cast<double>(bad_mult), 0, "C(n+k-1, k)");
}

void verify_coherent(RunReport& r, const Globals& g) {
    std::mt19937 rng(g.seed);
    const double tol = g.tol_or(1e-10);

    double eig = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 3;
        const CoherentPoint p{random_phase(n, rng), identity_point(n)};
        const Eigen::VectorXcd got = annihilation_eigenvalues(p, Channel::A, tol);
        const Eigen::VectorXcd expected = p.h.tail(n).cast<cplx>() + kI * p.h.head(n).cast<cplx>();
        eig = std::max(eig, (got - expected).cwiseAbs().maxCoeff());
    }
    r.check("eigenvalues", eig < tol, eig, tol, "100 displacements at T = iI");

    double recip = 0.0;
    std::uniform_real_distribution<double> pos(0.2, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 3;
        PhaseVector h = random_phase(n, rng);
        for (int j = 0; j < n; ++j) h(j) = pos(rng);
        const CoherentPoint p{h, identity_point(n)}, q = reciprocal_point(h);
        for (Channel ch : {Channel::A, Channel::B})
            recip = std::max(recip, (annihilation_eigenvalues(p, ch, tol) - annihilation_eigenvalues(q, ch, tol))
                                        .cwiseAbs()
                                        .maxCoeff());
    }
    r.check("reciprocity", recip < tol, recip, tol);

    double overlap = 0.0, cocycle = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 1 + trial % 3;
        const MpWord w = random_word(n, 5, rng);
        const SiegelPoint T = identity_point(n);
        const GaussianState moved = mp_act_gaussian(w, gaussian_from_siegel(T));
        const Eigen::MatrixXd S = siegel_matrix(w);
        const GaussianState target = gaussian_from_siegel(siegel_act(S, T));
        const double ov = std::abs(gaussian_inner(moved, target)) / (gaussian_norm(moved) * gaussian_norm(target));
        overlap = std::max(overlap, std::abs(ov - 1.0));
        const Eigen::MatrixXcd den = -S.topRightCorner(n, n).cast<cplx>() * T + S.topLeftCorner(n, n).cast<cplx>();
        const cplx c = mp_cocycle(w, T);
        cocycle = std::max(cocycle, std::abs(c * c * den.determinant() - 1.0));
    }
    r.check("mumford-overlap", overlap < 1e-8, overlap, 1e-8, "25 words from T = iI");
    r.check("mumford-cocycle", cocycle < 1e-8, cocycle, 1e-8, "|c^2 det(-BT + A) - 1|");

    long bad = 0;
    for (auto [n, N] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {1, 2}, {1, 3}, {1, 4}, {2, 0}, {2, 1}, {2, 2}}) {
        const auto basis = fock_basis(n, N);
        const int m = static_cast<int>(basis->size());
        size_t brute = 0;
        for (long mask = 0; mask < (1L << m); ++mask) {
            ChainSet K{n, N, {}};
            for (int i = 0; i < m; ++i)
                if (mask & (1L << i)) K.members.insert(basis->index(i));
            brute += is_chain_incident(K);
        }
        bad += enumerate_chain_sets(n, N).size() != brute;
    }
    r.check("chain-set-counts", bad == 0, static_cast<double>(bad), 0, "(1, <=4) and (2, <=2)");
}

// ------------------------------------------------------------------ theta

SiegelPoint parse_matrix(const std::string& s, int n) {
    const auto items = split_list(s);
    SiegelPoint m(n, n);
    if (items.size() == static_cast<size_t>(n * n)) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = parse_complex(items[static_cast<size_t>(i * n + j)]);
    } else if (items.size() == 1) {
        m = parse_complex(items[0]) * Eigen::MatrixXcd::Identity(n, n);
    } else {
        throw UsageError("--omega needs 1 or n*n entries");
    }
    return m;
}

void theta_eval_cmd(RunReport& r, const Globals& g, int n, const std::string& z_text, const std::string& omega_text) {
    if (n < 1) throw UsageError("--n must be positive");
    const auto zs = split_list(z_text);
    ThetaInput in;
    in.z = Eigen::VectorXcd(n);
    if (zs.size() == 1)
        in.z.setConstant(parse_complex(zs[0]));
    else if (zs.size() == static_cast<size_t>(n))
        for (int j = 0; j < n; ++j) in.z(j) = parse_complex(zs[static_cast<size_t>(j)]);
    else
        throw UsageError("--z needs 1 or n entries");
    in.Omega = parse_matrix(omega_text, n);
    if ((in.Omega - in.Omega.transpose()).norm() > 1e-12) throw UsageError("--omega must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(in.Omega.imag());
    if (es.eigenvalues().minCoeff() <= 0) throw UsageError("--omega must have positive definite imaginary part");

    const double tol = g.tol_or(1e-12);
    const ThetaResult t = theta_eval(in, tol);
    r.results = {{"value", cplx_json(t.value)}, {"text", format_cplx(t.value)}, {"radius", t.radius},
                 {"tail_bound", t.tail_bound}};
    r.check("theta-tail", t.tail_bound <= tol, t.tail_bound, tol);
}

// ------------------------------------------------------------------ frobenius

// Two branches on the circle: 0.2 sin(theta) and 2 dtheta + 0.1 cos(2 theta).
BranchedLagrangian default_lagrangian() {
    BranchedLagrangian L;
    L.n = 1;
    TorusSection a(1), b(1);
    a.add_mode({1}, cplx(0.0, -0.1));
    b.add_mode({2}, cplx(0.05, 0.0));
    b.eta(0) = 2.0;
    L.branches = {a, b};
    return L;
}

BranchedLagrangian default_spectrum_lagrangian() {
    TorusSection s(2);
    s.eta << 2.0, 1.0;
    BranchedLagrangian L;
    L.n = 2;
    L.branches = {s};
    return L;
}

std::pair<BranchedLagrangian, TorusGrid> load_lagrangian(const std::string& path, const Globals& g,
                                                         BranchedLagrangian fallback, int default_points) {
    BranchedLagrangian L;
    TorusGrid grid;
    if (!path.empty()) {
        try {
            std::tie(L, grid) = lagrangian_from_json(read_json_file(path));
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError(std::string("bad Lagrangian input: ") + e.what());
        }
    } else {
        L = std::move(fallback);
        grid = uniform_grid(L.n, default_points);
    }
    if (g.grid) {
        if (*g.grid < 2) throw UsageError("--grid must be at least 2");
        grid = uniform_grid(L.n, *g.grid);
    }
    return {L, grid};
}

json caustics_json(const CausticReport& c) {
    json locus = json::array();
    for (long p : c.locus) locus.push_back(p);
    return {{"locus", locus}, {"min_separation", number(c.min_separation)}};
}

void frobenius_build_cmd(RunReport& r, const Globals& g, const std::string& input, double gap) {
    const auto [L, grid] = load_lagrangian(input, g, default_lagrangian(), 16);
    const FrobeniusStructure F = build_frobenius(L, {grid, gap, true});
    r.config["input"] = input.empty() ? json("builtin") : json(input);
    r.results = {{"lagrangian", to_json(L, grid)}, {"branches", F.branch_count()}, {"caustics", caustics_json(F.caustics)}};
    r.check("caustic-free", F.caustics.locus.empty(), F.caustics.min_separation, gap,
            F.caustics.locus.empty() ? "" : std::to_string(F.caustics.locus.size()) + " grid points below the gap");
}

void frobenius_spectral_cmd(RunReport& r, const Globals& g, const std::string& input, double gap) {
    const auto [L, grid] = load_lagrangian(input, g, default_lagrangian(), 16);
    const FrobeniusStructure F = build_frobenius(L, {grid, gap, false});
    const SpectralCover cover = spectral_cover(F);
    const double err = round_trip_error(F, cover);
    json periods = json::array();
    for (const auto& p : cover.periods) periods.push_back(vector_json(p));
    r.config["input"] = input.empty() ? json("builtin") : json(input);
    r.results = {{"round_trip_error", err},
                 {"max_plaquette_circulation", cover.max_plaquette_circulation},
                 {"ambiguity_radius", number(cover.ambiguity_radius)},
                 {"periods", periods}};
    r.check("round-trip", err < g.tol_or(1e-8), err, g.tol_or(1e-8));
    r.check("closedness", cover.max_plaquette_circulation < 1e-6, cover.max_plaquette_circulation, 1e-6);
}

void frobenius_spectrum_cmd(RunReport& r, const Globals& g, const std::string& input) {
    const auto [L, grid] = load_lagrangian(input, g, default_spectrum_lagrangian(), 8);
    const SpectrumReport s = compute_spectrum(build_frobenius(L, {grid}));
    TorusGrid coarse = grid;
    for (auto& k : coarse.shape) k = std::max(2, k / 2);
    const SpectrumReport h = compute_spectrum(build_frobenius(L, {coarse}));
    json w = json::array(), spread = json::array();
    double worst_spread = 0.0, worst_change = 0.0;
    for (size_t i = 0; i < s.w.size(); ++i) {
        w.push_back(cplx_json(s.w[i]));
        spread.push_back(s.spread[i]);
        worst_spread = std::max(worst_spread, s.spread[i]);
        worst_change = std::max(worst_change, std::abs(s.w[i] - h.w[i]));
    }
    r.config["input"] = input.empty() ? json("builtin") : json(input);
    r.results = {{"w", w}, {"spread", spread}, {"halving_change", worst_change},
                 {"hypothesis_residual", s.hypothesis_residual}};
    r.check("spectrum-constant", worst_spread < g.tol_or(1e-5), worst_spread, g.tol_or(1e-5));
    r.check("spectrum-grid-halving", worst_change < 1e-4, worst_change, 1e-4);
}

// ------------------------------------------------------------------ flow

HamiltonianSpec load_hamiltonian(const std::string& path, double eps) {
    if (path.empty()) return pendulum(eps);
    try {
        return hamiltonian_from_json(read_json_file(path));
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad Hamiltonian input: ") + e.what());
    }
}

json point_json(const FixedPointRecord& p) {
    return {{"location", vector_json(p.location)}, {"residual", p.residual}, {"nondegeneracy", p.nondegeneracy}};
}

void flow_fixed_points_cmd(RunReport& r, const Globals& g, const std::string& input, double eps, double window) {
    const HamiltonianSpec H = load_hamiltonian(input, eps);
    FixedPointConfig cfg;
    cfg.p_window = window;
    if (g.grid) cfg.theta_seeds = *g.grid;
    r.config["hamiltonian"] = to_json(H);
    const double tol = g.tol_or(1e-9);
    try {
        const FixedPointSearch s = find_fixed_points(H, cfg);
        json pts = json::array();
        double worst = 0.0;
        for (const auto& p : s.points) {
            pts.push_back(point_json(p));
            worst = std::max(worst, p.residual);
        }
        r.results = {{"fixed_points", pts}, {"unresolved_seeds", s.unresolved_seeds.size()}};
        r.check("fixed-points-nondegenerate", true, 0, cfg.degeneracy_tol);
        r.check("fixed-point-residual", worst < tol, worst, tol);
    } catch (const DegenerateFixedPointError& e) {
        r.results = {{"degenerate_point", point_json(e.record)}};
        r.check("fixed-points-nondegenerate", false, std::abs(e.record.nondegeneracy), cfg.degeneracy_tol, e.what());
    }
}

void flow_coincidence_cmd(RunReport& r, const Globals& g, const std::string& input, double eps, int count) {
    CoincidenceConfig cc;
    if (g.tol) cc.tolerance = *g.tol;
    if (g.grid) cc.frobenius_grid = *g.grid;
    r.config["tolerance"] = cc.tolerance;
    r.config["frobenius_grid"] = cc.frobenius_grid;
    r.config["label"] = "graph-case analogue";

    auto record = [&](const std::string& id, const json& run) {
        if (run.contains("error")) {
            r.check(id, false, std::numeric_limits<double>::infinity(), cc.tolerance, run["error"].get<std::string>());
            return;
        }
        const json& rep = run.contains("report") ? run["report"] : run;
        double worst = 0.0;
        for (const auto& [name, d] : rep["distances"].items())
            worst = std::max(worst, d.is_number() ? d.get<double>() : std::numeric_limits<double>::infinity());
        r.check(id, rep["passed"].get<bool>(), worst, cc.tolerance, rep.value("diagnostic", std::string()));
    };

    if (!input.empty()) {
        const HamiltonianSpec H = load_hamiltonian(input, eps);
        r.config["hamiltonian"] = to_json(H);
        try {
            const json rep = to_json(coincidence_report(H, cc));
            r.results = {{"runs", json::array({rep})}};
            record("coincidence-0", rep);
        } catch (const DegenerateFixedPointError& e) {
            r.results = {{"degenerate_point", point_json(e.record)}};
            r.check("coincidence-nondegenerate", false, std::abs(e.record.nondegeneracy), cc.fixed.degeneracy_tol,
                    e.what());
        }
        return;
    }
    if (count < 1) throw UsageError("--count must be positive");
    RunConfig rc;
    rc.seed = g.seed;
    rc.hamiltonians = count;
    rc.eps = eps;
    rc.coincidence = cc;
    const json suite = run_coincidence_suite(rc);
    r.config["eps"] = eps;
    r.config["count"] = count;
    r.results = suite;
    for (size_t i = 0; i < suite["runs"].size(); ++i) {
        record("coincidence-" + std::to_string(i), suite["runs"][i]);
    }
}

// ------------------------------------------------------------------ novikov

void novikov_bound_cmd(RunReport& r, const std::string& b_text, const std::string& q_text) {
    const auto b = parse_long_list(b_text), q = parse_long_list(q_text);
    long value = 0;
    try {
        value = fixed_point_bound(b, q);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    r.config["b"] = b;
    r.config["q"] = q;
    r.results = {{"bound", value}, {"text", std::to_string(value)}};
}

// "name[:coeff][@exponent]" entries, comma separated; coeff may be a fraction
Chain parse_chain(const FilteredComplex& C, int degree, const std::string& text) {
    if (degree < 0 || degree > C.top_degree()) throw UsageError("--degree out of range");
    const auto& gens = C.degrees[static_cast<size_t>(degree)];
    Chain c{degree, std::vector<NovikovSeries>(gens.size())};
    for (const auto& item : split_list(text)) {
        std::string name = item, coeff = "1", exponent = "0";
        if (const auto at = name.find('@'); at != std::string::npos) {
            exponent = name.substr(at + 1);
            name = name.substr(0, at);
        }
        if (const auto colon = name.find(':'); colon != std::string::npos) {
            coeff = name.substr(colon + 1);
            name = name.substr(0, colon);
        }
        const auto it = std::find_if(gens.begin(), gens.end(), [&](const Generator& gen) { return gen.name == name; });
        if (it == gens.end()) throw UsageError("no generator '" + name + "' in degree " + std::to_string(degree));
        Rational q;
        try {
            q = Rational(coeff);
        } catch (const std::exception&) {
            throw UsageError("bad coefficient '" + coeff + "'");
        }
        auto& slot = c.coeffs[static_cast<size_t>(it - gens.begin())];
        slot = slot + NovikovSeries::monomial(parse_real(exponent), q);
    }
    return c;
}

void novikov_rho_cmd(RunReport& r, const std::string& path, int degree, const std::string& chain_text) {
    FilteredComplex C;
    try {
        C = complex_from_json(read_json_file(path));
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad complex input: ") + e.what());
    }
    const Chain a = parse_chain(C, degree, chain_text);
    r.config["complex"] = path;
    r.config["degree"] = degree;
    r.config["chain"] = chain_text;
    r.check("boundary-squares-to-zero", C.boundary_squares_to_zero(), 0, 0);
    RhoResult rho;
    try {
        rho = spectral_rho(C, a);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json res = {{"rho", number(rho.value)}, {"text", std::isfinite(rho.value) ? format_double(rho.value, 6) : "-inf"}};
    if (rho.generator >= 0) {
        const Generator& gen = C.degrees[static_cast<size_t>(degree)][static_cast<size_t>(rho.generator)];
        res["generator"] = gen.name;
        res["exponent"] = rho.exponent;
        const double attained = gen.level + rho.exponent;
        r.check("rho-attained-at-generator", attained == rho.value, std::abs(attained - rho.value), 0);
    }
    try {
        const BettiTorsion bt = betti_torsion(C);
        res["betti"] = bt.b;
        res["torsion"] = bt.q;
        res["certified_by_window"] = bt.certified_by_window;
    } catch (const WindowError& e) {
        r.check("betti-window", false, 0, 0, e.what());
    }
    r.results = res;
}

// ------------------------------------------------------------------ output

void print_text(const RunReport& r, std::ostream& out) {
    if (r.results.contains("text")) out << r.results["text"].get<std::string>() << "\n";
    for (const auto& c : r.checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.id << "  metric=" << c.metric << "  threshold=" << c.threshold;
        if (!c.detail.empty()) out << "  (" << c.detail << ")";
        out << "\n";
    }
    if (r.results.contains("text") || r.results.empty()) return;
    const std::string body = r.results.dump(2);
    if (body.size() <= 4000) out << body << "\n";
    else out << "(" << body.size() << " bytes of results; rerun with --json)\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Symplectic Clifford/Weyl toolkit: property checks and experiments", "symplectic_cli"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    double tol_value = 0.0;
    int grid_value = 0;
    app.add_flag("--json", g.json_out, "emit the run report as JSON");
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    auto* tol_opt = app.add_option("--tol", tol_value, "override the primary tolerance")->check(CLI::PositiveNumber);
    auto* grid_opt = app.add_option("--grid", grid_value, "grid points per axis (Fock cutoff for verify rep)");

    std::function<void(RunReport&)> action;
    std::string command;

    auto* verify = app.add_subcommand("verify", "property suites with per-check pass/fail");
    verify->require_subcommand(1);
    verify->add_subcommand("algebra", "Weyl algebra and the Lie table")->callback([&] {
        command = "verify algebra";
        action = [&](RunReport& r) { verify_algebra(r, g); };
    });
    verify->add_subcommand("rep", "Fock commutator, intertwining and oscillator spectrum")->callback([&] {
        command = "verify rep";
        action = [&](RunReport& r) { verify_rep(r, g); };
    });
    verify->add_subcommand("coherent", "eigenvalues, reciprocity, Siegel covariance and chain sets")->callback([&] {
        command = "verify coherent";
        action = [&](RunReport& r) { verify_coherent(r, g); };
    });

    auto* theta = app.add_subcommand("theta", "Riemann theta function");
    theta->require_subcommand(1);
    int theta_n = 1;
    std::string theta_z = "0", theta_omega = "i";
    auto* eval = theta->add_subcommand("eval", "evaluate theta(z, Omega)");
    eval->add_option("--n", theta_n, "dimension")->capture_default_str();
    eval->add_option("--z", theta_z, "comma separated complex entries")->capture_default_str();
    eval->add_option("--omega", theta_omega, "1 or n*n complex entries, row major")->capture_default_str();
    eval->callback([&] {
        command = "theta eval";
        action = [&](RunReport& r) {
            r.config["n"] = theta_n;
            r.config["z"] = theta_z;
            r.config["omega"] = theta_omega;
            theta_eval_cmd(r, g, theta_n, theta_z, theta_omega);
        };
    });

    auto* frob = app.add_subcommand("frobenius", "Frobenius structures over flat tori");
    frob->require_subcommand(1);
    std::string frob_input;
    double gap = 1e-3;
    for (const char* name : {"build", "spectral", "spectrum"}) {
        auto* sub = frob->add_subcommand(name);
        sub->add_option("--input", frob_input, "Lagrangian JSON file (default: builtin example)");
        if (std::string(name) != "spectrum") sub->add_option("--gap", gap, "caustic gap")->capture_default_str();
        sub->callback([&, which = std::string(name)] {
            command = "frobenius " + which;
            action = [&, which](RunReport& r) {
                if (which == "build") frobenius_build_cmd(r, g, frob_input, gap);
                else if (which == "spectral") frobenius_spectral_cmd(r, g, frob_input, gap);
                else frobenius_spectrum_cmd(r, g, frob_input);
            };
        });
    }
    frob->get_subcommand("build")->description("build and report caustics");
    frob->get_subcommand("spectral")->description("recover the spectral cover and round-trip it");
    frob->get_subcommand("spectrum")->description("Euler-field spectrum and its grid stability");

    auto* flow = app.add_subcommand("flow", "Hamiltonian flows on T*T^n");
    flow->require_subcommand(1);
    std::string ham_input;
    double eps = 0.1, window = 1.0;
    int count = 5;
    auto* fp = flow->add_subcommand("fixed-points", "time-one fixed points");
    fp->add_option("--hamiltonian", ham_input, "Hamiltonian JSON file (default: pendulum)");
    fp->add_option("--eps", eps, "pendulum strength when no file is given")->capture_default_str();
    fp->add_option("--window", window, "|p| search window")->capture_default_str();
    fp->callback([&] {
        command = "flow fixed-points";
        action = [&](RunReport& r) { flow_fixed_points_cmd(r, g, ham_input, eps, window); };
    });
    auto* co = flow->add_subcommand("coincidence", "three-detector coincidence report");
    co->add_option("--hamiltonian", ham_input, "single Hamiltonian JSON file (default: random suite)");
    co->add_option("--eps", eps, "perturbation size of the random suite")->capture_default_str();
    co->add_option("--count", count, "number of random Hamiltonians")->capture_default_str();
    co->callback([&] {
        command = "flow coincidence";
        action = [&](RunReport& r) { flow_coincidence_cmd(r, g, ham_input, eps, count); };
    });

    auto* nov = app.add_subcommand("novikov", "Novikov-ring invariants");
    nov->require_subcommand(1);
    std::string b_text, q_text, complex_path, chain_text;
    int degree = 0;
    auto* bound = nov->add_subcommand("bound", "fixed-point lower bound from Betti and torsion numbers");
    bound->add_option("--b", b_text, "comma separated Betti numbers")->required();
    bound->add_option("--q", q_text, "comma separated torsion numbers")->required();
    bound->callback([&] {
        command = "novikov bound";
        action = [&](RunReport& r) { novikov_bound_cmd(r, b_text, q_text); };
    });
    auto* rho = nov->add_subcommand("rho", "spectral invariant of a cycle");
    rho->add_option("--complex", complex_path, "filtered complex JSON file")->required();
    rho->add_option("--degree", degree, "degree of the cycle")->capture_default_str();
    rho->add_option("--chain", chain_text, "name[:coeff][@exponent],...")->required();
    rho->callback([&] {
        command = "novikov rho";
        action = [&](RunReport& r) { novikov_rho_cmd(r, complex_path, degree, chain_text); };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }
    if (tol_opt->count() > 0) g.tol = tol_value;
    if (grid_opt->count() > 0) g.grid = grid_value;
    if (!action) {
        err << "usage error: no command\n";
        return 2;
    }

    RunReport report;
    report.command = command;
    report.config = g.to_json();
    try {
        action(report);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        report.check("runtime", false, 0, 0, e.what());
    }

    if (g.json_out) out << report.to_json().dump(2) << "\n";
    else print_text(report, out);
    if (!report.passed()) {
        err << "first failing check: " << report.first_failure() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace symplectic::cli
