#include "symplectic/novikov_invariants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace symplectic {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool same_exponent(double a, double b) { return std::abs(a - b) <= kExponentTol * std::max(1.0, std::abs(a)); }

// valuation of a zero series is its cutoff, which bounds what it could hide
double effective_valuation(const NovikovSeries& s) { return s.is_zero() ? s.cutoff() : s.valuation(); }

bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

}  // namespace

// ------------------------------------------------------------------ series

NovikovSeries::NovikovSeries(std::vector<Term> terms, double cutoff) : terms_(std::move(terms)), cutoff_(cutoff) {
    for (const auto& t : terms_)
        if (!std::isfinite(t.exponent)) throw std::invalid_argument("NovikovSeries: exponents must be finite");
    normalize();
}

NovikovSeries NovikovSeries::monomial(double exponent, Rational coeff) {
    return NovikovSeries({{exponent, std::move(coeff)}});
}

void NovikovSeries::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.exponent > b.exponent; });
    std::vector<Term> merged;
    for (auto& t : terms_) {
        if (!merged.empty() && same_exponent(merged.back().exponent, t.exponent))
            merged.back().coeff += t.coeff;
        else
            merged.push_back(std::move(t));
    }
    terms_.clear();
    for (auto& t : merged)
        if (t.coeff != 0 && t.exponent >= cutoff_) terms_.push_back(std::move(t));
}

const NovikovSeries::Term& NovikovSeries::leading() const {
    if (terms_.empty()) throw std::domain_error("NovikovSeries: zero series has no leading term");
    return terms_.front();
}

double NovikovSeries::valuation() const { return terms_.empty() ? kNegInf : terms_.front().exponent; }

bool NovikovSeries::integral() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return is_integer(t.coeff); });
}

bool NovikovSeries::is_unit() const {
    if (terms_.empty() || !integral()) return false;
    const Rational& c = terms_.front().coeff;
    return c == 1 || c == -1;
}

NovikovSeries NovikovSeries::truncated(double c) const {
    NovikovSeries out = *this;
    out.cutoff_ = std::max(cutoff_, c);
    out.normalize();
    return out;
}

NovikovSeries NovikovSeries::shifted(double gamma) const {
    NovikovSeries out = *this;
    for (auto& t : out.terms_) t.exponent += gamma;
    out.cutoff_ += gamma;
    return out;
}

NovikovSeries NovikovSeries::operator-() const {
    NovikovSeries out = *this;
    for (auto& t : out.terms_) t.coeff = -t.coeff;
    return out;
}

NovikovSeries operator+(const NovikovSeries& a, const NovikovSeries& b) {
    std::vector<NovikovSeries::Term> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return NovikovSeries(std::move(terms), std::max(a.cutoff_, b.cutoff_));
}

NovikovSeries operator-(const NovikovSeries& a, const NovikovSeries& b) { return a + (-b); }

NovikovSeries operator*(const NovikovSeries& a, const NovikovSeries& b) {
    // the unknown tail of one factor meets the leading term of the other
    const double cutoff = std::max(a.cutoff_ + effective_valuation(b), b.cutoff_ + effective_valuation(a));
    std::vector<NovikovSeries::Term> terms;
    terms.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) {
            if (x.exponent + y.exponent < cutoff) continue;
            terms.push_back({x.exponent + y.exponent, x.coeff * y.coeff});
        }
    return NovikovSeries(std::move(terms), cutoff);
}

NovikovSeries NovikovSeries::inverse(double window) const {
    if (terms_.empty()) throw std::domain_error("NovikovSeries: zero is not invertible");
    const double lambda = terms_.front().exponent;
    const Rational c = terms_.front().coeff;
    // this = c t^lambda (1 + r), r has negative exponents only
    std::vector<Term> rest(terms_.begin() + 1, terms_.end());
    for (auto& t : rest) {
        t.exponent -= lambda;
        t.coeff /= c;
    }
    const NovikovSeries minus_r = -NovikovSeries(std::move(rest));
    const double relative = window + lambda;
    NovikovSeries sum;
    NovikovSeries power = one();
    while (!power.is_zero()) {
        sum = sum + power;
        power = (power * minus_r).truncated(relative);
        if (sum.terms_.size() > 1'000'000) throw WindowError("NovikovSeries: inverse window too deep");
    }
    NovikovSeries out = sum.shifted(-lambda);
    for (auto& t : out.terms_) t.coeff /= c;
    out.cutoff_ = std::max(window, cutoff_ - 2.0 * lambda);
    out.normalize();
    return out;
}

bool NovikovSeries::agrees_with(const NovikovSeries& other) const {
    const double c = std::max(cutoff_, other.cutoff_);
    return (truncated(c) - other.truncated(c)).is_zero();
}

std::string NovikovSeries::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    for (size_t i = 0; i < terms_.size(); ++i) {
        if (i > 0) os << " + ";
        os << terms_[i].coeff << " t^" << terms_[i].exponent;
    }
    if (!is_exact()) os << " + O(t^" << cutoff_ << ")";
    return os.str();
}

NovikovSeries nov_add(const NovikovSeries& a, const NovikovSeries& b) { return a + b; }
NovikovSeries nov_mul(const NovikovSeries& a, const NovikovSeries& b) { return a * b; }

bool CohomologyClassXi::integral() const {
    return std::all_of(periods.begin(), periods.end(), [](double p) { return p == std::round(p); });
}

NovikovSeries monodromy(const CohomologyClassXi& xi, const std::vector<long>& loop) {
    if (loop.size() != xi.periods.size()) throw std::invalid_argument("monodromy: loop and period lengths differ");
    double e = 0.0;
    for (size_t j = 0; j < loop.size(); ++j) e += static_cast<double>(loop[j]) * xi.periods[j];
    return NovikovSeries::monomial(e);
}

// ------------------------------------------------------------------ complexes and chains

int FilteredComplex::rank(int degree) const {
    if (degree < 0 || degree > top_degree()) return 0;
    return static_cast<int>(degrees[static_cast<size_t>(degree)].size());
}

void FilteredComplex::resize_boundaries() {
    boundary.resize(degrees.size());
    for (int d = 0; d <= top_degree(); ++d) {
        auto& m = boundary[static_cast<size_t>(d)];
        const int rows = d == 0 ? 0 : rank(d - 1);
        m.resize(static_cast<size_t>(rows));
        for (auto& row : m) row.resize(static_cast<size_t>(rank(d)));
    }
}

bool FilteredComplex::boundary_squares_to_zero() const {
    for (int d = 2; d <= top_degree(); ++d)
        for (int c = 0; c < rank(d); ++c) {
            const Chain img = apply_boundary(*this, apply_boundary(*this, basis_chain(*this, d, c)));
            for (const auto& s : img.coeffs)
                if (!s.is_zero()) return false;
        }
    return true;
}

Chain basis_chain(const FilteredComplex& C, int degree, int gen, double exponent) {
    if (gen < 0 || gen >= C.rank(degree)) throw std::out_of_range("basis_chain: generator out of range");
    Chain c{degree, std::vector<NovikovSeries>(static_cast<size_t>(C.rank(degree)))};
    c.coeffs[static_cast<size_t>(gen)] = NovikovSeries::monomial(exponent);
    return c;
}

Chain apply_boundary(const FilteredComplex& C, const Chain& c) {
    if (c.degree < 0 || c.degree > C.top_degree()) throw std::out_of_range("apply_boundary: degree out of range");
    if (static_cast<int>(c.coeffs.size()) != C.rank(c.degree))
        throw std::invalid_argument("apply_boundary: coefficient count mismatch");
    Chain out{c.degree - 1, std::vector<NovikovSeries>(static_cast<size_t>(C.rank(c.degree - 1)))};
    if (c.degree == 0) return out;
    const auto& M = C.boundary.at(static_cast<size_t>(c.degree));
    for (size_t r = 0; r < out.coeffs.size(); ++r)
        for (size_t k = 0; k < c.coeffs.size(); ++k)
            if (!c.coeffs[k].is_zero() && !M[r][k].is_zero())
                out.coeffs[r] = (out.coeffs[r] + M[r][k] * c.coeffs[k]).truncated(C.cutoff);
    return out;
}

Chain shift_chain(const Chain& c, double gamma) {
    Chain out = c;
    for (auto& s : out.coeffs) s = s.shifted(gamma);
    return out;
}

Chain add_chains(const Chain& a, const Chain& b) {
    if (a.degree != b.degree || a.coeffs.size() != b.coeffs.size())
        throw std::invalid_argument("add_chains: chains live in different groups");
    Chain out = a;
    for (size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = out.coeffs[i] + b.coeffs[i];
    return out;
}

namespace {

struct Lead {
    int gen = -1;
    double value = kNegInf;
};

// largest level + exponent, ties to the larger generator index
Lead leading_generator(const FilteredComplex& C, const Chain& c) {
    Lead best;
    const auto& gens = C.degrees[static_cast<size_t>(c.degree)];
    for (size_t g = 0; g < c.coeffs.size(); ++g) {
        if (c.coeffs[g].is_zero()) continue;
        const double v = gens[g].level + c.coeffs[g].valuation();
        if (best.gen < 0 || v >= best.value) {
            best.gen = static_cast<int>(g);
            best.value = v;
        }
    }
    return best;
}

// v -= (v_g / p_g) p, truncated at the window
void cancel_at(const FilteredComplex& C, Chain& v, const Chain& p, int g) {
    const NovikovSeries factor =
        (v.coeffs[static_cast<size_t>(g)] * p.coeffs[static_cast<size_t>(g)].inverse(C.cutoff)).truncated(C.cutoff);
    for (size_t h = 0; h < v.coeffs.size(); ++h) {
        if (p.coeffs[h].is_zero()) continue;
        v.coeffs[h] = (v.coeffs[h] - factor * p.coeffs[h]).truncated(C.cutoff);
    }
    v.coeffs[static_cast<size_t>(g)] = NovikovSeries().truncated(C.cutoff);
}

constexpr int kMaxReductionSteps = 100000;

// reduces v against pivots until its leading generator is free
void reduce(const FilteredComplex& C, Chain& v, const std::map<int, Chain>& pivots) {
    for (int step = 0;; ++step) {
        if (step > kMaxReductionSteps) throw WindowError("reduction did not settle inside the window; widen the cutoff");
        const Lead lead = leading_generator(C, v);
        if (lead.gen < 0) return;
        auto it = pivots.find(lead.gen);
        if (it == pivots.end()) return;
        cancel_at(C, v, it->second, lead.gen);
    }
}

// reduced image basis of boundary[d + 1], keyed by leading generator
std::map<int, Chain> image_pivots(const FilteredComplex& C, int d) {
    std::map<int, Chain> pivots;
    if (d + 1 > C.top_degree()) return pivots;
    const auto& M = C.boundary.at(static_cast<size_t>(d + 1));
    for (int col = 0; col < C.rank(d + 1); ++col) {
        Chain v{d, std::vector<NovikovSeries>(static_cast<size_t>(C.rank(d)))};
        for (int r = 0; r < C.rank(d); ++r) v.coeffs[static_cast<size_t>(r)] = M[static_cast<size_t>(r)][static_cast<size_t>(col)];
        reduce(C, v, pivots);
        const Lead lead = leading_generator(C, v);
        if (lead.gen >= 0) pivots.emplace(lead.gen, std::move(v));
    }
    return pivots;
}

}  // namespace

double chain_level(const FilteredComplex& C, const Chain& c) {
    if (c.degree < 0 || c.degree > C.top_degree() || static_cast<int>(c.coeffs.size()) != C.rank(c.degree))
        throw std::invalid_argument("chain_level: chain does not fit the complex");
    return leading_generator(C, c).value;
}

RhoResult spectral_rho(const FilteredComplex& C, const Chain& a) {
    if (a.degree < 0 || a.degree > C.top_degree() || static_cast<int>(a.coeffs.size()) != C.rank(a.degree))
        throw std::invalid_argument("spectral_rho: chain does not fit the complex");
    for (const auto& s : apply_boundary(C, a).coeffs)
        if (!s.is_zero()) throw std::invalid_argument("spectral_rho: the class representative is not a cycle");
    const auto pivots = image_pivots(C, a.degree);
    RhoResult r;
    r.representative = a;
    for (auto& s : r.representative.coeffs) s = s.truncated(C.cutoff);
    reduce(C, r.representative, pivots);
    const Lead lead = leading_generator(C, r.representative);
    r.generator = lead.gen;
    r.value = lead.value;
    if (lead.gen >= 0) r.exponent = r.representative.coeffs[static_cast<size_t>(lead.gen)].valuation();
    return r;
}

int boundary_rank(const FilteredComplex& C, int degree) {
    if (degree <= 0 || degree > C.top_degree()) return 0;
    return static_cast<int>(image_pivots(C, degree - 1).size());
}

namespace {

using Matrix = std::vector<std::vector<NovikovSeries>>;

int field_rank(Matrix M, double window) {
    FilteredComplex tmp;
    tmp.cutoff = window;
    const size_t rows = M.size(), cols = rows ? M[0].size() : 0;
    tmp.degrees = {std::vector<Generator>(rows), std::vector<Generator>(cols)};
    tmp.resize_boundaries();
    tmp.boundary[1] = std::move(M);
    return boundary_rank(tmp, 1);
}

// eliminates unit pivots over integer coefficients, returns the leftover block
Matrix strip_units(Matrix M, double window) {
    while (true) {
        size_t pr = 0, pc = 0;
        bool found = false;
        for (size_t r = 0; r < M.size() && !found; ++r)
            for (size_t c = 0; c < M[r].size() && !found; ++c)
                if (M[r][c].is_unit()) {
                    pr = r;
                    pc = c;
                    found = true;
                }
        if (!found) return M;
        const NovikovSeries inv = M[pr][pc].inverse(window);
        for (size_t r = 0; r < M.size(); ++r) {
            if (r == pr || M[r][pc].is_zero()) continue;
            const NovikovSeries f = (M[r][pc] * inv).truncated(window);
            for (size_t c = 0; c < M[r].size(); ++c) M[r][c] = (M[r][c] - f * M[pr][c]).truncated(window);
        }
        M.erase(M.begin() + static_cast<long>(pr));
        for (auto& row : M) row.erase(row.begin() + static_cast<long>(pc));
    }
}

BettiTorsion betti_torsion_at(const FilteredComplex& C, double window) {
    const int top = C.top_degree();
    BettiTorsion out;
    std::vector<int> ranks(static_cast<size_t>(top) + 2, 0);
    for (int d = 1; d <= top; ++d) ranks[static_cast<size_t>(d)] = field_rank(C.boundary[static_cast<size_t>(d)], window);
    for (int d = 0; d <= top; ++d) {
        out.b.push_back(C.rank(d) - ranks[static_cast<size_t>(d)] - ranks[static_cast<size_t>(d) + 1]);
        int q = 0;
        if (d + 1 <= top) q = field_rank(strip_units(C.boundary[static_cast<size_t>(d) + 1], window), window);
        out.q.push_back(q);
    }
    return out;
}

}  // namespace

BettiTorsion betti_torsion(const FilteredComplex& C) {
    if (C.degrees.empty()) return {};
    if (C.boundary.size() != C.degrees.size()) throw std::invalid_argument("betti_torsion: boundary maps missing");
    BettiTorsion out = betti_torsion_at(C, C.cutoff);
    int nonzero_maps = 0;
    double top_exp = kNegInf;
    for (const auto& M : C.boundary) {
        bool any = false;
        for (const auto& row : M)
            for (const auto& s : row)
                if (!s.is_zero()) {
                    any = true;
                    top_exp = std::max(top_exp, s.valuation());
                }
        nonzero_maps += any ? 1 : 0;
    }
    if (nonzero_maps > 1) {
        // a single map is exact; otherwise compare against a coarser window
        const double coarse = C.cutoff + 0.5 * (top_exp - C.cutoff);
        FilteredComplex rough = C;
        for (auto& M : rough.boundary)
            for (auto& row : M)
                for (auto& s : row) s = s.truncated(coarse);
        const BettiTorsion check = betti_torsion_at(rough, coarse);
        if (check.b != out.b || check.q != out.q)
            throw WindowError("betti_torsion: answer changes with the window; widen the cutoff");
        out.certified_by_window = true;
    }
    return out;
}

long fixed_point_bound(const std::vector<long>& b, const std::vector<long>& q) {
    if (b.size() != q.size() || b.size() % 2 == 0)
        throw std::invalid_argument("fixed_point_bound: b and q need the same odd length 2n + 1");
    long total = 0;
    for (size_t i = 0; i < b.size(); ++i) {
        if (b[i] < 0 || q[i] < 0) throw std::invalid_argument("fixed_point_bound: negative entry");
        total += b[i] + (i == 0 ? q[i] : 2 * q[i]);
    }
    return total;
}

// ------------------------------------------------------------------ JSON

nlohmann::json to_json(const FilteredComplex& C) {
    nlohmann::json j;
    j["cutoff"] = C.cutoff;
    j["degrees"] = nlohmann::json::array();
    for (const auto& gens : C.degrees) {
        nlohmann::json jd;
        jd["gens"] = nlohmann::json::array();
        for (const auto& g : gens) jd["gens"].push_back({{"name", g.name}, {"level", g.level}});
        j["degrees"].push_back(jd);
    }
    j["boundaries"] = nlohmann::json::array();
    for (int d = 1; d <= C.top_degree(); ++d) {
        const auto& M = C.boundary[static_cast<size_t>(d)];
        for (int r = 0; r < C.rank(d - 1); ++r)
            for (int c = 0; c < C.rank(d); ++c) {
                const NovikovSeries& s = M[static_cast<size_t>(r)][static_cast<size_t>(c)];
                if (s.is_zero()) continue;
                nlohmann::json terms = nlohmann::json::array();
                for (const auto& t : s.terms()) {
                    if (is_integer(t.coeff))
                        terms.push_back({t.exponent, static_cast<long long>(boost::multiprecision::numerator(t.coeff))});
                    else
                        terms.push_back({t.exponent, t.coeff.str()});
                }
                j["boundaries"].push_back({{"from", C.degrees[static_cast<size_t>(d)][static_cast<size_t>(c)].name},
                                           {"to", C.degrees[static_cast<size_t>(d - 1)][static_cast<size_t>(r)].name},
                                           {"terms", terms}});
            }
    }
    return j;
}

FilteredComplex complex_from_json(const nlohmann::json& j) {
    FilteredComplex C;
    if (j.contains("cutoff")) C.cutoff = j.at("cutoff").get<double>();
    std::map<std::string, std::pair<int, int>> where;
    for (const auto& jd : j.at("degrees")) {
        std::vector<Generator> gens;
        for (const auto& jg : jd.at("gens")) {
            Generator g{jg.at("name").get<std::string>(), jg.at("level").get<double>()};
            if (!where.emplace(g.name, std::pair{static_cast<int>(C.degrees.size()), static_cast<int>(gens.size())}).second)
                throw std::invalid_argument("complex_from_json: duplicate generator name " + g.name);
            gens.push_back(std::move(g));
        }
        C.degrees.push_back(std::move(gens));
    }
    C.resize_boundaries();
    if (!j.contains("boundaries")) return C;
    for (const auto& jb : j.at("boundaries")) {
        const auto from = where.find(jb.at("from").get<std::string>());
        const auto to = where.find(jb.at("to").get<std::string>());
        if (from == where.end() || to == where.end()) throw std::invalid_argument("complex_from_json: unknown generator");
        if (to->second.first != from->second.first - 1)
            throw std::invalid_argument("complex_from_json: boundary must lower the degree by one");
        std::vector<NovikovSeries::Term> terms;
        for (const auto& jt : jb.at("terms")) {
            Rational c = jt.at(1).is_string() ? Rational(jt.at(1).get<std::string>()) : Rational(jt.at(1).get<long long>());
            terms.push_back({jt.at(0).get<double>(), std::move(c)});
        }
        auto& entry = C.boundary[static_cast<size_t>(from->second.first)][static_cast<size_t>(to->second.second)]
                                [static_cast<size_t>(from->second.second)];
        entry = entry + NovikovSeries(std::move(terms));
    }
    return C;
}

}  // namespace symplectic
