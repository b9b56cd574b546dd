#include "cnls/poly.hpp"

#include <algorithm>
#include <sstream>

#include "cnls/errors.hpp"

namespace cnls {

Monomial make_monomial(std::vector<Variable> factors) {
    std::sort(factors.begin(), factors.end());
    return factors;
}

Monomial multiply(const Monomial& x, const Monomial& y) {
    Monomial out;
    out.reserve(x.size() + y.size());
    std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    return out;
}

Monomial conjugate(const Monomial& m) {
    Monomial out;
    out.reserve(m.size());
    for (const auto& v : m) out.push_back(v.conjugate());
    std::sort(out.begin(), out.end());
    return out;
}

int momentum(const Monomial& m) {
    int k = 0;
    for (const auto& v : m) k += v.conj ? -v.index : v.index;
    return k;
}

long divisor(const Monomial& m) {
    long d = 0;
    for (const auto& v : m) d += (v.conj ? -1L : 1L) * v.index * v.index;
    return d;
}

int charge(const Monomial& m, Species s) {
    int c = 0;
    for (const auto& v : m)
        if (v.species == s) c += v.conj ? -1 : 1;
    return c;
}

void PolyHamiltonian::add(const Monomial& m, const GaussRational& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

void PolyHamiltonian::set(const Monomial& m, const GaussRational& c) {
    if (c.is_zero())
        terms_.erase(m);
    else
        terms_[m] = c;
}

GaussRational PolyHamiltonian::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? GaussRational{} : it->second;
}

int PolyHamiltonian::degree() const {
    std::size_t d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.size());
    return static_cast<int>(d);
}

int PolyHamiltonian::min_degree() const {
    if (terms_.empty()) return 0;
    std::size_t d = terms_.begin()->first.size();
    for (const auto& [m, c] : terms_) d = std::min(d, m.size());
    return static_cast<int>(d);
}

int PolyHamiltonian::max_index() const {
    int r = 0;
    for (const auto& [m, c] : terms_)
        for (const auto& v : m) r = std::max(r, std::abs(v.index));
    return r;
}

bool PolyHamiltonian::is_real() const {
    for (const auto& [m, c] : terms_)
        if (!(coeff(conjugate(m)) == c.conj())) return false;
    return true;
}

PolyHamiltonian PolyHamiltonian::derivative(const Variable& v) const {
    PolyHamiltonian out;
    for (const auto& [m, c] : terms_) {
        auto lo = std::lower_bound(m.begin(), m.end(), v);
        auto hi = std::upper_bound(m.begin(), m.end(), v);
        const long mult = hi - lo;
        if (mult == 0) continue;
        Monomial rest(m.begin(), lo);
        rest.insert(rest.end(), lo + 1, m.end());
        out.add(rest, c * GaussRational(mult));
    }
    return out;
}

PolyHamiltonian& PolyHamiltonian::operator+=(const PolyHamiltonian& o) {
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
}

PolyHamiltonian& PolyHamiltonian::operator-=(const PolyHamiltonian& o) {
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
}

PolyHamiltonian& PolyHamiltonian::operator*=(const GaussRational& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, x] : terms_) x *= c;
    return *this;
}

PolyHamiltonian operator*(const PolyHamiltonian& x, const PolyHamiltonian& y) {
    PolyHamiltonian out;
    for (const auto& [mx, cx] : x.terms_)
        for (const auto& [my, cy] : y.terms_) out.add(multiply(mx, my), cx * cy);
    return out;
}

GaussRational PolyHamiltonian::evaluate_exact(const BasicFourierState<GaussRational>& state) const {
    GaussRational total;
    for (const auto& [m, c] : terms_) {
        GaussRational t = c;
        for (const auto& v : m) {
            const auto& x = state.species(v.species).at_or_zero(v.index);
            t *= v.conj ? x.conj() : x;
        }
        total += t;
    }
    return total;
}

namespace {

struct Occurrence {
    const Monomial* mono;
    const GaussRational* coeff;
    long mult;
};

/// For every variable, the terms of g containing it together with the multiplicity.
std::map<Variable, std::vector<Occurrence>> occurrence_index(const PolyHamiltonian& g) {
    std::map<Variable, std::vector<Occurrence>> idx;
    for (const auto& [m, c] : g.terms()) {
        for (std::size_t i = 0; i < m.size();) {
            std::size_t j = i;
            while (j < m.size() && m[j] == m[i]) ++j;
            idx[m[i]].push_back({&m, &c, static_cast<long>(j - i)});
            i = j;
        }
    }
    return idx;
}

Monomial remove_one(const Monomial& m, const Variable& v) {
    Monomial out;
    out.reserve(m.size() - 1);
    bool removed = false;
    for (const auto& x : m) {
        if (!removed && x == v) {
            removed = true;
            continue;
        }
        out.push_back(x);
    }
    return out;
}

}  // namespace

PolyHamiltonian poisson(const PolyHamiltonian& f, const PolyHamiltonian& g) {
    const auto gidx = occurrence_index(g);
    const GaussRational minus_i{0, -1};
    const GaussRational plus_i{0, 1};
    PolyHamiltonian out;
    for (const auto& [mf, cf] : f.terms()) {
        for (std::size_t i = 0; i < mf.size();) {
            std::size_t j = i;
            while (j < mf.size() && mf[j] == mf[i]) ++j;
            const Variable x = mf[i];
            const long mult_f = static_cast<long>(j - i);
            i = j;
            auto it = gidx.find(x.conjugate());
            if (it == gidx.end()) continue;
            // ∂f/∂x ∂g/∂x̄ carries −i for plain x, +i for conjugated x.
            const GaussRational& sign = x.conj ? plus_i : minus_i;
            const Monomial rest_f = remove_one(mf, x);
            for (const auto& occ : it->second) {
                const Monomial rest_g = remove_one(*occ.mono, x.conjugate());
                out.add(multiply(rest_f, rest_g), sign * cf * *occ.coeff * GaussRational(mult_f * occ.mult));
            }
        }
    }
    return out;
}

PolyHamiltonian build_P2(int J) {
    PolyHamiltonian h;
    for (int j = -J; j <= J; ++j) {
        const GaussRational w(static_cast<long>(j) * j);
        h.add(make_monomial({var_a(j), var_abar(j)}), w);
        h.add(make_monomial({var_b(j), var_bbar(j)}), w);
    }
    return h;
}

PolyHamiltonian build_P4(int J) {
    PolyHamiltonian h;
    for (int k = -J; k <= J; ++k)
        for (int l = -J; l <= J; ++l)
            for (int i = -J; i <= J; ++i) {
                const int j = k + l - i;
                if (j < -J || j > J) continue;
                h.add(make_monomial({var_a(k), var_b(l), var_abar(i), var_bbar(j)}), 1);
            }
    return h;
}

PolyHamiltonian build_mass(int J) {
    return build_partial_mass(J, Species::u) + build_partial_mass(J, Species::v);
}

PolyHamiltonian build_partial_mass(int J, Species s) {
    PolyHamiltonian h;
    for (int j = -J; j <= J; ++j) h.add(make_monomial({{s, false, j}, {s, true, j}}), 1);
    return h;
}

PolyHamiltonian build_momentum(int J) {
    PolyHamiltonian h;
    for (int j = -J; j <= J; ++j) {
        h.add(make_monomial({var_a(j), var_abar(j)}), j);
        h.add(make_monomial({var_b(j), var_bbar(j)}), j);
    }
    return h;
}

std::string to_string(const Variable& v) {
    std::string s = v.species == Species::u ? "a" : "b";
    if (v.conj) s += "b";
    s += "(";
    s += v.index >= 0 ? "+" + std::to_string(v.index) : std::to_string(v.index);
    s += ")";
    return s;
}

std::string to_string(const Monomial& m) {
    std::string out;
    for (std::size_t i = 0; i < m.size();) {
        std::size_t j = i;
        while (j < m.size() && m[j] == m[i]) ++j;
        if (!out.empty()) out += ' ';
        out += to_string(m[i]);
        if (j - i > 1) out += "^" + std::to_string(j - i);
        i = j;
    }
    return out;
}

std::string PolyHamiltonian::to_lines() const {
    std::ostringstream os;
    for (const auto& [m, c] : terms_) os << c.to_string() << " : " << to_string(m) << '\n';
    return os.str();
}

namespace {

std::string normalize_minus(const std::string& raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xE2 &&
            static_cast<unsigned char>(raw[i + 1]) == 0x88 && static_cast<unsigned char>(raw[i + 2]) == 0x92) {
            out += '-';
            i += 2;
        } else {
            out += raw[i];
        }
    }
    return out;
}

Monomial parse_factors(const std::string& text, int line_no) {
    std::vector<Variable> factors;
    std::istringstream is(text);
    std::string tok;
    auto fail = [&](const std::string& why) {
        throw ParseError("line " + std::to_string(line_no) + ": " + why + " in '" + tok + "'");
    };
    while (is >> tok) {
        const auto open = tok.find('(');
        const auto close = tok.find(')');
        if (open == std::string::npos || close == std::string::npos || close < open) fail("expected name(index)");
        const std::string name = tok.substr(0, open);
        Variable v;
        if (name == "a")
            v = {Species::u, false, 0};
        else if (name == "ab")
            v = {Species::u, true, 0};
        else if (name == "b")
            v = {Species::v, false, 0};
        else if (name == "bb")
            v = {Species::v, true, 0};
        else
            fail("unknown variable '" + name + "'");
        try {
            std::size_t used = 0;
            const std::string idx = tok.substr(open + 1, close - open - 1);
            v.index = std::stoi(idx, &used);
            if (used != idx.size()) fail("malformed index");
        } catch (const std::logic_error&) {
            fail("malformed index");
        }
        int power = 1;
        const std::string tail = tok.substr(close + 1);
        if (!tail.empty()) {
            if (tail[0] != '^' || tail.size() < 2) fail("expected ^power");
            try {
                std::size_t used = 0;
                power = std::stoi(tail.substr(1), &used);
                if (used != tail.size() - 1) fail("malformed power");
            } catch (const std::logic_error&) {
                fail("malformed power");
            }
            if (power < 1) fail("power must be positive");
        }
        for (int r = 0; r < power; ++r) factors.push_back(v);
    }
    return make_monomial(std::move(factors));
}

}  // namespace

PolyHamiltonian PolyHamiltonian::from_lines(const std::string& raw) {
    PolyHamiltonian h;
    std::istringstream is(normalize_minus(raw));
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("line " + std::to_string(line_no) + ": missing ':'");
        const GaussRational c = GaussRational::parse(line.substr(0, colon));
        h.add(parse_factors(line.substr(colon + 1), line_no), c);
    }
    return h;
}

int CompiledPoly::slot(const Variable& v) const {
    const int block = (v.species == Species::u ? 0 : 2) + (v.conj ? 1 : 0);
    return block * (2 * J_ + 1) + v.index + J_;
}

CompiledPoly::CompiledPoly(const PolyHamiltonian& h, int J) : J_(J) {
    if (h.max_index() > J) throw ConfigError("polynomial uses modes beyond the truncation radius");
    for (const auto& [m, c] : h.terms()) {
        const cplx cf = c.to_complex();
        Product p{cf, 0, slots_.size(), 0};
        for (const auto& v : m) slots_.push_back(slot(v));
        p.end = slots_.size();
        value_terms_.push_back(p);
        for (std::size_t i = 0; i < m.size();) {
            std::size_t j = i;
            while (j < m.size() && m[j] == m[i]) ++j;
            const Variable v = m[i];
            const double mult = static_cast<double>(j - i);
            i = j;
            if (!v.conj) continue;
            Product g{cf * mult, (v.species == Species::u ? 0 : 1) * (2 * J + 1) + v.index + J, slots_.size(), 0};
            bool removed = false;
            for (const auto& x : m) {
                if (!removed && x == v) {
                    removed = true;
                    continue;
                }
                slots_.push_back(slot(x));
            }
            g.end = slots_.size();
            grad_terms_.push_back(g);
        }
    }
}

void CompiledPoly::load(const FourierState& z, std::vector<cplx>& buf) const {
    if (z.J() != J_) throw std::invalid_argument("CompiledPoly: truncation radius mismatch");
    const int n = 2 * J_ + 1;
    buf.resize(static_cast<std::size_t>(4 * n));
    for (int j = -J_; j <= J_; ++j) {
        const auto k = static_cast<std::size_t>(j + J_);
        buf[k] = z.a()[j];
        buf[n + k] = std::conj(z.a()[j]);
        buf[2 * n + k] = z.b()[j];
        buf[3 * n + k] = std::conj(z.b()[j]);
    }
}

cplx CompiledPoly::value(const FourierState& z) const {
    std::vector<cplx> buf;
    load(z, buf);
    cplx total = 0;
    for (const auto& t : value_terms_) {
        cplx p = t.coeff;
        for (std::size_t i = t.begin; i < t.end; ++i) p *= buf[static_cast<std::size_t>(slots_[i])];
        total += p;
    }
    return total;
}

FourierState CompiledPoly::conj_gradient(const FourierState& z) const {
    std::vector<cplx> buf;
    load(z, buf);
    const int n = 2 * J_ + 1;
    std::vector<cplx> out(static_cast<std::size_t>(2 * n));
    for (const auto& t : grad_terms_) {
        cplx p = t.coeff;
        for (std::size_t i = t.begin; i < t.end; ++i) p *= buf[static_cast<std::size_t>(slots_[i])];
        out[static_cast<std::size_t>(t.target)] += p;
    }
    FourierState g(J_);
    for (int j = -J_; j <= J_; ++j) {
        g.a()[j] = out[static_cast<std::size_t>(j + J_)];
        g.b()[j] = out[static_cast<std::size_t>(n + j + J_)];
    }
    return g;
}

FourierState CompiledPoly::field(const FourierState& z) const {
    FourierState g = conj_gradient(z);
    g *= cplx(0, -1);
    return g;
}

std::pair<ModeSequence<cplx>, ModeSequence<cplx>> P4Fast::correlations(const FourierState& z) {
    auto corr = [](const ModeSequence<cplx>& x) {
        ModeSequence<cplx> xc(x.radius());
        for (int j = -x.radius(); j <= x.radius(); ++j) xc[j] = std::conj(x[-j]);
        return convolve(x, xc);
    };
    return {corr(z.a()), corr(z.b())};
}

double P4Fast::value(const FourierState& z) {
    const auto [wa, wb] = correlations(z);
    cplx s = 0;
    for (int m = -wa.radius(); m <= wa.radius(); ++m) s += wa[m] * wb[-m];
    return s.real();
}

FourierState P4Fast::conj_gradient(const FourierState& z) {
    const int J = z.J();
    const auto [wa, wb] = correlations(z);
    FourierState g(J);
    for (int i = -J; i <= J; ++i) {
        cplx sa = 0, sb = 0;
        // Only m with |i−m| ≤ J contribute.
        const int lo = std::max(-2 * J, i - J), hi = std::min(2 * J, i + J);
        for (int m = lo; m <= hi; ++m) {
            sa += z.a()[i - m] * wb[m];
            sb += z.b()[i - m] * wa[m];
        }
        g.a()[i] = sa;
        g.b()[i] = sb;
    }
    return g;
}

double P2_value(const FourierState& z) {
    double s = 0;
    for (int j = -z.J(); j <= z.J(); ++j) s += double(j) * j * (std::norm(z.a()[j]) + std::norm(z.b()[j]));
    return s;
}

FourierState field_nonlinear(const FourierState& z, const CompiledPoly* extra) {
    FourierState g = P4Fast::conj_gradient(z);
    if (extra) g += extra->conj_gradient(z);
    g *= cplx(0, -1);
    return g;
}

FourierState field_P2P4(const FourierState& z, const CompiledPoly* extra) {
    FourierState f = field_nonlinear(z, extra);
    for (int j = -z.J(); j <= z.J(); ++j) {
        const double w = double(j) * j;
        f.a()[j] += cplx(0, -w) * z.a()[j];
        f.b()[j] += cplx(0, -w) * z.b()[j];
    }
    return f;
}

double energy(const FourierState& z, const CompiledPoly* extra) {
    double h = P2_value(z) + P4Fast::value(z);
    if (extra) h += extra->value(z).real();
    return h;
}

void validate_R5(const PolyHamiltonian& h, int J, TorusCase pc) {
    if (h.empty()) return;
    if (h.max_index() > J) throw ConfigError("perturbation uses modes beyond the truncation radius " + std::to_string(J));
    for (const auto& [m, c] : h.terms()) {
        if (m.size() < 5)
            throw DegreeTooLow("perturbation monomial of degree " + std::to_string(m.size()) + " < 5",
                               {{"monomial", to_string(m)}});
        if (momentum(m) != 0)
            throw NonZeroMomentum("perturbation monomial has momentum " + std::to_string(momentum(m)),
                                  {{"monomial", to_string(m)}, {"momentum", momentum(m)}});
    }
    auto check = [&](const PolyHamiltonian& q, const char* name) {
        const PolyHamiltonian r = poisson(h, q);
        if (!r.empty())
            throw MassBracketNonzero(std::string("bracket with ") + name + " does not vanish",
                                     {{"quantity", name}, {"first_residual", to_string(r.terms().begin()->first)}});
    };
    if (!poisson(h, build_momentum(J)).empty())
        throw NonZeroMomentum("bracket with the momentum does not vanish");
    if (pc == TorusCase::stable) {
        check(build_partial_mass(J, Species::u), "L_u");
        check(build_partial_mass(J, Species::v), "L_v");
    } else {
        check(build_mass(J), "L");
    }
}

PolyHamiltonian user_R5(const std::string& text, int J, TorusCase pc) {
    PolyHamiltonian h = PolyHamiltonian::from_lines(text);
    validate_R5(h, J, pc);
    return h;
}

}  // namespace cnls
