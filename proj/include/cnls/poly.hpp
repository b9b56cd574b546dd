#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "cnls/gauss_rational.hpp"
#include "cnls/phase_space.hpp"

namespace cnls {

/// One of a_j, ā_j, b_j, b̄_j.
struct Variable {
    Species species = Species::u;
    bool conj = false;
    int index = 0;

    Variable conjugate() const { return {species, !conj, index}; }
    friend auto operator<=>(const Variable&, const Variable&) = default;
};

inline Variable var_a(int j) { return {Species::u, false, j}; }
inline Variable var_abar(int j) { return {Species::u, true, j}; }
inline Variable var_b(int j) { return {Species::v, false, j}; }
inline Variable var_bbar(int j) { return {Species::v, true, j}; }

/// Sorted multiset of variables (species, then conjugation, then index).
using Monomial = std::vector<Variable>;

Monomial make_monomial(std::vector<Variable> factors);
Monomial multiply(const Monomial& x, const Monomial& y);
Monomial conjugate(const Monomial& m);
/// Σ index over plain factors minus Σ index over conjugated factors.
int momentum(const Monomial& m);
/// Σ index² over plain factors minus Σ index² over conjugated factors: m is an eigenvector of {·, P₂} with eigenvalue −i·this.
long divisor(const Monomial& m);
/// (#plain − #conjugated) for the given species.
int charge(const Monomial& m, Species s);

/// Exact polynomial in the modes with Gaussian-rational coefficients.
class PolyHamiltonian {
public:
    using TermMap = std::map<Monomial, GaussRational>;

    PolyHamiltonian() = default;

    void add(const Monomial& m, const GaussRational& c);
    void set(const Monomial& m, const GaussRational& c);
    GaussRational coeff(const Monomial& m) const;
    bool contains(const Monomial& m) const { return terms_.count(m) != 0; }

    const TermMap& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    int degree() const;
    int min_degree() const;
    /// Largest |index| appearing in any factor.
    int max_index() const;
    /// Real-valued on the real slice: coeff(conj m) = conj(coeff(m)) for every term.
    bool is_real() const;

    PolyHamiltonian derivative(const Variable& v) const;

    PolyHamiltonian& operator+=(const PolyHamiltonian& o);
    PolyHamiltonian& operator-=(const PolyHamiltonian& o);
    PolyHamiltonian& operator*=(const GaussRational& c);
    friend PolyHamiltonian operator+(PolyHamiltonian x, const PolyHamiltonian& y) { return x += y; }
    friend PolyHamiltonian operator-(PolyHamiltonian x, const PolyHamiltonian& y) { return x -= y; }
    friend PolyHamiltonian operator*(const GaussRational& c, PolyHamiltonian x) { return x *= c; }
    friend PolyHamiltonian operator*(const PolyHamiltonian& x, const PolyHamiltonian& y);
    friend bool operator==(const PolyHamiltonian&, const PolyHamiltonian&) = default;

    /// Exact value at a point with Gaussian-rational coordinates (conjugates taken from the state).
    GaussRational evaluate_exact(const BasicFourierState<GaussRational>& state) const;

    /// One term per line: `re / im : a(+1) ab(-2) b(+2)^2 bb(-1)`.
    std::string to_lines() const;
    static PolyHamiltonian from_lines(const std::string& text);

private:
    TermMap terms_;
};

/// {f,g} = −i Σ_j Σ_species (∂f/∂x_j ∂g/∂x̄_j − ∂f/∂x̄_j ∂g/∂x_j)
PolyHamiltonian poisson(const PolyHamiltonian& f, const PolyHamiltonian& g);

/// P₂ = Σ j²(a_j ā_j + b_j b̄_j), |j| ≤ J
PolyHamiltonian build_P2(int J);
/// P₄ = Σ_{i+j=k+l} a_k b_l ā_i b̄_j, all indices in [−J, J]
PolyHamiltonian build_P4(int J);
PolyHamiltonian build_mass(int J);
PolyHamiltonian build_momentum(int J);
PolyHamiltonian build_partial_mass(int J, Species s);

std::string to_string(const Variable& v);
std::string to_string(const Monomial& m);

/// Floating-point image of a polynomial, specialized for fast value and gradient evaluation.
class CompiledPoly {
public:
    CompiledPoly() = default;
    CompiledPoly(const PolyHamiltonian& h, int J);

    int J() const { return J_; }
    cplx value(const FourierState& z) const;
    /// (∂h/∂ā_j, ∂h/∂b̄_j) with plain variables from z and conjugates from conj(z).
    FourierState conj_gradient(const FourierState& z) const;
    /// Hamiltonian vector field ȧ_j = −i ∂h/∂ā_j, ḃ_j = −i ∂h/∂b̄_j (h assumed real).
    FourierState field(const FourierState& z) const;

private:
    struct Product {
        cplx coeff;
        int target = 0;
        std::size_t begin = 0, end = 0;
    };
    int slot(const Variable& v) const;
    void load(const FourierState& z, std::vector<cplx>& buf) const;

    int J_ = 0;
    std::vector<Product> value_terms_;
    std::vector<Product> grad_terms_;
    std::vector<int> slots_;
};

/// Fast paths for the quartic coupling through convolutions.
struct P4Fast {
    /// W^a_m = Σ_{k−i=m} a_k ā_i and W^b likewise, on [−2J, 2J].
    static std::pair<ModeSequence<cplx>, ModeSequence<cplx>> correlations(const FourierState& z);
    static double value(const FourierState& z);
    /// (∂P₄/∂ā_i, ∂P₄/∂b̄_j) projected onto [−J, J].
    static FourierState conj_gradient(const FourierState& z);
};

double P2_value(const FourierState& z);

/// Hamiltonian vector field of P₂ + P₄ (+ optional compiled extra term).
FourierState field_P2P4(const FourierState& z, const CompiledPoly* extra = nullptr);
/// Nonlinear part only: −i ∂(P₄ + extra)/∂z̄.
FourierState field_nonlinear(const FourierState& z, const CompiledPoly* extra = nullptr);
double energy(const FourierState& z, const CompiledPoly* extra = nullptr);

/// Which conserved quantities a user perturbation must commute with.
enum class TorusCase { unstable, stable };

/// Parse and validate a user-supplied higher-order perturbation from the line format.
PolyHamiltonian user_R5(const std::string& text, int J, TorusCase pc);
/// Validate an already built polynomial; throws DegreeTooLow, NonZeroMomentum or MassBracketNonzero.
void validate_R5(const PolyHamiltonian& h, int J, TorusCase pc);

}  // namespace cnls
