#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cnls/poly.hpp"

namespace cnls {

/// χ₄ and Z₄ solving {χ₄, P₂} = P₄ − Z₄.
struct HomologicalSolution {
    int J = 0;
    PolyHamiltonian chi4;
    PolyHamiltonian z4;
    /// p² − q² + r² − s² for every monomial a_p ā_q b_r b̄_s of P₄.
    std::map<Monomial, long> divisor_map;
};

HomologicalSolution solve_homological(int J);

struct IdentityReport {
    int J = 0;
    /// Monomials of {χ₄,P₂} − P₄ + Z₄.
    std::vector<std::string> homological_residual;
    /// Monomials of {P₂,Z₄}.
    std::vector<std::string> resonance_residual;
    bool ok() const { return homological_residual.empty() && resonance_residual.empty(); }
    nlohmann::json to_json() const;
};

/// Exact check of the homological and resonance identities; throws ResidualNonzero when `strict`.
IdentityReport verify_identities(const HomologicalSolution& sol, bool strict = false);

/// Q₁ = {P₄,χ₄}, Q₂ = {Z₄,χ₄} − {P₄,χ₄} + {{P₄,χ₄},χ₄}.
std::pair<PolyHamiltonian, PolyHamiltonian> remainder_terms(const HomologicalSolution& sol);

struct TauOptions {
    int substeps = 128;
    /// Smallness gate on ‖z‖_s; non-positive disables it.
    double eps0 = 0.1;
    double s = 1.0;
};

/// Numerical time-±1 flow of χ₄.
class BirkhoffMap {
public:
    explicit BirkhoffMap(int J);
    explicit BirkhoffMap(const HomologicalSolution& sol);

    int J() const { return J_; }
    const HomologicalSolution& solution() const { return sol_; }
    const CompiledPoly& chi4() const { return chi_; }
    const CompiledPoly& z4() const { return z4_; }

    /// δ with τ(z) = z + δ (direction −1 gives the inverse map); integrating δ keeps its relative precision.
    FourierState displacement(const FourierState& z, int direction, const TauOptions& opt = {}) const;
    FourierState tau(const FourierState& z, int direction, const TauOptions& opt = {}) const;

    /// H(z+δ) − P₂(z) − Z₄(z) with δ = τ(z) − z, arranged to avoid cancellation in P₂.
    double energy_defect(const FourierState& z, const FourierState& delta) const;

private:
    HomologicalSolution sol_;
    int J_ = 0;
    CompiledPoly chi_;
    CompiledPoly z4_;
};

/// Free-function form of the flow.
FourierState tau_flow(const BirkhoffMap& map, const FourierState& state, int direction, const TauOptions& opt = {});

}  // namespace cnls
