#include "cnls/birkhoff.hpp"

#include "cnls/errors.hpp"

namespace cnls {

HomologicalSolution solve_homological(int J) {
    if (J < 1) throw ConfigError("solve_homological: J must be at least 1");
    HomologicalSolution sol;
    sol.J = J;
    const PolyHamiltonian p4 = build_P4(J);
    for (const auto& [m, c] : p4.terms()) {
        const long d = divisor(m);
        sol.divisor_map.emplace(m, d);
        if (d == 0)
            sol.z4.add(m, c);
        else
            sol.chi4.add(m, c * GaussRational(0, 1) / GaussRational(d));
    }
    return sol;
}

nlohmann::json IdentityReport::to_json() const {
    return {{"J", J},
            {"ok", ok()},
            {"homological_residual", homological_residual},
            {"resonance_residual", resonance_residual}};
}

IdentityReport verify_identities(const HomologicalSolution& sol, bool strict) {
    const PolyHamiltonian p2 = build_P2(sol.J);
    const PolyHamiltonian p4 = build_P4(sol.J);
    IdentityReport rep;
    rep.J = sol.J;
    const PolyHamiltonian homological = poisson(sol.chi4, p2) - p4 + sol.z4;
    for (const auto& [m, c] : homological.terms()) rep.homological_residual.push_back(c.to_string() + " : " + to_string(m));
    const PolyHamiltonian resonance = poisson(p2, sol.z4);
    for (const auto& [m, c] : resonance.terms()) rep.resonance_residual.push_back(c.to_string() + " : " + to_string(m));
    if (strict && !rep.ok()) throw ResidualNonzero("homological identities violated", rep.to_json());
    return rep;
}

std::pair<PolyHamiltonian, PolyHamiltonian> remainder_terms(const HomologicalSolution& sol) {
    const PolyHamiltonian p4 = build_P4(sol.J);
    PolyHamiltonian q1 = poisson(p4, sol.chi4);
    PolyHamiltonian q2 = poisson(sol.z4, sol.chi4) - q1 + poisson(q1, sol.chi4);
    return {std::move(q1), std::move(q2)};
}

BirkhoffMap::BirkhoffMap(int J) : BirkhoffMap(solve_homological(J)) {}

BirkhoffMap::BirkhoffMap(const HomologicalSolution& sol)
    : sol_(sol), J_(sol.J), chi_(sol.chi4, sol.J), z4_(sol.z4, sol.J) {}

FourierState BirkhoffMap::displacement(const FourierState& z, int direction, const TauOptions& opt) const {
    if (direction != 1 && direction != -1) throw ConfigError("tau_flow: direction must be +1 or -1");
    if (opt.substeps < 1) throw ConfigError("tau_flow: substeps must be positive");
    if (z.J() != J_) throw ConfigError("tau_flow: state truncation differs from the normal form");
    const double n0 = norm_s(z, opt.s);
    if (opt.eps0 > 0 && n0 > opt.eps0)
        throw SmallnessGate("state norm exceeds the Birkhoff smallness gate",
                            {{"norm", n0}, {"eps0", opt.eps0}, {"s", opt.s}});
    const double h = double(direction) / opt.substeps;
    FourierState d(J_);
    auto rhs = [&](const FourierState& delta) { return chi_.field(z + delta); };
    for (int step = 0; step < opt.substeps; ++step) {
        const FourierState k1 = rhs(d);
        const FourierState k2 = rhs(d + (0.5 * h) * k1);
        const FourierState k3 = rhs(d + (0.5 * h) * k2);
        const FourierState k4 = rhs(d + h * k3);
        d += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double n = norm_s(z + d, opt.s);
        if (n > 2.0 * n0)
            throw NormEscape("flow of chi4 left the ball of radius 2|z|",
                             {{"norm", n}, {"initial_norm", n0}, {"t", (step + 1) * h}});
    }
    return d;
}

FourierState BirkhoffMap::tau(const FourierState& z, int direction, const TauOptions& opt) const {
    return z + displacement(z, direction, opt);
}

double BirkhoffMap::energy_defect(const FourierState& z, const FourierState& delta) const {
    double dp2 = 0;
    for (int j = -J_; j <= J_; ++j) {
        const double w = double(j) * j;
        dp2 += w * (2.0 * (std::conj(z.a()[j]) * delta.a()[j]).real() + std::norm(delta.a()[j]));
        dp2 += w * (2.0 * (std::conj(z.b()[j]) * delta.b()[j]).real() + std::norm(delta.b()[j]));
    }
    return dp2 + P4Fast::value(z + delta) - z4_.value(z).real();
}

FourierState tau_flow(const BirkhoffMap& map, const FourierState& state, int direction, const TauOptions& opt) {
    return map.tau(state, direction, opt);
}

}  // namespace cnls
