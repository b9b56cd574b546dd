#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnls/birkhoff.hpp"
#include "cnls/poly.hpp"

namespace cnls {

/// Linear torus a_p = √(νρ₁)e^{iθ₁}, b_q = √(νρ₂)e^{iθ₂}.
struct TorusParams {
    int p = 1;
    int q = 2;
    double rho1 = 1.0;
    double rho2 = 1.0;
    double nu = 0.01;

    /// Throws ConfigError unless ρ ∈ [1,2]² and 0 < ν ≤ nu_max.
    void validate(double nu_max = 0.25) const;
    nlohmann::json to_json() const;
};

TorusCase case_for(const TorusParams& tp);
std::string to_string(TorusCase c);

/// Elliptic label (j, ±). Unstable: + is species a (Λ = j²+νρ₂), − is species b (Λ = j²+νρ₁), j ∉ {p,q}.
/// Stable: + is e_j (Λ = j²−p²+ν√(ρ₁ρ₂)), − is f_j (Λ = j²−p²−ν√(ρ₁ρ₂)), j ≠ p.
struct EllipticLabel {
    int j = 0;
    int sign = 1;
    friend auto operator<=>(const EllipticLabel&, const EllipticLabel&) = default;
};

struct EffectiveModel {
    TorusParams tp;
    TorusCase kind = TorusCase::unstable;
    std::array<double, 2> omega{};
    double C = 0.0;
    /// Hyperbolic block on (d_p, c_q, d̄_p, c̄_q): h ⊃ ½ zᵀKz. Zero for the stable case.
    Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
    /// ±iν(ρ₂−ρ₁) ± ν√(ρ₁ρ₂); empty for the stable case.
    std::vector<cplx> hyperbolic_eigs;
    /// Λ_e = ν(ρ₂−ρ₁) − iν√(ρ₁ρ₂), Λ_f = ν(ρ₁−ρ₂) − iν√(ρ₁ρ₂) (unstable only).
    cplx lambda_e{}, lambda_f{};

    bool stable() const { return kind == TorusCase::stable; }
    std::string verdict() const { return stable() ? "stable" : "unstable"; }
    bool is_elliptic(const EllipticLabel& l) const;
    double lambda(const EllipticLabel& l) const;
    /// ∇_ρ Λ.
    std::array<double, 2> lambda_gradient(const EllipticLabel& l) const;
    std::array<std::array<double, 2>, 2> omega_gradient() const;
    /// M = −iJK, J = [[0, I], [−I, 0]].
    Eigen::Matrix4cd M() const;
    /// Elliptic labels with |j| ≤ J.
    std::vector<EllipticLabel> elliptic_labels(int J) const;
    nlohmann::json to_json(int J = 0) const;
};

EffectiveModel build_unstable(const TorusParams& tp);
EffectiveModel build_stable(const TorusParams& tp);
EffectiveModel build_model(const TorusParams& tp);

/// Actions x, angles θ and the remaining modes z (internal slots a_p, b_q are ignored).
struct AngleCoords {
    std::array<double, 2> x{};
    std::array<double, 2> theta{};
    FourierState z;
};

AngleCoords psi_ang_unstable(const AngleCoords& in, int p, int q);
AngleCoords psi_ang_unstable_inverse(const AngleCoords& in, int p, int q);
AngleCoords psi_ang_stable(const AngleCoords& in, int p);
AngleCoords psi_ang_stable_inverse(const AngleCoords& in, int p);

/// (ζ_e, ζ_f, ζ̄_e, ζ̄_f) with ζ_e = (c_q + i d̄_p)/√2, ζ_f = (d_p + i c̄_q)/√2.
std::array<cplx, 4> zeta_ef(cplx d_p, cplx c_q, cplx conj_d_p, cplx conj_c_q);
/// Inverse of zeta_ef: (d_p, c_q, d̄_p, c̄_q).
std::array<cplx, 4> zeta_ef_inverse(const std::array<cplx, 4>& zeta);
/// Matrix of zeta_ef acting on (d_p, c_q, d̄_p, c̄_q).
Eigen::Matrix4cd zeta_ef_matrix();

/// e = (c+d)/√2, f = (c−d)/√2 modewise.
std::pair<ModeSequence<cplx>, ModeSequence<cplx>> psi_sym(const ModeSequence<cplx>& c, const ModeSequence<cplx>& d);
std::pair<ModeSequence<cplx>, ModeSequence<cplx>> psi_sym_inverse(const ModeSequence<cplx>& e,
                                                                  const ModeSequence<cplx>& f);

/// Rescaled torus coordinates: y = νr, z′ = √ν ζ (ζ in the c, d representation; internal slots ignored).
struct TorusPoint {
    std::array<double, 2> r{};
    std::array<double, 2> theta{};
    FourierState zeta;
};

/// Composite chart from rescaled torus coordinates to Fourier modes.
class TorusChart {
public:
    TorusChart(const TorusParams& tp, int J);

    const EffectiveModel& model() const { return model_; }
    int J() const { return J_; }

    FourierState to_modes(const TorusPoint& pt) const;
    TorusPoint from_modes(const FourierState& w) const;
    /// Quadratic effective Hamiltonian h₀(r, ζ) (ν-scaled coefficients, so H ≈ C + ν h₀).
    double h0(const TorusPoint& pt) const;
    /// Zero the internal slots a_p, b_q.
    FourierState external(const FourierState& zeta) const;

private:
    EffectiveModel model_;
    int J_ = 0;
};

/// Exact two-mode solution a_p = √(νρ₁)e^{−iΩ₁t}, b_q = √(νρ₂)e^{−iΩ₂t}.
FourierState two_mode_state(const TorusParams& tp, int J, double t = 0.0);
/// ‖ż − X_H(z)‖ for the two-mode solution (H = P₂ + P₄).
double two_mode_residual(const TorusParams& tp, int J, double t = 0.0);

struct EffectiveVsTruthOptions {
    std::vector<double> nus{1e-3, 3e-3, 1e-2};
    int samples = 64;
    std::uint64_t seed = 20240607;
    /// Polydisc radius: |r_i| < μ², ‖ζ‖₁ < μ.
    double mu = 0.3;
    int substeps = 128;
    const CompiledPoly* extra = nullptr;
};

struct EffectiveVsTruthReport {
    TorusParams tp;
    int J = 0;
    std::vector<double> nus;
    std::vector<double> sup_residual;
    double exponent = 0.0;
    std::string regime;
    nlohmann::json to_json() const;
};

/// Samples |H∘τ∘Φ − C − νh₀| over the rescaled polydisc and fits the exponent in ν.
EffectiveVsTruthReport effective_vs_truth(const TorusParams& tp, int J, const EffectiveVsTruthOptions& opt = {});

/// H∘τ∘Φ − C − νh₀ at one point.
double effective_residual(const TorusChart& chart, const BirkhoffMap& map, const TorusPoint& pt, int substeps = 128,
                          const CompiledPoly* extra = nullptr);

}  // namespace cnls
