#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "cnls/effective.hpp"
#include "cnls/poly.hpp"

namespace cnls {

struct IntegrateOptions {
    double dt = 1e-3;
    double T = 1.0;
    /// Record every `stride` steps (the final state is always recorded).
    int stride = 100;
    const CompiledPoly* extra = nullptr;
    double tol_H = 1e-9;
    double tol_L = 1e-10;
    /// Throw DriftExceeded when a tolerance is exceeded.
    bool enforce_drift = true;
    /// Smallness gate ‖z₀‖_s ≤ gate; non-positive disables it.
    double gate = 0.5;
    double gate_s = 0.0;
    /// Optional early stop, polled at every recorded sample.
    std::function<bool(double, const FourierState&)> stop = {};
};

struct Drift {
    double H = 0.0, L = 0.0, M = 0.0;
    nlohmann::json to_json() const { return {{"H", H}, {"L", L}, {"M", M}}; }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<FourierState> states;
    std::vector<double> H, L, M;
    /// Max |X(t) − X(0)| over every step (L, M) and every recorded sample (H).
    Drift drift;
    double dt = 0.0;
    long steps = 0;

    /// Columns t, |a_p|², |b_q|², |a_q|², |b_p|², H, L, M, tail_norm.
    void write_csv(std::ostream& os, int p, int q) const;
    nlohmann::json summary_json() const;
};

/// One Strang step: exact P₂ half-step, RK4 step of the nonlinear field, exact P₂ half-step. dt may be negative.
FourierState strang_step(const FourierState& z, double dt, const CompiledPoly* extra = nullptr);

Trajectory integrate(const FourierState& z0, const IntegrateOptions& opt = {});

/// Linearization around the two-mode solution, in the frame co-rotating with (Ω₁, Ω₂).
/// Unknowns v = (α, β, ᾱ, β̄) for the perturbations of a and b, |j| ≤ J; v̇ = A v.
class VariationalSystem {
public:
    VariationalSystem(const TorusParams& tp, int J);

    int J() const { return J_; }
    const TorusParams& torus() const { return tp_; }
    const Eigen::MatrixXcd& matrix() const { return A_; }

    Eigen::VectorXcd pack(const FourierState& d) const;
    FourierState unpack(const Eigen::VectorXcd& v) const;
    /// Conserved quadratic Hamiltonian of the linear flow.
    double quadratic_form(const FourierState& d) const;
    /// A applied to a perturbation (same as the frozen matrix).
    FourierState apply(const FourierState& d) const;
    /// Largest real part among the eigenvalues of A.
    double max_growth() const;

private:
    int idx(int j) const { return j + J_; }
    TorusParams tp_;
    int J_ = 0;
    int n_ = 0;
    std::array<double, 2> omega_{};
    double s_ = 0.0;
    Eigen::MatrixXcd A_;
};

struct LinearizedOptions {
    int J = 16;
    /// Non-positive: 12/(ν√(ρ₁ρ₂)) for p ≠ q, 10/ν for p = q.
    double T = 0.0;
    int samples = 2000;
    std::uint64_t seed = 20240607;
    /// Non-positive: 1e−8·√ν.
    double amplitude = 0.0;
    bool require_growth = false;
};

struct GrowthFit {
    TorusParams tp;
    TorusCase kind = TorusCase::unstable;
    double rate = 0.0;
    std::array<double, 2> window{};
    bool window_found = false;
    double r2 = 0.0;
    double predicted = 0.0;
    /// Largest real part of the frozen matrix spectrum.
    double frozen_rate = 0.0;
    /// sup ‖δ(t)‖ / ‖δ(0)‖ over the horizon.
    double max_ratio = 0.0;
    bool bounded = false;
    /// max |Q(t) − Q(0)| / max(|Q(0)|, ‖δ(t)‖²).
    double quadratic_drift = 0.0;
    double T = 0.0;
    std::vector<double> times, block_norms;
    nlohmann::json to_json() const;
};

/// Exact propagation of the variational equations (matrix exponential per sample interval) with growth fit.
GrowthFit linearized_flow(const TorusParams& tp, const LinearizedOptions& opt = {});

struct BeatingOptions {
    double gamma = 0.25;
    double eps2 = 1e-3;
    int p = 1, q = 2;
    int J = 16;
    double dt = 0.02;
    /// Horizon cap; the run stops after the first return.
    double T_max = 0.0;
    int stride = 25;
    double tol_H = 1e-9;
    double tol_L = 1e-10;
};

struct BeatingReport {
    BeatingOptions opt;
    double max_aq_ratio = 0.0;
    double max_pair_aq_bp = 0.0;
    double max_pair_ap_bq = 0.0;
    double return_time = 0.0;
    bool returned = false;
    Trajectory traj;
    nlohmann::json to_json() const;
};

/// |a_p|² = |b_q|² = (1−γ)ε², |a_q|² = |b_p|² = γε², all phases zero.
FourierState beating_state(int p, int q, int J, double gamma, double eps2);

BeatingReport beating(const BeatingOptions& opt);

}  // namespace cnls
