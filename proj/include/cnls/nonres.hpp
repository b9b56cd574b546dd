#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnls/effective.hpp"

namespace cnls {

enum class LabelKind { elliptic = 0, hyp_e = 1, hyp_f = 2 };

/// External mode label: elliptic (j, ±) or one of the hyperbolic directions e, f.
struct ModeLabel {
    LabelKind kind = LabelKind::elliptic;
    int j = 0;
    int sign = 1;

    static ModeLabel elliptic(int j, int sign) { return {LabelKind::elliptic, j, sign}; }
    static ModeLabel e() { return {LabelKind::hyp_e, 0, 0}; }
    static ModeLabel f() { return {LabelKind::hyp_f, 0, 0}; }
    bool hyperbolic() const { return kind != LabelKind::elliptic; }
    /// Cluster key: |j| for elliptic labels, −1 for the hyperbolic cluster.
    int cluster() const { return hyperbolic() ? -1 : std::abs(j); }
    friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
};

std::string to_string(const ModeLabel& l);

using IntPair = std::array<int, 2>;

/// Ω·k; Ω·k + Λ_α; Ω·k + Λ_α + Λ_β; Ω·k + Λ_α − Λ_β.
enum class DivisorKind { omega_k = 0, plus_one = 1, plus_two = 2, plus_minus = 3 };

enum class Disposition { excluded_by_mass, excluded_by_momentum, must_check, bounded_below, transversal, violation };

std::string to_string(DivisorKind k);
std::string to_string(Disposition d);

/// Divisor as N + ν(g·ρ) + cν√(ρ₁ρ₂) + i dν√(ρ₁ρ₂).
struct DivisorForm {
    double N = 0.0;
    std::array<double, 2> g{};
    double c = 0.0;
    double d = 0.0;

    cplx value(double nu, double rho1, double rho2) const;
    /// Lower bounds of |Re| and |Im| over ρ ∈ [1,2]².
    double min_abs_re(double nu) const;
    double min_abs_im(double nu) const;
};

struct DivisorRecord {
    IntPair k{};
    DivisorKind kind = DivisorKind::omega_k;
    std::optional<ModeLabel> alpha, beta;
    DivisorForm form;
    /// Value at the scanned ρ.
    cplx value{};
    Disposition disposition = Disposition::must_check;
    /// max(min|Re|, min|Im|) over the parameter box.
    double lower_bound = 0.0;
    /// ν(∇_ρ·𝔷) of the real part, 𝔷 = (k₂,k₁)/|k|.
    double derivative = 0.0;
    std::array<double, 2> direction{};
    /// Some elliptic label sits at the truncation edge |j| = J.
    bool boundary = false;

    nlohmann::json to_json() const;
};

/// Conservation-law filter for the monomial e^{ik·θ} ζ̄_α (ζ̄_α ζ̄_β, ζ̄_α ζ_β) of the given kind.
/// Returns excluded_by_mass, excluded_by_momentum or must_check.
Disposition selection_rule(const IntPair& k, DivisorKind kind, const std::optional<ModeLabel>& alpha,
                           const std::optional<ModeLabel>& beta, const TorusParams& tp);

DivisorForm divisor_form(const EffectiveModel& m, const IntPair& k, DivisorKind kind,
                         const std::optional<ModeLabel>& alpha, const std::optional<ModeLabel>& beta);

struct ScanOptions {
    int J = 64;
    /// Euclidean cutoff |k| ≤ N.
    double N = 3.0;
    /// Non-positive selects δ = ν/2.
    double delta = 0.0;
    /// Materialize excluded records too (slow path enumerating every label combination).
    bool keep_excluded = false;
    /// Throw ViolationFound if any surviving divisor fails both alternatives.
    bool strict = true;
};

struct ScanResult {
    TorusParams tp;
    TorusCase kind = TorusCase::unstable;
    int J = 0;
    double N = 0.0;
    double delta = 0.0;
    std::vector<DivisorRecord> records;
    std::map<Disposition, long> counts;

    long total() const;
    std::vector<DivisorRecord> violations() const;
    nlohmann::json summary_json() const;
};

/// All integer k with |k| ≤ N, ordered by (k₁, k₂).
std::vector<IntPair> lattice_ball(double N);

ScanResult scan_divisors(const TorusParams& tp, const ScanOptions& opt = {});

/// Re-evaluate a record's value at another ρ.
cplx evaluate(const DivisorRecord& r, double nu, double rho1, double rho2);

struct MeasureOptions {
    std::vector<double> kappas;
    double N = 8.0;
    /// Momentum constant; non-positive selects |(p,q)|.
    double M = 0.0;
    int samples = 4000;
    int J = 64;
    std::uint64_t seed = 20240607;
};

struct MeasureReport {
    double kappa = 0.0;
    double N = 0.0;
    double M = 0.0;
    double excluded_fraction = 0.0;
    long excluded = 0;
    long sample_count = 0;
    double wilson_lo = 0.0, wilson_hi = 0.0;
    nlohmann::json to_json() const;
};

struct MeasureSweep {
    TorusParams tp;
    TorusCase kind = TorusCase::unstable;
    std::vector<MeasureReport> reports;
    long divisors_checked = 0;
    bool monotone = true;
    /// Least-squares slope of the fraction against κ through the origin (linear-in-κ bound).
    double slope = 0.0;
    /// Ordinary least squares with intercept, for reference.
    double ols_slope = 0.0, ols_intercept = 0.0;
    double extrapolate(double kappa) const { return slope * kappa; }
    nlohmann::json to_json() const;
};

/// Monte-Carlo estimate over ρ uniform in [1,2]² with common samples for every κ.
MeasureSweep measure_estimate(const TorusParams& tp_template, const MeasureOptions& opt);

/// Wilson 95% interval for x successes in n trials.
std::pair<double, double> wilson_interval(long x, long n, double z = 1.959963984540054);

struct HypothesisReport {
    double delta = 0.0;
    /// sup |Λ_α − w_α²| over the scanned labels.
    double a0_constant = 0.0;
    double min_abs_lambda = 0.0;
    /// min |Im Λ| over the hyperbolic labels (infinite when there are none).
    double min_im_hyperbolic = 0.0;
    long pairs_checked = 0;
    /// Pairs violating a bound but removed by the conservation filter.
    std::vector<std::string> flagged_excluded;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

/// A0 and A1(a,b,c) at the model's ρ, with A1(c) restricted to pairs surviving the k = 0 selection rules.
HypothesisReport check_A0_A1(const EffectiveModel& model, int J, double delta = 0.0, bool strict = false);

}  // namespace cnls
