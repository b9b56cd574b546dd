#include "cnls/effective.hpp"

#include <cmath>
#include <numbers>

#include "cnls/errors.hpp"
#include "cnls/fit.hpp"
#include "cnls/random.hpp"

namespace cnls {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

nlohmann::json cplx_json(cplx z) { return {z.real(), z.imag()}; }

}  // namespace

void TorusParams::validate(double nu_max) const {
    if (!(rho1 >= 1.0 && rho1 <= 2.0 && rho2 >= 1.0 && rho2 <= 2.0))
        throw ConfigError("torus: rho must lie in [1,2]^2", {{"rho1", rho1}, {"rho2", rho2}});
    if (!(nu > 0.0 && nu <= nu_max)) throw ConfigError("torus: nu must satisfy 0 < nu <= nu_max", {{"nu", nu}, {"nu_max", nu_max}});
}

nlohmann::json TorusParams::to_json() const {
    return {{"p", p}, {"q", q}, {"rho1", rho1}, {"rho2", rho2}, {"nu", nu}};
}

TorusCase case_for(const TorusParams& tp) { return tp.p == tp.q ? TorusCase::stable : TorusCase::unstable; }

std::string to_string(TorusCase c) { return c == TorusCase::stable ? "stable" : "unstable"; }

bool EffectiveModel::is_elliptic(const EllipticLabel& l) const {
    if (l.sign != 1 && l.sign != -1) return false;
    if (stable()) return l.j != tp.p;
    return l.j != tp.p && l.j != tp.q;
}

double EffectiveModel::lambda(const EllipticLabel& l) const {
    const double j2 = double(l.j) * l.j;
    if (stable()) {
        const double s = tp.nu * std::sqrt(tp.rho1 * tp.rho2);
        return j2 - double(tp.p) * tp.p + l.sign * s;
    }
    return l.sign > 0 ? j2 + tp.nu * tp.rho2 : j2 + tp.nu * tp.rho1;
}

std::array<double, 2> EffectiveModel::lambda_gradient(const EllipticLabel& l) const {
    if (stable()) {
        const double r = std::sqrt(tp.rho1 * tp.rho2);
        return {l.sign * tp.nu * 0.5 * tp.rho2 / r, l.sign * tp.nu * 0.5 * tp.rho1 / r};
    }
    return l.sign > 0 ? std::array<double, 2>{0.0, tp.nu} : std::array<double, 2>{tp.nu, 0.0};
}

std::array<std::array<double, 2>, 2> EffectiveModel::omega_gradient() const {
    return {{{0.0, tp.nu}, {tp.nu, 0.0}}};
}

Eigen::Matrix4cd EffectiveModel::M() const {
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    J.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
    J.block<2, 2>(2, 0) = -Eigen::Matrix2d::Identity();
    return cplx(0, -1) * (J * K).cast<cplx>();
}

std::vector<EllipticLabel> EffectiveModel::elliptic_labels(int J) const {
    std::vector<EllipticLabel> out;
    for (int j = -J; j <= J; ++j)
        for (int s : {1, -1})
            if (is_elliptic({j, s})) out.push_back({j, s});
    return out;
}

nlohmann::json EffectiveModel::to_json(int J) const {
    nlohmann::json j = {{"torus", tp.to_json()},
                        {"case", to_string(kind)},
                        {"omega", omega},
                        {"C", C},
                        {"verdict", verdict()}};
    auto eigs = nlohmann::json::array();
    for (cplx e : hyperbolic_eigs) eigs.push_back(cplx_json(e));
    j["hyperbolic_eigs"] = eigs;
    if (!stable()) {
        auto k = nlohmann::json::array();
        for (int r = 0; r < 4; ++r) k.push_back({K(r, 0), K(r, 1), K(r, 2), K(r, 3)});
        j["K"] = k;
        j["K_basis"] = {"d_p", "c_q", "conj(d_p)", "conj(c_q)"};
        j["lambda_e"] = cplx_json(lambda_e);
        j["lambda_f"] = cplx_json(lambda_f);
    } else {
        j["K"] = nlohmann::json::array();
    }
    auto ell = nlohmann::json::array();
    for (const auto& l : elliptic_labels(J)) ell.push_back({{"j", l.j}, {"sign", l.sign > 0 ? "+" : "-"}, {"lambda", lambda(l)}});
    j["lambda_elliptic"] = ell;
    return j;
}

EffectiveModel build_unstable(const TorusParams& tp) {
    if (tp.p == tp.q) throw DegenerateModes("build_unstable requires p != q; use build_stable", tp.to_json());
    EffectiveModel m;
    m.tp = tp;
    m.kind = TorusCase::unstable;
    const double nu = tp.nu, r1 = tp.rho1, r2 = tp.rho2, s = nu * std::sqrt(r1 * r2);
    m.omega = {double(tp.p) * tp.p + nu * r2, double(tp.q) * tp.q + nu * r1};
    m.C = nu * nu * r1 * r2 + nu * tp.p * tp.p * r1 + nu * tp.q * tp.q * r2;
    const double a = nu * (r1 - r2);
    m.K << 0, s, a, 0,  //
        s, 0, 0, -a,    //
        a, 0, 0, s,     //
        0, -a, s, 0;
    const double w = nu * (r2 - r1);
    m.hyperbolic_eigs = {cplx(s, w), cplx(s, -w), cplx(-s, w), cplx(-s, -w)};
    m.lambda_e = cplx(w, -s);
    m.lambda_f = cplx(-w, -s);
    return m;
}

EffectiveModel build_stable(const TorusParams& tp) {
    EffectiveModel m;
    m.tp = tp;
    m.tp.q = tp.p;
    m.kind = TorusCase::stable;
    const double nu = tp.nu, r1 = tp.rho1, r2 = tp.rho2, p2 = double(tp.p) * tp.p;
    m.omega = {p2 + nu * r2, p2 + nu * r1};
    m.C = nu * nu * r1 * r2 + nu * p2 * (r1 + r2);
    return m;
}

EffectiveModel build_model(const TorusParams& tp) {
    return case_for(tp) == TorusCase::stable ? build_stable(tp) : build_unstable(tp);
}

AngleCoords psi_ang_unstable(const AngleCoords& in, int p, int q) {
    AngleCoords out = in;
    const cplx aq = in.z.a().at_or_zero(q), bp = in.z.b().at_or_zero(p);
    if (in.z.a().contains(q)) out.z.a()[q] = aq * std::polar(1.0, -in.theta[1]);
    if (in.z.b().contains(p)) out.z.b()[p] = bp * std::polar(1.0, -in.theta[0]);
    out.x = {in.x[0] + std::norm(bp), in.x[1] + std::norm(aq)};
    return out;
}

AngleCoords psi_ang_unstable_inverse(const AngleCoords& in, int p, int q) {
    AngleCoords out = in;
    const cplx cq = in.z.a().at_or_zero(q), dp = in.z.b().at_or_zero(p);
    if (in.z.a().contains(q)) out.z.a()[q] = cq * std::polar(1.0, in.theta[1]);
    if (in.z.b().contains(p)) out.z.b()[p] = dp * std::polar(1.0, in.theta[0]);
    out.x = {in.x[0] - std::norm(dp), in.x[1] - std::norm(cq)};
    return out;
}

namespace {

AngleCoords rotate_external(const AngleCoords& in, int p, int direction) {
    AngleCoords out = in;
    const cplx eu = std::polar(1.0, direction * in.theta[0]), ev = std::polar(1.0, direction * in.theta[1]);
    double su = 0, sv = 0;
    for (int k = -in.z.J(); k <= in.z.J(); ++k) {
        if (k == p) continue;
        out.z.a()[k] = in.z.a()[k] * eu;
        out.z.b()[k] = in.z.b()[k] * ev;
        su += std::norm(in.z.a()[k]);
        sv += std::norm(in.z.b()[k]);
    }
    out.x = {in.x[0] - direction * su, in.x[1] - direction * sv};
    return out;
}

}  // namespace

AngleCoords psi_ang_stable(const AngleCoords& in, int p) { return rotate_external(in, p, -1); }

AngleCoords psi_ang_stable_inverse(const AngleCoords& in, int p) { return rotate_external(in, p, +1); }

std::array<cplx, 4> zeta_ef(cplx d_p, cplx c_q, cplx conj_d_p, cplx conj_c_q) {
    const cplx i(0, 1);
    return {kSqrtHalf * (c_q + i * conj_d_p), kSqrtHalf * (d_p + i * conj_c_q), kSqrtHalf * (conj_c_q + i * d_p),
            kSqrtHalf * (conj_d_p + i * c_q)};
}

std::array<cplx, 4> zeta_ef_inverse(const std::array<cplx, 4>& z) {
    // ζ_e − iζ̄_f = √2 c_q, ζ_f − iζ̄_e = √2 d_p, and their barred counterparts
    const cplx i(0, 1);
    const auto& [e, f, eb, fb] = z;
    return {kSqrtHalf * (f - i * eb), kSqrtHalf * (e - i * fb), kSqrtHalf * (fb - i * e), kSqrtHalf * (eb - i * f)};
}

Eigen::Matrix4cd zeta_ef_matrix() {
    const cplx i(0, 1);
    Eigen::Matrix4cd P;
    P << 0, 1, i, 0,  //
        1, 0, 0, i,   //
        i, 0, 0, 1,   //
        0, i, 1, 0;
    return kSqrtHalf * P;
}

std::pair<ModeSequence<cplx>, ModeSequence<cplx>> psi_sym(const ModeSequence<cplx>& c, const ModeSequence<cplx>& d) {
    if (c.radius() != d.radius()) throw ConfigError("psi_sym: index sets differ");
    ModeSequence<cplx> e(c.radius()), f(c.radius());
    for (int k = -c.radius(); k <= c.radius(); ++k) {
        e[k] = kSqrtHalf * (c[k] + d[k]);
        f[k] = kSqrtHalf * (c[k] - d[k]);
    }
    return {e, f};
}

std::pair<ModeSequence<cplx>, ModeSequence<cplx>> psi_sym_inverse(const ModeSequence<cplx>& e,
                                                                  const ModeSequence<cplx>& f) {
    return psi_sym(e, f);
}

TorusChart::TorusChart(const TorusParams& tp, int J) : model_(build_model(tp)), J_(J) {
    if (J < std::max(std::abs(tp.p), std::abs(tp.q)))
        throw ConfigError("torus chart: J must contain the torus modes", {{"J", J}, {"p", tp.p}, {"q", tp.q}});
}

FourierState TorusChart::external(const FourierState& zeta) const {
    FourierState z = zeta;
    z.a()[model_.tp.p] = 0;
    z.b()[model_.tp.q] = 0;
    return z;
}

FourierState TorusChart::to_modes(const TorusPoint& pt) const {
    if (pt.zeta.J() != J_) throw ConfigError("torus chart: zeta has the wrong truncation");
    const auto& tp = model_.tp;
    const double nu = tp.nu, sn = std::sqrt(nu);
    AngleCoords ac;
    ac.theta = pt.theta;
    ac.z = external(pt.zeta);
    ac.z *= cplx(sn, 0);
    ac.x = {nu * pt.r[0], nu * pt.r[1]};
    const AngleCoords back =
        model_.stable() ? psi_ang_stable_inverse(ac, tp.p) : psi_ang_unstable_inverse(ac, tp.p, tp.q);
    const double I1 = nu * tp.rho1 + back.x[0], I2 = nu * tp.rho2 + back.x[1];
    if (I1 < 0 || I2 < 0) throw ConfigError("torus chart: negative action", {{"I1", I1}, {"I2", I2}});
    FourierState w = back.z;
    w.a()[tp.p] = std::polar(std::sqrt(I1), pt.theta[0]);
    w.b()[tp.q] = std::polar(std::sqrt(I2), pt.theta[1]);
    return w;
}

TorusPoint TorusChart::from_modes(const FourierState& w) const {
    const auto& tp = model_.tp;
    const double nu = tp.nu;
    AngleCoords ac;
    ac.theta = {std::arg(w.a()[tp.p]), std::arg(w.b()[tp.q])};
    ac.x = {std::norm(w.a()[tp.p]) - nu * tp.rho1, std::norm(w.b()[tp.q]) - nu * tp.rho2};
    ac.z = external(w);
    const AngleCoords fwd = model_.stable() ? psi_ang_stable(ac, tp.p) : psi_ang_unstable(ac, tp.p, tp.q);
    TorusPoint pt;
    pt.theta = ac.theta;
    pt.r = {fwd.x[0] / nu, fwd.x[1] / nu};
    pt.zeta = fwd.z;
    pt.zeta *= cplx(1.0 / std::sqrt(nu), 0);
    return pt;
}

double TorusChart::h0(const TorusPoint& pt) const {
    const auto& m = model_;
    const auto& tp = m.tp;
    const FourierState z = external(pt.zeta);
    double h = m.omega[0] * pt.r[0] + m.omega[1] * pt.r[1];
    if (m.stable()) {
        const auto [e, f] = psi_sym(z.a(), z.b());
        for (int k = -J_; k <= J_; ++k) {
            if (k == tp.p) continue;
            h += m.lambda({k, 1}) * std::norm(e[k]) + m.lambda({k, -1}) * std::norm(f[k]);
        }
        return h;
    }
    for (int k = -J_; k <= J_; ++k) {
        if (k == tp.p || k == tp.q) continue;
        h += m.lambda({k, 1}) * std::norm(z.a()[k]) + m.lambda({k, -1}) * std::norm(z.b()[k]);
    }
    const cplx cq = z.a()[tp.q], dp = z.b()[tp.p];
    const Eigen::Vector4cd v(dp, cq, std::conj(dp), std::conj(cq));
    h += 0.5 * (v.transpose() * m.K.cast<cplx>() * v)(0).real();
    return h;
}

FourierState two_mode_state(const TorusParams& tp, int J, double t) {
    const EffectiveModel m = build_model(tp);
    FourierState z(J);
    z.a()[tp.p] = std::polar(std::sqrt(tp.nu * tp.rho1), -m.omega[0] * t);
    z.b()[m.tp.q] = std::polar(std::sqrt(tp.nu * tp.rho2), -m.omega[1] * t);
    return z;
}

double two_mode_residual(const TorusParams& tp, int J, double t) {
    const EffectiveModel m = build_model(tp);
    const FourierState z = two_mode_state(tp, J, t);
    FourierState zdot(J);
    zdot.a()[tp.p] = cplx(0, -m.omega[0]) * z.a()[tp.p];
    zdot.b()[m.tp.q] = cplx(0, -m.omega[1]) * z.b()[m.tp.q];
    return norm_s(zdot - field_P2P4(z), 0.0);
}

double effective_residual(const TorusChart& chart, const BirkhoffMap& map, const TorusPoint& pt, int substeps,
                          const CompiledPoly* extra) {
    const FourierState w = chart.to_modes(pt);
    TauOptions opt;
    opt.substeps = substeps;
    opt.eps0 = 0.0;
    const FourierState delta = map.displacement(w, +1, opt);
    const FourierState wt = w + delta;
    // P₂(w+δ) − C − νh₀ regrouped so that the O(1) part of P₂ cancels exactly
    double dp2 = 0.0;
    for (int j = -w.J(); j <= w.J(); ++j) {
        const double j2 = double(j) * j;
        dp2 += j2 * (2.0 * (std::conj(w.a()[j]) * delta.a()[j]).real() + std::norm(delta.a()[j]));
        dp2 += j2 * (2.0 * (std::conj(w.b()[j]) * delta.b()[j]).real() + std::norm(delta.b()[j]));
    }
    double h = P2_value(w) + dp2 + P4Fast::value(wt);
    if (extra) h += extra->value(wt).real();
    const auto& m = chart.model();
    return h - m.C - m.tp.nu * chart.h0(pt);
}

nlohmann::json EffectiveVsTruthReport::to_json() const {
    return {{"torus", tp.to_json()}, {"J", J},           {"nus", nus},
            {"sup_residual", sup_residual}, {"exponent", exponent}, {"regime", regime}};
}

EffectiveVsTruthReport effective_vs_truth(const TorusParams& tp, int J, const EffectiveVsTruthOptions& opt) {
    if (J < std::max(std::abs(tp.p), std::abs(tp.q)) + 2)
        throw ConfigError("effective_vs_truth: J must be at least max(|p|,|q|)+2", {{"J", J}});
    if (opt.nus.size() < 2) throw ConfigError("effective_vs_truth: need at least two values of nu");
    if (opt.samples < 1) throw ConfigError("effective_vs_truth: samples must be positive");
    Rng rng(opt.seed);
    std::vector<TorusPoint> pts;
    const TorusChart probe(tp, J);
    for (int i = 0; i < opt.samples; ++i) {
        TorusPoint pt;
        const double m2 = opt.mu * opt.mu;
        pt.r = {uniform(rng, -m2, m2), uniform(rng, -m2, m2)};
        pt.theta = {uniform(rng, 0, 2 * std::numbers::pi), uniform(rng, 0, 2 * std::numbers::pi)};
        pt.zeta = probe.external(random_state(rng, J, opt.mu * uniform(rng, 0.2, 1.0), 1.0));
        pts.push_back(std::move(pt));
    }
    const BirkhoffMap map(J);
    EffectiveVsTruthReport rep;
    rep.tp = tp;
    rep.J = J;
    rep.nus = opt.nus;
    for (double nu : opt.nus) {
        TorusParams t = tp;
        t.nu = nu;
        const TorusChart chart(t, J);
        double sup = 0.0;
        for (const auto& pt : pts) sup = std::max(sup, std::abs(effective_residual(chart, map, pt, opt.substeps, opt.extra)));
        rep.sup_residual.push_back(sup);
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.nus.size(); ++i) {
        lx.push_back(std::log(rep.nus[i]));
        ly.push_back(std::log(rep.sup_residual[i]));
    }
    rep.exponent = fit_line(lx, ly).slope;
    rep.regime = opt.extra ? "R5 present: degree-4 remainder plus perturbation, expected exponent >= 1.5"
                           : "R5 = 0: explicit nu^2 remainder, expected exponent 2";
    return rep;
}

}  // namespace cnls
