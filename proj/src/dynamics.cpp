#include "cnls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <unsupported/Eigen/MatrixFunctions>

#include "cnls/errors.hpp"
#include "cnls/fit.hpp"
#include "cnls/random.hpp"

namespace cnls {

namespace {

void linear_rotate(FourierState& z, double dt) {
    for (int j = -z.J(); j <= z.J(); ++j) {
        const cplx ph = std::polar(1.0, -double(j) * j * dt);
        z.a()[j] *= ph;
        z.b()[j] *= ph;
    }
}

double mode_action(const ModeSequence<cplx>& x, int j) { return x.contains(j) ? std::norm(x[j]) : 0.0; }

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

FourierState strang_step(const FourierState& z, double dt, const CompiledPoly* extra) {
    FourierState y = z;
    linear_rotate(y, 0.5 * dt);
    const FourierState k1 = field_nonlinear(y, extra);
    const FourierState k2 = field_nonlinear(y + cplx(0.5 * dt) * k1, extra);
    const FourierState k3 = field_nonlinear(y + cplx(0.5 * dt) * k2, extra);
    const FourierState k4 = field_nonlinear(y + cplx(dt) * k3, extra);
    for (int j = -y.J(); j <= y.J(); ++j) {
        y.a()[j] += dt / 6.0 * (k1.a()[j] + 2.0 * k2.a()[j] + 2.0 * k3.a()[j] + k4.a()[j]);
        y.b()[j] += dt / 6.0 * (k1.b()[j] + 2.0 * k2.b()[j] + 2.0 * k3.b()[j] + k4.b()[j]);
    }
    linear_rotate(y, 0.5 * dt);
    return y;
}

Trajectory integrate(const FourierState& z0, const IntegrateOptions& opt) {
    if (!(opt.dt > 0)) throw ConfigError("integrate: dt must be positive", {{"dt", opt.dt}});
    if (!(opt.T >= 0)) throw ConfigError("integrate: T must be non-negative", {{"T", opt.T}});
    if (opt.stride < 1) throw ConfigError("integrate: stride must be at least 1", {{"stride", opt.stride}});
    if (opt.gate > 0) {
        const double n0 = norm_s(z0, opt.gate_s);
        if (n0 > opt.gate)
            throw SmallnessGate("initial state exceeds the smallness gate", {{"norm", n0}, {"gate", opt.gate}, {"s", opt.gate_s}});
    }
    const long n = std::max(0L, long(std::ceil(opt.T / opt.dt - 1e-9)));
    const double dt = n > 0 ? opt.T / double(n) : opt.dt;

    Trajectory tr;
    tr.dt = dt;
    const double H0 = energy(z0, opt.extra), L0 = mass(z0), M0 = momentum(z0);
    auto record = [&](double t, const FourierState& z, double H) {
        tr.times.push_back(t);
        tr.states.push_back(z);
        tr.H.push_back(H);
        tr.L.push_back(mass(z));
        tr.M.push_back(momentum(z));
    };
    auto check = [&](double t) {
        if (!opt.enforce_drift) return;
        if (tr.drift.H > opt.tol_H || tr.drift.L > opt.tol_L || tr.drift.M > opt.tol_L)
            throw DriftExceeded("conservation drift above tolerance; reduce dt",
                                {{"t", t}, {"dt", dt}, {"drift", tr.drift.to_json()}, {"tol_H", opt.tol_H}, {"tol_L", opt.tol_L}});
    };
    record(0.0, z0, H0);
    FourierState z = z0;
    for (long s = 1; s <= n; ++s) {
        z = strang_step(z, dt, opt.extra);
        const double t = double(s) * dt;
        tr.drift.L = std::max(tr.drift.L, std::abs(mass(z) - L0));
        tr.drift.M = std::max(tr.drift.M, std::abs(momentum(z) - M0));
        const bool last = s == n;
        if (s % opt.stride == 0 || last) {
            const double H = energy(z, opt.extra);
            tr.drift.H = std::max(tr.drift.H, std::abs(H - H0));
            record(t, z, H);
            tr.steps = s;
            check(t);
            if (opt.stop && opt.stop(t, z)) break;
        }
        tr.steps = s;
    }
    check(tr.times.back());
    return tr;
}

void Trajectory::write_csv(std::ostream& os, int p, int q) const {
    os << "t,|a_p|^2,|b_q|^2,|a_q|^2,|b_p|^2,H,L,M,tail_norm\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        const FourierState& z = states[i];
        const double ap = mode_action(z.a(), p), bq = mode_action(z.b(), q), aq = mode_action(z.a(), q),
                     bp = mode_action(z.b(), p);
        double tail = 0.0;
        for (int j = -z.J(); j <= z.J(); ++j) {
            if (j != p && j != q) tail += std::norm(z.a()[j]) + std::norm(z.b()[j]);
        }
        os << fmt(times[i]) << ',' << fmt(ap) << ',' << fmt(bq) << ',' << fmt(p == q ? 0.0 : aq) << ','
           << fmt(p == q ? 0.0 : bp) << ',' << fmt(H[i]) << ',' << fmt(L[i]) << ',' << fmt(M[i]) << ',' << fmt(std::sqrt(tail))
           << '\n';
    }
}

nlohmann::json Trajectory::summary_json() const {
    return {{"dt", dt},
            {"steps", steps},
            {"T", times.empty() ? 0.0 : times.back()},
            {"samples", times.size()},
            {"H0", H.empty() ? 0.0 : H.front()},
            {"L0", L.empty() ? 0.0 : L.front()},
            {"M0", M.empty() ? 0.0 : M.front()},
            {"drift", drift.to_json()}};
}

VariationalSystem::VariationalSystem(const TorusParams& tp, int J) : J_(J), n_(2 * J + 1) {
    const EffectiveModel m = build_model(tp);
    tp_ = m.tp;
    if (J < std::max(std::abs(tp_.p), std::abs(tp_.q))) throw ConfigError("VariationalSystem: J must contain p and q", {{"J", J}});
    omega_ = m.omega;
    s_ = tp_.nu * std::sqrt(tp_.rho1 * tp_.rho2);
    const int p = tp_.p, q = tp_.q, n = n_;
    A_ = Eigen::MatrixXcd::Zero(4 * n, 4 * n);
    const cplx mi(0, -1);
    for (int k = -J; k <= J; ++k) {
        const double dA = double(k) * k + tp_.nu * tp_.rho2 - omega_[0];
        const double dB = double(k) * k + tp_.nu * tp_.rho1 - omega_[1];
        const int ia = idx(k), ib = n + idx(k);
        A_(ia, ia) = mi * dA;
        A_(ib, ib) = mi * dB;
        if (std::abs(k - p + q) <= J) A_(ia, n + idx(k - p + q)) = mi * s_;
        if (std::abs(p + q - k) <= J) A_(ia, 3 * n + idx(p + q - k)) = mi * s_;
        if (std::abs(k + p - q) <= J) A_(ib, idx(k + p - q)) = mi * s_;
        if (std::abs(p + q - k) <= J) A_(ib, 2 * n + idx(p + q - k)) = mi * s_;
    }
    // rows of (ᾱ, β̄) are the conjugates of those of (α, β) with the blocks swapped
    for (int r = 0; r < 2 * n; ++r)
        for (int c = 0; c < 4 * n; ++c) {
            const int cc = c < 2 * n ? c + 2 * n : c - 2 * n;
            A_(r + 2 * n, cc) = std::conj(A_(r, c));
        }
}

Eigen::VectorXcd VariationalSystem::pack(const FourierState& d) const {
    Eigen::VectorXcd v(4 * n_);
    for (int j = -J_; j <= J_; ++j) {
        v(idx(j)) = d.a()[j];
        v(n_ + idx(j)) = d.b()[j];
        v(2 * n_ + idx(j)) = std::conj(d.a()[j]);
        v(3 * n_ + idx(j)) = std::conj(d.b()[j]);
    }
    return v;
}

FourierState VariationalSystem::unpack(const Eigen::VectorXcd& v) const {
    FourierState d(J_);
    for (int j = -J_; j <= J_; ++j) {
        d.a()[j] = v(idx(j));
        d.b()[j] = v(n_ + idx(j));
    }
    return d;
}

FourierState VariationalSystem::apply(const FourierState& d) const { return unpack(A_ * pack(d)); }

double VariationalSystem::quadratic_form(const FourierState& d) const {
    const int p = tp_.p, q = tp_.q;
    double Q = 0.0;
    for (int k = -J_; k <= J_; ++k) {
        Q += (double(k) * k + tp_.nu * tp_.rho2 - omega_[0]) * std::norm(d.a()[k]);
        Q += (double(k) * k + tp_.nu * tp_.rho1 - omega_[1]) * std::norm(d.b()[k]);
        if (std::abs(k - p + q) <= J_) Q += 2 * s_ * (std::conj(d.a()[k]) * d.b()[k - p + q]).real();
        if (std::abs(p + q - k) <= J_) Q += 2 * s_ * (std::conj(d.a()[k]) * std::conj(d.b()[p + q - k])).real();
    }
    return Q;
}

double VariationalSystem::max_growth() const {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A_, false);
    return es.eigenvalues().real().maxCoeff();
}

nlohmann::json GrowthFit::to_json() const {
    return {{"torus", tp.to_json()},
            {"case", to_string(kind)},
            {"rate", rate},
            {"predicted", predicted},
            {"frozen_rate", frozen_rate},
            {"window", window},
            {"window_found", window_found},
            {"r2", r2},
            {"max_ratio", max_ratio},
            {"bounded", bounded},
            {"quadratic_drift", quadratic_drift},
            {"T", T}};
}

GrowthFit linearized_flow(const TorusParams& tp, const LinearizedOptions& opt) {
    tp.validate();
    if (opt.samples < 10) throw ConfigError("linearized_flow: need at least 10 samples");
    const VariationalSystem sys(tp, opt.J);
    const TorusParams& t = sys.torus();
    const bool stable = t.p == t.q;
    const double s = t.nu * std::sqrt(t.rho1 * t.rho2);

    GrowthFit g;
    g.tp = t;
    g.kind = case_for(t);
    g.predicted = stable ? 0.0 : s;
    g.T = opt.T > 0 ? opt.T : (stable ? 10.0 / t.nu : 12.0 / s);
    g.frozen_rate = sys.max_growth();

    Rng rng(opt.seed);
    auto rnd = [&] { return cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)); };
    FourierState d(opt.J);
    if (stable) {
        for (int j = -opt.J; j <= opt.J; ++j)
            if (j != t.p) {
                d.a()[j] = rnd();
                d.b()[j] = rnd();
            }
    } else {
        d.b()[t.p] = rnd();
        d.a()[t.q] = rnd();
    }
    const double amp = opt.amplitude > 0 ? opt.amplitude : 1e-8 * std::sqrt(t.nu);
    d *= cplx(amp / norm_s(d, 0.0));

    auto block = [&](const FourierState& x) {
        return stable ? norm_s(x, 0.0) : std::sqrt(std::norm(x.b()[t.p]) + std::norm(x.a()[t.q]));
    };
    const double h = g.T / opt.samples;
    const Eigen::MatrixXcd E = (sys.matrix() * cplx(h)).exp();
    Eigen::VectorXcd v = sys.pack(d);
    const double n0 = norm_s(d, 0.0), b0 = block(d), Q0 = sys.quadratic_form(d);
    g.times.push_back(0.0);
    g.block_norms.push_back(b0);
    g.max_ratio = 1.0;
    for (int i = 1; i <= opt.samples; ++i) {
        v = E * v;
        const FourierState x = sys.unpack(v);
        g.times.push_back(i * h);
        g.block_norms.push_back(block(x));
        const double nx = norm_s(x, 0.0);
        g.max_ratio = std::max(g.max_ratio, nx / n0);
        g.quadratic_drift =
            std::max(g.quadratic_drift, std::abs(sys.quadratic_form(x) - Q0) / std::max(std::abs(Q0), nx * nx));
    }
    g.bounded = g.max_ratio <= 10.0;

    std::size_t i0 = g.times.size(), i1 = g.times.size();
    for (std::size_t i = 0; i < g.times.size(); ++i)
        if (g.block_norms[i] >= 10 * b0) {
            i0 = i;
            break;
        }
    const double top = std::min(1000 * b0, 0.01);
    for (std::size_t i = i0; i < g.times.size(); ++i)
        if (g.block_norms[i] >= top) {
            i1 = i;
            break;
        }
    if (i0 < g.times.size() && i1 == g.times.size()) i1 = g.times.size() - 1;
    g.window_found = i0 < g.times.size() && i1 > i0 + 2;
    if (!g.window_found) {
        if (opt.require_growth)
            throw NoGrowthWindow("perturbation never grew by the fit threshold", {{"max_ratio", g.max_ratio}, {"T", g.T}});
        i0 = 0;
        i1 = g.times.size() - 1;
    }
    std::vector<double> xs, ys;
    for (std::size_t i = i0; i <= i1; ++i) {
        xs.push_back(g.times[i]);
        ys.push_back(std::log(g.block_norms[i]));
    }
    const LineFit lf = fit_line(xs, ys);
    g.rate = lf.slope;
    g.window = {xs.front(), xs.back()};
    double ss_res = 0, ss_tot = 0, mean = 0;
    for (double y : ys) mean += y / ys.size();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ss_res += std::pow(ys[i] - lf.slope * xs[i] - lf.intercept, 2);
        ss_tot += std::pow(ys[i] - mean, 2);
    }
    g.r2 = ss_tot > 0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 0.0;
    return g;
}

FourierState beating_state(int p, int q, int J, double gamma, double eps2) {
    if (p == q) throw ConfigError("beating: requires p != q");
    if (!(gamma > 0 && gamma < 0.5)) throw ConfigError("beating: gamma must lie in (0, 1/2)", {{"gamma", gamma}});
    if (!(eps2 > 0)) throw ConfigError("beating: eps2 must be positive", {{"eps2", eps2}});
    if (J < std::max(std::abs(p), std::abs(q))) throw ConfigError("beating: J must contain p and q", {{"J", J}});
    FourierState z(J);
    z.a()[p] = std::sqrt((1 - gamma) * eps2);
    z.b()[q] = std::sqrt((1 - gamma) * eps2);
    z.a()[q] = std::sqrt(gamma * eps2);
    z.b()[p] = std::sqrt(gamma * eps2);
    return z;
}

nlohmann::json BeatingReport::to_json() const {
    return {{"gamma", opt.gamma},
            {"eps2", opt.eps2},
            {"p", opt.p},
            {"q", opt.q},
            {"J", opt.J},
            {"dt", opt.dt},
            {"normalization",
             {{"adopted", "actions: |a_p|^2=|b_q|^2=(1-gamma)eps^2, |a_q|^2=|b_p|^2=gamma eps^2"},
              {"alternative", "amplitudes: |a_p|=|b_q|=gamma eps, |a_q|=|b_p|=(1-gamma) eps"}}},
            {"max_aq_ratio", max_aq_ratio},
            {"max_pair_aq_bp", max_pair_aq_bp},
            {"max_pair_ap_bq", max_pair_ap_bq},
            {"returned", returned},
            {"return_time", return_time},
            {"trajectory", traj.summary_json()}};
}

BeatingReport beating(const BeatingOptions& opt) {
    BeatingReport rep;
    rep.opt = opt;
    const FourierState z0 = beating_state(opt.p, opt.q, opt.J, opt.gamma, opt.eps2);
    bool peaked = false;
    IntegrateOptions io;
    io.dt = opt.dt;
    io.T = opt.T_max > 0 ? opt.T_max : 20.0 / opt.eps2;
    io.stride = opt.stride;
    io.tol_H = opt.tol_H;
    io.tol_L = opt.tol_L;
    io.stop = [&](double t, const FourierState& z) {
        const double r = std::norm(z.a()[opt.q]) / opt.eps2;
        if (r >= 0.5) peaked = true;
        if (peaked && r <= 1.1 * opt.gamma) {
            rep.returned = true;
            rep.return_time = t;
            return true;
        }
        return false;
    };
    rep.traj = integrate(z0, io);
    for (const auto& z : rep.traj.states) {
        const double ap = std::norm(z.a()[opt.p]), bq = std::norm(z.b()[opt.q]), aq = std::norm(z.a()[opt.q]),
                     bp = std::norm(z.b()[opt.p]);
        rep.max_aq_ratio = std::max(rep.max_aq_ratio, aq / opt.eps2);
        rep.max_pair_aq_bp = std::max(rep.max_pair_aq_bp, std::abs(aq - bp) / opt.eps2);
        rep.max_pair_ap_bq = std::max(rep.max_pair_ap_bq, std::abs(ap - bq) / opt.eps2);
    }
    return rep;
}

}  // namespace cnls
