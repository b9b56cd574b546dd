#include "cnls/nonres.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cnls/errors.hpp"
#include "cnls/fit.hpp"
#include "cnls/random.hpp"

namespace cnls {

std::string to_string(const ModeLabel& l) {
    switch (l.kind) {
        case LabelKind::hyp_e: return "e";
        case LabelKind::hyp_f: return "f";
        default: return "(" + std::to_string(l.j) + (l.sign > 0 ? ",+)" : ",-)");
    }
}

std::string to_string(DivisorKind k) {
    switch (k) {
        case DivisorKind::omega_k: return "Omega.k";
        case DivisorKind::plus_one: return "Omega.k+L_a";
        case DivisorKind::plus_two: return "Omega.k+L_a+L_b";
        default: return "Omega.k+L_a-L_b";
    }
}

std::string to_string(Disposition d) {
    switch (d) {
        case Disposition::excluded_by_mass: return "excluded_by_mass";
        case Disposition::excluded_by_momentum: return "excluded_by_momentum";
        case Disposition::must_check: return "must_check";
        case Disposition::bounded_below: return "bounded_below";
        case Disposition::transversal: return "transversal";
        default: return "violation";
    }
}

cplx DivisorForm::value(double nu, double rho1, double rho2) const {
    const double s = std::sqrt(rho1 * rho2);
    return {N + nu * (g[0] * rho1 + g[1] * rho2) + c * nu * s, d * nu * s};
}

double DivisorForm::min_abs_re(double nu) const {
    if (c == 0.0) {
        // affine in ρ: extremes sit at the corners
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (double r1 : {1.0, 2.0})
            for (double r2 : {1.0, 2.0}) {
                const double v = N + nu * (g[0] * r1 + g[1] * r2);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        return (lo <= 0 && hi >= 0) ? 0.0 : std::min(std::abs(lo), std::abs(hi));
    }
    if (g[0] == 0.0 && g[1] == 0.0) {
        // monotone in √(ρ₁ρ₂) ∈ [1,2]
        const double a = N + c * nu, b = N + 2 * c * nu;
        return (std::min(a, b) <= 0 && std::max(a, b) >= 0) ? 0.0 : std::min(std::abs(a), std::abs(b));
    }
    double best = std::numeric_limits<double>::infinity();
    constexpr int n = 256;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) best = std::min(best, std::abs(value(nu, 1.0 + double(i) / n, 1.0 + double(j) / n).real()));
    return best;
}

double DivisorForm::min_abs_im(double nu) const { return std::abs(d) * nu; }

nlohmann::json DivisorRecord::to_json() const {
    nlohmann::json j = {{"k", k},
                        {"kind", to_string(kind)},
                        {"value", {value.real(), value.imag()}},
                        {"disposition", to_string(disposition)},
                        {"lower_bound", lower_bound},
                        {"boundary", boundary}};
    j["alpha"] = alpha ? nlohmann::json(to_string(*alpha)) : nlohmann::json(nullptr);
    j["beta"] = beta ? nlohmann::json(to_string(*beta)) : nlohmann::json(nullptr);
    if (disposition == Disposition::transversal || disposition == Disposition::violation) {
        j["derivative"] = derivative;
        j["direction"] = direction;
    }
    return j;
}

namespace {

void split_factors(DivisorKind kind, const std::optional<ModeLabel>& alpha, const std::optional<ModeLabel>& beta,
                   std::vector<ModeLabel>& bar, std::vector<ModeLabel>& plain) {
    auto need = [](const std::optional<ModeLabel>& l, const char* name) {
        if (!l) throw ConfigError(std::string("divisor: missing label ") + name);
        return *l;
    };
    switch (kind) {
        case DivisorKind::omega_k: break;
        case DivisorKind::plus_one: bar.push_back(need(alpha, "alpha")); break;
        case DivisorKind::plus_two:
            bar.push_back(need(alpha, "alpha"));
            bar.push_back(need(beta, "beta"));
            break;
        case DivisorKind::plus_minus:
            bar.push_back(need(alpha, "alpha"));
            plain.push_back(need(beta, "beta"));
            break;
    }
}

}  // namespace

Disposition selection_rule(const IntPair& k, DivisorKind kind, const std::optional<ModeLabel>& alpha,
                           const std::optional<ModeLabel>& beta, const TorusParams& tp) {
    std::vector<ModeLabel> bar, plain;
    split_factors(kind, alpha, beta, bar, plain);
    if (tp.p == tp.q) {
        for (const auto* v : {&bar, &plain})
            for (const auto& l : *v)
                if (l.hyperbolic()) throw ConfigError("selection_rule: the stable case has no hyperbolic labels");
        // partial masses L_u, L_v: e^{ik·θ} carries charges (k₁, k₂), c_j, d_j are neutral
        if (k[0] != 0 || k[1] != 0) return Disposition::excluded_by_mass;
        long mom = 0;
        for (const auto& l : bar) mom += l.j - tp.p;
        for (const auto& l : plain) mom -= l.j - tp.p;
        return mom == 0 ? Disposition::must_check : Disposition::excluded_by_momentum;
    }
    // 𝕃₁ = r₁ + r₂ + Σ|ζ_L|², 𝕄₁ = pr₁ + qr₂ + Σ j|ζ_L|²; hyperbolic modes carry neither
    long charge = k[0] + k[1];
    long mom = long(tp.p) * k[0] + long(tp.q) * k[1];
    for (const auto& l : bar)
        if (!l.hyperbolic()) {
            charge += 1;
            mom += l.j;
        }
    for (const auto& l : plain)
        if (!l.hyperbolic()) {
            charge -= 1;
            mom -= l.j;
        }
    if (charge != 0) return Disposition::excluded_by_mass;
    if (mom != 0) return Disposition::excluded_by_momentum;
    return Disposition::must_check;
}

namespace {

void add_label(DivisorForm& f, const EffectiveModel& m, const ModeLabel& l, double sgn) {
    if (l.kind == LabelKind::hyp_e) {
        f.g[0] -= sgn;
        f.g[1] += sgn;
        f.d -= sgn;
        return;
    }
    if (l.kind == LabelKind::hyp_f) {
        f.g[0] += sgn;
        f.g[1] -= sgn;
        f.d -= sgn;
        return;
    }
    const double j2 = double(l.j) * l.j;
    if (m.stable()) {
        f.N += sgn * (j2 - double(m.tp.p) * m.tp.p);
        f.c += sgn * l.sign;
    } else {
        f.N += sgn * j2;
        (l.sign > 0 ? f.g[1] : f.g[0]) += sgn;
    }
}

}  // namespace

DivisorForm divisor_form(const EffectiveModel& m, const IntPair& k, DivisorKind kind,
                         const std::optional<ModeLabel>& alpha, const std::optional<ModeLabel>& beta) {
    DivisorForm f;
    const double p2 = double(m.tp.p) * m.tp.p, q2 = double(m.tp.q) * m.tp.q;
    f.N = p2 * k[0] + q2 * k[1];
    f.g = {double(k[1]), double(k[0])};
    std::vector<ModeLabel> bar, plain;
    split_factors(kind, alpha, beta, bar, plain);
    for (const auto& l : bar) add_label(f, m, l, +1.0);
    for (const auto& l : plain) add_label(f, m, l, -1.0);
    return f;
}

cplx evaluate(const DivisorRecord& r, double nu, double rho1, double rho2) { return r.form.value(nu, rho1, rho2); }

std::vector<IntPair> lattice_ball(double N) {
    std::vector<IntPair> out;
    const int n = int(std::floor(N));
    for (int k1 = -n; k1 <= n; ++k1)
        for (int k2 = -n; k2 <= n; ++k2)
            if (double(k1) * k1 + double(k2) * k2 <= N * N + 1e-12) out.push_back({k1, k2});
    return out;
}

long ScanResult::total() const {
    long t = 0;
    for (const auto& [d, c] : counts) t += c;
    return t;
}

std::vector<DivisorRecord> ScanResult::violations() const {
    std::vector<DivisorRecord> out;
    for (const auto& r : records)
        if (r.disposition == Disposition::violation) out.push_back(r);
    return out;
}

nlohmann::json ScanResult::summary_json() const {
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [d, n] : counts) c[to_string(d)] = n;
    return {{"torus", tp.to_json()}, {"case", to_string(kind)}, {"J", J},      {"N", N},
            {"delta", delta},        {"counts", c},             {"total", total()}};
}

namespace {

class Scanner {
public:
    Scanner(const TorusParams& tp, const ScanOptions& opt)
        : m_(build_model(tp)), opt_(opt), delta_(opt.delta > 0 ? opt.delta : 0.5 * tp.nu) {
        for (int j = -opt.J; j <= opt.J; ++j)
            for (int s : {1, -1})
                if (m_.is_elliptic({j, s})) L_.push_back(ModeLabel::elliptic(j, s));
        if (!m_.stable()) F_ = {ModeLabel::e(), ModeLabel::f()};
        std::map<int, long> sizes;
        for (const auto& l : L_) ++sizes[l.cluster()];
        for (const auto& [c, n] : sizes) same_cluster_LL_ += n * (n - 1);
        res_.tp = m_.tp;
        res_.kind = m_.kind;
        res_.J = opt.J;
        res_.N = opt.N;
        res_.delta = delta_;
    }

    ScanResult run() {
        for (const auto& k : lattice_ball(opt_.N)) {
            if (opt_.keep_excluded)
                brute(k);
            else
                fast(k);
        }
        if (opt_.strict) {
            const auto v = res_.violations();
            if (!v.empty())
                throw ViolationFound("small divisor fails both alternatives",
                                     {{"record", v.front().to_json()}, {"count", v.size()}, {"scan", res_.summary_json()}});
        }
        return std::move(res_);
    }

private:
    bool elliptic(int j) const { return std::abs(j) <= opt_.J && m_.is_elliptic({j, 1}); }

    void emit(const IntPair& k, DivisorKind kind, std::optional<ModeLabel> a, std::optional<ModeLabel> b,
              Disposition sel) {
        if (sel != Disposition::must_check) {
            ++res_.counts[sel];
            if (!opt_.keep_excluded) return;
        }
        DivisorRecord r;
        r.k = k;
        r.kind = kind;
        r.alpha = a;
        r.beta = b;
        r.form = divisor_form(m_, k, kind, a, b);
        r.value = r.form.value(m_.tp.nu, m_.tp.rho1, m_.tp.rho2);
        for (const auto& l : {a, b})
            if (l && !l->hyperbolic() && std::abs(l->j) == opt_.J) r.boundary = true;
        if (sel != Disposition::must_check) {
            r.disposition = sel;
            res_.records.push_back(std::move(r));
            return;
        }
        const double nu = m_.tp.nu;
        r.lower_bound = std::max(r.form.min_abs_re(nu), r.form.min_abs_im(nu));
        if (r.lower_bound >= delta_) {
            r.disposition = Disposition::bounded_below;
        } else {
            r.disposition = Disposition::violation;
            const double nk = std::hypot(double(k[0]), double(k[1]));
            if (nk > 0 && r.form.c == 0.0) {
                r.direction = {k[1] / nk, k[0] / nk};
                r.derivative = nu * (r.form.g[0] * r.direction[0] + r.form.g[1] * r.direction[1]);
                if (std::abs(r.derivative) >= delta_) r.disposition = Disposition::transversal;
            }
        }
        ++res_.counts[r.disposition];
        res_.records.push_back(std::move(r));
    }

    void bulk(Disposition d, long n) {
        if (n > 0) res_.counts[d] += n;
    }

    Disposition rule(const IntPair& k, DivisorKind kind, std::optional<ModeLabel> a, std::optional<ModeLabel> b) const {
        return selection_rule(k, kind, a, b, m_.tp);
    }

    void brute(const IntPair& k) {
        const bool zero = k[0] == 0 && k[1] == 0;
        if (!zero) emit(k, DivisorKind::omega_k, {}, {}, rule(k, DivisorKind::omega_k, {}, {}));
        std::vector<ModeLabel> all = L_;
        all.insert(all.end(), F_.begin(), F_.end());
        for (const auto& a : all) emit(k, DivisorKind::plus_one, a, {}, rule(k, DivisorKind::plus_one, a, {}));
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i; j < all.size(); ++j)
                emit(k, DivisorKind::plus_two, all[i], all[j], rule(k, DivisorKind::plus_two, all[i], all[j]));
        for (const auto& a : all)
            for (const auto& b : all) {
                if (a == b || (zero && a.cluster() == b.cluster())) continue;
                emit(k, DivisorKind::plus_minus, a, b, rule(k, DivisorKind::plus_minus, a, b));
            }
    }

    /// Survivors located through the momentum constraint; excluded records counted per category.
    void fast(const IntPair& k) {
        const bool zero = k[0] == 0 && k[1] == 0;
        const long nL = long(L_.size()), nF = long(F_.size());
        if (m_.stable()) {
            const long all1 = nL, all2 = nL * (nL + 1) / 2, all3 = nL * (nL - 1) - (zero ? same_cluster_LL_ : 0);
            if (!zero) {
                bulk(Disposition::excluded_by_mass, 1 + all1 + all2 + all3);
                return;
            }
            bulk(Disposition::excluded_by_momentum, all1 + all3);
            long surv = 0;
            for (const auto& a : L_) {
                const int l = 2 * m_.tp.p - a.j;
                if (!elliptic(l)) continue;
                for (int s : {1, -1}) {
                    const ModeLabel b = ModeLabel::elliptic(l, s);
                    if (b < a) continue;
                    ++surv;
                    emit(k, DivisorKind::plus_two, a, b, rule(k, DivisorKind::plus_two, a, b));
                }
            }
            bulk(Disposition::excluded_by_momentum, all2 - surv);
            return;
        }

        const long K1 = k[0] + k[1];
        const long P = long(m_.tp.p) * k[0] + long(m_.tp.q) * k[1];
        // category helper: charge decides mass, then survivors found by `visit`
        auto category = [&](long total, long charge, auto visit) {
            if (total <= 0) return;
            if (charge != 0) {
                bulk(Disposition::excluded_by_mass, total);
                return;
            }
            const long surv = visit();
            bulk(Disposition::excluded_by_momentum, total - surv);
        };

        if (!zero)
            category(1, K1, [&] {
                if (P != 0) return 0L;
                emit(k, DivisorKind::omega_k, {}, {}, rule(k, DivisorKind::omega_k, {}, {}));
                return 1L;
            });

        // Ω·k + Λ_α
        category(nL, K1 + 1, [&] {
            long n = 0;
            const long j = -P;
            if (std::abs(j) <= opt_.J && elliptic(int(j)))
                for (int s : {1, -1}) {
                    emit(k, DivisorKind::plus_one, ModeLabel::elliptic(int(j), s), {},
                         rule(k, DivisorKind::plus_one, ModeLabel::elliptic(int(j), s), {}));
                    ++n;
                }
            return n;
        });
        category(nF, K1, [&] {
            if (P != 0) return 0L;
            for (const auto& a : F_) emit(k, DivisorKind::plus_one, a, {}, rule(k, DivisorKind::plus_one, a, {}));
            return nF;
        });

        // Ω·k + Λ_α + Λ_β, unordered
        category(nL * (nL + 1) / 2, K1 + 2, [&] {
            long n = 0;
            for (const auto& a : L_) {
                const long l = -P - a.j;
                if (std::abs(l) > opt_.J || !elliptic(int(l))) continue;
                for (int s : {1, -1}) {
                    const ModeLabel b = ModeLabel::elliptic(int(l), s);
                    if (b < a) continue;
                    emit(k, DivisorKind::plus_two, a, b, rule(k, DivisorKind::plus_two, a, b));
                    ++n;
                }
            }
            return n;
        });
        category(nL * nF, K1 + 1, [&] {
            long n = 0;
            const long j = -P;
            if (std::abs(j) <= opt_.J && elliptic(int(j)))
                for (int s : {1, -1})
                    for (const auto& b : F_) {
                        const ModeLabel a = ModeLabel::elliptic(int(j), s);
                        emit(k, DivisorKind::plus_two, a, b, rule(k, DivisorKind::plus_two, a, b));
                        ++n;
                    }
            return n;
        });
        category(nF * (nF + 1) / 2, K1, [&] {
            if (P != 0) return 0L;
            long n = 0;
            for (std::size_t i = 0; i < F_.size(); ++i)
                for (std::size_t j = i; j < F_.size(); ++j) {
                    emit(k, DivisorKind::plus_two, F_[i], F_[j], rule(k, DivisorKind::plus_two, F_[i], F_[j]));
                    ++n;
                }
            return n;
        });

        // Ω·k + Λ_α − Λ_β, ordered, α ≠ β, same cluster skipped at k = 0
        category(nL * (nL - 1) - (zero ? same_cluster_LL_ : 0), K1, [&] {
            long n = 0;
            for (const auto& a : L_) {
                const long l = a.j + P;
                if (std::abs(l) > opt_.J || !elliptic(int(l))) continue;
                for (int s : {1, -1}) {
                    const ModeLabel b = ModeLabel::elliptic(int(l), s);
                    if (a == b || (zero && a.cluster() == b.cluster())) continue;
                    emit(k, DivisorKind::plus_minus, a, b, rule(k, DivisorKind::plus_minus, a, b));
                    ++n;
                }
            }
            return n;
        });
        category(nL * nF, K1 + 1, [&] {
            long n = 0;
            const long j = -P;
            if (std::abs(j) <= opt_.J && elliptic(int(j)))
                for (int s : {1, -1})
                    for (const auto& b : F_) {
                        const ModeLabel a = ModeLabel::elliptic(int(j), s);
                        emit(k, DivisorKind::plus_minus, a, b, rule(k, DivisorKind::plus_minus, a, b));
                        ++n;
                    }
            return n;
        });
        category(nF * nL, K1 - 1, [&] {
            long n = 0;
            const long l = P;
            if (std::abs(l) <= opt_.J && elliptic(int(l)))
                for (const auto& a : F_)
                    for (int s : {1, -1}) {
                        const ModeLabel b = ModeLabel::elliptic(int(l), s);
                        emit(k, DivisorKind::plus_minus, a, b, rule(k, DivisorKind::plus_minus, a, b));
                        ++n;
                    }
            return n;
        });
        category(zero ? 0 : nF * (nF - 1), K1, [&] {
            if (P != 0) return 0L;
            long n = 0;
            for (const auto& a : F_)
                for (const auto& b : F_)
                    if (a != b) {
                        emit(k, DivisorKind::plus_minus, a, b, rule(k, DivisorKind::plus_minus, a, b));
                        ++n;
                    }
            return n;
        });
    }

    EffectiveModel m_;
    ScanOptions opt_;
    double delta_;
    std::vector<ModeLabel> L_, F_;
    long same_cluster_LL_ = 0;
    ScanResult res_;
};

}  // namespace

ScanResult scan_divisors(const TorusParams& tp, const ScanOptions& opt) {
    tp.validate();
    if (opt.J < std::max(std::abs(tp.p), std::abs(tp.q)))
        throw ConfigError("scan_divisors: J must contain the torus modes", {{"J", opt.J}});
    if (opt.N < 0) throw ConfigError("scan_divisors: N must be non-negative", {{"N", opt.N}});
    return Scanner(tp, opt).run();
}

std::pair<double, double> wilson_interval(long x, long n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double ph = double(x) / double(n), z2 = z * z, nn = double(n);
    const double den = 1.0 + z2 / nn;
    const double centre = (ph + z2 / (2 * nn)) / den;
    const double half = z / den * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn));
    return {x == 0 ? 0.0 : std::max(0.0, centre - half), x == n ? 1.0 : std::min(1.0, centre + half)};
}

nlohmann::json MeasureReport::to_json() const {
    return {{"kappa", kappa},
            {"N", N},
            {"M", M},
            {"excluded_fraction", excluded_fraction},
            {"excluded", excluded},
            {"sample_count", sample_count},
            {"wilson95", {wilson_lo, wilson_hi}}};
}

nlohmann::json MeasureSweep::to_json() const {
    auto r = nlohmann::json::array();
    for (const auto& x : reports) r.push_back(x.to_json());
    return {{"torus", tp.to_json()},
            {"case", to_string(kind)},
            {"reports", r},
            {"divisors_checked", divisors_checked},
            {"monotone_in_kappa", monotone},
            {"slope_through_origin", slope},
            {"ols_slope", ols_slope},
            {"ols_intercept", ols_intercept}};
}

MeasureSweep measure_estimate(const TorusParams& tp_template, const MeasureOptions& opt) {
    if (opt.kappas.empty()) throw ConfigError("measure_estimate: need at least one kappa");
    if (opt.samples < 1) throw ConfigError("measure_estimate: samples must be positive");
    const double delta = 0.5 * tp_template.nu;
    for (double kp : opt.kappas)
        if (kp < 0 || kp > delta * (1 + 1e-12))
            throw ConfigError("measure_estimate: kappa must satisfy 0 <= kappa <= delta = nu/2", {{"kappa", kp}, {"delta", delta}});
    const double M = opt.M > 0 ? opt.M : std::hypot(double(tp_template.p), double(tp_template.q));

    ScanOptions so;
    so.J = opt.J;
    so.N = opt.N;
    so.strict = false;
    const ScanResult scan = scan_divisors(tp_template, so);
    // bounded_below records satisfy |value| ≥ δ ≥ κ on the whole box and cannot exclude a sample
    std::vector<DivisorForm> live;
    for (const auto& r : scan.records) {
        if (r.disposition == Disposition::bounded_below) continue;
        if (r.kind == DivisorKind::plus_minus && r.alpha && r.beta && r.alpha->cluster() == r.beta->cluster()) {
            const double nk = std::hypot(double(r.k[0]), double(r.k[1]));
            const double w = r.alpha->hyperbolic() ? 0.0 : std::abs(r.alpha->j);
            if (w > M * nk) continue;
        }
        live.push_back(r.form);
    }

    MeasureSweep sw;
    sw.tp = tp_template;
    sw.kind = case_for(tp_template);
    sw.divisors_checked = long(live.size());
    Rng rng(opt.seed);
    std::vector<long> hits(opt.kappas.size(), 0);
    for (int s = 0; s < opt.samples; ++s) {
        const double r1 = uniform(rng, 1.0, 2.0), r2 = uniform(rng, 1.0, 2.0);
        double mn = std::numeric_limits<double>::infinity();
        for (const auto& f : live) mn = std::min(mn, std::abs(f.value(tp_template.nu, r1, r2)));
        for (std::size_t i = 0; i < opt.kappas.size(); ++i) hits[i] += mn < opt.kappas[i];
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < opt.kappas.size(); ++i) {
        MeasureReport rep;
        rep.kappa = opt.kappas[i];
        rep.N = opt.N;
        rep.M = M;
        rep.sample_count = opt.samples;
        rep.excluded = hits[i];
        rep.excluded_fraction = double(hits[i]) / opt.samples;
        std::tie(rep.wilson_lo, rep.wilson_hi) = wilson_interval(hits[i], opt.samples);
        sw.reports.push_back(rep);
        xs.push_back(rep.kappa);
        ys.push_back(rep.excluded_fraction);
    }
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (ys[order[i]] < ys[order[i - 1]]) sw.monotone = false;
    if (std::any_of(xs.begin(), xs.end(), [](double x) { return x > 0; })) sw.slope = fit_proportional(xs, ys);
    if (xs.size() >= 2) {
        const LineFit lf = fit_line(xs, ys);
        sw.ols_slope = lf.slope;
        sw.ols_intercept = lf.intercept;
    }
    return sw;
}

nlohmann::json HypothesisReport::to_json() const {
    return {{"delta", delta},
            {"ok", ok()},
            {"A0_constant", a0_constant},
            {"min_abs_lambda", min_abs_lambda},
            {"min_im_hyperbolic", std::isfinite(min_im_hyperbolic) ? nlohmann::json(min_im_hyperbolic) : nlohmann::json(nullptr)},
            {"pairs_checked", pairs_checked},
            {"flagged_excluded", flagged_excluded},
            {"violations", violations}};
}

HypothesisReport check_A0_A1(const EffectiveModel& model, int J, double delta, bool strict) {
    HypothesisReport rep;
    rep.delta = delta > 0 ? delta : 0.5 * model.tp.nu;
    rep.min_abs_lambda = std::numeric_limits<double>::infinity();
    rep.min_im_hyperbolic = std::numeric_limits<double>::infinity();
    const auto& tp = model.tp;
    std::vector<ModeLabel> labels;
    for (const auto& l : model.elliptic_labels(J)) {
        labels.push_back(ModeLabel::elliptic(l.j, l.sign));
        const double lam = model.lambda(l);
        rep.a0_constant = std::max(rep.a0_constant, std::abs(lam - double(l.j) * l.j));
        rep.min_abs_lambda = std::min(rep.min_abs_lambda, std::abs(lam));
        if (std::abs(lam) < rep.delta) rep.violations.push_back("A1(a): |Lambda" + to_string(labels.back()) + "| < delta");
    }
    if (!model.stable()) {
        for (const auto& f : {ModeLabel::e(), ModeLabel::f()}) {
            const cplx lam = f.kind == LabelKind::hyp_e ? model.lambda_e : model.lambda_f;
            rep.min_im_hyperbolic = std::min(rep.min_im_hyperbolic, std::abs(lam.imag()));
            if (std::abs(lam.imag()) < rep.delta) rep.violations.push_back("A1(b): |Im Lambda_" + to_string(f) + "| < delta");
            labels.push_back(f);
        }
    }
    auto lam_of = [&](const ModeLabel& l) -> cplx {
        if (l.kind == LabelKind::hyp_e) return model.lambda_e;
        if (l.kind == LabelKind::hyp_f) return model.lambda_f;
        return model.lambda({l.j, l.sign});
    };
    const IntPair k0{0, 0};
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i; j < labels.size(); ++j) {
            const auto& a = labels[i];
            const auto& b = labels[j];
            ++rep.pairs_checked;
            const std::string name = to_string(a) + "," + to_string(b);
            if (std::abs(lam_of(a) + lam_of(b)) < rep.delta) {
                if (selection_rule(k0, DivisorKind::plus_two, a, b, tp) == Disposition::must_check)
                    rep.violations.push_back("A1(c) sum " + name);
                else
                    rep.flagged_excluded.push_back("sum " + name);
            }
            if (a.cluster() != b.cluster() && std::abs(lam_of(a) - lam_of(b)) < rep.delta) {
                if (selection_rule(k0, DivisorKind::plus_minus, a, b, tp) == Disposition::must_check)
                    rep.violations.push_back("A1(c) difference " + name);
                else
                    rep.flagged_excluded.push_back("difference " + name);
            }
        }
    if (strict && !rep.ok()) throw HypothesisViolated("non-resonance hypothesis A0/A1 fails", rep.to_json());
    return rep;
}

}  // namespace cnls
