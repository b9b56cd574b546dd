#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "cnls/dynamics.hpp"
#include "cnls/errors.hpp"
#include "support.hpp"

using namespace cnls;

namespace {

double max_diff(const FourierState& x, const FourierState& y) {
    double m = 0;
    for (int j = -x.J(); j <= x.J(); ++j) m = std::max({m, std::abs(x.a()[j] - y.a()[j]), std::abs(x.b()[j] - y.b()[j])});
    return m;
}

FourierState low_random(Rng& rng, int J, int K, double norm) {
    FourierState z(J);
    for (int j = -K; j <= K; ++j) {
        z.a()[j] = {test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)};
        z.b()[j] = {test::uniform(rng, -1, 1), test::uniform(rng, -1, 1)};
    }
    z *= cplx(norm / norm_s(z, 0.0));
    return z;
}

/// Reduced four-mode system (a_p, a_q, b_p, b_q) under Σk²(|a|²+|b|²) + L_u L_v + 2Re(a_p b_q ā_q b̄_p).
struct FourMode {
    int p, q;
    std::array<cplx, 4> rhs(const std::array<cplx, 4>& y) const {
        const auto [ap, aq, bp, bq] = y;
        const double Lu = std::norm(ap) + std::norm(aq), Lv = std::norm(bp) + std::norm(bq);
        const cplx mi(0, -1);
        return {mi * (double(p * p) * ap + Lv * ap + aq * bp * std::conj(bq)),
                mi * (double(q * q) * aq + Lv * aq + ap * bq * std::conj(bp)),
                mi * (double(p * p) * bp + Lu * bp + ap * bq * std::conj(aq)),
                mi * (double(q * q) * bq + Lu * bq + aq * bp * std::conj(ap))};
    }
    std::array<cplx, 4> step(const std::array<cplx, 4>& y, double h) const {
        auto add = [](std::array<cplx, 4> a, const std::array<cplx, 4>& b, double c) {
            for (int i = 0; i < 4; ++i) a[i] += c * b[i];
            return a;
        };
        const auto k1 = rhs(y), k2 = rhs(add(y, k1, h / 2)), k3 = rhs(add(y, k2, h / 2)), k4 = rhs(add(y, k3, h));
        auto out = y;
        for (int i = 0; i < 4; ++i) out[i] += h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        return out;
    }
};

}  // namespace

TEST_CASE("single mode rotates with the linear frequency") {
    FourierState z(6);
    z.a()[3] = cplx(0.05, 0.02);
    const auto tr = integrate(z, {.dt = 1e-2, .T = 10, .stride = 100});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const cplx expect = z.a()[3] * std::polar(1.0, -9.0 * tr.times[i]);
        CHECK(std::abs(tr.states[i].a()[3] - expect) < 1e-12);
    }
}

TEST_CASE("two-mode solution is reproduced") {
    const TorusParams tp{1, 2, 1.3, 1.7, 0.01};
    const FourierState z0 = two_mode_state(tp, 8);
    const auto tr = integrate(z0, {.dt = 1e-3, .T = 100, .stride = 10000});
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const auto& z = tr.states[i];
        CHECK(std::abs(std::abs(z.a()[1]) - std::sqrt(tp.nu * tp.rho1)) < 1e-10);
        CHECK(std::abs(std::abs(z.b()[2]) - std::sqrt(tp.nu * tp.rho2)) < 1e-10);
        CHECK(max_diff(z, two_mode_state(tp, 8, tr.times[i])) < 1e-9);
    }
    CHECK(tr.drift.H <= 1e-9);
    CHECK(tr.drift.L <= 1e-10);
    CHECK(tr.drift.M <= 1e-10);
}

TEST_CASE("time reversal") {
    Rng rng(4);
    const FourierState z0 = low_random(rng, 8, 4, 0.1);
    FourierState z = z0;
    const double dt = 1e-2;
    for (int i = 0; i < 1000; ++i) z = strang_step(z, dt);
    CHECK(max_diff(z, z0) > 1e-3);
    for (int i = 0; i < 1000; ++i) z = strang_step(z, -dt);
    CHECK(max_diff(z, z0) < 1e-8);
}

TEST_CASE("second-order convergence") {
    Rng rng(9);
    const FourierState z0 = low_random(rng, 6, 3, 0.3);
    auto run = [&](double dt) { return integrate(z0, {.dt = dt, .T = 2, .stride = 1000000, .enforce_drift = false}).states.back(); };
    const FourierState ref = run(1e-4);
    const double e1 = max_diff(run(0.02), ref), e2 = max_diff(run(0.01), ref);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("conservation on generic states") {
    Rng rng(1);
    for (double s : {0.0, 1.0}) {
        const FourierState z0 = random_state(rng, 12, 0.1, s);
        const auto tr = integrate(z0, {.dt = 1e-3, .T = 10, .stride = 500});
        CHECK(tr.drift.H <= 1e-9);
        CHECK(tr.drift.L <= 1e-10);
        CHECK(tr.drift.M <= 1e-10);
        for (std::size_t i = 1; i < tr.times.size(); ++i) CHECK(tr.times[i] > tr.times[i - 1]);
        CHECK(tr.times.back() == doctest::Approx(10.0));
    }
}

TEST_CASE("errors") {
    Rng rng(2);
    const FourierState z0 = low_random(rng, 8, 4, 0.4);
    CHECK_THROWS_AS(integrate(z0, {.dt = 0.3, .T = 30, .tol_H = 1e-14, .tol_L = 1e-16}), DriftExceeded);
    CHECK_THROWS_AS(integrate(2.0 * z0, {.dt = 1e-3, .T = 1}), SmallnessGate);
    CHECK_THROWS_AS(integrate(z0, {.dt = 0.0}), ConfigError);
    CHECK_THROWS_AS(integrate(z0, {.dt = 1e-3, .stride = 0}), ConfigError);
}

TEST_CASE("gauge covariance") {
    Rng rng(6);
    const FourierState z0 = low_random(rng, 8, 4, 0.2);
    const IntegrateOptions o{.dt = 1e-2, .T = 5, .stride = 50, .enforce_drift = false};
    const auto t1 = integrate(z0, o);
    const auto t2 = integrate(rotate_phases(z0, 0.7, -1.9), o);
    for (std::size_t i = 0; i < t1.times.size(); ++i) {
        CHECK(max_diff(rotate_phases(t1.states[i], 0.7, -1.9), t2.states[i]) < 1e-12);
        for (int j = -8; j <= 8; ++j) {
            CHECK(std::abs(std::abs(t1.states[i].a()[j]) - std::abs(t2.states[i].a()[j])) < 1e-12);
            CHECK(std::abs(std::abs(t1.states[i].b()[j]) - std::abs(t2.states[i].b()[j])) < 1e-12);
        }
    }
}

TEST_CASE("Galilean index shift") {
    Rng rng(7);
    const FourierState z0 = low_random(rng, 16, 3, 0.2);
    const FourierState z1 = shift_indices(z0, 1);
    CHECK(momentum(z1) == doctest::Approx(momentum(z0) + mass(z0)).epsilon(1e-13));
    // a limited horizon keeps the band edges unpopulated
    const IntegrateOptions o{.dt = 1e-2, .T = 5, .stride = 50, .enforce_drift = false};
    const auto t0 = integrate(z0, o), t1 = integrate(z1, o);
    double worst = 0;
    for (std::size_t i = 0; i < t0.times.size(); ++i)
        for (int j = -14; j <= 14; ++j) {
            worst = std::max(worst, std::abs(std::norm(t0.states[i].a()[j]) - std::norm(t1.states[i].a()[j + 1])));
            worst = std::max(worst, std::abs(std::norm(t0.states[i].b()[j]) - std::norm(t1.states[i].b()[j + 1])));
        }
    CHECK(worst < 1e-10);
}

TEST_CASE("csv output") {
    const FourierState z0 = beating_state(1, 2, 6, 0.25, 4e-3);
    const auto tr = integrate(z0, {.dt = 0.05, .T = 1, .stride = 5});
    std::ostringstream a, b;
    tr.write_csv(a, 1, 2);
    integrate(z0, {.dt = 0.05, .T = 1, .stride = 5}).write_csv(b, 1, 2);
    CHECK(a.str() == b.str());
    std::istringstream in(a.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "t,|a_p|^2,|b_q|^2,|a_q|^2,|b_p|^2,H,L,M,tail_norm");
    int rows = 0;
    while (std::getline(in, row)) {
        CHECK(std::count(row.begin(), row.end(), ',') == 8);
        ++rows;
    }
    CHECK(rows == int(tr.times.size()));
    CHECK(tr.summary_json()["drift"].contains("H"));
}

TEST_CASE("variational operator matches finite differences") {
    Rng rng(12);
    for (const TorusParams& tp : {TorusParams{1, 2, 1.2, 1.8, 0.01}, TorusParams{0, 3, 1.5, 1.1, 0.05}, TorusParams{2, 2, 1.4, 1.9, 0.02}}) {
        const int J = 8;
        const VariationalSystem sys(tp, J);
        const EffectiveModel m = build_model(tp);
        const FourierState z0 = two_mode_state(tp, J);
        FourierState d = low_random(rng, J, J, 1.0);
        const double h = 1e-5;
        FourierState fd = field_P2P4(z0 + cplx(h) * d) - field_P2P4(z0 - cplx(h) * d);
        fd *= cplx(1.0 / (2 * h));
        for (int j = -J; j <= J; ++j) {
            fd.a()[j] += cplx(0, m.omega[0]) * d.a()[j];
            fd.b()[j] += cplx(0, m.omega[1]) * d.b()[j];
        }
        CHECK(max_diff(sys.apply(d), fd) < 1e-8);
        // the conjugate half of the real-linear system is consistent
        const Eigen::VectorXcd v = sys.matrix() * sys.pack(d);
        const int n = 2 * J + 1;
        CHECK((v.segment(2 * n, 2 * n) - v.head(2 * n).conjugate()).norm() < 1e-14);
    }
}

TEST_CASE("frozen spectrum contains the hyperbolic eigenvalues") {
    const TorusParams tp{1, 2, 1.0, 2.0, 0.01};
    const VariationalSystem sys(tp, 12);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sys.matrix(), false);
    const auto ev = es.eigenvalues();
    const double s = tp.nu * std::sqrt(2.0);
    int unstable = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i).real() > 0.5 * s) {
            ++unstable;
            CHECK(ev(i).real() == doctest::Approx(s).epsilon(0.01));
        }
    // two double eigenvalues with positive real part
    CHECK(unstable == 2);
}

TEST_CASE("instability rate") {
    for (auto [p, q] : {std::pair{1, 2}, {0, 3}}) {
        for (auto [r1, r2] : {std::pair{1.0, 1.0}, {1.0, 2.0}}) {
            const auto g1 = linearized_flow({p, q, r1, r2, 1e-2}, {.J = 12, .samples = 800, .require_growth = true});
            const auto g2 = linearized_flow({p, q, r1, r2, 5e-3}, {.J = 12, .samples = 800, .require_growth = true});
            CHECK(g1.window_found);
            CHECK(g1.rate == doctest::Approx(g1.predicted).epsilon(0.1));
            CHECK(g1.rate == doctest::Approx(g1.frozen_rate).epsilon(0.01));
            CHECK(g2.rate == doctest::Approx(g2.frozen_rate).epsilon(0.01));
            CHECK(g1.rate / g2.rate == doctest::Approx(2.0).epsilon(0.05));
            CHECK(g1.r2 > 0.99);
            CHECK(g1.window[0] >= 0);
            CHECK(g1.window[1] <= g1.T + 1e-9);
            CHECK(!g1.bounded);
        }
    }
}

TEST_CASE("stable torus: no growth and a conserved quadratic form") {
    for (int p : {1, 2}) {
        const TorusParams tp{p, p, 1.0, 2.0, 1e-2};
        const auto g = linearized_flow(tp, {.J = 12, .samples = 500});
        CHECK(!g.window_found);
        CHECK(g.bounded);
        CHECK(g.max_ratio <= 10.0);
        CHECK(std::abs(g.rate) <= tp.nu / 10);
        CHECK(g.quadratic_drift <= 1e-8);
        CHECK(g.T == doctest::Approx(10.0 / tp.nu));
        CHECK_THROWS_AS(linearized_flow(tp, {.J = 12, .samples = 100, .require_growth = true}), NoGrowthWindow);
    }
}

TEST_CASE("beating matches the reduced four-mode system") {
    const double gamma = 0.25, eps2 = 4e-3;
    const auto rep = beating({.gamma = gamma, .eps2 = eps2, .J = 12, .dt = 0.05, .stride = 10});
    REQUIRE(rep.returned);

    const FourMode fm{1, 2};
    std::array<cplx, 4> y{std::sqrt((1 - gamma) * eps2), std::sqrt(gamma * eps2), std::sqrt(gamma * eps2),
                          std::sqrt((1 - gamma) * eps2)};
    double peak = 0, t = 0, ret = 0;
    bool peaked = false;
    const double h = 0.05;
    while (t < 20 / eps2) {
        y = fm.step(y, h);
        t += h;
        const double r = std::norm(y[1]) / eps2;
        peak = std::max(peak, r);
        if (r >= 0.5) peaked = true;
        if (peaked && r <= 1.1 * gamma) {
            ret = t;
            break;
        }
    }
    REQUIRE(ret > 0);
    CHECK(peak == doctest::Approx(1 - gamma).epsilon(0.01));
    CHECK(rep.max_aq_ratio == doctest::Approx(peak).epsilon(0.02));
    CHECK(rep.return_time == doctest::Approx(ret).epsilon(0.02));
    CHECK(rep.max_pair_aq_bp <= 0.05);
    CHECK(rep.max_pair_ap_bq <= 0.05);
    CHECK(rep.traj.drift.H <= 1e-9);
    CHECK(rep.to_json()["normalization"].contains("adopted"));
}

TEST_CASE("beating preconditions") {
    CHECK_THROWS_AS(beating_state(1, 1, 8, 0.25, 1e-3), ConfigError);
    CHECK_THROWS_AS(beating_state(1, 2, 8, 0.0, 1e-3), ConfigError);
    CHECK_THROWS_AS(beating_state(1, 2, 8, 0.5, 1e-3), ConfigError);
    CHECK_THROWS_AS(beating_state(1, 9, 8, 0.25, 1e-3), ConfigError);
}
