#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include "cnls/birkhoff.hpp"
#include "cnls/errors.hpp"
#include "support.hpp"

using namespace cnls;

TEST_CASE("chi4 and Z4 coefficients") {
    const auto sol = solve_homological(2);
    const Monomial m = make_monomial({var_a(2), var_abar(1), var_b(0), var_bbar(1)});
    CHECK(sol.chi4.coeff(m) == GaussRational(0, 1) / GaussRational(2));
    const Monomial r = make_monomial({var_a(1), var_b(2), var_abar(2), var_bbar(1)});
    CHECK(sol.z4.coeff(r) == GaussRational(1));
    CHECK(!sol.chi4.contains(r));
}

TEST_CASE("Z4 term count matches brute force of {k,l}={i,j}") {
    for (int J = 1; J <= 4; ++J) {
        long n = 0;
        for (int k = -J; k <= J; ++k)
            for (int l = -J; l <= J; ++l)
                for (int i = -J; i <= J; ++i)
                    for (int j = -J; j <= J; ++j) n += (k == i && l == j) || (k == j && l == i);
        CHECK(long(solve_homological(J).z4.size()) == n);
        CHECK(n == 2 * (2 * J + 1) * (2 * J + 1) - (2 * J + 1));
    }
    CHECK(solve_homological(1).z4.size() == 15);
}

TEST_CASE("chi4 and Z4 partition P4") {
    for (int J = 1; J <= 3; ++J) {
        const auto sol = solve_homological(J);
        const auto p4 = build_P4(J);
        CHECK(sol.chi4.size() + sol.z4.size() == p4.size());
        for (const auto& [m, c] : p4.terms()) CHECK(sol.chi4.contains(m) != sol.z4.contains(m));
        for (const auto& [m, c] : sol.chi4.terms()) CHECK(sol.divisor_map.at(m) != 0);
        for (const auto& [m, c] : sol.z4.terms()) {
            CHECK(divisor(m) == 0);
            CHECK(momentum(m) == 0);
        }
        CHECK(poisson(sol.z4, build_mass(J)).empty());
        CHECK(poisson(sol.z4, build_momentum(J)).empty());
        CHECK(sol.chi4.is_real());
    }
}

TEST_CASE("homological identities hold exactly") {
    for (int J = 1; J <= 3; ++J) {
        const auto rep = verify_identities(solve_homological(J), true);
        CHECK(rep.ok());
    }
}

TEST_CASE("injected fault is named in the residual") {
    auto sol = solve_homological(2);
    const Monomial m = make_monomial({var_a(2), var_abar(1), var_b(0), var_bbar(1)});
    sol.chi4.set(m, sol.chi4.coeff(m) * GaussRational(2));
    const auto rep = verify_identities(sol);
    REQUIRE(rep.homological_residual.size() == 1);
    CHECK(rep.homological_residual[0].find(to_string(m)) != std::string::npos);
    CHECK_THROWS_AS(verify_identities(sol, true), ResidualNonzero);
}

TEST_CASE("remainder terms") {
    const auto sol = solve_homological(2);
    const auto [q1, q2] = remainder_terms(sol);
    CHECK(q1.degree() == 6);
    CHECK(q1.min_degree() == 6);
    CHECK(poisson(q1, build_momentum(2)).empty());
    CHECK(poisson(q1, build_mass(2)).empty());
    CHECK(poisson(q2, build_momentum(2)).empty());
    CHECK(poisson(q2, build_mass(2)).empty());
    for (const auto& [m, c] : q1.terms()) CHECK(momentum(m) == 0);
    for (const auto& [m, c] : q2.terms()) CHECK(momentum(m) == 0);
    // A degree-6 polynomial has vanishing field and Hessian at the origin.
    const CompiledPoly c1(q1, 2);
    CHECK(norm_s(c1.field(FourierState(2)), 1.0) == 0.0);
    FourierState e(2);
    e.a()[1] = 1e-3;
    CHECK(norm_s(c1.field(e), 0.0) <= 1e-12);
}

TEST_CASE("tau flow basics") {
    const BirkhoffMap map(4);
    CHECK(norm_s(map.tau(FourierState(4), 1), 1.0) == 0.0);
    std::mt19937_64 rng(10);
    const FourierState z = test::random_state(rng, 4, 0.01);
    for (int sub : {64, 128}) {
        TauOptions opt;
        opt.substeps = sub;
        const FourierState back = map.tau(map.tau(z, 1, opt), -1, opt);
        CHECK(norm_s(back - z, 1.0) <= 1e-10);
    }
    CHECK_THROWS_AS(map.tau(test::random_state(rng, 4, 0.5), 1), SmallnessGate);
    TauOptions loose;
    loose.eps0 = 0;
    CHECK_THROWS_AS(map.tau(test::random_state(rng, 4, 20.0), 1, loose), NormEscape);
}

TEST_CASE("tau conserves mass and momentum") {
    const BirkhoffMap map(5);
    std::mt19937_64 rng(12);
    const FourierState z = test::random_state(rng, 5, 0.05);
    const FourierState t = map.tau(z, 1);
    CHECK(std::abs(mass(t) - mass(z)) <= 1e-15);
    CHECK(std::abs(momentum(t) - momentum(z)) <= 1e-14);
}

TEST_CASE("tau is close to the identity with cubic scaling") {
    const BirkhoffMap map(8);
    std::mt19937_64 rng(99);
    const FourierState shape = test::random_state(rng, 8, 1.0);
    std::vector<double> amps, dist, defect;
    for (double mu : {1e-4, 1e-3, 1e-2}) {
        const FourierState z = cplx(mu) * shape;
        const FourierState d = map.displacement(z, 1);
        amps.push_back(mu);
        dist.push_back(norm_s(d, 1.0));
        defect.push_back(std::abs(map.energy_defect(z, d)));
    }
    const double c0 = dist[0] / std::pow(amps[0], 3), c2 = dist[2] / std::pow(amps[2], 3);
    CHECK(std::abs(c2 / c0 - 1) < 0.05);
    CHECK(test::loglog_slope(amps, dist) == doctest::Approx(3.0).epsilon(0.1 / 3));
    CHECK(test::loglog_slope(amps, defect) == doctest::Approx(6.0).epsilon(0.2 / 6));
}

TEST_CASE("tau is symplectic") {
    const int J = 2;
    const BirkhoffMap map(J);
    std::mt19937_64 rng(5);
    const FourierState z = test::random_state(rng, J, 1e-3);
    const int n = 2 * (2 * J + 1);  // complex dimension
    auto pack = [&](const FourierState& s) {
        Eigen::VectorXd v(2 * n);
        for (int j = -J; j <= J; ++j) {
            const int k = j + J;
            v(k) = s.a()[j].real();
            v(n + k) = s.a()[j].imag();
            v(2 * J + 1 + k) = s.b()[j].real();
            v(n + 2 * J + 1 + k) = s.b()[j].imag();
        }
        return v;
    };
    auto unpack = [&](const Eigen::VectorXd& v) {
        FourierState s(J);
        for (int j = -J; j <= J; ++j) {
            const int k = j + J;
            s.a()[j] = {v(k), v(n + k)};
            s.b()[j] = {v(2 * J + 1 + k), v(n + 2 * J + 1 + k)};
        }
        return s;
    };
    const Eigen::VectorXd x0 = pack(z);
    Eigen::MatrixXd D(2 * n, 2 * n);
    const double h = 1e-6;
    for (int c = 0; c < 2 * n; ++c) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp(c) += h;
        xm(c) -= h;
        D.col(c) = (pack(map.displacement(unpack(xp), 1)) - pack(map.displacement(unpack(xm), 1))) / (2 * h);
        D(c, c) += 1.0;
    }
    Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Jm.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    Jm.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    CHECK((D.transpose() * Jm * D - Jm).norm() <= 1e-6);
}
