#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cnls/errors.hpp"
#include "cnls/gauss_rational.hpp"
#include "cnls/phase_space.hpp"
#include "support.hpp"

using namespace cnls;

TEST_CASE("norm_s examples") {
    FourierState z(3);
    CHECK(norm_s(z, 1.0) == 0.0);
    z.a()[0] = 1;
    CHECK(norm_s(z, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    FourierState w(3);
    w.a()[1] = 1;
    w.b()[-1] = 1;
    CHECK(norm_s(w, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("norm_s is homogeneous") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const FourierState z = test::random_state(rng, 6, test::uniform(rng, 0.1, 3.0));
        const cplx c{test::uniform(rng, -2, 2), test::uniform(rng, -2, 2)};
        const double lhs = norm_s(c * z, 1.5);
        CHECK(lhs == doctest::Approx(std::abs(c) * norm_s(z, 1.5)).epsilon(1e-14));
    }
}

TEST_CASE("convolution identity and index addition") {
    ModeSequence<cplx> delta0(4), delta1(4), y(4);
    delta0[0] = 1;
    delta1[1] = 1;
    for (int j = -4; j <= 4; ++j) y[j] = {double(j), 1.0 - j};
    const auto e = truncate(convolve(delta0, y), 4);
    CHECK(e == y);
    const auto d2 = convolve(delta1, delta1);
    CHECK(d2.radius() == 8);
    for (int j = -8; j <= 8; ++j) CHECK(d2[j] == cplx(j == 2 ? 1.0 : 0.0));
}

TEST_CASE("convolution is commutative and associative in exact arithmetic") {
    std::mt19937_64 rng(5);
    auto rnd = [&](int J) {
        ModeSequence<GaussRational> x(J);
        for (int j = -J; j <= J; ++j)
            x[j] = GaussRational(mpq_class(long(rng() % 19) - 9, long(rng() % 7) + 1),
                                 mpq_class(long(rng() % 19) - 9, long(rng() % 7) + 1));
        return x;
    };
    for (int trial = 0; trial < 10; ++trial) {
        const auto x = rnd(3), y = rnd(3), z = rnd(3);
        CHECK(convolve(x, y) == convolve(y, x));
        CHECK(convolve(convolve(x, y), z) == convolve(x, convolve(y, z)));
    }
}

TEST_CASE("convolution algebra bound with brute-force constant") {
    const int J = 8;
    const double s = 1.0;
    // Cauchy–Schwarz: c_s² = max_l Σ_i w_l / (w_i w_{l−i}).
    double cs2 = 0;
    for (int l = -2 * J; l <= 2 * J; ++l) {
        double acc = 0;
        for (int i = -J; i <= J; ++i) {
            const int k = l - i;
            if (k < -J || k > J) continue;
            acc += sobolev_weight(l, s) / (sobolev_weight(i, s) * sobolev_weight(k, s));
        }
        cs2 = std::max(cs2, acc);
    }
    const double cs = std::sqrt(cs2);
    std::mt19937_64 rng(2024);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const FourierState u = test::random_state(rng, J, 1.0), v = test::random_state(rng, J, 1.0);
        const auto xy = convolve(u.a(), v.b());
        if (norm_s(xy, s) > cs * norm_s(u.a(), s) * norm_s(v.b(), s) * (1 + 1e-12)) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("mass, momentum and partial masses") {
    FourierState z(3);
    z.a()[2] = 1;
    CHECK(mass(z) == 1.0);
    CHECK(momentum(z) == 2.0);
    auto [lu, lv] = partial_masses(z);
    CHECK(lu == 1.0);
    CHECK(lv == 0.0);

    FourierState sym(3);
    for (int j = 0; j <= 3; ++j) {
        const cplx c{0.3 * j + 0.1, -0.2 * j};
        sym.a()[j] = sym.a()[-j] = c;
    }
    for (int j = -3; j <= 3; ++j) sym.b()[j] = sym.a()[-j];
    CHECK(momentum(sym) == doctest::Approx(0.0).scale(1.0));

    std::mt19937_64 rng(9);
    const FourierState r = test::random_state(rng, 5, 0.7);
    auto [ru, rv] = partial_masses(r);
    CHECK(std::abs(ru + rv - mass(r)) <= 1e-16);
}

TEST_CASE("conserved functionals are gauge invariant") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const FourierState z = test::random_state(rng, 5, 1.0);
        const FourierState w = rotate_phases(z, test::uniform(rng, 0, 6.3), test::uniform(rng, 0, 6.3));
        CHECK(mass(w) == doctest::Approx(mass(z)).epsilon(1e-14));
        CHECK(momentum(w) == doctest::Approx(momentum(z)).epsilon(1e-13));
        auto [zu, zv] = partial_masses(z);
        auto [wu, wv] = partial_masses(w);
        CHECK(wu == doctest::Approx(zu).epsilon(1e-14));
        CHECK(wv == doctest::Approx(zv).epsilon(1e-14));
    }
}

TEST_CASE("state JSON round trip") {
    std::mt19937_64 rng(4);
    const FourierState z = test::random_state(rng, 4, 0.5);
    const auto j = to_json(z);
    CHECK(j["J"] == 4);
    CHECK(j["a"].size() == 9);
    CHECK(state_from_json(j) == z);
    CHECK_THROWS_AS(state_from_json(nlohmann::json{{"J", 2}, {"a", nlohmann::json::array()}}), ParseError);
}
