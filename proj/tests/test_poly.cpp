#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cnls/errors.hpp"
#include "cnls/poly.hpp"
#include "support.hpp"

using namespace cnls;

namespace {

long brute_p4_count(int J) {
    long n = 0;
    for (int i = -J; i <= J; ++i)
        for (int j = -J; j <= J; ++j)
            for (int k = -J; k <= J; ++k)
                for (int l = -J; l <= J; ++l) n += (k + l == i + j);
    return n;
}

Variable random_var(std::mt19937_64& rng, int J) {
    return {rng() % 2 ? Species::u : Species::v, rng() % 2 == 1, int(rng() % (2 * J + 1)) - J};
}

PolyHamiltonian random_poly(std::mt19937_64& rng, int J, int terms, int max_deg) {
    PolyHamiltonian h;
    for (int t = 0; t < terms; ++t) {
        std::vector<Variable> f;
        const int deg = 1 + int(rng() % max_deg);
        for (int d = 0; d < deg; ++d) f.push_back(random_var(rng, J));
        h.add(make_monomial(f), GaussRational(mpq_class(long(rng() % 11) - 5, long(rng() % 4) + 1),
                                              mpq_class(long(rng() % 11) - 5, long(rng() % 4) + 1)));
    }
    return h;
}

BasicFourierState<GaussRational> random_exact_state(std::mt19937_64& rng, int J) {
    BasicFourierState<GaussRational> z(J);
    for (int j = -J; j <= J; ++j) {
        z.a()[j] = GaussRational(mpq_class(long(rng() % 9) - 4, 3), mpq_class(long(rng() % 9) - 4, 5));
        z.b()[j] = GaussRational(mpq_class(long(rng() % 9) - 4, 7), mpq_class(long(rng() % 9) - 4, 2));
    }
    return z;
}

FourierState to_double(const BasicFourierState<GaussRational>& z) {
    FourierState d(z.J());
    for (int j = -z.J(); j <= z.J(); ++j) {
        d.a()[j] = z.a()[j].to_complex();
        d.b()[j] = z.b()[j].to_complex();
    }
    return d;
}

}  // namespace

TEST_CASE("P2 and P4 term counts") {
    CHECK(build_P2(1).size() == 4);
    CHECK(build_P2(3).size() == 2 * 2 * 3);
    for (int J = 1; J <= 4; ++J) CHECK(long(build_P4(J).size()) == brute_p4_count(J));
    CHECK(build_P4(1).size() == 19);
    CHECK(build_P4(2).size() == 85);
    const auto p4 = build_P4(3);
    for (const auto& [m, c] : p4.terms()) {
        CHECK(momentum(m) == 0);
        CHECK(c == GaussRational(1));
    }
}

TEST_CASE("bracket examples") {
    const int J = 3;
    const PolyHamiltonian p2 = build_P2(J);
    PolyHamiltonian action;
    action.add(make_monomial({var_a(2), var_abar(2)}), 1);
    PolyHamiltonian inv;
    inv.add(make_monomial({var_a(2), var_abar(2), var_b(1), var_bbar(-1)}), GaussRational(3, 2));
    CHECK(poisson(action, inv).empty());
    CHECK(poisson(p2, p2).empty());
    PolyHamiltonian res;
    res.add(make_monomial({var_a(1), var_abar(2), var_b(2), var_bbar(1)}), 1);
    CHECK(poisson(res, p2).empty());
}

TEST_CASE("bracket with P2 multiplies by -i times the divisor") {
    std::mt19937_64 rng(77);
    const PolyHamiltonian p2 = build_P2(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Variable> f;
        for (int d = 0; d < 4; ++d) f.push_back(random_var(rng, 3));
        const Monomial m = make_monomial(f);
        PolyHamiltonian h;
        h.add(m, 1);
        long d = 0;
        for (const auto& v : m) d += (v.conj ? -1 : 1) * v.index * v.index;
        PolyHamiltonian expected;
        expected.add(m, GaussRational(0, -d));
        CHECK(poisson(h, p2) == expected);
    }
}

TEST_CASE("bracket is antisymmetric and satisfies Jacobi") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 40; ++trial) {
        const int J = 1 + int(rng() % 3);
        const auto f = random_poly(rng, J, 4, 4), g = random_poly(rng, J, 4, 4), h = random_poly(rng, J, 4, 4);
        CHECK(poisson(f, g) == GaussRational(-1) * poisson(g, f));
        const auto jac = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g));
        CHECK(jac.empty());
    }
}

TEST_CASE("bracket obeys Leibniz and degree count") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        PolyHamiltonian f, g, h;
        std::vector<Variable> vf, vg, vh;
        for (int d = 0; d < 3; ++d) vf.push_back(random_var(rng, 2));
        for (int d = 0; d < 2; ++d) vg.push_back(random_var(rng, 2));
        for (int d = 0; d < 3; ++d) vh.push_back(random_var(rng, 2));
        f.add(make_monomial(vf), 1);
        g.add(make_monomial(vg), GaussRational(2, 1));
        h.add(make_monomial(vh), GaussRational(0, 3));
        CHECK(poisson(f, g * h) == poisson(f, g) * h + g * poisson(f, h));
        const auto b = poisson(f, h);
        if (!b.empty()) CHECK(b.degree() == 3 + 3 - 2);
    }
}

TEST_CASE("P4 commutes with mass and momentum") {
    for (int J = 1; J <= 3; ++J) {
        const auto p4 = build_P4(J);
        CHECK(poisson(p4, build_mass(J)).empty());
        CHECK(poisson(p4, build_momentum(J)).empty());
        CHECK(p4.is_real());
    }
}

TEST_CASE("vector field examples") {
    const int J = 3;
    const CompiledPoly p2(build_P2(J), J);
    FourierState z(J);
    z.a()[1] = 1;
    const FourierState f = p2.field(z);
    CHECK(f.a()[1] == cplx(0, -1));
    FourierState rest = f;
    rest.a()[1] = 0;
    CHECK(norm_s(rest, 0.0) == 0.0);
    const CompiledPoly p4(build_P4(J), J);
    CHECK(norm_s(p4.field(FourierState(J)), 1.0) == 0.0);
    CHECK(norm_s(field_nonlinear(FourierState(J)), 1.0) == 0.0);
}

TEST_CASE("convolution P4 path matches term-by-term differentiation") {
    const int J = 6;
    const CompiledPoly p4(build_P4(J), J);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const FourierState z = test::random_state(rng, J, 0.8);
        const FourierState fast = P4Fast::conj_gradient(z);
        const FourierState slow = p4.conj_gradient(z);
        CHECK(norm_s(fast - slow, 0.0) <= 1e-13 * norm_s(slow, 0.0));
        CHECK(std::abs(P4Fast::value(z) - p4.value(z).real()) <= 1e-13 * std::abs(P4Fast::value(z)));
        CHECK(std::abs(p4.value(z).imag()) <= 1e-14);
    }
}

TEST_CASE("compiled evaluation agrees with exact evaluation") {
    std::mt19937_64 rng(19);
    const int J = 2;
    const auto p4 = build_P4(J);
    const CompiledPoly c(p4, J);
    for (int trial = 0; trial < 5; ++trial) {
        const auto ze = random_exact_state(rng, J);
        const auto exact = p4.evaluate_exact(ze).to_complex();
        CHECK(std::abs(c.value(to_double(ze)) - exact) <= 1e-12 * (1 + std::abs(exact)));
    }
}

TEST_CASE("cubic vector-field bound") {
    const int J = 8;
    std::mt19937_64 rng(2718);
    int violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const FourierState z = test::random_state(rng, J, test::uniform(rng, 0.01, 1.0));
        const double n = norm_s(z, 1.0);
        if (norm_s(field_nonlinear(z), 1.0) > 4.0 * n * n * n) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("real Hamiltonian fields respect the conjugate pairing") {
    std::mt19937_64 rng(44);
    const int J = 2;
    const auto p4 = build_P4(J);
    for (int trial = 0; trial < 3; ++trial) {
        const auto z = random_exact_state(rng, J);
        for (int j = -J; j <= J; ++j) {
            const auto d_plain = p4.derivative(var_a(j)).evaluate_exact(z);
            const auto d_conj = p4.derivative(var_abar(j)).evaluate_exact(z);
            CHECK(d_plain == d_conj.conj());
            const auto e_plain = p4.derivative(var_b(j)).evaluate_exact(z);
            const auto e_conj = p4.derivative(var_bbar(j)).evaluate_exact(z);
            CHECK(e_plain == e_conj.conj());
        }
    }
}

TEST_CASE("line format round trip and coefficient forms") {
    std::mt19937_64 rng(6);
    const auto h = random_poly(rng, 3, 12, 5);
    CHECK(PolyHamiltonian::from_lines(h.to_lines()) == h);
    CHECK(GaussRational::parse("1/2 / -3/4") == GaussRational(mpq_class(1, 2), mpq_class(-3, 4)));
    CHECK(GaussRational::parse("1/-2") == GaussRational(1, -2));
    CHECK(GaussRational::parse("1/2/3/4") == GaussRational(mpq_class(1, 2), mpq_class(3, 4)));
    CHECK(GaussRational::parse("\xE2\x88\x92" "5 / 0") == GaussRational(-5));
    const auto p = PolyHamiltonian::from_lines("2/3 / 0 : a(+1)^2 ab(\xE2\x88\x92" "2) b(+2) bb(-1)\n");
    CHECK(p.coeff(make_monomial({var_a(1), var_a(1), var_abar(-2), var_b(2), var_bbar(-1)})) ==
          GaussRational(mpq_class(2, 3)));
    CHECK_THROWS_AS(PolyHamiltonian::from_lines("1 : c(1)"), ParseError);
    CHECK_THROWS_AS(PolyHamiltonian::from_lines("1/2/3 : a(1)"), ParseError);
}

TEST_CASE("user perturbation validation") {
    const int J = 2;
    // ∫|u|⁴|v|² expanded in modes: a_i a_k b_l ā_m ā_n b̄_r with i+k+l = m+n+r.
    PolyHamiltonian g;
    for (int i = -J; i <= J; ++i)
        for (int k = -J; k <= J; ++k)
            for (int l = -J; l <= J; ++l)
                for (int m = -J; m <= J; ++m)
                    for (int n = -J; n <= J; ++n) {
                        const int r = i + k + l - m - n;
                        if (r < -J || r > J) continue;
                        g.add(make_monomial({var_a(i), var_a(k), var_b(l), var_abar(m), var_abar(n), var_bbar(r)}), 1);
                    }
    CHECK_NOTHROW(validate_R5(g, J, TorusCase::unstable));
    CHECK_NOTHROW(validate_R5(g, J, TorusCase::stable));
    CHECK_NOTHROW(user_R5(g.to_lines(), J, TorusCase::stable));

    CHECK_THROWS_AS(user_R5("1 / 0 : a(1) ab(2) b(1) bb(1) b(2)\n", J, TorusCase::unstable), NonZeroMomentum);
    std::string low;
    for (int j = -J; j <= J; ++j) low += "1 / 0 : a(" + std::to_string(j) + ") bb(" + std::to_string(j) + ")\n";
    CHECK_THROWS_AS(user_R5(low, J, TorusCase::unstable), DegreeTooLow);
    // Conserves total mass and momentum but transfers mass between species.
    const std::string transfer = "1 / 0 : a(0)^3 bb(0)^3\n1 / 0 : b(0)^3 ab(0)^3\n";
    CHECK_NOTHROW(user_R5(transfer, J, TorusCase::unstable));
    CHECK_THROWS_AS(user_R5(transfer, J, TorusCase::stable), MassBracketNonzero);
    const std::string unbalanced = "1 / 0 : a(0)^3 ab(0)^2\n";
    CHECK_THROWS_AS(user_R5(unbalanced, J, TorusCase::unstable), MassBracketNonzero);
}
