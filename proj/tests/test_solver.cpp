#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ndhom/errors.hpp"
#include "ndhom/field.hpp"
#include "ndhom/solver.hpp"
#include "test_support.hpp"

using namespace ndhom;
using namespace ndhom::testsupport;

namespace {

// Eq.-(1.10)-style pair: A = (1/r) diag(a, 2-a) with closed-form invariant
// measure r.
ScalarField st2d_r(int res) {
    return ScalarField::from_terms(
        2,
        {WaveTerm{{0, 0, 0}, Phase::Cos, 1.0},
         // (1/4)(cos(2pi y1) - 2 sin(2pi y1)) sin(2pi y2) expanded:
         WaveTerm{{1, 1, 0}, Phase::Sin, 0.125}, WaveTerm{{1, -1, 0}, Phase::Sin, -0.125},
         WaveTerm{{1, 1, 0}, Phase::Cos, 0.25}, WaveTerm{{1, -1, 0}, Phase::Cos, -0.25}},
        res);
}

ScalarField st2d_a(int res) {
    return ScalarField::from_terms(2,
                                   {WaveTerm{{0, 0, 0}, Phase::Cos, 1.0},
                                    WaveTerm{{1, 1, 0}, Phase::Cos, 0.25},
                                    WaveTerm{{1, -1, 0}, Phase::Cos, -0.25}},
                                   res);
}

CoefficientField st2d_field(int res) {
    auto rf = [](const std::array<double, 3>& y) {
        return 1.0 + 0.25 * (std::cos(2 * M_PI * y[0]) - 2.0 * std::sin(2 * M_PI * y[0])) *
                         std::sin(2 * M_PI * y[1]);
    };
    auto af = [](const std::array<double, 3>& y) {
        return 1.0 - 0.5 * std::sin(2 * M_PI * y[0]) * std::sin(2 * M_PI * y[1]);
    };
    auto a11 = ScalarField::from_function(2, res, [&](const std::array<double, 3>& y) {
        return af(y) / rf(y);
    });
    auto a22 = ScalarField::from_function(2, res, [&](const std::array<double, 3>& y) {
        return (2.0 - af(y)) / rf(y);
    });
    return CoefficientField::diagonal({a11, a22});
}

} // namespace

TEST_CASE("constant coefficients have invariant measure one") {
    auto A = CoefficientField::constant(2, {2.0, 0.3, 1.0}, 16);
    auto [r, rep] = solve_invariant_measure(A);
    CHECK(sub(r, ScalarField::constant(2, 1.0)).linf() < 1e-13);
    CHECK(r.mean() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rep.residual_linf < 1e-11 * 2.0);
    CHECK(rep.iterations <= 2);
}

TEST_CASE("C+aM structure: r = 1 + M:D^2 w") {
    // C = I2, M = diag(1,-1), a = (1/2) sin(4 pi (y1+y2))
    auto a = ScalarField::from_terms(2, {WaveTerm{{2, 2, 0}, Phase::Sin, 0.5}}, 64);
    auto A = CoefficientField::diagonal({a.plus_constant(1.0),
                                         a.scaled(-1.0).plus_constant(1.0)});
    auto [r, rep] = solve_invariant_measure(A);
    CHECK(r.min_value() > 0.0);
    CHECK(r.mean() == doctest::Approx(1.0).epsilon(1e-14));

    const double abar = inner_product(r, a);
    auto [w, wrep] = solve_cell(A, r, a.plus_constant(-abar));
    auto r_pred = sub(derivative(w, {2, 0, 0}), derivative(w, {0, 2, 0})).plus_constant(1.0);
    CHECK(sub(r, r_pred).linf() < 1e-8);
    CHECK(wrep.compatibility_defect < 1e-11);
}

TEST_CASE("closed-form invariant measure of the diagonal 1/r pair") {
    auto A = st2d_field(64);
    auto [r, rep] = solve_invariant_measure(A);
    auto r_exact = st2d_r(64);
    CHECK(sub(r, r_exact).linf() < 1e-10);
    CHECK(rep.resolution_used == 64);
    CHECK(rep.residual_linf < 1e-11 * 4.0);
}

TEST_CASE("cell solve with zero data returns zero") {
    auto A = st2d_field(32);
    auto [r, rep] = solve_invariant_measure(A);
    auto [v, vrep] = solve_cell(A, r, ScalarField::constant(2, 0.0));
    CHECK(v.linf() < 1e-13);
    CHECK(vrep.compatibility_defect == 0.0);
}

TEST_CASE("diag(1+b, 1-b): correctors collapse to the scalar w_B") {
    auto b = ScalarField::from_terms(2,
                                     {WaveTerm{{1, 0, 0}, Phase::Sin, 0.3},
                                      WaveTerm{{1, 1, 0}, Phase::Cos, 0.2},
                                      WaveTerm{{0, 2, 0}, Phase::Cos, 0.15}},
                                     64);
    auto B = CoefficientField::diagonal({b.plus_constant(1.0),
                                         b.scaled(-1.0).plus_constant(1.0)});
    auto [rB, rep] = solve_invariant_measure(B);
    const double bbar = inner_product(rB, b);
    auto wB = solve_poisson(multiply(rB, b).plus_constant(-inner_product(rB, b)));

    // v11 = w_B, v22 = -w_B, v12 = 0
    auto rhs11 = b.plus_constant(-bbar); // (1+b) - int rB (1+b)
    auto [v11, rep11] = solve_cell(B, rB, rhs11);
    CHECK(sub(v11, wB).linf() < 1e-9);

    auto rhs22 = b.scaled(-1.0).plus_constant(bbar);
    auto [v22, rep22] = solve_cell(B, rB, rhs22);
    CHECK(add(v22, wB).linf() < 1e-9);

    auto [v12, rep12] = solve_cell(B, rB, ScalarField::constant(2, 0.0));
    CHECK(v12.linf() < 1e-12);
}

TEST_CASE("poisson: single mode and the 1d R_1 profile") {
    auto rhs = ScalarField::from_terms(2, {WaveTerm{{1, 0, 0}, Phase::Sin, 1.0}}, 16);
    auto w = solve_poisson(rhs);
    REQUIRE(w.terms().size() == 1);
    CHECK(w.terms()[0].amp == doctest::Approx(1.0 / (4.0 * M_PI * M_PI)).epsilon(1e-15));

    // r1 = 1 + (1/3) sin(2 pi t): R1 with R1'' = r1 - 1 is -sin(2 pi t)/(12 pi^2)
    auto r1_fluct = ScalarField::from_terms(1, {WaveTerm{{1, 0, 0}, Phase::Sin, 1.0 / 3.0}}, 16);
    auto R1 = solve_poisson(r1_fluct.scaled(-1.0));
    REQUIRE(R1.terms().size() == 1);
    CHECK(R1.terms()[0].amp == doctest::Approx(-1.0 / (12.0 * M_PI * M_PI)).epsilon(1e-15));
}

TEST_CASE("poisson residual property on random mean-zero data") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 5; ++trial) {
        auto rhs = random_field(rng, 2, 4, 10, 1.0, 32);
        rhs = rhs.plus_constant(-rhs.mean());
        auto w = solve_poisson(rhs);
        auto lap = add(derivative(w, {2, 0, 0}), derivative(w, {0, 2, 0}));
        CHECK(add(lap, rhs).linf() < 1e-12);
        CHECK(std::abs(w.mean()) < 1e-15);
    }
    auto bad = ScalarField::constant(2, 0.5);
    CHECK_THROWS_AS(solve_poisson(bad), CompatibilityError);
}

TEST_CASE("compatibility defect tracks a constant rhs perturbation") {
    auto A = st2d_field(64);
    auto [r, rep] = solve_invariant_measure(A);
    auto a11 = A.entry(0, 0);
    auto rhs = a11.plus_constant(-inner_product(r, a11));

    const double c = 3e-9; // below the defect gate
    auto [v, vrep] = solve_cell(A, r, rhs.plus_constant(c));
    CHECK(vrep.compatibility_defect == doctest::Approx(c).epsilon(1e-4));

    CHECK_THROWS_AS(solve_cell(A, r, rhs.plus_constant(0.5)), CompatibilityError);
}

TEST_CASE("adjoint consistency against smooth test fields") {
    auto A = st2d_field(64);
    auto [r, rep] = solve_invariant_measure(A);
    std::mt19937_64 rng(113);
    for (int trial = 0; trial < 20; ++trial) {
        auto phi = random_field(rng, 2, 3, 6, 1.0, 64);
        ScalarField Aphi = ScalarField::constant(2, 0.0);
        for (int s = 0; s < 2; ++s)
            for (int t = s; t < 2; ++t) {
                std::array<int, 3> order{0, 0, 0};
                order[s] += 1;
                order[t] += 1;
                auto term = multiply(A.entry(s, t), derivative(phi, order));
                Aphi = add(Aphi, s == t ? term : term.scaled(2.0));
            }
        // ||phi||_C2-type scale
        double c2 = phi.linf();
        for (int s = 0; s < 2; ++s)
            for (int t = s; t < 2; ++t) {
                std::array<int, 3> order{0, 0, 0};
                order[s] += 1;
                order[t] += 1;
                c2 = std::max(c2, derivative(phi, order).linf());
            }
        CHECK(std::abs(inner_product(r, Aphi)) < 1e-9 * c2);
    }
}

TEST_CASE("resolution robustness: doubling N moves r by < 1e-9") {
    auto A = st2d_field(128);
    SolveOptions o64;
    o64.resolution = 64;
    auto [r64, rep64] = solve_invariant_measure(A, o64);
    SolveOptions o128;
    o128.resolution = 128;
    auto [r128, rep128] = solve_invariant_measure(A, o128);
    CHECK(sub(r128, r64.resample(128)).linf() < 1e-9);
}

TEST_CASE("krylov matches the dense nullspace oracle at N = 16") {
    auto A = st2d_field(16);
    SolveOptions opts;
    opts.resolution = 16;
    auto [r, rep] = solve_invariant_measure(A, opts);
    auto r_dense = invariant_measure_dense(A, 16);
    CHECK(sub(r, r_dense).linf() < 1e-10);

    CHECK_THROWS_AS(invariant_measure_dense(A, 64), DomainError);
}

TEST_CASE("iteration cap raises ConvergenceError") {
    auto A = st2d_field(64);
    SolveOptions opts;
    opts.max_iterations = 2;
    CHECK_THROWS_AS(solve_invariant_measure(A, opts), ConvergenceError);
}
