#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ndhom/errors.hpp"
#include "ndhom/field.hpp"
#include "ndhom/json_io.hpp"
#include "test_support.hpp"

using namespace ndhom;
using namespace ndhom::testsupport;

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

TEST_CASE("constant field from a single zero-wavevector term") {
    auto f = ScalarField::from_terms(2, {WaveTerm{{0, 0, 0}, Phase::Cos, 1.0}}, 16);
    CHECK(f.mean() == doctest::Approx(1.0).epsilon(1e-15));
    for (double v : f.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("pure harmonic has zero mean and canonical sign handling") {
    // 0.5*sin(2*pi*(y1+y2)) entered with a flipped wavevector
    auto f = ScalarField::from_terms(2, {WaveTerm{{-1, -1, 0}, Phase::Sin, -0.5}}, 32);
    CHECK(f.mean() == 0.0);
    REQUIRE(f.terms().size() == 1);
    CHECK(f.terms()[0].k[0] == 1);
    CHECK(f.terms()[0].k[1] == 1);
    CHECK(f.terms()[0].amp == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(f.evaluate({0.125, 0.125, 0.0}) ==
          doctest::Approx(0.5 * std::sin(kTwoPi * 0.25)).epsilon(1e-14));
}

TEST_CASE("product of sines expands to the cosine difference form") {
    // a(y) = 1 - (1/2) sin(2 pi y1) sin(2 pi y2)
    auto s1 = ScalarField::from_terms(2, {WaveTerm{{1, 0, 0}, Phase::Sin, 1.0}}, 32);
    auto s2 = ScalarField::from_terms(2, {WaveTerm{{0, 1, 0}, Phase::Sin, 1.0}}, 32);
    auto a = multiply(s1, s2).scaled(-0.5).plus_constant(1.0);
    REQUIRE(a.terms().size() == 3);
    // expected: 1 + (1/4) cos(2 pi (y1+y2)) - (1/4) cos(2 pi (y1-y2))
    for (const WaveTerm& t : a.terms()) {
        if (is_zero_wavevector(t.k)) {
            CHECK(t.amp == doctest::Approx(1.0));
        } else if (t.k[1] == 1) {
            CHECK(t.amp == doctest::Approx(0.25));
        } else {
            CHECK(t.k[1] == -1);
            CHECK(t.amp == doctest::Approx(-0.25));
        }
    }
    CHECK(a.evaluate({0.25, 0.25, 0.0}) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("multiply by the constant one is the identity") {
    std::mt19937_64 rng(7);
    auto g = random_field(rng, 2, 3, 5, 1.0, 32);
    auto one = ScalarField::constant(2, 1.0);
    auto prod = multiply(one, g);
    REQUIRE(prod.terms().size() == g.terms().size());
    for (std::size_t i = 0; i < g.terms().size(); ++i)
        CHECK(prod.terms()[i].amp == doctest::Approx(g.terms()[i].amp).epsilon(1e-15));
}

TEST_CASE("cos squared via product-to-sum") {
    auto c = ScalarField::from_terms(1, {WaveTerm{{1, 0, 0}, Phase::Cos, 1.0}}, 16);
    auto p = multiply(c, c);
    REQUIRE(p.terms().size() == 2);
    CHECK(p.mean() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.terms()[1].k[0] == 2);
    CHECK(p.terms()[1].amp == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("mean of a dealiased product matches trapezoid quadrature") {
    // invariant measure and scalar from the A+I example pair
    auto r = ScalarField::from_terms(2,
                                     {WaveTerm{{0, 0, 0}, Phase::Cos, 1.0},
                                      WaveTerm{{1, 1, 0}, Phase::Sin, 1.0 / 3.0},
                                      WaveTerm{{1, -1, 0}, Phase::Cos, 1.0 / 3.0}},
                                     64);
    auto a = ScalarField::from_terms(2,
                                     {WaveTerm{{0, 0, 0}, Phase::Cos, 1.0},
                                      WaveTerm{{2, 2, 0}, Phase::Sin, 0.5}},
                                     64);
    const double exact = multiply(r, a).mean();
    const double ip = inner_product(r, a);
    auto rf = [](double y1, double y2) {
        return 1 + std::sin(kTwoPi * (y1 + y2)) / 3 + std::cos(kTwoPi * (y1 - y2)) / 3;
    };
    auto af = [](double y1, double y2) { return 1 + 0.5 * std::sin(2 * kTwoPi * (y1 + y2)); };
    const double quad =
        trapezoid_2d([&](double y1, double y2) { return rf(y1, y2) * af(y1, y2); }, 256);
    CHECK(std::abs(exact - quad) < 1e-10);
    CHECK(std::abs(ip - quad) < 1e-10);

    // same product through the grid path
    const double ip_grid = inner_product(as_grid_backed(r), as_grid_backed(a));
    CHECK(std::abs(ip_grid - quad) < 1e-10);
}

TEST_CASE("derivative of a constant vanishes") {
    auto f = ScalarField::constant(2, 3.5);
    auto d = derivative(f, {1, 0, 0});
    CHECK(d.terms().empty());
    CHECK(d.linf() == 0.0);
}

TEST_CASE("mixed second derivative of sin(2pi(y1+y2))") {
    auto f = ScalarField::from_terms(2, {WaveTerm{{1, 1, 0}, Phase::Sin, 1.0}}, 32);
    auto d = derivative(f, {1, 1, 0});
    REQUIRE(d.terms().size() == 1);
    CHECK(d.terms()[0].phase == Phase::Sin);
    CHECK(d.terms()[0].amp == doctest::Approx(-4.0 * M_PI * M_PI).epsilon(1e-15));
}

TEST_CASE("spectral second derivative matches a 4th-order finite difference") {
    std::mt19937_64 rng(11);
    auto w = random_field(rng, 2, 2, 6, 0.01, 128);
    auto wg = as_grid_backed(w); // exercise the grid path
    auto d22 = derivative(wg, {0, 2, 0});
    const int n = 128;
    const double h = 1.0 / n;
    const auto& v = wg.values();
    auto at = [&](int i, int j) { return v[((i + n) % n) * n + ((j + n) % n)]; };
    double max_rel = 0.0;
    const double scale = d22.linf();
    for (int i = 0; i < n; i += 7) {
        for (int j = 0; j < n; j += 7) {
            const double fd = (-at(i, j + 2) + 16 * at(i, j + 1) - 30 * at(i, j) +
                               16 * at(i, j - 1) - at(i, j - 2)) /
                              (12 * h * h);
            max_rel = std::max(max_rel, std::abs(fd - d22.values()[i * n + j]) / scale);
        }
    }
    CHECK(max_rel < 1e-6);
}

TEST_CASE("inner product basics") {
    auto one = ScalarField::constant(2, 1.0);
    CHECK(inner_product(one, one) == doctest::Approx(1.0).epsilon(1e-15));
    auto s = ScalarField::from_terms(2, {WaveTerm{{1, 0, 0}, Phase::Sin, 1.0}}, 16);
    auto c = ScalarField::from_terms(2, {WaveTerm{{1, 0, 0}, Phase::Cos, 1.0}}, 16);
    CHECK(inner_product(s, c) == doctest::Approx(0.0));
    CHECK(inner_product(s, s) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("integration by parts: <d2_st w, d_i w> = 0 for all index triples") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        auto w = random_field(rng, 2, 3, 8, 1.0, 64);
        for (int s = 0; s < 2; ++s)
            for (int t = s; t < 2; ++t)
                for (int i = 0; i < 2; ++i) {
                    std::array<int, 3> d2{0, 0, 0};
                    d2[s] += 1;
                    d2[t] += 1;
                    std::array<int, 3> d1{0, 0, 0};
                    d1[i] = 1;
                    const double ip = inner_product(derivative(w, d2), derivative(w, d1));
                    CHECK(std::abs(ip) < 1e-12 * (1.0 + w.linf() * w.linf()));
                }
    }
}

TEST_CASE("round trip: terms -> grid -> spectral analysis recovers the terms") {
    std::mt19937_64 rng(5);
    auto f = random_field(rng, 2, 4, 12, 2.0, 32);
    auto recovered = as_grid_backed(f).spectral_terms(1e-13);
    REQUIRE(recovered.size() == f.terms().size());
    for (std::size_t i = 0; i < recovered.size(); ++i) {
        CHECK(recovered[i].k == f.terms()[i].k);
        CHECK(recovered[i].phase == f.terms()[i].phase);
        CHECK(recovered[i].amp == doctest::Approx(f.terms()[i].amp).epsilon(1e-12));
    }
}

TEST_CASE("3d round trip and sampling") {
    std::mt19937_64 rng(17);
    auto f = random_field(rng, 3, 2, 6, 1.0, 16);
    auto g = as_grid_backed(f);
    auto up = g.sample(32);
    const double h = 1.0 / 32;
    double err = 0.0;
    for (int i = 0; i < 32; i += 5)
        for (int j = 0; j < 32; j += 5)
            for (int k = 0; k < 32; k += 5)
                err = std::max(err, std::abs(up.v[(i * 32 + j) * 32 + k] -
                                             f.evaluate({i * h, j * h, k * h})));
    CHECK(err < 1e-12);
}

TEST_CASE("multiply is commutative and bilinear on random fields") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_field(rng, 2, 3, 6, 1.0, 32);
        auto g = random_field(rng, 2, 3, 6, 1.0, 32);
        auto h = random_field(rng, 2, 3, 6, 1.0, 32);
        auto fg = multiply(f, g);
        auto gf = multiply(g, f);
        CHECK(std::abs(inner_product(fg, ScalarField::constant(2, 1.0)) -
                       inner_product(gf, ScalarField::constant(2, 1.0))) < 1e-14);
        // (f+g)*h == f*h + g*h, compared on the common grid
        auto lhs = multiply(add(f, g), h);
        auto rhs = add(multiply(f, h), multiply(g, h));
        auto diff = sub(lhs, rhs);
        CHECK(diff.linf() < 1e-12);
    }
}

TEST_CASE("derivatives commute") {
    std::mt19937_64 rng(41);
    auto f = random_field(rng, 2, 3, 8, 1.0, 32);
    auto d12 = derivative(derivative(f, {1, 0, 0}), {0, 1, 0});
    auto d21 = derivative(derivative(f, {0, 1, 0}), {1, 0, 0});
    CHECK(sub(d12, d21).linf() <= 1e-15 * d12.linf());
    // the multi-index form evaluates both orders through one code path
    auto dm = derivative(as_grid_backed(f), {1, 1, 0});
    CHECK(sub(dm, d12).linf() <= 1e-13 * d12.linf());
}

TEST_CASE("derivatives have zero mean") {
    std::mt19937_64 rng(43);
    auto f = random_field(rng, 2, 3, 8, 1.0, 32).plus_constant(2.0);
    CHECK(derivative(f, {1, 0, 0}).mean() == 0.0);
    CHECK(derivative(f, {1, 1, 0}).mean() == 0.0);
    CHECK(derivative(as_grid_backed(f), {0, 2, 0}).mean() == doctest::Approx(0.0));
}

TEST_CASE("error paths") {
    CHECK_THROWS_AS(ScalarField::from_terms(2, {WaveTerm{{0, 0, 0}, Phase::Sin, 1.0}}, 16),
                    CanonicalError);
    CHECK_THROWS_AS(ScalarField::from_terms(2, {WaveTerm{{9, 0, 0}, Phase::Cos, 1.0}}, 16),
                    AliasError);
    // resolution cap on products (1d cap is 2^14)
    auto big = ScalarField::from_grid(spectral::RealGrid(1, 1 << 14));
    CHECK_THROWS_AS(multiply(big, big), AliasError);
}

TEST_CASE("coefficient field: symmetry, ellipticity metadata, failure") {
    auto a11 = ScalarField::from_terms(2, {WaveTerm{{0, 0, 0}, Phase::Cos, 2.0},
                                           WaveTerm{{1, 0, 0}, Phase::Sin, 0.5}},
                                       32);
    auto a12 = ScalarField::from_terms(2, {WaveTerm{{1, 0, 0}, Phase::Cos, 0.25}}, 32);
    auto a22 = ScalarField::constant(2, 2.0, 32);
    auto A = CoefficientField::from_upper(2, {a11, a12, a22});
    CHECK(&A.entry(0, 1) == &A.entry(1, 0));
    CHECK(A.lambda_min() > 0.0);
    CHECK(A.lambda_max() >= A.lambda_min());
    CHECK_FALSE(A.is_diagonal());

    auto bad = ScalarField::from_terms(2, {WaveTerm{{0, 0, 0}, Phase::Cos, 0.5},
                                           WaveTerm{{1, 0, 0}, Phase::Sin, 1.0}},
                                       32);
    CHECK_THROWS_AS(CoefficientField::diagonal({bad, a22}), EllipticityError);
}

TEST_CASE("field JSON round trip") {
    std::mt19937_64 rng(53);
    auto f = random_field(rng, 2, 3, 7, 1.0, 32);
    auto j = scalar_field_to_json(f);
    auto f2 = scalar_field_from_json(j);
    CHECK(sub(f, f2).linf() < 1e-13);

    auto A = CoefficientField::diagonal(
        {f.plus_constant(10.0), f.scaled(-1.0).plus_constant(10.0)});
    auto jm = coefficient_field_to_json(A);
    auto A2 = coefficient_field_from_json(jm);
    CHECK(sub(A.entry(0, 0), A2.entry(0, 0)).linf() < 1e-12);
    CHECK(sub(A.entry(1, 1), A2.entry(1, 1)).linf() < 1e-12);
}
