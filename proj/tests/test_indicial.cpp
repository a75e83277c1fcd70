#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "lovelock/indicial.hpp"

using namespace lovelock;

TEST_CASE("surd square roots") {
    CHECK(surd_sqrt(Rat(0)) == Surd{});
    CHECK(surd_sqrt(Rat(9)) == Surd{Rat(3), Rat(0), 0});
    CHECK(surd_sqrt(Rat(48)) == Surd{Rat(0), Rat(4), 3});
    CHECK(surd_sqrt(rat(33, 4)) == Surd{Rat(0), rat(1, 2), 33});
    CHECK(surd_sqrt(rat(9, 4)) == Surd{rat(3, 2), Rat(0), 0});
    CHECK_THROWS_AS(surd_sqrt(Rat(-1)), std::domain_error);
    CHECK(std::abs(surd_sqrt(Rat(2)).value() - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("indicial roots on functions") {
    for (int n : {3, 4, 7}) {
        auto p = roots_functions(n, Rat(0));
        CHECK(p.plus == Surd{Rat(n), Rat(0), 0});
        CHECK(p.minus == Surd{Rat(0), Rat(0), 0});
        CHECK_FALSE(p.complex_pair);
        auto dbl = roots_functions(n, -Rat(n) * n / 4);
        CHECK(dbl.plus == dbl.minus);
        CHECK(dbl.plus == Surd{rat(n, 2), Rat(0), 0});
    }
    // n = 4, c = -5: discriminant -4, complex pair 2 +/- i
    auto cx = roots_functions(4, Rat(-5));
    CHECK(cx.complex_pair);
    CHECK(cx.plus == Surd{Rat(2), Rat(1), 1});
    CHECK(cx.minus == Surd{Rat(2), Rat(-1), 1});
}

TEST_CASE("indicial roots on trace-free symmetric 2-tensors") {
    {
        auto mu = roots_sym2(4, Rat(-2));
        CHECK(mu[1].plus == Surd{Rat(2), Rat(0), 0});
        CHECK(mu[1].minus == Surd{Rat(-2), Rat(0), 0});
        CHECK(mu[3].plus == Surd{Rat(3), Rat(0), 0});
        CHECK(mu[3].minus == Surd{Rat(-3), Rat(0), 0});
    }
    {
        auto mu = roots_sym2(4, Rat(8));
        CHECK(mu[0].plus == Surd{Rat(0), Rat(2), 3});   // +2 sqrt(3)
        CHECK(mu[0].minus == Surd{Rat(0), Rat(-2), 3});  // -2 sqrt(3)
    }
    // every pair is symmetric about (n - 2r)/2 = (n-4)/2
    for (int n : {4, 5, 6})
        for (Rat c : {Rat(-3), Rat(0), rat(7, 2)})
            for (const auto& p : roots_sym2(n, c)) {
                CHECK(p.plus.a + p.minus.a == Rat(n - 4));
                CHECK(p.plus.b == -p.minus.b);
                CHECK(p.plus.d == p.minus.d);
            }
}

TEST_CASE("weight shift of the indicial polynomial") {
    // I_mu = I_0 + mu(n - mu - 2r) on weight-r families
    for (int n : {4, 5})
        for (Rat c : {Rat(-2), Rat(3)}) {
            for (const auto& p : roots_sym2(n, c))  // r = 2
                for (Rat mu : {Rat(1), Rat(-3), rat(5, 2)})
                    CHECK(indicial_poly(p, mu) ==
                          indicial_poly(p, Rat(0)) + mu * (Rat(n) - mu - 4));
            auto f = roots_functions(n, c);  // r = 0
            for (Rat mu : {Rat(2), rat(-1, 3)})
                CHECK(indicial_poly(f, mu) == indicial_poly(f, Rat(0)) + mu * (Rat(n) - mu));
        }
}

TEST_CASE("indicial radius") {
    auto r0 = indicial_radius(4, 0, Rat(0));
    REQUIRE(r0.defined);
    CHECK(r0.value == Surd{Rat(2), Rat(0), 0});
    auto r2 = indicial_radius(5, 2, Rat(0));
    REQUIRE(r2.defined);
    CHECK(r2.value == Surd{Rat(0), rat(1, 2), 33});  // sqrt(25/4 + 2)
    CHECK_FALSE(indicial_radius(4, 0, Rat(-5)).defined);   // c + R^2 = -1
    CHECK_FALSE(indicial_radius(4, 0, Rat(-4)).defined);   // boundary case excluded
}

TEST_CASE("green operator reproduces the exact power formula") {
    // n = 4, c = 5: alpha_+ = 5, alpha_- = -1
    double am = -1, ap = 5;
    auto xs = log_grid(1e-4, 10.0, 10000);
    std::vector<double> fs(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) fs[i] = std::pow(xs[i], 7);
    auto g = green_apply(GreenKind::GInfinity, xs, fs, am, ap);
    double worst = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double expect = -std::pow(xs[i], 7) / ((7.0 - ap) * (7.0 - am));
        worst = std::max(worst, std::abs(g[i] - expect) / std::abs(expect));
    }
    CHECK(worst < 1e-6);
    // G_0 differs from G_infinity by a solution of the homogeneous model
    // equation: a constant multiple of x^{alpha_+}
    auto g0 = green_apply(GreenKind::GZero, xs, fs, am, ap, xs[xs.size() / 2]);
    double r_lo = (g0[100] - g[100]) / std::pow(xs[100], ap);
    double r_hi = (g0[xs.size() - 100] - g[xs.size() - 100]) / std::pow(xs[xs.size() - 100], ap);
    CHECK(r_lo != 0.0);
    CHECK(std::abs(r_lo - r_hi) / std::abs(r_lo) < 1e-6);
}

TEST_CASE("green operator is linear and right-inverts the model operator") {
    double n = 4, c = 5, am = -1, ap = 5;
    auto xs = log_grid(1e-4, 10.0, 10000);
    std::vector<double> f1(xs.size()), f2(xs.size()), fsum(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        f1[i] = std::pow(xs[i], 6) / (1.0 + xs[i]);
        f2[i] = std::pow(xs[i], 7) * std::exp(-xs[i]);
        fsum[i] = 3.0 * f1[i] - 2.0 * f2[i];
    }
    // linearity on samples whose first entries vanish (so the extrapolated
    // below-grid tail, itself a nonlinear power fit, is identically zero)
    std::vector<double> z1 = f1, z2 = f2, zs = fsum;
    for (size_t i = 0; i < 2; ++i) z1[i] = z2[i] = zs[i] = 0.0;
    auto h1 = green_apply(GreenKind::GInfinity, xs, z1, am, ap);
    auto h2 = green_apply(GreenKind::GInfinity, xs, z2, am, ap);
    auto hs = green_apply(GreenKind::GInfinity, xs, zs, am, ap);
    double lin = 0;
    for (size_t i = 0; i < xs.size(); ++i)
        lin = std::max(lin, std::abs(hs[i] - 3.0 * h1[i] + 2.0 * h2[i]));
    CHECK(lin < 1e-9);
    auto g1 = green_apply(GreenKind::GInfinity, xs, f1, am, ap);
    auto g2 = green_apply(GreenKind::GInfinity, xs, f2, am, ap);
    // contract: M(G f) = -f to quadrature/differencing tolerance
    CHECK(green_residual(xs, f1, g1, n, c) < 1e-6);
    CHECK(green_residual(xs, f2, g2, n, c) < 1e-6);
}

TEST_CASE("G_0 on x^alpha_plus grows a logarithmic term") {
    double am = -1, ap = 5;  // n = 4, c = 5
    auto xs = log_grid(1e-3, 1.0, 4000);
    std::vector<double> fs(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) fs[i] = std::pow(xs[i], ap);
    double xprime = xs[xs.size() / 2];
    auto g = green_apply(GreenKind::GZero, xs, fs, am, ap, xprime);
    // fit g / x^ap = A + B log x on the upper half of the grid
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t i = xs.size() / 2; i + 8 < xs.size(); ++i) {
        double t = std::log(xs[i]), y = g[i] / std::pow(xs[i], ap);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++cnt;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    double expect = -1.0 / (ap - am);
    CHECK(std::abs(slope - expect) / std::abs(expect) < 1e-3);
}
