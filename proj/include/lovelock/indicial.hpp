#pragma once

// Indicial roots and radii of the Laplace-type model operators, in exact
// quadratic-surd arithmetic, plus numerically verified model Green's
// operators on log grids. This is the only floating-point corner of the
// library; everything else is exact.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rational.hpp"

namespace lovelock {

// ---------------------------------------------------------------------------
// Quadratic surds a + b sqrt(d), d squarefree.

struct Surd {
    Rat a = 0;         // rational part
    Rat b = 0;         // coefficient of sqrt(d)
    long long d = 0;   // squarefree radicand; 0 when the value is rational

    bool is_rational() const { return b == 0; }
    double value() const { return a.get_d() + b.get_d() * std::sqrt(double(d)); }
    friend bool operator==(const Surd& x, const Surd& y) {
        return x.a == y.a && x.b == y.b && x.d == y.d;
    }
    friend Surd operator+(Surd x, const Rat& r) {
        x.a += r;
        return x;
    }
    friend Surd operator*(const Rat& r, Surd x) {
        x.a *= r;
        x.b *= r;
        if (x.b == 0) x.d = 0;
        return x;
    }
    Surd operator-() const { return Rat(-1) * *this; }
};

// Exact square root of a nonnegative rational: sqrt(p/q) = sqrt(pq)/q with the
// square part of pq extracted by trial division.
inline Surd surd_sqrt(const Rat& v) {
    if (v < 0) throw std::domain_error("surd_sqrt of a negative rational");
    if (v == 0) return Surd{};
    mpz_class big = v.get_num() * v.get_den();
    if (!big.fits_slong_p()) throw std::overflow_error("surd_sqrt: radicand too large");
    long long nn = big.get_si(), outer = 1, rest = 1;
    for (long long f = 2; f * f <= nn; ++f) {
        int e = 0;
        while (nn % f == 0) {
            nn /= f;
            ++e;
        }
        for (int t = 0; t < e / 2; ++t) outer *= f;
        if (e % 2) rest *= f;
    }
    rest *= nn;  // leftover prime
    Surd s;
    if (rest == 1) {
        s.a = Rat(long(outer)) / v.get_den();
    } else {
        s.b = Rat(long(outer)) / v.get_den();
        s.d = rest;
    }
    return s;
}

// A pair of indicial roots center +/- sqrt(disc)/2. When disc < 0 the pair is
// complex: `plus`/`minus` then hold real and +/- imaginary parts separately.
struct RootPair {
    Surd plus, minus;
    bool complex_pair = false;

    static RootPair from(const Rat& center, const Rat& disc) {
        RootPair p;
        if (disc < 0) {
            p.complex_pair = true;
            Surd im = rat(1, 2) * surd_sqrt(-disc);
            Rat ib = im.is_rational() ? im.a : im.b;  // imaginary part ib sqrt(id)
            long long id = im.is_rational() ? 1 : im.d;
            p.plus = Surd{center, ib, id};
            p.minus = Surd{center, -ib, id};
            return p;
        }
        Surd rt = rat(1, 2) * surd_sqrt(disc);
        p.plus = rt + center;
        p.minus = -rt + center;
        return p;
    }
};

// ---------------------------------------------------------------------------
// Closed-form indicial roots.

// On functions (weight r = 0): xi_pm = (n +/- sqrt(n^2 + 4c))/2.
inline RootPair roots_functions(int n, const Rat& c) {
    return RootPair::from(rat(n, 2), Rat(n) * n + 4 * c);
}

// On trace-free symmetric 2-tensors (weight r = 2): the four families
// mu^(0..3)_pm = ((n-4) +/- sqrt(disc_i))/2 with
//   disc_0 = n^2 + 4c            disc_1 = n^2 + 4c + 8
//   disc_2 = n^2 + 8n + 4c + 8   disc_3 = n^2 + 4n + 4c + 12
inline std::vector<RootPair> roots_sym2(int n, const Rat& c) {
    Rat n2 = Rat(n) * n;
    Rat base = n2 + 4 * c;
    std::vector<Rat> discs{base, base + 8, base + 8 * n + 8, base + 4 * n + 12};
    std::vector<RootPair> out;
    for (const Rat& d : discs) out.push_back(RootPair::from(rat(n - 4, 2), d));
    return out;
}

// Indicial radius on weight-r trace-free tensors after a zeroth-order shift
// by c: R^2 = n^2/4 + r + c, undefined unless positive.
struct IndicialRadius {
    bool defined = false;
    Surd value;
};

inline IndicialRadius indicial_radius(int n, int r, const Rat& c) {
    Rat r2 = Rat(n) * n / 4 + r + c;
    IndicialRadius out;
    if (r2 <= 0) return out;
    out.defined = true;
    out.value = surd_sqrt(r2);
    return out;
}

// Indicial polynomial of a root pair, normalized with leading coefficient -1:
// I(mu) = -(mu - mu_plus)(mu - mu_minus) = -mu^2 + 2 center mu - product.
// The root sum and product are rational even when the roots are surds.
inline Rat indicial_poly(const RootPair& p, const Rat& mu) {
    Rat sum = p.plus.a + p.minus.a;
    Rat prod;
    if (p.complex_pair)
        prod = p.plus.a * p.minus.a + p.plus.b * p.plus.b * Rat(long(p.plus.d));
    else
        prod = p.plus.a * p.minus.a + p.plus.b * p.minus.b * Rat(long(p.plus.d));
    return -mu * mu + sum * mu - prod;
}

// ---------------------------------------------------------------------------
// Model Green's operators on log grids (floating point).
//
// Model operator M = (x d/dx)^2 - n x d/dx - c with indicial roots
// alpha_pm (roots of mu^2 - n mu - c). The Green's operators
//   G(u)(x) = 1/(ap - am) [ x^am Int_0^x t^{-am-1} u dt
//                           - x^ap Int_lower^x t^{-ap-1} u dt ],
// lower = 0 for G_infinity and lower = x' for G_0, satisfy M(G u) = -u.

enum class GreenKind { GInfinity, GZero };

namespace greendetail {

// Cumulative integral of the samples v on a uniform grid of spacing h,
// fourth-order (local cubic interpolation), F[0] = 0.
inline std::vector<double> cumulative(const std::vector<double>& v, double h) {
    int n = int(v.size());
    std::vector<double> F(v.size(), 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        double seg;
        if (i == 0 && n >= 4)
            seg = h * (9 * v[0] + 19 * v[1] - 5 * v[2] + v[3]) / 24.0;
        else if (i + 2 >= n && n >= 4)
            seg = h * (9 * v[n - 1] + 19 * v[n - 2] - 5 * v[n - 3] + v[n - 4]) / 24.0;
        else if (n >= 4)
            seg = h * (-v[i - 1] + 13 * v[i] + 13 * v[i + 1] - v[i + 2]) / 24.0;
        else
            seg = h * (v[i] + v[i + 1]) / 2.0;
        F[i + 1] = F[i] + seg;
    }
    return F;
}

// Tail of Int_0^{x0} t^{-alpha-1} u dt from a local power-law fit u ~ f0 (t/x0)^s.
inline double tail(const std::vector<double>& xs, const std::vector<double>& fs, double alpha) {
    if (xs.size() < 2 || fs[0] == 0.0 || fs[1] == 0.0 || (fs[0] > 0) != (fs[1] > 0)) return 0.0;
    double s = std::log(fs[1] / fs[0]) / std::log(xs[1] / xs[0]);
    if (s - alpha <= 1e-9) return 0.0;  // divergent or borderline: omit
    return fs[0] * std::pow(xs[0], -alpha) / (s - alpha);
}

}  // namespace greendetail

// Strictly positive log-uniform grid.
inline std::vector<double> log_grid(double x0, double x1, int npts) {
    if (x0 <= 0 || x1 <= x0 || npts < 2) throw std::invalid_argument("bad log grid");
    std::vector<double> xs(static_cast<size_t>(npts));
    double h = (std::log(x1) - std::log(x0)) / (npts - 1);
    for (int i = 0; i < npts; ++i) xs[size_t(i)] = std::exp(std::log(x0) + h * i);
    return xs;
}

// Apply the model Green's operator to samples fs of u on the log-uniform grid
// xs. For GZero, xprime is snapped to the nearest grid point.
inline std::vector<double> green_apply(GreenKind kind, const std::vector<double>& xs,
                                       const std::vector<double>& fs, double am, double ap,
                                       double xprime = 1.0) {
    if (xs.size() != fs.size() || xs.size() < 8)
        throw std::invalid_argument("green_apply: bad sample arrays");
    if (!(am < ap)) throw std::invalid_argument("green_apply: need am < ap");
    int n = int(xs.size());
    double h = std::log(xs[1] / xs[0]);
    std::vector<double> vm(static_cast<size_t>(n)), vp(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        vm[size_t(i)] = std::pow(xs[size_t(i)], -am) * fs[size_t(i)];
        vp[size_t(i)] = std::pow(xs[size_t(i)], -ap) * fs[size_t(i)];
    }
    auto Fm = greendetail::cumulative(vm, h);
    auto Fp = greendetail::cumulative(vp, h);
    double tm = greendetail::tail(xs, fs, am);
    double base_p;
    if (kind == GreenKind::GInfinity) {
        base_p = -greendetail::tail(xs, fs, ap);  // integral from 0
    } else {
        int k = 0;  // snap x' to the grid
        for (int i = 1; i < n; ++i)
            if (std::abs(std::log(xs[size_t(i)] / xprime)) <
                std::abs(std::log(xs[size_t(k)] / xprime)))
                k = i;
        base_p = Fp[size_t(k)];
    }
    std::vector<double> g(static_cast<size_t>(n));
    double inv = 1.0 / (ap - am);
    for (int i = 0; i < n; ++i)
        g[size_t(i)] = inv * (std::pow(xs[size_t(i)], am) * (tm + Fm[size_t(i)]) -
                              std::pow(xs[size_t(i)], ap) * (Fp[size_t(i)] - base_p));
    return g;
}

// Discrete model operator M = d_tau^2 - n d_tau - c in tau = log x, with
// fourth-order central differences; the first and last `margin()` points of
// the output are not valid.
inline int model_margin() { return 3; }

inline std::vector<double> model_apply(const std::vector<double>& xs,
                                       const std::vector<double>& gs, double n, double c) {
    int np = int(xs.size());
    if (np < 7 || int(gs.size()) != np) throw std::invalid_argument("model_apply: bad arrays");
    double h = std::log(xs[1] / xs[0]);
    std::vector<double> out(size_t(np), 0.0);
    for (int i = 2; i + 2 < np; ++i) {
        auto g = [&](int k) { return gs[size_t(i + k)]; };
        double d1 = (g(-2) - 8 * g(-1) + 8 * g(1) - g(2)) / (12 * h);
        double d2 = (-g(-2) + 16 * g(-1) - 30 * g(0) + 16 * g(1) - g(2)) / (12 * h * h);
        out[size_t(i)] = d2 - n * d1 - c * g(0);
    }
    return out;
}

// Relative sup-norm residual of the right-inverse contract M(G f) = -f over
// the valid interior (skipping `skip` points at each end).
inline double green_residual(const std::vector<double>& xs, const std::vector<double>& fs,
                             const std::vector<double>& gs, double n, double c, int skip = 8) {
    auto mg = model_apply(xs, gs, n, c);
    double num = 0, den = 0;
    for (int i = skip; i + skip < int(xs.size()); ++i) {
        num = std::max(num, std::abs(mg[size_t(i)] + fs[size_t(i)]));
        den = std::max(den, std::abs(fs[size_t(i)]));
    }
    return den == 0 ? num : num / den;
}

}  // namespace lovelock
