#pragma once

// Jet-valued tensors and metrics over a generic scalar ring R, plus the
// Levi-Civita plumbing: metric inversion, Christoffel symbols, covariant
// derivatives of scalars / one-forms / symmetric 2-tensors.

#include <vector>

#include "doubleform.hpp"
#include "jets.hpp"

namespace lovelock {

template <class R>
using SqMat = std::vector<std::vector<R>>;

// Symmetric 2-tensor with entries in R.
template <class R>
struct Sym2 {
    int m = 0;
    std::vector<R> v;  // i <= j, row-major upper triangle

    Sym2() = default;
    Sym2(int m_, const R& proto) : m(m_), v(size_t(m_) * (m_ + 1) / 2, ring_zero(proto)) {}

    static size_t idx(int m, int i, int j) {
        if (i > j) std::swap(i, j);
        return size_t(i) * m - size_t(i) * (i - 1) / 2 + (j - i);
    }
    R& at(int i, int j) { return v[idx(m, i, j)]; }
    const R& at(int i, int j) const { return v[idx(m, i, j)]; }

    bool is_zero() const {
        for (auto& e : v)
            if (!ring_is_zero(e)) return false;
        return true;
    }
    friend Sym2 operator+(Sym2 a, const Sym2& b) {
        for (size_t i = 0; i < a.v.size(); ++i) a.v[i] = a.v[i] + b.v[i];
        return a;
    }
    friend Sym2 operator-(Sym2 a, const Sym2& b) {
        for (size_t i = 0; i < a.v.size(); ++i) a.v[i] = a.v[i] - b.v[i];
        return a;
    }
    Sym2 operator-() const {
        Sym2 r = *this;
        for (auto& e : r.v) e = -e;
        return r;
    }
    template <class S>
    friend Sym2 operator*(const S& s, Sym2 a) {
        for (auto& e : a.v) e = e * s;
        return a;
    }
    friend bool operator==(const Sym2& a, const Sym2& b) {
        for (size_t i = 0; i < a.v.size(); ++i)
            if (!ring_is_zero(a.v[i] - b.v[i])) return false;
        return true;
    }
};

// Gauss-Jordan inverse of a symmetric matrix over R. Requires all pivots
// invertible in order (holds when the base value is positive definite).
template <class R>
SqMat<R> sym2_inverse(const Sym2<R>& s) {
    int m = s.m;
    R zero = ring_zero(s.v[0]), one = ring_one(s.v[0]);
    SqMat<R> a(m, std::vector<R>(m, zero)), inv(m, std::vector<R>(m, zero));
    for (int i = 0; i < m; ++i) {
        inv[i][i] = one;
        for (int j = 0; j < m; ++j) a[i][j] = s.at(i, j);
    }
    for (int col = 0; col < m; ++col) {
        R piv = ring_inv(a[col][col]);  // throws if not invertible
        for (int j = 0; j < m; ++j) {
            a[col][j] = a[col][j] * piv;
            inv[col][j] = inv[col][j] * piv;
        }
        for (int r = 0; r < m; ++r) {
            if (r == col || ring_is_zero(a[r][col])) continue;
            R f = a[r][col];
            for (int j = 0; j < m; ++j) {
                a[r][j] = a[r][j] - f * a[col][j];
                inv[r][j] = inv[r][j] - f * inv[col][j];
            }
        }
    }
    return inv;
}

// Metric jet: symmetric entries plus the cached inverse.
template <class R>
struct MetricJet {
    int m = 0;
    Sym2<R> lo;
    SqMat<R> up;

    MetricJet() = default;
    explicit MetricJet(Sym2<R> g) : m(g.m), lo(std::move(g)), up(sym2_inverse(lo)) {}

    static MetricJet identity(int m, const R& proto) {
        Sym2<R> g(m, proto);
        for (int i = 0; i < m; ++i) g.at(i, i) = ring_one(proto);
        return MetricJet(std::move(g));
    }
};

template <class R>
DoubleForm<R> sym2_to_form(const Sym2<R>& s) {
    DoubleForm<R> f(s.m, 1, 1, ring_zero(s.v[0]));
    for (int i = 0; i < s.m; ++i)
        for (int j = 0; j < s.m; ++j) f.at(1 << i, 1 << j) = s.at(i, j);
    return f;
}

template <class R>
Sym2<R> form_to_sym2(const DoubleForm<R>& f) {
    Sym2<R> s(f.m(), f.proto());
    for (int i = 0; i < f.m(); ++i)
        for (int j = i; j < f.m(); ++j) s.at(i, j) = f.at(1 << i, 1 << j);
    return s;
}

// First-kind Christoffel symbols [ij,l] = (d_i g_jl + d_j g_il - d_l g_ij)/2,
// returned as one Sym2 per lower index l. Costs only differentiations.
template <class R>
std::vector<Sym2<R>> christoffel_first(const MetricJet<R>& g) {
    int m = g.m;
    R zero = ring_zero(g.lo.v[0]);
    std::vector<Sym2<R>> first(m, Sym2<R>(m, zero));
    for (int l = 0; l < m; ++l)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j)
                first[l].at(i, j) = ring_scale(ring_diff(g.lo.at(j, l), i) +
                                                   ring_diff(g.lo.at(i, l), j) -
                                                   ring_diff(g.lo.at(i, j), l),
                                               rat(1, 2));
    return first;
}

// Christoffel symbols Gamma^k_{ij}, returned as one Sym2 per upper index k.
template <class R>
std::vector<Sym2<R>> christoffel(const MetricJet<R>& g, const std::vector<Sym2<R>>& first) {
    int m = g.m;
    R zero = ring_zero(g.lo.v[0]);
    std::vector<Sym2<R>> gam(m, Sym2<R>(m, zero));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                R acc = zero;
                for (int l = 0; l < m; ++l) acc = acc + g.up[k][l] * first[l].at(i, j);
                gam[k].at(i, j) = acc;
            }
    return gam;
}

template <class R>
std::vector<Sym2<R>> christoffel(const MetricJet<R>& g) {
    return christoffel(g, christoffel_first(g));
}

// nabla_k f  (trivial), nabla Hess f = dd f - Gamma^l df_l
template <class R>
Sym2<R> hessian(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam, const R& f) {
    Sym2<R> h(g.m, ring_zero(f));
    for (int i = 0; i < g.m; ++i)
        for (int j = i; j < g.m; ++j) {
            R acc = ring_diff(ring_diff(f, i), j);
            for (int l = 0; l < g.m; ++l) acc = acc - gam[l].at(i, j) * ring_diff(f, l);
            h.at(i, j) = acc;
        }
    return h;
}

// Covariant derivative of a one-form: (nabla_i w)_j.
template <class R>
SqMat<R> covd_oneform(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam,
                      const std::vector<R>& w) {
    int m = g.m;
    SqMat<R> d(m, std::vector<R>(m, ring_zero(w[0])));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            R acc = ring_diff(w[j], i);
            for (int l = 0; l < m; ++l) acc = acc - gam[l].at(i, j) * w[l];
            d[i][j] = acc;
        }
    return d;
}

// Covariant derivative of a symmetric 2-tensor: result[k] = (nabla_k t)_{ij}.
template <class R>
std::vector<Sym2<R>> covd_sym2(const MetricJet<R>& g, const std::vector<Sym2<R>>& gam,
                               const Sym2<R>& t) {
    int m = g.m;
    std::vector<Sym2<R>> d(m, Sym2<R>(m, ring_zero(t.v[0])));
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                R acc = ring_diff(t.at(i, j), k);
                for (int l = 0; l < m; ++l)
                    acc = acc - gam[l].at(k, i) * t.at(l, j) - gam[l].at(k, j) * t.at(i, l);
                d[k].at(i, j) = acc;
            }
    return d;
}

}  // namespace lovelock
