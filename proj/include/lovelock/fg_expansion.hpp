#pragma once

// Formal expansion solver for asymptotically hyperbolic Lovelock metrics in
// normal form g = x^{-2}(dx^2 + h_x), with
//   h_x = h_0 + x h_1 + x^2 h_2 + ... + x^n (h_n + h_{n,1} log x) + ...
// The coefficients are determined order by order from the condition that the
// polynomial residual x^2 F_alpha vanishes formally. At order x^n the
// trace-free part of the equation degenerates; its left-over source is the
// obstruction tensor, and (for even n) the log coefficient h_{n,1} absorbs it.
//
// Structure used throughout: changing h_s shifts the x^s coefficient of the
// residual by the pointwise linear map
//   ij-block:  a_s E + b_s h_0 tr_{h_0} E,     00-block:  c_s tr_{h_0} E,
// with universal constants a_s, b_s, c_s depending only on (n, alpha, s).
// They are measured once per order on the cheap flat collar h_0 = delta, and
// the solved residual is re-checked, so a violation cannot pass silently.

#include <array>
#include <stdexcept>
#include <vector>

#include "curvature.hpp"

namespace lovelock {

// Result of the formal solve. All tensors live on the bulk index range
// 0..n with the boundary block 1..n populated; entries are jets in the bulk
// variables with variable 0 (= x) unused.
struct FGResult {
    int n = 0;
    int order = 0;
    std::vector<Sym2<ScalarJet>> h;  // h[s] = coefficient of x^s, h[0] = h_0
    Sym2<ScalarJet> hlog;            // h_{n,1}, zero when absent
    Sym2<ScalarJet> obstruction;     // trace-free x^n residual coefficient
    bool has_log = false;            // true iff h_{n,1} != 0 was needed
};

namespace fgdetail {

// Assemble the compactified collar metric dx^2 + sum_s x^s h_s.
inline Sym2<ScalarJet> assemble(int m, const std::vector<Sym2<ScalarJet>>& h) {
    int nv = h[0].v[0].nvars(), cap = h[0].v[0].cap();
    ScalarJet x = ScalarJet::variable(nv, cap, 0);
    Sym2<ScalarJet> g(m, ScalarJet(nv, cap));
    g.at(0, 0) = ScalarJet::constant(nv, cap, 1);
    ScalarJet xs = ScalarJet::constant(nv, cap, 1);
    for (size_t s = 0; s < h.size(); ++s) {
        for (int i = 1; i < m; ++i)
            for (int j = i; j < m; ++j) g.at(i, j) = g.at(i, j) + xs * h[s].at(i, j);
        xs = xs * x;
    }
    return g;
}

// Entrywise coefficient of x^s.
inline Sym2<ScalarJet> x_coeff(const Sym2<ScalarJet>& t, int s) {
    Sym2<ScalarJet> c(t.m, ring_zero(t.v[0]));
    for (size_t i = 0; i < t.v.size(); ++i) c.v[i] = t.v[i].coeff_of_power(0, s);
    return c;
}

// Probe the universal order-s response constants on the flat collar
// h_0 = delta: returns (a_s, c_s) with c_s normalized per unit trace.
inline std::pair<Rat, Rat> probe(const CouplingVector& cv, int s) {
    int m = cv.n + 1, cap = s + 2;
    ScalarJet x = ScalarJet::variable(m, cap, 0);
    ScalarJet xs = ScalarJet::constant(m, cap, 1);
    for (int t = 0; t < s; ++t) xs = xs * x;

    auto flat_collar = [&]() {
        Sym2<ScalarJet> g(m, ScalarJet(m, cap));
        for (int i = 0; i < m; ++i) g.at(i, i) = ScalarJet::constant(m, cap, 1);
        return g;
    };
    std::vector<int> zero_exp(size_t(m), 0);

    // trace-free probe E = diag(0, 1, -1, 0, ...)
    Sym2<ScalarJet> g1 = flat_collar();
    g1.at(1, 1) = g1.at(1, 1) + xs;
    g1.at(2, 2) = g1.at(2, 2) - xs;
    auto r1 = x2_lovelock_cc(MetricJet<ScalarJet>(g1), cv, x);
    Rat a = r1.at(1, 1).coeff_of_power(0, s).coeff(zero_exp);

    // pure-trace probe E = delta (boundary block)
    Sym2<ScalarJet> g2 = flat_collar();
    for (int i = 1; i < m; ++i) g2.at(i, i) = g2.at(i, i) + xs;
    auto r2 = x2_lovelock_cc(MetricJet<ScalarJet>(g2), cv, x);
    Rat c = r2.at(0, 0).coeff_of_power(0, s).coeff(zero_exp) / cv.n;

    return {a, c};
}

// Response of the plain x^n residual coefficient to the log term
// x^n log x * diag(0, 1, -1, 0, ...), measured on the flat collar.
inline Rat probe_log(const CouplingVector& cv, int s) {
    int m = cv.n + 1, cap = s + 2;
    ScalarJet xp = ScalarJet::variable(m, cap, 0);
    ScalarJet xs = ScalarJet::constant(m, cap, 1);
    for (int t = 0; t < s; ++t) xs = xs * xp;
    ScalarJet zero(m, cap);

    Sym2<LogJet> g(m, LogJet(zero));
    for (int i = 0; i < m; ++i) g.at(i, i) = LogJet(ScalarJet::constant(m, cap, 1));
    g.at(1, 1) = g.at(1, 1) + LogJet(zero, xs, 0);
    g.at(2, 2) = g.at(2, 2) - LogJet(zero, xs, 0);
    auto r = x2_lovelock_cc(MetricJet<LogJet>(g), cv, LogJet(xp));
    std::vector<int> zero_exp(size_t(m), 0);
    return r.at(1, 1).plain().coeff_of_power(0, s).coeff(zero_exp);
}

// Boundary-block trace against the inverse of h_0 (index range 1..n).
inline ScalarJet boundary_trace(const SqMat<ScalarJet>& h0up, const Sym2<ScalarJet>& t,
                                int m) {
    ScalarJet acc = ring_zero(t.v[0]);
    for (int i = 1; i < m; ++i)
        for (int j = 1; j < m; ++j) acc = acc + h0up[i][j] * t.at(i, j);
    return acc;
}

inline Sym2<ScalarJet> truncate_sym2(const Sym2<ScalarJet>& t, int d) {
    Sym2<ScalarJet> r = t;
    for (auto& e : r.v) e = e.truncated(d < 0 ? 0 : d);
    return r;
}

}  // namespace fgdetail

// Solve the expansion through x^order (order <= n). h0 carries the boundary
// metric in its 1..n block; entries must be independent of variable 0.
inline FGResult fg_solve(const Sym2<ScalarJet>& h0, const CouplingVector& cv, int order) {
    int n = cv.n, m = n + 1;
    if (h0.m != m) throw std::invalid_argument("fg_solve: h0 must use the bulk index range");
    if (order > n) throw std::invalid_argument("fg_solve: order beyond x^n is not determined");
    int cap = h0.v[0].cap();
    ScalarJet zero = ring_zero(h0.v[0]);

    FGResult res;
    res.n = n;
    res.order = order;
    res.h.assign(1, h0);
    res.h[0].at(0, 0) = zero;  // normal form: the dx^2 part is handled separately
    for (int i = 1; i < m; ++i) res.h[0].at(0, i) = zero;
    res.hlog = Sym2<ScalarJet>(m, zero);
    res.obstruction = Sym2<ScalarJet>(m, zero);

    // inverse of h_0 on the boundary block, via the bulk extension by dx^2
    Sym2<ScalarJet> h0bulk = res.h[0];
    h0bulk.at(0, 0) = ring_one(zero);
    SqMat<ScalarJet> h0up = sym2_inverse(h0bulk);

    ScalarJet x = ScalarJet::variable(h0.v[0].nvars(), cap, 0);

    for (int s = 1; s <= order; ++s) {
        Sym2<ScalarJet> gbar = fgdetail::assemble(m, res.h);
        auto resid = x2_lovelock_cc(MetricJet<ScalarJet>(gbar), cv, x);
        Sym2<ScalarJet> C = fgdetail::x_coeff(resid, s);

        auto [a, c] = fgdetail::probe(cv, s);
        if (c == 0) throw std::runtime_error("fg_solve: degenerate trace equation");

        ScalarJet trC = fgdetail::boundary_trace(h0up, C, m);
        ScalarJet trE = (Rat(-1) / c) * C.at(0, 0);
        Sym2<ScalarJet> Ctf(m, zero), E(m, zero);
        for (int i = 1; i < m; ++i)
            for (int j = i; j < m; ++j)
                Ctf.at(i, j) = C.at(i, j) - rat(1, n) * trC * res.h[0].at(i, j);

        if (a != 0) {
            for (int i = 1; i < m; ++i)
                for (int j = i; j < m; ++j)
                    E.at(i, j) = Rat(-1) / a * Ctf.at(i, j) +
                                 rat(1, n) * trE * res.h[0].at(i, j);
        } else {
            // degenerate order: x^s sits at the indicial root (s = n)
            res.obstruction = fgdetail::truncate_sym2(Ctf, cap - 2 - s);
            bool obstructed = false;
            for (const auto& e : res.obstruction.v)
                if (!e.is_zero()) obstructed = true;
            if (obstructed) {
                if (n % 2 != 0)
                    throw std::runtime_error(
                        "fg_solve: unexpected trace-free source at an odd degenerate order");
                Rat alog = fgdetail::probe_log(cv, s);
                if (alog == 0) throw std::runtime_error("fg_solve: degenerate log response");
                for (int i = 1; i < m; ++i)
                    for (int j = i; j < m; ++j)
                        res.hlog.at(i, j) = Rat(-1) / alog * res.obstruction.at(i, j);
                res.has_log = true;
            }
            // trace-free part of h_n is formally free; the canonical choice is 0
            for (int i = 1; i < m; ++i)
                for (int j = i; j < m; ++j)
                    E.at(i, j) = rat(1, n) * trE * res.h[0].at(i, j);
        }
        res.h.push_back(fgdetail::truncate_sym2(E, cap - 2 - s));
    }
    return res;
}

// Residual of a solved expansion in the plain polynomial ring (the log term
// is excluded): returns, per block, the lowest x-order with a surviving
// coefficient, or `through+1` if all orders <= through vanish. Blocks:
// [0] = 00, [1] = 0i, [2] = ij.
inline std::array<int, 3> fg_residual_orders(const FGResult& res, const CouplingVector& cv,
                                             int through) {
    int m = res.n + 1;
    Sym2<ScalarJet> gbar = fgdetail::assemble(m, res.h);
    int cap = gbar.v[0].cap();
    ScalarJet x = ScalarJet::variable(gbar.v[0].nvars(), cap, 0);
    auto resid = x2_lovelock_cc(MetricJet<ScalarJet>(gbar), cv, x);
    std::array<int, 3> ord{through + 1, through + 1, through + 1};
    auto note = [&](int block, const ScalarJet& e, int s) {
        if (!e.is_zero() && s < ord[block]) ord[block] = s;
    };
    for (int s = 0; s <= through; ++s) {
        auto C = fgdetail::x_coeff(resid, s);
        auto Ct = fgdetail::truncate_sym2(C, cap - 2 - s);
        note(0, Ct.at(0, 0), s);
        for (int i = 1; i < m; ++i) note(1, Ct.at(0, i), s);
        for (int i = 1; i < m; ++i)
            for (int j = i; j < m; ++j) note(2, Ct.at(i, j), s);
    }
    return ord;
}

// Full verification in the log ring: assemble h plus x^n log x h_{n,1} and
// check that every residual coefficient through x^n vanishes (within the jet
// truncation). Returns the first failing order, or -1 on success.
inline int fg_verify_log(const FGResult& res, const CouplingVector& cv) {
    int n = res.n, m = n + 1;
    int nv = res.h[0].v[0].nvars(), cap = res.h[0].v[0].cap();
    ScalarJet zero(nv, cap);
    ScalarJet xp = ScalarJet::variable(nv, cap, 0);
    ScalarJet xn = ScalarJet::constant(nv, cap, 1);
    for (int t = 0; t < n; ++t) xn = xn * xp;

    Sym2<ScalarJet> plain = fgdetail::assemble(m, res.h);
    Sym2<LogJet> g(m, LogJet(zero));
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j)
            g.at(i, j) = LogJet(plain.at(i, j), xn * res.hlog.at(i, j), 0);
    auto resid = x2_lovelock_cc(MetricJet<LogJet>(g), cv, LogJet(xp));
    for (int s = 0; s <= n; ++s)
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                int valid = cap - 2 - s;
                ScalarJet p = resid.at(i, j).plain().coeff_of_power(0, s);
                ScalarJet l = resid.at(i, j).logpart().coeff_of_power(0, s);
                if (!p.truncated(valid < 0 ? 0 : valid).is_zero() ||
                    !l.truncated(valid < 0 ? 0 : valid).is_zero())
                    return s;
            }
    return -1;
}

// Schouten tensor of a boundary metric presented on the bulk index range
// (block 1..n, entries independent of variable 0): P = (Ric - scal/(2(n-1)) h)/(n-2).
inline Sym2<ScalarJet> boundary_schouten(const Sym2<ScalarJet>& h0, int n) {
    int m = n + 1;
    ScalarJet zero = ring_zero(h0.v[0]);
    // curvature of the product collar dx^2 + h_0 restricts to that of h_0
    Sym2<ScalarJet> bulk = h0;
    bulk.at(0, 0) = ring_one(zero);
    for (int i = 1; i < m; ++i) bulk.at(0, i) = zero;
    MetricJet<ScalarJet> g(bulk);
    auto rm = riemann(g);
    auto ric = form_to_sym2(ricci_2q_from_rm(rm, g.up, 1));
    ScalarJet scal = scal_2q_from_rm(rm, g.up, 1);
    Sym2<ScalarJet> p(m, zero);
    for (int i = 1; i < m; ++i)
        for (int j = i; j < m; ++j)
            p.at(i, j) = rat(1, n - 2) *
                         (ric.at(i, j) - rat(1, 2 * (n - 1)) * scal * h0.at(i, j));
    return p;
}

}  // namespace lovelock
