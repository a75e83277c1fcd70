#pragma once

// Formal solver for the singular Yamabe-(2q) problem on product collars
// gbar = dx^2 + h(y): find u = x + u_2 x^2 + ... + u_{n+1} x^{n+1}
// (+ L x^{n+2} log x) so that g = u^{-2} gbar has constant scalar-(2q)
// curvature combination sum_q beta_q scal^(2q)(g) = sum_q beta_q (n+1) lambda^(2q).
// The order-s update divides by the recurrence factor proportional to
// (s - (n+1)) Btilde_{1,2}(beta, kappa); at s = n+1 the factor vanishes and the
// residual is absorbed by the logarithmic coefficient L instead.

#include <stdexcept>
#include <vector>

#include "curvature.hpp"

namespace lovelock {

// Btilde_{1,2}(beta, kappa) = sum_q beta_q (-kappa/2)^(q-1) (n-1)!/2 (2q)! q/(n-2q+1)!
inline Rat b_tilde(const CouplingVector& cv) {
    Rat s = 0;
    for (int q = 1; q <= cv.qmax(); ++q)
        s += cv.a(q) * rat_pow(-cv.kappa / 2, q - 1) * rat_factorial(cv.n - 1) / 2 *
             rat_factorial(2 * q) * q / rat_factorial(cv.n - 2 * q + 1);
    return s;
}

// Residual of the singular Yamabe-(2q) equation for the candidate defining
// function u: sum_q beta_q (scal^(2q)(u^{-2} gbar) - (n+1) lambda^(2q)), an
// exact polynomial (or log-polynomial) jet via the mixed curvature operator.
template <class R>
R yamabe_residual(const MetricJet<R>& gbar, const CouplingVector& cv, const R& u) {
    if (gbar.m != cv.n + 1) throw std::invalid_argument("bulk dimension must be n+1");
    auto tmix = cc_curvature_mixed(gbar, u);
    R out = ring_zero(u);
    for (int q = 1; q <= cv.qmax(); ++q) {
        if (cv.a(q) == 0) continue;
        R s = scal_2q_from_mixed(tmix, q);
        out = out + ring_scale(s - ring_scale(ring_one(u), Rat(cv.n + 1) * cv.lambda2q(q, 1)),
                               cv.a(q));
    }
    return out;
}

// Product collar dx^2 + h(y): h lives on the bulk index set with row 0 unused.
template <class R>
MetricJet<R> product_collar(const Sym2<R>& h) {
    Sym2<R> g = h;
    g.at(0, 0) = ring_one(h.v[0]);
    for (int i = 1; i < h.m; ++i) g.at(0, i) = ring_zero(h.v[0]);
    return MetricJet<R>(std::move(g));
}

struct YamabeResult {
    int n = 0;
    std::vector<ScalarJet> u;  // u[k] multiplies x^k, 1 <= k <= n+1; u[1] = 1
    ScalarJet ujet;            // assembled polynomial part sum u_k x^k
    ScalarJet log_coeff;       // L, the coefficient of x^{n+2} log x
    bool has_log = false;
    int residual_order = -1;   // measured order of the plain residual
};

namespace yamdetail {

// Linear factor of the order-s residual coefficient with respect to the
// Taylor coefficient u_{s+1}. The dependence on s and the coupling is the
// calibrated (probed on flat collars, then frozen) multiple of the
// recurrence display constant n (s-(n+1)) Btilde_{1,2}:
//   factor_s = 2 (s+1) n (s-(n+1)) Btilde_{1,2}(beta, kappa).
inline Rat solve_factor(const CouplingVector& cv, int s) {
    return Rat(2) * (s + 1) * cv.n * (s - (cv.n + 1)) * b_tilde(cv);
}

// Empirical probe of the same factor on the flat collar, by exact dual
// linearization of the residual in the direction x^{s+1}.
inline Rat probe_factor(const CouplingVector& cv, int s) {
    int m = cv.n + 1, cap = s + 2;
    using D = Dual<ScalarJet>;
    ScalarJet x = ScalarJet::variable(m, cap, 0);
    ScalarJet probe = x;
    for (int t = 0; t < s; ++t) probe = probe * x;  // x^{s+1}
    ScalarJet zero(m, cap);
    Sym2<D> glo(m, D{zero, zero});
    for (int i = 0; i < m; ++i) glo.at(i, i) = D{ScalarJet::constant(m, cap, 1), zero};
    D r = yamabe_residual(MetricJet<D>(glo), cv, D{x, probe});
    return r.b.coeff_of_power(0, s).coeff(std::vector<int>(size_t(m), 0));
}

// Linear factor of the plain x^{n+1} residual coefficient with respect to the
// coefficient L of x^{n+2} log x, probed on the flat collar (where u = x is
// exact, so the readout is exactly linear below order 2(n+1)).
inline Rat probe_log_factor(const CouplingVector& cv) {
    int n = cv.n, m = n + 1, cap = n + 3;
    ScalarJet xp = ScalarJet::variable(m, cap, 0);
    ScalarJet xn2 = ScalarJet::constant(m, cap, 1);
    for (int t = 0; t < n + 2; ++t) xn2 = xn2 * xp;
    ScalarJet zero(m, cap);
    Sym2<LogJet> glo(m, LogJet(zero));
    for (int i = 0; i < m; ++i) glo.at(i, i) = LogJet(ScalarJet::constant(m, cap, 1));
    LogJet u(xp, xn2, 0);
    LogJet r = yamabe_residual(MetricJet<LogJet>(glo), cv, u);
    return r.plain().coeff_of_power(0, n + 1).coeff(std::vector<int>(size_t(m), 0));
}

}  // namespace yamdetail

inline YamabeResult yamabe_solve(const Sym2<ScalarJet>& h, const CouplingVector& cv) {
    int n = cv.n, m = n + 1;
    if (h.m != m) throw std::invalid_argument("collar metric must live in n+1 variables");
    if (cv.kappa != 1) throw std::invalid_argument("product collars require kappa = 1");
    if (b_tilde(cv) == 0) throw std::domain_error("solver gate: Btilde_{1,2} vanishes");
    int cap = h.v.back().cap();
    auto gbar = product_collar(h);

    YamabeResult res;
    res.n = n;
    res.u.assign(size_t(n) + 2, ScalarJet(m, cap));
    res.u[1] = ScalarJet::constant(m, cap, 1);
    ScalarJet ujet = ScalarJet::variable(m, cap, 0);
    for (int s = 1; s <= n; ++s) {
        ScalarJet resid = yamabe_residual(gbar, cv, ujet);
        int valid = cap - 2 - s;
        ScalarJet c = resid.coeff_of_power(0, s).truncated(valid < 0 ? 0 : valid);
        if (c.is_zero()) continue;
        ScalarJet us = ring_scale(c, Rat(-1) / yamdetail::solve_factor(cv, s));
        res.u[size_t(s) + 1] = us;
        ujet = ujet + us.mul_monomial(0, s + 1);
    }
    res.ujet = ujet;

    ScalarJet resid = yamabe_residual(gbar, cv, ujet);
    res.residual_order = resid.is_zero() ? cap + 1 : -1;
    for (int s = 0; res.residual_order == -1 && s <= cap; ++s) {
        int valid = cap - 2 - s;
        if (!resid.coeff_of_power(0, s).truncated(valid < 0 ? 0 : valid).is_zero())
            res.residual_order = s;
    }

    int lv = cap - 2 - (n + 1);
    ScalarJet c = resid.coeff_of_power(0, n + 1).truncated(lv < 0 ? 0 : lv);
    res.log_coeff = ScalarJet(m, cap);
    if (!c.is_zero()) {
        Rat flog = yamdetail::probe_log_factor(cv);
        if (flog == 0) throw std::runtime_error("log factor calibration returned zero");
        res.log_coeff = ring_scale(c, Rat(-1) / flog);
        res.has_log = true;
    }
    return res;
}

// Re-evaluate the residual in the log ring with the x^{n+2} log x term
// included and return the first order s <= n+1 at which either the plain or
// the log part fails to vanish within its valid degree window, or -1.
inline int yamabe_verify_log(const Sym2<ScalarJet>& h, const CouplingVector& cv,
                             const YamabeResult& res) {
    int n = cv.n, m = n + 1, cap = h.v.back().cap();
    ScalarJet zero(m, cap);
    Sym2<LogJet> glo(m, LogJet(zero));
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) glo.at(i, j) = LogJet(product_collar(h).lo.at(i, j));
    LogJet u(res.ujet, res.log_coeff.mul_monomial(0, n + 2), 0);
    LogJet resid = yamabe_residual(MetricJet<LogJet>(glo), cv, u);
    for (int s = 0; s <= n + 1; ++s) {
        int valid = cap - 2 - s;
        if (valid < 0) valid = 0;
        if (!resid.plain().coeff_of_power(0, s).truncated(valid).is_zero()) return s;
        if (!resid.logpart().coeff_of_power(0, s).truncated(valid).is_zero()) return s;
        if (!resid.logpart2().coeff_of_power(0, s).truncated(valid).is_zero()) return s;
    }
    return -1;
}

// Constant conformal rescaling h -> Omega^2 h of the collar: the log
// coefficient must transform with the exact weight Omega^{-n-1}. Returns true
// when both solves agree within the valid degree window.
inline bool yamabe_conformal_check(const Sym2<ScalarJet>& h, const CouplingVector& cv,
                                   const Rat& omega) {
    if (omega <= 0) throw std::invalid_argument("conformal factor must be positive");
    auto r1 = yamabe_solve(h, cv);
    Sym2<ScalarJet> hs = h;
    for (auto& e : hs.v) e = ring_scale(e, omega * omega);
    auto r2 = yamabe_solve(hs, cv);
    int cap = h.v.back().cap();
    int valid = cap - 2 - (cv.n + 1);
    if (valid < 0) valid = 0;
    ScalarJet expect = ring_scale(r1.log_coeff, Rat(1) / rat_pow(omega, cv.n + 1));
    return (r2.log_coeff - expect).truncated(valid).is_zero();
}

}  // namespace lovelock
